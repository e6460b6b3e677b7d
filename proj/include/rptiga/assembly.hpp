#pragma once

// Discrete strain operators and global matrices of the refined plate model:
// four unknowns (u0, v0, wb, ws) per control point.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rptiga/error.hpp"
#include "rptiga/fgm.hpp"
#include "rptiga/nurbs.hpp"
#include "rptiga/quadrature.hpp"

namespace rptiga {

inline constexpr int kDofsPerPoint = 4;
enum Dof : int { U0 = 0, V0 = 1, WB = 2, WS = 3 };

enum class EdgeCondition { Simply, Clamped, Free };

/// Parametric edges, in the fixed order used by PlateModel::edges.
enum class Edge { XMin = 0, XMax = 1, YMin = 2, YMax = 3 };

using EdgeConditions = std::array<EdgeCondition, 4>;

inline EdgeCondition edge_condition_from_char(char c) {
    switch (c) {
        case 'S': case 's': return EdgeCondition::Simply;
        case 'C': case 'c': return EdgeCondition::Clamped;
        case 'F': case 'f': return EdgeCondition::Free;
    }
    throw ConfigError(std::string("unknown edge condition '") + c + "'");
}

inline char to_char(EdgeCondition c) {
    switch (c) {
        case EdgeCondition::Simply: return 'S';
        case EdgeCondition::Clamped: return 'C';
        case EdgeCondition::Free: return 'F';
    }
    return '?';
}

/// Four-letter code read counterclockwise from x=min: (x=min, y=min, x=max, y=max). "SFSF" supports the x edges.
inline EdgeConditions edge_conditions_from_code(const std::string& code) {
    if (code.size() != 4) throw ConfigError("boundary code must have four letters, got '" + code + "'");
    EdgeConditions e;
    e[static_cast<int>(Edge::XMin)] = edge_condition_from_char(code[0]);
    e[static_cast<int>(Edge::YMin)] = edge_condition_from_char(code[1]);
    e[static_cast<int>(Edge::XMax)] = edge_condition_from_char(code[2]);
    e[static_cast<int>(Edge::YMax)] = edge_condition_from_char(code[3]);
    return e;
}

inline std::string to_code(const EdgeConditions& e) {
    return {to_char(e[0]), to_char(e[2]), to_char(e[1]), to_char(e[3])};
}

/// Per-edge list; unlisted edges are free, repeated edges must agree.
inline EdgeConditions edge_conditions_from_list(const std::vector<std::pair<Edge, EdgeCondition>>& list) {
    EdgeConditions e;
    e.fill(EdgeCondition::Free);
    std::array<bool, 4> seen{};
    for (const auto& [edge, cond] : list) {
        const int k = static_cast<int>(edge);
        if (seen[k] && e[k] != cond) throw ConfigError("conflicting boundary conditions on one edge");
        seen[k] = true;
        e[k] = cond;
    }
    return e;
}

struct Load {
    enum class Kind { Sinusoidal, Uniform };
    Kind kind = Kind::Uniform;
    double q0 = 1.0;  // Pa
};

struct PlateModel {
    Patch patch;
    FGMSpec material;
    ShearModel shear_model = ShearModel::InverseTan1;
    SectionConstants section;
    EdgeConditions edges{EdgeCondition::Simply, EdgeCondition::Simply, EdgeCondition::Simply, EdgeCondition::Simply};
    std::optional<Load> load;
    /// Reference in-plane membrane force (N/m), tensile positive.
    std::optional<Eigen::Matrix2d> prestress;

    PlateModel(Patch p, FGMSpec spec, ShearModel model, double thickness)
        : patch(std::move(p)), material(spec), shear_model(model),
          section(section_constants(spec, model, thickness)) {}

    double thickness() const { return section.h; }
    int num_dofs() const { return kDofsPerPoint * patch.num_control_points(); }

    /// Bounding box of the control net: (min, max).
    std::pair<Eigen::Vector2d, Eigen::Vector2d> extent() const {
        Eigen::Vector2d lo = patch.net().point(0), hi = lo;
        for (const auto& pt : patch.net().points()) {
            lo = lo.cwiseMin(pt);
            hi = hi.cwiseMax(pt);
        }
        return {lo, hi};
    }

    double load_at(const Eigen::Vector2d& x) const {
        if (!load) return 0.0;
        if (load->kind == Load::Kind::Uniform) return load->q0;
        const auto [lo, hi] = extent();
        const double pi = std::numbers::pi;
        return load->q0 * std::sin(pi * (x.x() - lo.x()) / (hi.x() - lo.x())) *
               std::sin(pi * (x.y() - lo.y()) / (hi.y() - lo.y()));
    }
};

/// Strain operators evaluated at one point; columns follow the element DOF order 4*k + {u0, v0, wb, ws}.
struct StrainOperators {
    Eigen::MatrixXd Bm;   // 3 x 4N membrane
    Eigen::MatrixXd Bb1;  // 3 x 4N bending curvature of wb
    Eigen::MatrixXd Bb2;  // 3 x 4N curvature of ws
    Eigen::MatrixXd Bs;   // 2 x 4N transverse shear
    Eigen::MatrixXd Bg;   // 2 x 4N gradient of w = wb + ws
};

inline StrainOperators strain_operators(const BasisLocal& basis) {
    const int count = static_cast<int>(basis.indices.size());
    const int cols = kDofsPerPoint * count;
    StrainOperators op;
    op.Bm = Eigen::MatrixXd::Zero(3, cols);
    op.Bb1 = Eigen::MatrixXd::Zero(3, cols);
    op.Bb2 = Eigen::MatrixXd::Zero(3, cols);
    op.Bs = Eigen::MatrixXd::Zero(2, cols);
    op.Bg = Eigen::MatrixXd::Zero(2, cols);
    for (int k = 0; k < count; ++k) {
        const double rx = basis.dRdx(k, 0), ry = basis.dRdx(k, 1);
        const double rxx = basis.d2Rdx2(k, 0), ryy = basis.d2Rdx2(k, 1), rxy = basis.d2Rdx2(k, 2);
        const int c = kDofsPerPoint * k;
        op.Bm(0, c + U0) = rx;
        op.Bm(1, c + V0) = ry;
        op.Bm(2, c + U0) = ry;
        op.Bm(2, c + V0) = rx;
        op.Bb1(0, c + WB) = -rxx;
        op.Bb1(1, c + WB) = -ryy;
        op.Bb1(2, c + WB) = -2.0 * rxy;
        op.Bb2(0, c + WS) = rxx;
        op.Bb2(1, c + WS) = ryy;
        op.Bb2(2, c + WS) = 2.0 * rxy;
        op.Bs(0, c + WS) = rx;
        op.Bs(1, c + WS) = ry;
        op.Bg(0, c + WB) = rx;
        op.Bg(0, c + WS) = rx;
        op.Bg(1, c + WB) = ry;
        op.Bg(1, c + WS) = ry;
    }
    return op;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

struct AssemblyRequest {
    bool stiffness = true;
    bool mass = false;
    bool geometric = false;
    bool load = false;
};

struct GlobalSystem {
    SparseMatrix K;
    SparseMatrix M;
    SparseMatrix Kg;
    Eigen::VectorXd F;
    std::vector<int> fixed_dofs;  // sorted, unique
    int num_dofs = 0;

    bool has_stiffness() const { return K.rows() == num_dofs && num_dofs > 0; }
    bool has_mass() const { return M.rows() == num_dofs && num_dofs > 0; }
    bool has_geometric() const { return Kg.rows() == num_dofs && num_dofs > 0; }
    bool has_load() const { return F.size() == num_dofs && num_dofs > 0; }

    std::vector<int> free_dofs() const {
        std::vector<int> free;
        free.reserve(num_dofs - fixed_dofs.size());
        auto it = fixed_dofs.begin();
        for (int d = 0; d < num_dofs; ++d) {
            if (it != fixed_dofs.end() && *it == d) {
                ++it;
                continue;
            }
            free.push_back(d);
        }
        return free;
    }
};

/// Nonempty knot spans of one direction as (lower, upper) pairs.
inline std::vector<std::pair<double, double>> element_spans(const KnotVector& kv) {
    const auto b = kv.breaks();
    std::vector<std::pair<double, double>> spans;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) spans.emplace_back(b[i], b[i + 1]);
    return spans;
}

/// Calls visit(basis, weight) at every Gauss point of the patch; weight includes det J.
template <class Visit>
void for_each_quadrature_point(const Patch& patch, int points_u, int points_v, Visit&& visit) {
    const GaussRule gu = gauss_legendre(points_u);
    const GaussRule gv = gauss_legendre(points_v);
    for (const auto& [v0, v1] : element_spans(patch.knot_v())) {
        for (const auto& [u0, u1] : element_spans(patch.knot_u())) {
            for (int b = 0; b < points_v; ++b) {
                const double eta = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * gv.points[b];
                for (int a = 0; a < points_u; ++a) {
                    const double xi = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gu.points[a];
                    const BasisLocal basis = physical_derivs(patch, xi, eta);
                    const double w = gu.weights[a] * gv.weights[b] * 0.25 * (u1 - u0) * (v1 - v0) *
                                     std::abs(basis.jacobian_det);
                    visit(basis, w);
                }
            }
        }
    }
}

/// Global K, M, Kg and F over a full (p+1)x(q+1) Gauss rule.
inline GlobalSystem assemble(const PlateModel& model, const AssemblyRequest& want, int extra_gauss_points = 0) {
    if (want.geometric && !model.prestress)
        throw ConfigError("assemble: geometric stiffness requested without an in-plane prestress");
    if (want.load && !model.load) throw ConfigError("assemble: load vector requested without a load");
    const auto& sc = model.section;
    if (!sc.bending_block().allFinite() || !sc.Ds.allFinite() || !sc.inertia_block().allFinite())
        throw ConfigError("assemble: section constants are not finite");

    const int ndof = model.num_dofs();
    const Eigen::Matrix<double, 9, 9> Db = sc.bending_block();
    Eigen::Matrix<double, 9, 9> mass_block = Eigen::Matrix<double, 9, 9>::Zero();
    for (int r = 0; r < 3; ++r) mass_block.block<3, 3>(3 * r, 3 * r) = sc.inertia_block();
    const Eigen::Matrix2d N0 = model.prestress.value_or(Eigen::Matrix2d::Zero());

    std::vector<Eigen::Triplet<double>> tk, tm, tg;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(want.load ? ndof : 0);

    const Patch& patch = model.patch;
    const int nloc = patch.functions_per_element() * kDofsPerPoint;
    Eigen::MatrixXd Ke(nloc, nloc), Me(nloc, nloc), Ge(nloc, nloc);
    std::vector<int> dofs(nloc);

    auto scatter = [&](std::vector<Eigen::Triplet<double>>& out, Eigen::MatrixXd& e) {
        const Eigen::MatrixXd sym = 0.5 * (e + e.transpose());
        for (int i = 0; i < nloc; ++i)
            for (int j = 0; j < nloc; ++j)
                if (sym(i, j) != 0.0) out.emplace_back(dofs[i], dofs[j], sym(i, j));
    };

    const int pu = patch.degree_u() + 1 + extra_gauss_points;
    const int pv = patch.degree_v() + 1 + extra_gauss_points;
    const int per_element = pu * pv;
    int counter = 0;
    Ke.setZero();
    Me.setZero();
    Ge.setZero();

    for_each_quadrature_point(patch, pu, pv, [&](const BasisLocal& basis, double w) {
        const int count = static_cast<int>(basis.indices.size());
        for (int k = 0; k < count; ++k)
            for (int c = 0; c < kDofsPerPoint; ++c) dofs[kDofsPerPoint * k + c] = kDofsPerPoint * basis.indices[k] + c;

        const StrainOperators op = strain_operators(basis);
        if (want.stiffness) {
            Eigen::MatrixXd B(9, nloc);
            B << op.Bm, op.Bb1, op.Bb2;
            Ke.noalias() += w * (B.transpose() * (Db * B));
            Ke.noalias() += w * (op.Bs.transpose() * (sc.Ds * op.Bs));
        }
        if (want.mass) {
            Eigen::MatrixXd Rt = Eigen::MatrixXd::Zero(9, nloc);
            for (int k = 0; k < count; ++k) {
                const int c = kDofsPerPoint * k;
                const double R = basis.R(k), rx = basis.dRdx(k, 0), ry = basis.dRdx(k, 1);
                Rt(0, c + U0) = R;
                Rt(1, c + WB) = -rx;
                Rt(2, c + WS) = rx;
                Rt(3, c + V0) = R;
                Rt(4, c + WB) = -ry;
                Rt(5, c + WS) = ry;
                Rt(6, c + WB) = R;
                Rt(6, c + WS) = R;
            }
            Me.noalias() += w * (Rt.transpose() * (mass_block * Rt));
        }
        if (want.geometric) {
            // eigen-form sign: K q = lambda Kg q buckles under the reference prestress
            Ge.noalias() -= w * (op.Bg.transpose() * (N0 * op.Bg));
        }
        if (want.load) {
            const double q = model.load_at(basis.point);
            for (int k = 0; k < count; ++k) {
                F(kDofsPerPoint * basis.indices[k] + WB) += w * q * basis.R(k);
                F(kDofsPerPoint * basis.indices[k] + WS) += w * q * basis.R(k);
            }
        }
        if (++counter == per_element) {
            if (want.stiffness) scatter(tk, Ke);
            if (want.mass) scatter(tm, Me);
            if (want.geometric) scatter(tg, Ge);
            Ke.setZero();
            Me.setZero();
            Ge.setZero();
            counter = 0;
        }
    });

    GlobalSystem sys;
    sys.num_dofs = ndof;
    auto build = [ndof](SparseMatrix& out, const std::vector<Eigen::Triplet<double>>& t) {
        out.resize(ndof, ndof);
        out.setFromTriplets(t.begin(), t.end());
    };
    if (want.stiffness) build(sys.K, tk);
    if (want.mass) build(sys.M, tm);
    if (want.geometric) build(sys.Kg, tg);
    if (want.load) sys.F = std::move(F);
    return sys;
}

/// DOFs fixed by the edge conditions. Clamped edges also fix wb, ws on the adjacent control-point row.
inline std::vector<int> constrained_dofs(const PlateModel& model) {
    const ControlNet& net = model.patch.net();
    const int n = net.n(), m = net.m();
    std::set<int> fixed;
    auto fix = [&](int i, int j, std::initializer_list<int> comps) {
        for (int c : comps) fixed.insert(kDofsPerPoint * net.index(i, j) + c);
    };
    for (int e = 0; e < 4; ++e) {
        const EdgeCondition cond = model.edges[e];
        if (cond == EdgeCondition::Free) continue;
        const Edge edge = static_cast<Edge>(e);
        const bool x_edge = edge == Edge::XMin || edge == Edge::XMax;
        const int count = x_edge ? m : n;
        for (int t = 0; t < count; ++t) {
            int i = 0, j = 0, ia = 0, ja = 0;
            switch (edge) {
                case Edge::XMin: i = 0; j = t; ia = 1; ja = t; break;
                case Edge::XMax: i = n - 1; j = t; ia = n - 2; ja = t; break;
                case Edge::YMin: i = t; j = 0; ia = t; ja = 1; break;
                case Edge::YMax: i = t; j = m - 1; ia = t; ja = m - 2; break;
            }
            if (cond == EdgeCondition::Simply) {
                fix(i, j, {x_edge ? V0 : U0, WB, WS});
            } else {
                fix(i, j, {U0, V0, WB, WS});
                fix(ia, ja, {WB, WS});
            }
        }
    }

    // In-plane rigid motions (two translations, one rotation) left free by the edges, e.g. u0 under SFSF,
    // are removed by pinning in-plane DOFs at corner control points. They carry no strain, so the
    // transverse solution is unaffected.
    auto rigid_rows = [&](int dof) {
        const Eigen::Vector2d& P = net.point(dof / kDofsPerPoint);
        return (dof % kDofsPerPoint == U0) ? Eigen::RowVector3d(1.0, 0.0, -P.y())
                                           : Eigen::RowVector3d(0.0, 1.0, P.x());
    };
    std::vector<Eigen::RowVector3d> rows;
    for (int d : fixed)
        if (d % kDofsPerPoint == U0 || d % kDofsPerPoint == V0) rows.push_back(rigid_rows(d));
    auto rank_of = [](const std::vector<Eigen::RowVector3d>& r) {
        if (r.empty()) return 0;
        Eigen::MatrixXd M(r.size(), 3);
        for (std::size_t k = 0; k < r.size(); ++k) M.row(k) = r[k];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        return static_cast<int>(lu.rank());
    };
    int rank = rank_of(rows);
    const std::array<int, 4> corners = {net.index(0, 0), net.index(n - 1, m - 1), net.index(n - 1, 0),
                                        net.index(0, m - 1)};
    for (int corner : corners) {
        for (int c : {U0, V0}) {
            if (rank == 3) break;
            const int dof = kDofsPerPoint * corner + c;
            if (fixed.count(dof)) continue;
            rows.push_back(rigid_rows(dof));
            const int r = rank_of(rows);
            if (r > rank) {
                rank = r;
                fixed.insert(dof);
            } else {
                rows.pop_back();
            }
        }
    }
    return {fixed.begin(), fixed.end()};
}

/// Records the fixed DOFs; solvers eliminate them (reduced system).
inline GlobalSystem apply_boundary_conditions(GlobalSystem system, const PlateModel& model) {
    if (system.num_dofs != model.num_dofs())
        throw ConfigError("apply_boundary_conditions: system and model sizes differ");
    std::vector<int> fixed = constrained_dofs(model);
    std::vector<int> merged;
    std::set_union(system.fixed_dofs.begin(), system.fixed_dofs.end(), fixed.begin(), fixed.end(),
                   std::back_inserter(merged));
    system.fixed_dofs = std::move(merged);
    return system;
}

}  // namespace rptiga
