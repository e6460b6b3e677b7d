#pragma once

// Open-knot B-spline / NURBS tensor-product patches: basis evaluation with
// derivatives up to second order, physical-space chain rule, knot insertion
// and the two parametric geometries used by the plate solver.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rptiga/error.hpp"

namespace rptiga {

/// Open knot vector of a fixed degree.
class KnotVector {
public:
    KnotVector(std::vector<double> values, int degree) : values_(std::move(values)), degree_(degree) {
        validate();
    }

    /// Open uniform knot vector on [0,1] with `elements` nonempty spans.
    static KnotVector open_uniform(int degree, int elements) {
        if (elements < 1) throw ConfigError("open_uniform: need at least one element");
        std::vector<double> v(degree + 1, 0.0);
        for (int k = 1; k < elements; ++k) v.push_back(static_cast<double>(k) / elements);
        v.insert(v.end(), degree + 1, 1.0);
        return KnotVector(std::move(v), degree);
    }

    int degree() const { return degree_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    int num_basis() const { return static_cast<int>(values_.size()) - degree_ - 1; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    /// Distinct knot values, i.e. element boundaries.
    std::vector<double> breaks() const {
        std::vector<double> b;
        for (double v : values_)
            if (b.empty() || v > b.back()) b.push_back(v);
        return b;
    }

    int multiplicity(double u) const {
        return static_cast<int>(std::count(values_.begin(), values_.end(), u));
    }

    /// Index i with values[i] <= xi < values[i+1]; the right endpoint maps to the last nonempty span.
    int find_span(double xi) const {
        const int n = num_basis();
        if (!(xi >= values_[degree_] && xi <= values_[n])) {
            std::ostringstream os;
            os << "find_span: parameter " << xi << " outside [" << values_[degree_] << ", " << values_[n] << "]";
            throw DomainError(os.str());
        }
        if (xi == values_[n]) {
            int i = n - 1;
            while (i > degree_ && values_[i] == values_[i + 1]) --i;
            return i;
        }
        auto it = std::upper_bound(values_.begin() + degree_, values_.begin() + n + 1, xi);
        return static_cast<int>(it - values_.begin()) - 1;
    }

private:
    void validate() const {
        const int p = degree_;
        if (p < 0) throw ConfigError("KnotVector: negative degree");
        if (values_.size() < static_cast<std::size_t>(2 * (p + 1)))
            throw ConfigError("KnotVector: too few knots for the degree");
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (values_[i] < values_[i - 1]) throw ConfigError("KnotVector: values must be nondecreasing");
        if (multiplicity(values_.front()) != p + 1 || multiplicity(values_.back()) != p + 1)
            throw ConfigError("KnotVector: end knots must be repeated exactly degree+1 times");
        if (values_.front() == values_.back()) throw ConfigError("KnotVector: empty parametric domain");
        for (double b : breaks()) {
            if (b == values_.front() || b == values_.back()) continue;
            if (multiplicity(b) > p) throw ConfigError("KnotVector: interior knot multiplicity exceeds degree");
        }
    }

    std::vector<double> values_;
    int degree_;
};

/// Nonzero basis functions on one span and their derivatives.
struct BasisDerivs {
    int span = 0;
    /// ders(k, j): k-th derivative of N_{span-p+j}.
    Eigen::MatrixXd ders;
};

/// Cox–de Boor recursion with derivatives (triangular table form).
inline BasisDerivs basis_derivs(const KnotVector& knots, double xi, int max_deriv) {
    if (max_deriv < 0 || max_deriv > 2) throw DomainError("basis_derivs: derivative order must be 0..2");
    const int p = knots.degree();
    const int span = knots.find_span(xi);
    const auto& U = knots.values();

    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - U[span + 1 - j];
        right[j] = U[span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];  // knot difference
            const double temp = ndu(j, r) == 0.0 ? 0.0 : ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }

    BasisDerivs out;
    out.span = span;
    out.ders = Eigen::MatrixXd::Zero(max_deriv + 1, p + 1);
    for (int j = 0; j <= p; ++j) out.ders(0, j) = ndu(j, p);

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a.setZero();
        a(0, 0) = 1.0;
        for (int k = 1; k <= max_deriv; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a(s2, 0) = ndu(pk + 1, rk) == 0.0 ? 0.0 : a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                const double den = ndu(pk + 1, rk + j);
                a(s2, j) = den == 0.0 ? 0.0 : (a(s1, j) - a(s1, j - 1)) / den;
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                const double den = ndu(pk + 1, r);
                a(s2, k) = den == 0.0 ? 0.0 : -a(s1, k - 1) / den;
                d += a(s2, k) * ndu(r, pk);
            }
            out.ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double fac = p;
    for (int k = 1; k <= max_deriv; ++k) {
        out.ders.row(k) *= fac;
        fac *= (p - k);
    }
    return out;
}

/// Grid of weighted control points; index A = i + n*j with i along the first parametric direction.
class ControlNet {
public:
    ControlNet(int n, int m, std::vector<Eigen::Vector2d> points, std::vector<double> weights)
        : n_(n), m_(m), points_(std::move(points)), weights_(std::move(weights)) {
        if (n < 1 || m < 1) throw ConfigError("ControlNet: empty grid");
        if (points_.size() != static_cast<std::size_t>(n * m) || weights_.size() != points_.size())
            throw ConfigError("ControlNet: point/weight count does not match grid");
        for (double w : weights_)
            if (!(w > 0.0)) throw ConfigError("ControlNet: weights must be strictly positive");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int size() const { return n_ * m_; }
    int index(int i, int j) const { return i + n_ * j; }
    const Eigen::Vector2d& point(int a) const { return points_[a]; }
    const Eigen::Vector2d& point(int i, int j) const { return points_[index(i, j)]; }
    double weight(int a) const { return weights_[a]; }
    double weight(int i, int j) const { return weights_[index(i, j)]; }
    const std::vector<Eigen::Vector2d>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int n_, m_;
    std::vector<Eigen::Vector2d> points_;
    std::vector<double> weights_;
};

/// Rational tensor-product surface over [0,1]^2 describing the plate mid-surface.
class Patch {
public:
    Patch(KnotVector knot_u, KnotVector knot_v, ControlNet net)
        : ku_(std::move(knot_u)), kv_(std::move(knot_v)), net_(std::move(net)) {
        if (ku_.degree() < 2 || kv_.degree() < 2)
            throw ConfigError("Patch: degrees must be at least 2 for C1 continuity");
        if (net_.n() != ku_.num_basis() || net_.m() != kv_.num_basis())
            throw ConfigError("Patch: control net dimensions do not match knot vectors");
    }

    const KnotVector& knot_u() const { return ku_; }
    const KnotVector& knot_v() const { return kv_; }
    const ControlNet& net() const { return net_; }
    int degree_u() const { return ku_.degree(); }
    int degree_v() const { return kv_.degree(); }
    int num_control_points() const { return net_.size(); }
    int functions_per_element() const { return (degree_u() + 1) * (degree_v() + 1); }

    /// Diagonal of the control-net bounding box.
    double scale() const {
        Eigen::Vector2d lo = net_.point(0), hi = net_.point(0);
        for (const auto& pt : net_.points()) {
            lo = lo.cwiseMin(pt);
            hi = hi.cwiseMax(pt);
        }
        return (hi - lo).norm();
    }

private:
    KnotVector ku_, kv_;
    ControlNet net_;
};

/// Rational basis on one element with parametric derivatives.
struct SurfaceBasis {
    std::vector<int> indices;   // global control-point indices, (p+1)(q+1)
    Eigen::VectorXd R;
    Eigen::MatrixX2d dR;        // (d/dxi, d/deta)
    Eigen::MatrixX3d d2R;       // (xi xi, eta eta, xi eta)
};

inline SurfaceBasis surface_basis(const Patch& patch, double xi, double eta) {
    const int p = patch.degree_u(), q = patch.degree_v();
    const BasisDerivs bu = basis_derivs(patch.knot_u(), xi, 2);
    const BasisDerivs bv = basis_derivs(patch.knot_v(), eta, 2);
    const auto& net = patch.net();
    const int count = (p + 1) * (q + 1);

    SurfaceBasis out;
    out.indices.resize(count);
    Eigen::VectorXd A(count);
    Eigen::MatrixX2d dA(count, 2);
    Eigen::MatrixX3d d2A(count, 3);
    double W = 0.0, Wu = 0.0, Wv = 0.0, Wuu = 0.0, Wvv = 0.0, Wuv = 0.0;
    int k = 0;
    for (int b = 0; b <= q; ++b) {
        for (int a = 0; a <= p; ++a, ++k) {
            const int gi = bu.span - p + a, gj = bv.span - q + b;
            const int idx = net.index(gi, gj);
            const double w = net.weight(idx);
            const double N = bu.ders(0, a), Nu = bu.ders(1, a), Nuu = bu.ders(2, a);
            const double M = bv.ders(0, b), Mv = bv.ders(1, b), Mvv = bv.ders(2, b);
            out.indices[k] = idx;
            A(k) = N * M * w;
            dA(k, 0) = Nu * M * w;
            dA(k, 1) = N * Mv * w;
            d2A(k, 0) = Nuu * M * w;
            d2A(k, 1) = N * Mvv * w;
            d2A(k, 2) = Nu * Mv * w;
            W += A(k);
            Wu += dA(k, 0);
            Wv += dA(k, 1);
            Wuu += d2A(k, 0);
            Wvv += d2A(k, 1);
            Wuv += d2A(k, 2);
        }
    }
    out.R = A / W;
    out.dR.resize(count, 2);
    out.d2R.resize(count, 3);
    for (int i = 0; i < count; ++i) {
        const double r = out.R(i);
        const double ru = (dA(i, 0) - r * Wu) / W;
        const double rv = (dA(i, 1) - r * Wv) / W;
        out.dR(i, 0) = ru;
        out.dR(i, 1) = rv;
        out.d2R(i, 0) = (d2A(i, 0) - 2.0 * ru * Wu - r * Wuu) / W;
        out.d2R(i, 1) = (d2A(i, 1) - 2.0 * rv * Wv - r * Wvv) / W;
        out.d2R(i, 2) = (d2A(i, 2) - ru * Wv - rv * Wu - r * Wuv) / W;
    }
    return out;
}

/// Mapped point of the patch geometry.
inline Eigen::Vector2d surface_point(const Patch& patch, double xi, double eta) {
    const SurfaceBasis sb = surface_basis(patch, xi, eta);
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < sb.indices.size(); ++k) x += sb.R(k) * patch.net().point(sb.indices[k]);
    return x;
}

/// Basis on one element with derivatives in physical coordinates.
struct BasisLocal {
    std::vector<int> indices;
    Eigen::VectorXd R;
    Eigen::MatrixX2d dRdx;      // (x, y)
    Eigen::MatrixX3d d2Rdx2;    // (xx, yy, xy)
    double jacobian_det = 0.0;
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();  // (dx/dxi, dx/deta; dy/dxi, dy/deta)
};

inline BasisLocal physical_derivs(const Patch& patch, double xi, double eta) {
    const SurfaceBasis sb = surface_basis(patch, xi, eta);
    const int count = static_cast<int>(sb.indices.size());

    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    Eigen::Matrix<double, 3, 2> H = Eigen::Matrix<double, 3, 2>::Zero();  // rows: xi xi, eta eta, xi eta; cols: x, y
    for (int k = 0; k < count; ++k) {
        const Eigen::Vector2d& P = patch.net().point(sb.indices[k]);
        x += sb.R(k) * P;
        J.col(0) += sb.dR(k, 0) * P;
        J.col(1) += sb.dR(k, 1) * P;
        for (int r = 0; r < 3; ++r) H.row(r) += sb.d2R(k, r) * P.transpose();
    }
    const double det = J.determinant();
    const double s = patch.scale();
    if (std::abs(det) < 1e-14 * s * s) {
        std::ostringstream os;
        os << "singular geometry mapping at (xi, eta) = (" << xi << ", " << eta << "), det J = " << det;
        throw GeometryError(os.str());
    }

    // [R_xi R_eta] = [R_x R_y] J  =>  grad_x = J^{-T} grad_xi
    const Eigen::Matrix2d Jinv = J.inverse();
    BasisLocal out;
    out.indices = sb.indices;
    out.R = sb.R;
    out.dRdx = sb.dR * Jinv;
    out.jacobian_det = det;
    out.point = x;
    out.jacobian = J;

    const double xu = J(0, 0), xv = J(0, 1), yu = J(1, 0), yv = J(1, 1);
    Eigen::Matrix3d T;
    T << xu * xu, yu * yu, 2.0 * xu * yu,
         xv * xv, yv * yv, 2.0 * xv * yv,
         xu * xv, yu * yv, xu * yv + xv * yu;
    const Eigen::Matrix3d Tinv = T.inverse();
    // d2R/dxi2 = T d2R/dx2 + H gradR
    const Eigen::MatrixX3d rhs = sb.d2R - out.dRdx * H.transpose();
    out.d2Rdx2 = rhs * Tinv.transpose();
    return out;
}

namespace detail {

using Homogeneous = Eigen::Vector3d;  // (w x, w y, w)

inline std::vector<Homogeneous> to_homogeneous(const ControlNet& net) {
    std::vector<Homogeneous> pw(net.size());
    for (int a = 0; a < net.size(); ++a) {
        const double w = net.weight(a);
        pw[a] << w * net.point(a).x(), w * net.point(a).y(), w;
    }
    return pw;
}

inline ControlNet from_homogeneous(int n, int m, const std::vector<Homogeneous>& pw) {
    std::vector<Eigen::Vector2d> pts(pw.size());
    std::vector<double> ws(pw.size());
    for (std::size_t a = 0; a < pw.size(); ++a) {
        ws[a] = pw[a].z();
        pts[a] = pw[a].head<2>() / pw[a].z();
    }
    return ControlNet(n, m, std::move(pts), std::move(ws));
}

/// Single knot insertion into a homogeneous curve (Boehm).
inline std::pair<std::vector<double>, std::vector<Homogeneous>> insert_knot(const KnotVector& knots,
                                                                               const std::vector<Homogeneous>& cp,
                                                                               double u) {
    const int p = knots.degree();
    const auto& U = knots.values();
    const int k = knots.find_span(u);
    const int n = static_cast<int>(cp.size());
    std::vector<Homogeneous> out(n + 1);
    for (int i = 0; i <= n; ++i) {
        if (i <= k - p) {
            out[i] = cp[i];
        } else if (i > k) {
            out[i] = cp[i - 1];
        } else {
            const double alpha = (u - U[i]) / (U[i + p] - U[i]);
            out[i] = alpha * cp[i] + (1.0 - alpha) * cp[i - 1];
        }
    }
    std::vector<double> nu(U.begin(), U.end());
    nu.insert(nu.begin() + k + 1, u);
    return {std::move(nu), std::move(out)};
}

/// Elevate a single Bézier segment (no interior knots) by one degree.
inline std::vector<Homogeneous> elevate_bezier(const std::vector<Homogeneous>& cp) {
    const int p = static_cast<int>(cp.size()) - 1;
    std::vector<Homogeneous> out(p + 2);
    out[0] = cp[0];
    out[p + 1] = cp[p];
    for (int i = 1; i <= p; ++i) {
        const double a = static_cast<double>(i) / (p + 1);
        out[i] = a * cp[i - 1] + (1.0 - a) * cp[i];
    }
    return out;
}

/// Degree elevation of a single-element patch to (p, q).
inline Patch elevate_bezier_patch(const Patch& patch, int p, int q) {
    if (patch.knot_u().size() != static_cast<std::size_t>(2 * (patch.degree_u() + 1)) ||
        patch.knot_v().size() != static_cast<std::size_t>(2 * (patch.degree_v() + 1)))
        throw ConfigError("elevate_bezier_patch: patch must be a single Bezier element");
    if (p < patch.degree_u() || q < patch.degree_v()) throw ConfigError("elevate_bezier_patch: cannot lower degree");

    int n = patch.net().n(), m = patch.net().m();
    std::vector<Homogeneous> pw = to_homogeneous(patch.net());
    while (n - 1 < p) {
        std::vector<Homogeneous> next((n + 1) * m);
        for (int j = 0; j < m; ++j) {
            std::vector<Homogeneous> row(pw.begin() + j * n, pw.begin() + (j + 1) * n);
            auto up = elevate_bezier(row);
            for (int i = 0; i <= n; ++i) next[i + (n + 1) * j] = up[i];
        }
        pw = std::move(next);
        ++n;
    }
    while (m - 1 < q) {
        std::vector<Homogeneous> next(n * (m + 1));
        for (int i = 0; i < n; ++i) {
            std::vector<Homogeneous> col(m);
            for (int j = 0; j < m; ++j) col[j] = pw[i + n * j];
            auto up = elevate_bezier(col);
            for (int j = 0; j <= m; ++j) next[i + n * j] = up[j];
        }
        pw = std::move(next);
        ++m;
    }
    const double u0 = patch.knot_u().front(), u1 = patch.knot_u().back();
    const double v0 = patch.knot_v().front(), v1 = patch.knot_v().back();
    std::vector<double> ku(p + 1, u0), kv(q + 1, v0);
    ku.insert(ku.end(), p + 1, u1);
    kv.insert(kv.end(), q + 1, v1);
    return Patch(KnotVector(ku, p), KnotVector(kv, q), from_homogeneous(n, m, pw));
}

}  // namespace detail

/// Knot insertion in both directions; the mapped geometry is unchanged.
inline Patch h_refine(const Patch& patch, const std::vector<double>& new_u, const std::vector<double>& new_v) {
    auto check = [](const KnotVector& kv, const std::vector<double>& add, const char* dir) {
        std::vector<double> merged = kv.values();
        for (double u : add) {
            if (!(u > kv.front() && u < kv.back())) {
                std::ostringstream os;
                os << "h_refine: knot " << u << " in " << dir << " is not strictly inside the domain";
                throw ConfigError(os.str());
            }
            merged.push_back(u);
        }
        for (double u : add) {
            if (std::count(merged.begin(), merged.end(), u) > kv.degree()) {
                std::ostringstream os;
                os << "h_refine: knot " << u << " in " << dir << " would exceed multiplicity " << kv.degree();
                throw ConfigError(os.str());
            }
        }
    };
    check(patch.knot_u(), new_u, "u");
    check(patch.knot_v(), new_v, "v");

    int n = patch.net().n(), m = patch.net().m();
    std::vector<detail::Homogeneous> pw = detail::to_homogeneous(patch.net());
    KnotVector ku = patch.knot_u(), kv = patch.knot_v();

    for (double u : new_u) {
        std::vector<detail::Homogeneous> next((n + 1) * m);
        std::vector<double> knots;
        for (int j = 0; j < m; ++j) {
            std::vector<detail::Homogeneous> row(pw.begin() + j * n, pw.begin() + (j + 1) * n);
            auto [nk, nrow] = detail::insert_knot(ku, row, u);
            for (int i = 0; i <= n; ++i) next[i + (n + 1) * j] = nrow[i];
            knots = std::move(nk);
        }
        ku = KnotVector(std::move(knots), ku.degree());
        pw = std::move(next);
        ++n;
    }
    for (double v : new_v) {
        std::vector<detail::Homogeneous> next(n * (m + 1));
        std::vector<double> knots;
        for (int i = 0; i < n; ++i) {
            std::vector<detail::Homogeneous> col(m);
            for (int j = 0; j < m; ++j) col[j] = pw[i + n * j];
            auto [nk, ncol] = detail::insert_knot(kv, col, v);
            for (int j = 0; j <= m; ++j) next[i + n * j] = ncol[j];
            knots = std::move(nk);
        }
        kv = KnotVector(std::move(knots), kv.degree());
        pw = std::move(next);
        ++m;
    }
    return Patch(std::move(ku), std::move(kv), detail::from_homogeneous(n, m, pw));
}

/// Rectangle [0,a] x [0,b], open uniform knots, Greville control points, unit weights.
inline Patch make_square_patch(double a, double b, int degree, int elements) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("make_square_patch: side lengths must be positive");
    if (degree < 2) throw ConfigError("make_square_patch: degree must be at least 2");
    KnotVector k = KnotVector::open_uniform(degree, elements);
    const int n = k.num_basis();
    std::vector<double> greville(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int r = 1; r <= degree; ++r) s += k[i + r];
        greville[i] = s / degree;
    }
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) pts.emplace_back(a * greville[i], b * greville[j]);
    return Patch(k, k, ControlNet(n, n, std::move(pts), std::vector<double>(n * n, 1.0)));
}

/// Nine-point rational quadratic disk of radius r centred at the origin.
inline Patch make_disk_seed(double radius) {
    const double s = std::numbers::sqrt2;
    const double c = radius / s;
    const double w = 1.0 / s;
    std::vector<Eigen::Vector2d> pts = {
        {-c, -c}, {0.0, -s * radius}, {c, -c},
        {-s * radius, 0.0}, {0.0, 0.0}, {s * radius, 0.0},
        {-c, c}, {0.0, s * radius}, {c, c},
    };
    std::vector<double> ws = {1.0, w, 1.0, w, 1.0, w, 1.0, w, 1.0};
    KnotVector k({0, 0, 0, 1, 1, 1}, 2);
    return Patch(k, k, ControlNet(3, 3, std::move(pts), std::move(ws)));
}

/// Full disk as one patch: nine-point seed, elevated to `degree`, refined to elements x elements.
inline Patch make_disk_patch(double radius, int degree, int elements) {
    if (!(radius > 0.0)) throw ConfigError("make_disk_patch: radius must be positive");
    if (degree < 2) throw ConfigError("make_disk_patch: degree must be at least 2");
    if (elements < 1) throw ConfigError("make_disk_patch: need at least one element");
    Patch seed = detail::elevate_bezier_patch(make_disk_seed(radius), degree, degree);
    std::vector<double> knots;
    for (int k = 1; k < elements; ++k) knots.push_back(static_cast<double>(k) / elements);
    return h_refine(seed, knots, knots);
}

}  // namespace rptiga
