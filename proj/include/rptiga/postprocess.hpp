#pragma once

// Field recovery from control-point coefficients and nondimensional reporting.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rptiga/assembly.hpp"
#include "rptiga/error.hpp"
#include "rptiga/fgm.hpp"
#include "rptiga/nurbs.hpp"

namespace rptiga {

/// Parametric coordinates of physical point (x, y) by Newton iteration on the patch map.
inline Eigen::Vector2d locate(const Patch& patch, double x, double y) {
    const Eigen::Vector2d target(x, y);
    const double tol = 1e-13 * patch.scale();

    // start from the closest point of a coarse parametric grid
    Eigen::Vector2d uv(0.5, 0.5);
    double best = (surface_point(patch, 0.5, 0.5) - target).norm();
    constexpr int kSeeds = 8;
    for (int j = 0; j <= kSeeds; ++j) {
        for (int i = 0; i <= kSeeds; ++i) {
            const Eigen::Vector2d c(static_cast<double>(i) / kSeeds, static_cast<double>(j) / kSeeds);
            const double d = (surface_point(patch, c.x(), c.y()) - target).norm();
            if (d < best) {
                best = d;
                uv = c;
            }
        }
    }
    for (int iter = 0; iter < 50; ++iter) {
        const SurfaceBasis sb = surface_basis(patch, uv.x(), uv.y());
        Eigen::Vector2d p = Eigen::Vector2d::Zero();
        Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
        for (std::size_t k = 0; k < sb.indices.size(); ++k) {
            const Eigen::Vector2d& P = patch.net().point(sb.indices[k]);
            p += sb.R(k) * P;
            J.col(0) += sb.dR(k, 0) * P;
            J.col(1) += sb.dR(k, 1) * P;
        }
        const Eigen::Vector2d r = p - target;
        if (r.norm() <= tol) return uv;
        if (std::abs(J.determinant()) < 1e-300) break;
        // Newton step with coordinates held at a bound they would cross, halved until the residual drops
        Eigen::Vector2d step = J.partialPivLu().solve(r);
        for (int c = 0; c < 2; ++c) {
            const bool pinned = (uv(c) <= 0.0 && step(c) > 0.0) || (uv(c) >= 1.0 && step(c) < 0.0);
            if (!pinned) continue;
            const int o = 1 - c;
            step.setZero();
            step(o) = J.col(o).dot(r) / J.col(o).squaredNorm();
            break;
        }
        Eigen::Vector2d next = uv;
        for (double t = 1.0; t > 1e-6; t *= 0.5) {
            next = (uv - t * step).cwiseMax(0.0).cwiseMin(1.0);
            if ((surface_point(patch, next.x(), next.y()) - target).norm() < r.norm()) break;
        }
        if (next == uv) break;
        uv = next;
    }
    std::ostringstream os;
    os << "locate: inverse map did not converge for point (" << x << ", " << y << ")";
    throw GeometryError(os.str());
}

struct FieldValue {
    double u0, v0, wb, ws, w;
};

namespace detail {

inline Eigen::VectorXd gather(const Eigen::VectorXd& q, const std::vector<int>& indices) {
    Eigen::VectorXd local(kDofsPerPoint * indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k)
        for (int c = 0; c < kDofsPerPoint; ++c) local(kDofsPerPoint * k + c) = q(kDofsPerPoint * indices[k] + c);
    return local;
}

}  // namespace detail

inline FieldValue field_at(const Eigen::VectorXd& q, const PlateModel& model, double x, double y) {
    const Eigen::Vector2d uv = locate(model.patch, x, y);
    const SurfaceBasis sb = surface_basis(model.patch, uv.x(), uv.y());
    FieldValue f{0, 0, 0, 0, 0};
    for (std::size_t k = 0; k < sb.indices.size(); ++k) {
        const int base = kDofsPerPoint * sb.indices[k];
        f.u0 += sb.R(k) * q(base + U0);
        f.v0 += sb.R(k) * q(base + V0);
        f.wb += sb.R(k) * q(base + WB);
        f.ws += sb.R(k) * q(base + WS);
    }
    f.w = f.wb + f.ws;
    return f;
}

/// Generalized strains (eps0, kappa_b, kappa_s, eps_s) at a physical point.
struct GeneralizedStrains {
    Eigen::Vector3d membrane;
    Eigen::Vector3d bending;
    Eigen::Vector3d shear_bending;
    Eigen::Vector2d transverse;
};

inline GeneralizedStrains strains_at(const Eigen::VectorXd& q, const PlateModel& model, double x, double y) {
    const Eigen::Vector2d uv = locate(model.patch, x, y);
    const BasisLocal basis = physical_derivs(model.patch, uv.x(), uv.y());
    const StrainOperators op = strain_operators(basis);
    const Eigen::VectorXd local = detail::gather(q, basis.indices);
    return {op.Bm * local, op.Bb1 * local, op.Bb2 * local, op.Bs * local};
}

struct StressProfile {
    Eigen::Vector2d station;
    std::vector<double> z;
    std::vector<double> sigma_x, sigma_y, tau_xy, tau_xz, tau_yz;
};

inline StressProfile stress_profile(const Eigen::VectorXd& q, const PlateModel& model, double x, double y,
                                    const std::vector<double>& z_samples) {
    const GeneralizedStrains e = strains_at(q, model, x, y);
    const double h = model.thickness();
    StressProfile out;
    out.station = Eigen::Vector2d(x, y);
    for (double z : z_samples) {
        const EffectiveProps ep = effective_props(z, h, model.material);
        const ShearFunction sf = shear_fn(model.shear_model, z, h);
        const Eigen::Vector3d sigma =
            plane_stress_stiffness(ep.E, ep.nu) * (e.membrane + z * e.bending + sf.g * e.shear_bending);
        const Eigen::Vector2d tau = sf.fprime * transverse_shear_modulus(ep.E, ep.nu) * e.transverse;
        out.z.push_back(z);
        out.sigma_x.push_back(sigma(0));
        out.sigma_y.push_back(sigma(1));
        out.tau_xy.push_back(sigma(2));
        out.tau_xz.push_back(tau(0));
        out.tau_yz.push_back(tau(1));
    }
    return out;
}

/// `count` uniform samples on [-h/2, h/2].
inline std::vector<double> uniform_thickness_samples(double h, int count) {
    if (count < 2) throw ConfigError("profile needs at least two thickness samples");
    std::vector<double> z(count);
    for (int i = 0; i < count; ++i) z[i] = -0.5 * h + h * static_cast<double>(i) / (count - 1);
    z.back() = 0.5 * h;
    return z;
}

/// Geometric centre of the control-net bounding box.
inline Eigen::Vector2d plate_center(const PlateModel& model) {
    const auto [lo, hi] = model.extent();
    return 0.5 * (lo + hi);
}

struct GridSample {
    double x, y, w;
};

/// Deflection w = wb + ws sampled on a uniform parametric grid.
inline std::vector<GridSample> deflection_grid(const Eigen::VectorXd& q, const PlateModel& model, int nu, int nv) {
    std::vector<GridSample> out;
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const double xi = static_cast<double>(i) / (nu - 1), eta = static_cast<double>(j) / (nv - 1);
            const SurfaceBasis sb = surface_basis(model.patch, xi, eta);
            Eigen::Vector2d p = Eigen::Vector2d::Zero();
            double w = 0.0;
            for (std::size_t k = 0; k < sb.indices.size(); ++k) {
                p += sb.R(k) * model.patch.net().point(sb.indices[k]);
                w += sb.R(k) * (q(kDofsPerPoint * sb.indices[k] + WB) + q(kDofsPerPoint * sb.indices[k] + WS));
            }
            out.push_back({p.x(), p.y(), w});
        }
    }
    return out;
}

enum class ReportFamily {
    CeramicBending,  // w 10 h^3 E_c/(q0 a^4), sigma h/(a q0) at z = h/3
    MetalBending,    // 100 w E_m h^3/(12 (1 - nu_m^2) q0 a^4)
    Frequency,       // omega h sqrt(rho_m/E_m)
    Buckling,        // p L^2 / D_m
    Rigidity,        // w D_m/(q0 a^4)
    Raw,
};

inline std::string_view to_string(ReportFamily f) {
    switch (f) {
        case ReportFamily::CeramicBending: return "ceramic-bending";
        case ReportFamily::MetalBending: return "metal-bending";
        case ReportFamily::Frequency: return "frequency";
        case ReportFamily::Buckling: return "buckling";
        case ReportFamily::Rigidity: return "rigidity-bending";
        case ReportFamily::Raw: return "raw";
    }
    return "?";
}

inline ReportFamily report_family_from_string(std::string_view s) {
    for (ReportFamily f : {ReportFamily::CeramicBending, ReportFamily::MetalBending, ReportFamily::Frequency,
                           ReportFamily::Buckling, ReportFamily::Rigidity, ReportFamily::Raw})
        if (to_string(f) == s) return f;
    throw ConfigError("unknown report family '" + std::string(s) + "'");
}

/// Physical scales a report family needs.
struct ReportScales {
    double h = 1.0;
    double length = 1.0;  // side a, or radius R
    double q0 = 1.0;
    Phase ceramic;
    Phase metal;
};

struct RawResults {
    std::optional<double> w_center;
    std::optional<double> sigma_x;
    std::vector<double> omega;       // rad/s
    std::vector<double> buckling;    // N/m
};

struct NondimReport {
    std::optional<double> w_bar;
    std::optional<double> sigma_x_bar;
    std::vector<double> omega_bar;
    std::vector<double> p_bar;
};

inline NondimReport nondimensionalize(const RawResults& raw, ReportFamily family, const ReportScales& s) {
    NondimReport out;
    const double h = s.h, a = s.length;
    const double a4 = a * a * a * a;
    switch (family) {
        case ReportFamily::Raw:
            out.w_bar = raw.w_center;
            out.sigma_x_bar = raw.sigma_x;
            out.omega_bar = raw.omega;
            out.p_bar = raw.buckling;
            return out;
        case ReportFamily::CeramicBending:
            if (raw.w_center) out.w_bar = *raw.w_center * 10.0 * h * h * h * s.ceramic.E / (s.q0 * a4);
            if (raw.sigma_x) out.sigma_x_bar = *raw.sigma_x * h / (a * s.q0);
            break;
        case ReportFamily::MetalBending:
            if (raw.w_center)
                out.w_bar = *raw.w_center * 100.0 * s.metal.E * h * h * h /
                            (12.0 * (1.0 - s.metal.nu * s.metal.nu) * s.q0 * a4);
            if (raw.sigma_x) out.sigma_x_bar = *raw.sigma_x * h / (a * s.q0);
            break;
        case ReportFamily::Frequency:
            if (s.metal.E <= 0.0) throw ConfigError("frequency report needs a metal phase with positive modulus");
            break;
        case ReportFamily::Rigidity:
            if (raw.w_center) out.w_bar = *raw.w_center * s.metal.flexural_rigidity(h) / (s.q0 * a4);
            if (raw.sigma_x) out.sigma_x_bar = *raw.sigma_x * h / (a * s.q0);
            break;
        case ReportFamily::Buckling:
            break;
    }
    const double freq_scale = h * std::sqrt(s.metal.rho / s.metal.E);
    for (double w : raw.omega) out.omega_bar.push_back(w * freq_scale);
    const double dm = s.metal.flexural_rigidity(h);
    for (double p : raw.buckling) out.p_bar.push_back(p * a * a / dm);
    return out;
}

}  // namespace rptiga
