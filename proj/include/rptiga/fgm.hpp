#pragma once

// Through-thickness material model of a two-phase functionally graded plate:
// volume fractions, homogenization, transverse-shear shape functions and the
// integrated section constants of the four-unknown refined plate theory.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rptiga/error.hpp"
#include "rptiga/quadrature.hpp"

namespace rptiga {

struct Phase {
    double E = 0.0;    // Pa
    double nu = 0.0;
    double rho = 0.0;  // kg/m^3

    void validate() const {
        if (!(E > 0.0)) throw ConfigError("Phase: Young's modulus must be positive");
        if (!(nu > -1.0 && nu < 0.5)) throw ConfigError("Phase: Poisson's ratio must lie in (-1, 0.5)");
        if (!(rho >= 0.0)) throw ConfigError("Phase: density must be nonnegative");
    }

    double bulk_modulus() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
    double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
    /// Bending rigidity E h^3 / (12 (1 - nu^2)).
    double flexural_rigidity(double h) const { return E * h * h * h / (12.0 * (1.0 - nu * nu)); }
};

inline const std::vector<std::pair<std::string, Phase>>& material_presets() {
    static const std::vector<std::pair<std::string, Phase>> presets = {
        {"Al", {70e9, 0.3, 2707.0}},
        {"SiC", {427e9, 0.17, 0.0}},
        {"ZrO2-1", {200e9, 0.3, 5700.0}},
        {"ZrO2-2", {151e9, 0.3, 3000.0}},
        {"Al2O3", {380e9, 0.3, 3800.0}},
    };
    return presets;
}

inline Phase material_preset(std::string_view name) {
    for (const auto& [key, phase] : material_presets())
        if (key == name) return phase;
    throw ConfigError("unknown material preset '" + std::string(name) + "'");
}

enum class Homogenization { RuleOfMixture, MoriTanaka };

enum class GradingProfile {
    CeramicTop,      // V_c = (1/2 + z/h)^n
    MetalFraction,   // V_m = (1/2 - z/h)^n
};

struct FGMSpec {
    Phase ceramic;
    Phase metal;
    double n = 0.0;
    Homogenization scheme = Homogenization::RuleOfMixture;
    GradingProfile profile = GradingProfile::CeramicTop;

    void validate() const {
        ceramic.validate();
        metal.validate();
        if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("FGMSpec: power index must be finite and >= 0");
    }

    /// Single-phase section built from `phase`.
    static FGMSpec homogeneous(const Phase& phase) { return FGMSpec{phase, phase, 0.0}; }
};

struct VolumeFractions {
    double ceramic;
    double metal;
};

inline void check_thickness_coordinate(double z, double h) {
    if (!(h > 0.0)) throw DomainError("thickness must be positive");
    if (std::abs(z) > 0.5 * h * (1.0 + 1e-12))
        throw DomainError("thickness coordinate z = " + std::to_string(z) + " outside [-h/2, h/2]");
}

inline VolumeFractions volume_fraction(double z, double h, const FGMSpec& spec) {
    check_thickness_coordinate(z, h);
    const double s = std::clamp(z / h, -0.5, 0.5);
    if (spec.profile == GradingProfile::CeramicTop) {
        const double vc = std::pow(0.5 + s, spec.n);
        return {vc, 1.0 - vc};
    }
    const double vm = std::pow(0.5 - s, spec.n);
    return {1.0 - vm, vm};
}

struct EffectiveProps {
    double E;
    double nu;
    double rho;
};

inline EffectiveProps effective_props(double z, double h, const FGMSpec& spec) {
    const auto [vc, vm] = volume_fraction(z, h, spec);
    const Phase& c = spec.ceramic;
    const Phase& m = spec.metal;
    const double rho = c.rho * vc + m.rho * vm;
    if (spec.scheme == Homogenization::RuleOfMixture)
        return {c.E * vc + m.E * vm, c.nu * vc + m.nu * vm, rho};

    const double Kc = c.bulk_modulus(), Km = m.bulk_modulus();
    const double Gc = c.shear_modulus(), Gm = m.shear_modulus();
    const double f1 = Gm * (9.0 * Km + 8.0 * Gm) / (6.0 * (Km + 2.0 * Gm));
    const double K = Km + (Kc - Km) * vc / (1.0 + vm * (Kc - Km) / (Km + 4.0 / 3.0 * Gm));
    const double G = Gm + (Gc - Gm) * vc / (1.0 + vm * (Gc - Gm) / (Gm + f1));
    return {9.0 * K * G / (3.0 * K + G), (3.0 * K - 2.0 * G) / (2.0 * (3.0 * K + G)), rho};
}

/// Plane-stress reduced stiffness for an isotropic point.
inline Eigen::Matrix3d plane_stress_stiffness(double E, double nu) {
    Eigen::Matrix3d Q;
    const double c = E / (1.0 - nu * nu);
    Q << c, c * nu, 0.0,
         c * nu, c, 0.0,
         0.0, 0.0, c * (1.0 - nu) / 2.0;
    return Q;
}

inline double transverse_shear_modulus(double E, double nu) { return E / (2.0 * (1.0 + nu)); }

enum class ShearModel { Reddy, Karama, Arya, NguyenXuan, InverseTan1, InverseTan2 };

inline constexpr std::array<ShearModel, 6> kAllShearModels = {
    ShearModel::Reddy,      ShearModel::Karama,      ShearModel::Arya,
    ShearModel::NguyenXuan, ShearModel::InverseTan1, ShearModel::InverseTan2,
};

inline std::string_view to_string(ShearModel m) {
    switch (m) {
        case ShearModel::Reddy: return "reddy";
        case ShearModel::Karama: return "karama";
        case ShearModel::Arya: return "arya";
        case ShearModel::NguyenXuan: return "nguyen-xuan";
        case ShearModel::InverseTan1: return "model1";
        case ShearModel::InverseTan2: return "model2";
    }
    return "?";
}

inline ShearModel shear_model_from_string(std::string_view s) {
    for (ShearModel m : kAllShearModels)
        if (to_string(m) == s) return m;
    throw ConfigError("unknown shear model '" + std::string(s) + "'");
}

/// f(z), f'(z) and the derived g = f - z, g' = f' - 1.
struct ShearFunction {
    double f;
    double fprime;
    double g;
    double gprime;
};

inline ShearFunction shear_fn(ShearModel model, double z, double h) {
    check_thickness_coordinate(z, h);
    const double s = z / h;
    const double pi = std::numbers::pi;
    double f = 0.0, fp = 0.0;
    switch (model) {
        case ShearModel::Reddy:
            f = z - 4.0 * z * s * s / 3.0;
            fp = 1.0 - 4.0 * s * s;
            break;
        case ShearModel::Karama: {
            const double e = std::exp(-2.0 * s * s);
            f = z * e;
            fp = (1.0 - 4.0 * s * s) * e;
            break;
        }
        case ShearModel::Arya:
            f = std::sin(pi * s);
            fp = pi / h * std::cos(pi * s);
            break;
        case ShearModel::NguyenXuan:
            f = z * (7.0 / 8.0 - 2.0 * s * s + 2.0 * s * s * s * s);
            fp = 7.0 / 8.0 - 6.0 * s * s + 10.0 * s * s * s * s;
            break;
        case ShearModel::InverseTan1: {
            const double t = 2.0 * s;
            f = h * std::atan(t) - z;
            fp = (1.0 - t * t) / (1.0 + t * t);
            break;
        }
        case ShearModel::InverseTan2: {
            const double sn = std::sin(pi * s);
            f = std::atan(sn);
            fp = pi / h * std::cos(pi * s) / (1.0 + sn * sn);
            break;
        }
    }
    return {f, fp, f - z, fp - 1.0};
}

struct SectionConstants {
    Eigen::Matrix3d A, B, D, E, F, H;
    Eigen::Matrix2d Ds;
    std::array<double, 6> I{};  // I1..I6
    double h = 0.0;

    /// 9x9 generalized in-plane rigidity [[A,B,E],[B,D,F],[E,F,H]].
    Eigen::Matrix<double, 9, 9> bending_block() const {
        Eigen::Matrix<double, 9, 9> Db;
        Db << A, B, E,
              B, D, F,
              E, F, H;
        return Db;
    }

    /// Inertia block [[I1,I2,I4],[I2,I3,I5],[I4,I5,I6]].
    Eigen::Matrix3d inertia_block() const {
        Eigen::Matrix3d I0;
        I0 << I[0], I[1], I[3],
              I[1], I[2], I[4],
              I[3], I[4], I[5];
        return I0;
    }
};

namespace detail {

struct SectionIntegrals {
    std::array<Eigen::Matrix3d, 6> Q;  // weights 1, z, z^2, g, zg, g^2
    Eigen::Matrix2d Ds;
    std::array<double, 6> I;
    std::array<double, 7> magnitude;  // integrals of |weight|, then of f'^2
};

/// Substitution exponent that smooths the (1/2 +- z/h)^n endpoint for fractional n.
inline int grading_substitution(const FGMSpec& spec) {
    return (spec.n == std::floor(spec.n)) ? 1 : 4;
}

inline SectionIntegrals integrate_section(const FGMSpec& spec, ShearModel model, double h, int points) {
    const GaussRule rule = gauss_legendre(points);
    const int k = grading_substitution(spec);
    const bool from_bottom = spec.profile == GradingProfile::CeramicTop;

    SectionIntegrals out;
    for (auto& q : out.Q) q.setZero();
    out.Ds.setZero();
    out.I.fill(0.0);
    out.magnitude.fill(0.0);
    // equal panels in s in [0,1] measured from the graded surface; the first one
    // uses s = ds t^k to absorb the endpoint singularity
    constexpr int kPanels = 4;
    for (int panel = 0; panel < kPanels; ++panel) {
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
        const double t = 0.5 * (rule.points[i] + 1.0);
        const int kp = panel == 0 ? k : 1;
        const double ds = 1.0 / kPanels;
        const double s = ds * (panel + std::pow(t, kp));
        const double dsdt = ds * kp * std::pow(t, kp - 1);
        const double z = from_bottom ? h * (s - 0.5) : h * (0.5 - s);
        const double w = 0.5 * rule.weights[i] * dsdt * h;

        const EffectiveProps ep = effective_props(z, h, spec);
        const ShearFunction sf = shear_fn(model, z, h);
        const Eigen::Matrix3d Q = plane_stress_stiffness(ep.E, ep.nu);
        const double G = transverse_shear_modulus(ep.E, ep.nu);
        const std::array<double, 6> wt = {1.0, z, z * z, sf.g, z * sf.g, sf.g * sf.g};
        for (int r = 0; r < 6; ++r) {
            out.Q[r] += (w * wt[r]) * Q;
            out.I[r] += w * wt[r] * ep.rho;
            out.magnitude[r] += w * std::abs(wt[r]);
        }
        out.magnitude[6] += w * sf.fprime * sf.fprime;
        out.Ds += (w * sf.fprime * sf.fprime * G) * Eigen::Matrix2d::Identity();
    }
    }
    return out;
}

}  // namespace detail

inline constexpr int kThicknessGaussPoints = 30;

/// Integrated section constants; throws IntegrationError if doubling the rule moves any entry by > 1e-10 relative.
inline SectionConstants section_constants(const FGMSpec& spec, ShearModel model, double h,
                                          int points = kThicknessGaussPoints) {
    spec.validate();
    if (!(h > 0.0)) throw ConfigError("section_constants: thickness must be positive");
    const auto base = detail::integrate_section(spec, model, h, points);
    const auto fine = detail::integrate_section(spec, model, h, 2 * points);

    const double qmax = std::max(plane_stress_stiffness(spec.ceramic.E, spec.ceramic.nu)(0, 0),
                                 plane_stress_stiffness(spec.metal.E, spec.metal.nu)(0, 0));
    const double rmax = std::max({spec.ceramic.rho, spec.metal.rho, 1.0});
    for (int r = 0; r < 6; ++r) {
        const double scale = fine.magnitude[r];
        if ((base.Q[r] - fine.Q[r]).cwiseAbs().maxCoeff() > 1e-10 * qmax * scale ||
            std::abs(base.I[r] - fine.I[r]) > 1e-10 * rmax * scale)
            throw IntegrationError("section_constants: through-thickness quadrature did not converge");
    }
    if ((base.Ds - fine.Ds).cwiseAbs().maxCoeff() > 1e-10 * qmax * fine.magnitude[6])
        throw IntegrationError("section_constants: shear rigidity quadrature did not converge");

    SectionConstants sc;
    sc.A = fine.Q[0];
    sc.B = fine.Q[1];
    sc.D = fine.Q[2];
    sc.E = fine.Q[3];
    sc.F = fine.Q[4];
    sc.H = fine.Q[5];
    sc.Ds = fine.Ds;
    sc.I = fine.I;
    sc.h = h;
    return sc;
}

}  // namespace rptiga
