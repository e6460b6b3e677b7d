#pragma once

// JSON case configuration, case execution and result serialization used by
// the command-line tool.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rptiga/assembly.hpp"
#include "rptiga/error.hpp"
#include "rptiga/fgm.hpp"
#include "rptiga/nurbs.hpp"
#include "rptiga/postprocess.hpp"
#include "rptiga/solvers.hpp"

namespace rptiga {

using json = nlohmann::json;

enum class Shape { Square, Disk };
enum class AnalysisKind { Static, Vibrate, Buckle };

/// Power index, or a single-phase section of either constituent.
struct PowerIndex {
    enum class Kind { Graded, Ceramic, Metal };
    Kind kind = Kind::Graded;
    double value = 0.0;
};

struct NamedPhase {
    std::string name;  // preset name, empty for user-defined phases
    Phase phase;
};

struct CaseConfig {
    Shape shape = Shape::Square;
    double a = 1.0;       // side lengths (square)
    double b = 1.0;
    double radius = 1.0;  // disk
    /// a/h for squares, h/R for disks.
    double thickness_ratio = 10.0;
    int degree = 3;
    int elements = 11;
    NamedPhase ceramic{"Al2O3", material_preset("Al2O3")};
    NamedPhase metal{"Al", material_preset("Al")};
    Homogenization scheme = Homogenization::RuleOfMixture;
    GradingProfile profile = GradingProfile::CeramicTop;
    PowerIndex n{PowerIndex::Kind::Graded, 1.0};
    ShearModel shear_model = ShearModel::InverseTan1;
    std::string boundary = "SSSS";
    std::optional<Load> load;
    std::optional<Eigen::Matrix2d> prestress;
    AnalysisKind analysis = AnalysisKind::Static;
    int modes = 1;
    ReportFamily report = ReportFamily::Raw;
    int grid = 0;  // deflection grid export resolution, 0 = off

    // sweep settings
    std::string sweep_axis;
    std::vector<json> sweep_values;
    // profile settings
    std::optional<Eigen::Vector2d> station;
    int z_count = 101;

    /// Characteristic length: side a, or radius.
    double length() const { return shape == Shape::Square ? a : radius; }
    double thickness() const {
        return shape == Shape::Square ? a / thickness_ratio : thickness_ratio * radius;
    }
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline std::string to_string(Homogenization h) {
    return h == Homogenization::MoriTanaka ? "mori-tanaka" : "rule-of-mixture";
}
inline Homogenization homogenization_from(const std::string& s) {
    if (s == "rule-of-mixture") return Homogenization::RuleOfMixture;
    if (s == "mori-tanaka") return Homogenization::MoriTanaka;
    throw ConfigError("unknown homogenization scheme '" + s + "'");
}
inline std::string to_string(GradingProfile p) {
    return p == GradingProfile::MetalFraction ? "metal-fraction" : "ceramic-top";
}
inline GradingProfile profile_from(const std::string& s) {
    if (s == "ceramic-top") return GradingProfile::CeramicTop;
    if (s == "metal-fraction") return GradingProfile::MetalFraction;
    throw ConfigError("unknown grading profile '" + s + "'");
}
inline std::string to_string(AnalysisKind k) {
    switch (k) {
        case AnalysisKind::Static: return "static";
        case AnalysisKind::Vibrate: return "vibrate";
        case AnalysisKind::Buckle: return "buckle";
    }
    return "?";
}

inline NamedPhase phase_from(const json& j) {
    if (j.is_string()) return {j.get<std::string>(), material_preset(j.get<std::string>())};
    if (!j.is_object()) throw ConfigError("material phase must be a preset name or {E, nu, rho}");
    Phase p{j.at("E").get<double>(), j.at("nu").get<double>(), j.value("rho", 0.0)};
    p.validate();
    return {"", p};
}
inline json phase_to_json(const NamedPhase& p) {
    if (!p.name.empty()) return p.name;
    return json{{"E", p.phase.E}, {"nu", p.phase.nu}, {"rho", p.phase.rho}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

inline CaseConfig case_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("case config must be a JSON object");
        CaseConfig c;
        if (j.contains("geometry")) {
            const json& g = j.at("geometry");
            const std::string shape = detail::get_or<std::string>(g, "shape", "square");
            if (shape == "square") {
                c.shape = Shape::Square;
                c.a = detail::get_or(g, "a", 1.0);
                c.b = detail::get_or(g, "b", c.a);
            } else if (shape == "disk") {
                c.shape = Shape::Disk;
                c.radius = detail::get_or(g, "radius", 1.0);
            } else {
                throw ConfigError("unknown geometry shape '" + shape + "'");
            }
        }
        if (j.contains("thickness")) {
            const json& t = j.at("thickness");
            if (c.shape == Shape::Square) {
                if (!t.contains("a_over_h")) throw ConfigError("square geometry needs thickness.a_over_h");
                c.thickness_ratio = t.at("a_over_h").get<double>();
            } else {
                if (!t.contains("h_over_r")) throw ConfigError("disk geometry needs thickness.h_over_r");
                c.thickness_ratio = t.at("h_over_r").get<double>();
            }
        } else if (c.shape == Shape::Disk) {
            c.thickness_ratio = 0.1;
        }
        c.degree = detail::get_or(j, "degree", c.degree);
        c.elements = detail::get_or(j, "elements", c.elements);
        if (j.contains("material")) {
            const json& m = j.at("material");
            if (m.contains("ceramic")) c.ceramic = detail::phase_from(m.at("ceramic"));
            if (m.contains("metal")) c.metal = detail::phase_from(m.at("metal"));
            if (m.contains("scheme")) c.scheme = detail::homogenization_from(m.at("scheme").get<std::string>());
            if (m.contains("profile")) c.profile = detail::profile_from(m.at("profile").get<std::string>());
            if (m.contains("n")) {
                const json& n = m.at("n");
                if (n.is_number()) {
                    c.n = {PowerIndex::Kind::Graded, n.get<double>()};
                } else if (n == "ceramic") {
                    c.n = {PowerIndex::Kind::Ceramic, 0.0};
                } else if (n == "metal") {
                    c.n = {PowerIndex::Kind::Metal, 0.0};
                } else {
                    throw ConfigError("material.n must be a number, \"ceramic\" or \"metal\"");
                }
            }
        }
        if (j.contains("shear_model")) c.shear_model = shear_model_from_string(j.at("shear_model").get<std::string>());
        if (j.contains("boundary")) c.boundary = j.at("boundary").get<std::string>();
        if (j.contains("load")) {
            const json& l = j.at("load");
            Load load;
            const std::string type = detail::get_or<std::string>(l, "type", "uniform");
            if (type == "uniform") load.kind = Load::Kind::Uniform;
            else if (type == "sinusoidal") load.kind = Load::Kind::Sinusoidal;
            else throw ConfigError("unknown load type '" + type + "'");
            load.q0 = detail::get_or(l, "q0", 1.0);
            c.load = load;
        }
        if (j.contains("prestress")) {
            const json& p = j.at("prestress");
            Eigen::Matrix2d N;
            const double nxy = detail::get_or(p, "nxy", 0.0);
            N << detail::get_or(p, "nx", 0.0), nxy, nxy, detail::get_or(p, "ny", 0.0);
            c.prestress = N;
        }
        if (j.contains("analysis")) {
            const json& a = j.at("analysis");
            const std::string type = detail::get_or<std::string>(a, "type", "static");
            if (type == "static") c.analysis = AnalysisKind::Static;
            else if (type == "vibrate") c.analysis = AnalysisKind::Vibrate;
            else if (type == "buckle") c.analysis = AnalysisKind::Buckle;
            else throw ConfigError("unknown analysis type '" + type + "'");
            c.modes = detail::get_or(a, "modes", c.analysis == AnalysisKind::Static ? 1 : 10);
        }
        if (j.contains("report")) c.report = report_family_from_string(j.at("report").get<std::string>());
        c.grid = detail::get_or(j, "grid", 0);
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            c.sweep_axis = s.at("axis").get<std::string>();
            for (const auto& v : s.at("values")) c.sweep_values.push_back(v);
        }
        if (j.contains("profile")) {
            const json& p = j.at("profile");
            if (p.contains("station")) {
                const auto st = p.at("station").get<std::vector<double>>();
                if (st.size() != 2) throw ConfigError("profile.station must be [x, y]");
                c.station = Eigen::Vector2d(st[0], st[1]);
            }
            c.z_count = detail::get_or(p, "z_count", 101);
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed case config: ") + e.what());
    }
}

/// Resolved configuration with every default written out.
inline json case_to_json(const CaseConfig& c) {
    json j;
    if (c.shape == Shape::Square) {
        j["geometry"] = {{"shape", "square"}, {"a", c.a}, {"b", c.b}};
        j["thickness"] = {{"a_over_h", c.thickness_ratio}};
    } else {
        j["geometry"] = {{"shape", "disk"}, {"radius", c.radius}};
        j["thickness"] = {{"h_over_r", c.thickness_ratio}};
    }
    j["degree"] = c.degree;
    j["elements"] = c.elements;
    json n;
    switch (c.n.kind) {
        case PowerIndex::Kind::Graded: n = c.n.value; break;
        case PowerIndex::Kind::Ceramic: n = "ceramic"; break;
        case PowerIndex::Kind::Metal: n = "metal"; break;
    }
    j["material"] = {{"ceramic", detail::phase_to_json(c.ceramic)},
                     {"metal", detail::phase_to_json(c.metal)},
                     {"scheme", detail::to_string(c.scheme)},
                     {"profile", detail::to_string(c.profile)},
                     {"n", n}};
    j["shear_model"] = std::string(to_string(c.shear_model));
    j["boundary"] = c.boundary;
    if (c.load)
        j["load"] = {{"type", c.load->kind == Load::Kind::Uniform ? "uniform" : "sinusoidal"}, {"q0", c.load->q0}};
    if (c.prestress)
        j["prestress"] = {{"nx", (*c.prestress)(0, 0)}, {"ny", (*c.prestress)(1, 1)}, {"nxy", (*c.prestress)(0, 1)}};
    j["analysis"] = {{"type", detail::to_string(c.analysis)}, {"modes", c.modes}};
    j["report"] = std::string(to_string(c.report));
    j["grid"] = c.grid;
    if (!c.sweep_axis.empty()) j["sweep"] = {{"axis", c.sweep_axis}, {"values", c.sweep_values}};
    json prof = {{"z_count", c.z_count}};
    if (c.station) prof["station"] = {c.station->x(), c.station->y()};
    j["profile"] = prof;
    return j;
}

// ---------------------------------------------------------------------------
// Validation and model construction

inline void validate(const CaseConfig& c) {
    if (c.shape == Shape::Square && (!(c.a > 0.0) || !(c.b > 0.0)))
        throw ConfigError("square side lengths must be positive");
    if (c.shape == Shape::Disk && !(c.radius > 0.0)) throw ConfigError("disk radius must be positive");
    if (!(c.thickness_ratio > 0.0) || !std::isfinite(c.thickness_ratio))
        throw ConfigError("thickness ratio must be positive");
    if (c.degree < 2) throw ConfigError("degree must be at least 2");
    if (c.elements < 1) throw ConfigError("elements must be at least 1");
    if (c.n.kind == PowerIndex::Kind::Graded && !(c.n.value >= 0.0)) throw ConfigError("power index must be >= 0");
    c.ceramic.phase.validate();
    c.metal.phase.validate();
    edge_conditions_from_code(c.boundary);
    if (c.modes < 1) throw ConfigError("analysis.modes must be positive");
    if (c.z_count < 2) throw ConfigError("profile.z_count must be at least 2");
    if (c.analysis == AnalysisKind::Static && !c.load) throw ConfigError("static analysis needs a load");
    if (c.analysis == AnalysisKind::Buckle && c.shape == Shape::Square && !c.prestress)
        throw ConfigError("missing prestress: buckling on a square geometry needs an in-plane prestress");
    if (c.analysis == AnalysisKind::Vibrate) {
        const bool metal_only = c.n.kind == PowerIndex::Kind::Metal;
        const bool ceramic_only = c.n.kind == PowerIndex::Kind::Ceramic;
        if ((!ceramic_only && !(c.metal.phase.rho > 0.0)) || (!metal_only && !(c.ceramic.phase.rho > 0.0)))
            throw ConfigError("vibration analysis needs positive densities for the phases in use");
    }
}

inline FGMSpec material_spec(const CaseConfig& c) {
    FGMSpec spec{c.ceramic.phase, c.metal.phase, c.n.value, c.scheme, c.profile};
    if (c.n.kind == PowerIndex::Kind::Ceramic) spec = FGMSpec::homogeneous(c.ceramic.phase);
    if (c.n.kind == PowerIndex::Kind::Metal) spec = FGMSpec::homogeneous(c.metal.phase);
    spec.scheme = c.scheme;
    spec.profile = c.profile;
    return spec;
}

inline PlateModel build_model(const CaseConfig& c) {
    validate(c);
    Patch patch = c.shape == Shape::Square ? make_square_patch(c.a, c.b, c.degree, c.elements)
                                           : make_disk_patch(c.radius, c.degree, c.elements);
    PlateModel model(std::move(patch), material_spec(c), c.shear_model, c.thickness());
    model.edges = edge_conditions_from_code(c.boundary);
    model.load = c.load;
    if (c.prestress) {
        model.prestress = c.prestress;
    } else if (c.shape == Shape::Disk) {
        model.prestress = -Eigen::Matrix2d::Identity();  // unit uniform radial compression
    }
    return model;
}

inline ReportScales report_scales(const CaseConfig& c) {
    return {c.thickness(), c.length(), c.load ? c.load->q0 : 1.0, c.ceramic.phase, c.metal.phase};
}

// ---------------------------------------------------------------------------
// Execution

struct CaseResult {
    RawResults raw;
    NondimReport report;
    Eigen::VectorXd solution;   // static solution (full length)
    std::optional<EigenResult> modes;
};

/// Station where the axial stress is sampled: plate centre unless configured.
inline Eigen::Vector2d stress_station(const CaseConfig& c, const PlateModel& model) {
    return c.station.value_or(plate_center(model));
}

inline CaseResult run_case(const CaseConfig& c, const PlateModel& model) {
    CaseResult out;
    switch (c.analysis) {
        case AnalysisKind::Static: {
            const GlobalSystem sys = apply_boundary_conditions(assemble(model, {true, false, false, true}), model);
            out.solution = solve_static(sys);
            const Eigen::Vector2d at = stress_station(c, model);
            out.raw.w_center = field_at(out.solution, model, at.x(), at.y()).w;
            const double h = model.thickness();
            out.raw.sigma_x = stress_profile(out.solution, model, at.x(), at.y(), {h / 3.0}).sigma_x.front();
            break;
        }
        case AnalysisKind::Vibrate: {
            const GlobalSystem sys = apply_boundary_conditions(assemble(model, {true, true, false, false}), model);
            out.modes = solve_vibration(sys, c.modes);
            const Eigen::VectorXd w = angular_frequencies(*out.modes);
            out.raw.omega.assign(w.data(), w.data() + w.size());
            break;
        }
        case AnalysisKind::Buckle: {
            const GlobalSystem sys = apply_boundary_conditions(assemble(model, {true, false, true, false}), model);
            out.modes = solve_buckling(sys, c.modes);
            out.raw.buckling.assign(out.modes->values.data(), out.modes->values.data() + out.modes->values.size());
            break;
        }
    }
    out.report = nondimensionalize(out.raw, c.report, report_scales(c));
    return out;
}

inline CaseResult run_case(const CaseConfig& c) { return run_case(c, build_model(c)); }

// ---------------------------------------------------------------------------
// Output

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

inline std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

inline std::string results_header(AnalysisKind k) {
    switch (k) {
        case AnalysisKind::Static: return "w_bar,sigma_x_bar,w_center,sigma_x";
        case AnalysisKind::Vibrate: return "mode,omega,omega_bar";
        case AnalysisKind::Buckle: return "mode,lambda,p_bar";
    }
    return "";
}

inline std::string results_csv(const CaseConfig& c, const CaseResult& r) {
    std::ostringstream os;
    os << results_header(c.analysis) << "\n";
    switch (c.analysis) {
        case AnalysisKind::Static:
            os << opt_fmt(r.report.w_bar) << "," << opt_fmt(r.report.sigma_x_bar) << "," << opt_fmt(r.raw.w_center)
               << "," << opt_fmt(r.raw.sigma_x) << "\n";
            break;
        case AnalysisKind::Vibrate:
            for (std::size_t i = 0; i < r.raw.omega.size(); ++i)
                os << i + 1 << "," << fmt(r.raw.omega[i]) << "," << fmt(r.report.omega_bar[i]) << "\n";
            break;
        case AnalysisKind::Buckle:
            for (std::size_t i = 0; i < r.raw.buckling.size(); ++i)
                os << i + 1 << "," << fmt(r.raw.buckling[i]) << "," << fmt(r.report.p_bar[i]) << "\n";
            break;
    }
    return os.str();
}

/// Primary scalar of a result: w_bar, fundamental omega_bar or p_bar.
inline double primary_value(const CaseConfig& c, const CaseResult& r) {
    switch (c.analysis) {
        case AnalysisKind::Static: return r.report.w_bar.value_or(r.raw.w_center.value_or(0.0));
        case AnalysisKind::Vibrate: return r.report.omega_bar.front();
        case AnalysisKind::Buckle: return r.report.p_bar.front();
    }
    return 0.0;
}

inline std::string grid_csv(const Eigen::VectorXd& q, const PlateModel& model, int resolution) {
    std::ostringstream os;
    os << "x,y,w\n";
    for (const auto& s : deflection_grid(q, model, resolution, resolution))
        os << fmt(s.x) << "," << fmt(s.y) << "," << fmt(s.w) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Sweeps

/// Copy of `base` with one axis value applied.
inline CaseConfig apply_sweep_value(const CaseConfig& base, const std::string& axis, const json& value) {
    CaseConfig c = base;
    try {
        if (axis == "n") {
            if (value.is_string()) {
                c.n.kind = value == "ceramic" ? PowerIndex::Kind::Ceramic
                           : value == "metal" ? PowerIndex::Kind::Metal
                                              : throw ConfigError("bad power index value");
            } else {
                c.n = {PowerIndex::Kind::Graded, value.get<double>()};
            }
        } else if (axis == "aspect") {
            c.thickness_ratio = value.get<double>();
        } else if (axis == "mesh") {
            c.elements = value.get<int>();
        } else if (axis == "model") {
            c.shear_model = shear_model_from_string(value.get<std::string>());
        } else {
            throw ConfigError("unknown sweep axis '" + axis + "' (expected n, aspect, mesh or model)");
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad sweep value for axis '" + axis + "': " + e.what());
    }
    return c;
}

inline std::string sweep_csv(const CaseConfig& base) {
    if (base.sweep_axis.empty()) throw ConfigError("sweep needs sweep.axis");
    if (base.sweep_values.empty()) throw ConfigError("sweep needs a nonempty sweep.values list");
    std::vector<CaseConfig> cases;
    for (const auto& v : base.sweep_values) {
        cases.push_back(apply_sweep_value(base, base.sweep_axis, v));
        validate(cases.back());
    }

    std::ostringstream os;
    os << "axis,value,";
    switch (base.analysis) {
        case AnalysisKind::Static: os << "w_bar,sigma_x_bar,w_center,sigma_x"; break;
        case AnalysisKind::Vibrate: os << "omega,omega_bar"; break;
        case AnalysisKind::Buckle: os << "lambda,p_bar"; break;
    }
    const bool mesh = base.sweep_axis == "mesh";
    if (mesh) os << ",rel_change";
    os << "\n";

    std::optional<double> previous;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const CaseResult r = run_case(cases[i]);
        const json& v = base.sweep_values[i];
        os << base.sweep_axis << "," << (v.is_string() ? v.get<std::string>() : v.dump()) << ",";
        switch (base.analysis) {
            case AnalysisKind::Static:
                os << opt_fmt(r.report.w_bar) << "," << opt_fmt(r.report.sigma_x_bar) << "," << opt_fmt(r.raw.w_center)
                   << "," << opt_fmt(r.raw.sigma_x);
                break;
            case AnalysisKind::Vibrate: os << fmt(r.raw.omega.front()) << "," << fmt(r.report.omega_bar.front()); break;
            case AnalysisKind::Buckle: os << fmt(r.raw.buckling.front()) << "," << fmt(r.report.p_bar.front()); break;
        }
        const double value = primary_value(cases[i], r);
        if (mesh) {
            os << ",";
            if (previous) os << fmt(std::abs(value - *previous) / std::abs(*previous));
        }
        previous = value;
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Through-thickness profiles

inline StressProfile run_profile(const CaseConfig& c) {
    if (c.analysis != AnalysisKind::Static) throw ConfigError("profile needs a static analysis");
    const PlateModel model = build_model(c);
    const CaseResult r = run_case(c, model);
    const Eigen::Vector2d at = stress_station(c, model);
    return stress_profile(r.solution, model, at.x(), at.y(), uniform_thickness_samples(model.thickness(), c.z_count));
}

inline std::string profile_csv(const StressProfile& p, double h) {
    std::ostringstream os;
    os << "z_over_h,sigma_x,sigma_y,tau_xy,tau_xz,tau_yz\n";
    for (std::size_t i = 0; i < p.z.size(); ++i)
        os << fmt(p.z[i] / h) << "," << fmt(p.sigma_x[i]) << "," << fmt(p.sigma_y[i]) << "," << fmt(p.tau_xy[i])
           << "," << fmt(p.tau_xz[i]) << "," << fmt(p.tau_yz[i]) << "\n";
    return os.str();
}

/// Two-panel line chart (sigma_x and tau_xz against z/h).
inline std::string profile_svg(const StressProfile& p, double h) {
    constexpr double W = 320, H = 300, pad = 40;
    auto panel = [&](const std::vector<double>& v, double x0, const char* title) {
        double lo = 0.0, hi = 0.0;
        for (double s : v) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (hi == lo) hi = lo + 1.0;
        std::ostringstream os;
        os << "<g transform=\"translate(" << x0 << ",0)\">\n";
        os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
           << "\" fill=\"none\" stroke=\"#888\"/>\n";
        os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double px = pad + (v[i] - lo) / (hi - lo) * (W - 2 * pad);
            const double py = H - pad - (p.z[i] / h + 0.5) * (H - 2 * pad);
            os << px << "," << py << " ";
        }
        os << "\"/>\n</g>\n";
        return os.str();
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W << "\" height=\"" << H << "\">\n";
    os << panel(p.sigma_x, 0, "sigma_x vs z/h") << panel(p.tau_xz, W, "tau_xz vs z/h");
    os << "</svg>\n";
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

}  // namespace rptiga
