#pragma once

// Shipped benchmark case sets with their published reference values.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rptiga/case.hpp"

namespace rptiga {

struct Expected {
    std::string quantity;  // w_bar, sigma_x_bar, omega_bar_<k>, p_bar
    double value;
};

struct PresetCase {
    std::string label;
    CaseConfig config;
    std::vector<Expected> expected;
};

struct Preset {
    std::string id;
    std::string description;
    std::vector<PresetCase> cases;
    std::optional<CaseConfig> sweep;  // sweep presets carry a template instead of cases
};

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline CaseConfig square_case(double a_over_h, const std::string& ceramic, const std::string& metal,
                              Homogenization scheme) {
    CaseConfig c;
    c.shape = Shape::Square;
    c.a = c.b = 1.0;
    c.thickness_ratio = a_over_h;
    c.ceramic = {ceramic, material_preset(ceramic)};
    c.metal = {metal, material_preset(metal)};
    c.scheme = scheme;
    return c;
}

inline PowerIndex index_of(const std::string& n) {
    if (n == "ceramic") return {PowerIndex::Kind::Ceramic, 0.0};
    if (n == "metal") return {PowerIndex::Kind::Metal, 0.0};
    return {PowerIndex::Kind::Graded, std::stod(n)};
}

inline Preset bending_sinusoidal() {
    Preset p{"table3", "SSSS Al/Al2O3 square, sinusoidal load, rule of mixture: center w_bar and sigma_x_bar(h/3)", {}, {}};
    struct Row {
        ShearModel model;
        double n;
        double values[6];  // (w, sigma) at a/h = 4, 10, 100
    };
    const Row rows[] = {
        {ShearModel::Reddy, 1, {0.7284, 0.5796, 0.5889, 1.4856, 0.5625, 14.9255}},
        {ShearModel::InverseTan1, 1, {0.7254, 0.5779, 0.5885, 1.4849, 0.5625, 14.9255}},
        {ShearModel::InverseTan2, 1, {0.7204, 0.5793, 0.5878, 1.4854, 0.5625, 14.9255}},
        {ShearModel::Reddy, 4, {1.1599, 0.4433, 0.8815, 1.1753, 0.8287, 11.8796}},
        {ShearModel::InverseTan1, 4, {1.162, 0.4371, 0.882, 1.1727, 0.8287, 11.8793}},
        {ShearModel::InverseTan2, 4, {1.1562, 0.4369, 0.8812, 1.1726, 0.8287, 11.8793}},
        {ShearModel::Reddy, 10, {1.3908, 0.3249, 1.0087, 0.876, 0.9362, 8.8804}},
        {ShearModel::InverseTan1, 10, {1.3871, 0.3189, 1.0084, 0.8735, 0.9362, 8.8802}},
        {ShearModel::InverseTan2, 10, {1.3738, 0.3183, 1.0064, 0.8732, 0.9362, 8.8802}},
    };
    const double ratios[] = {4, 10, 100};
    for (const Row& r : rows) {
        for (int k = 0; k < 3; ++k) {
            CaseConfig c = square_case(ratios[k], "Al2O3", "Al", Homogenization::RuleOfMixture);
            c.n = {PowerIndex::Kind::Graded, r.n};
            c.shear_model = r.model;
            c.boundary = "SSSS";
            c.load = Load{Load::Kind::Sinusoidal, 1.0};
            c.report = ReportFamily::CeramicBending;
            p.cases.push_back({"table3/" + std::string(to_string(r.model)) + "/n=" + num(r.n) + "/a_h=" + num(ratios[k]),
                               c,
                               {{"w_bar", r.values[2 * k]}, {"sigma_x_bar", r.values[2 * k + 1]}}});
        }
    }
    return p;
}

inline Preset bending_boundary() {
    Preset p{"table4", "Al/ZrO2-1 square a/h=5, Mori-Tanaka, uniform load: center w_bar per boundary code", {}, {}};
    const std::string indices[] = {"ceramic", "0.5", "1", "2", "4", "8", "metal"};
    struct Row {
        std::string bc;
        ShearModel model;
        double values[7];
    };
    const Row rows[] = {
        {"SFSF", ShearModel::InverseTan1, {0.5074, 0.7588, 0.8756, 0.981, 1.0679, 1.1544, 1.4498}},
        {"SFSF", ShearModel::InverseTan2, {0.506, 0.7568, 0.8732, 0.9784, 1.0648, 1.1504, 1.4458}},
        {"SSSS", ShearModel::InverseTan1, {0.1711, 0.2548, 0.2948, 0.3328, 0.3649, 0.3945, 0.4889}},
        {"SSSS", ShearModel::InverseTan2, {0.1703, 0.2536, 0.2934, 0.3312, 0.363, 0.3922, 0.4865}},
        {"CCCC", ShearModel::InverseTan1, {0.071, 0.1043, 0.1217, 0.1402, 0.1568, 0.1696, 0.203}},
        {"CCCC", ShearModel::InverseTan2, {0.0701, 0.1029, 0.1201, 0.1384, 0.1546, 0.1669, 0.2001}},
    };
    for (const Row& r : rows) {
        for (int k = 0; k < 7; ++k) {
            CaseConfig c = square_case(5, "ZrO2-1", "Al", Homogenization::MoriTanaka);
            c.n = index_of(indices[k]);
            c.shear_model = r.model;
            c.boundary = r.bc;
            c.load = Load{Load::Kind::Uniform, 1.0};
            c.report = ReportFamily::MetalBending;
            p.cases.push_back(
                {"table4/" + r.bc + "/" + std::string(to_string(r.model)) + "/n=" + indices[k], c, {{"w_bar", r.values[k]}}});
        }
    }
    return p;
}

inline CaseConfig frequency_case(double a_over_h, double n, ShearModel model, int modes) {
    CaseConfig c = square_case(a_over_h, "ZrO2-1", "Al", Homogenization::MoriTanaka);
    c.n = {PowerIndex::Kind::Graded, n};
    c.shear_model = model;
    c.boundary = "SSSS";
    c.analysis = AnalysisKind::Vibrate;
    c.modes = modes;
    c.report = ReportFamily::Frequency;
    return c;
}

inline Preset frequency_index() {
    Preset p{"table5", "SSSS Al/ZrO2-1 square a/h=5, Mori-Tanaka: fundamental omega_bar versus n", {}, {}};
    const double indices[] = {0, 0.5, 1, 2, 3, 5, 10};
    const std::pair<ShearModel, std::vector<double>> rows[] = {
        {ShearModel::InverseTan1, {0.2462, 0.2224, 0.2186, 0.2191, 0.2205, 0.2218, 0.2215}},
        {ShearModel::InverseTan2, {0.2468, 0.2229, 0.2192, 0.2196, 0.221, 0.2224, 0.2222}},
    };
    for (const auto& [model, values] : rows)
        for (int k = 0; k < 7; ++k)
            p.cases.push_back({"table5/" + std::string(to_string(model)) + "/n=" + num(indices[k]),
                               frequency_case(5, indices[k], model, 1),
                               {{"omega_bar_1", values[k]}}});
    return p;
}

inline Preset frequency_modes() {
    Preset p{"table6", "SSSS Al/ZrO2-1 square n=1, Mori-Tanaka: first ten omega_bar", {}, {}};
    struct Row {
        double a_over_h;
        ShearModel model;
        double values[10];
    };
    const Row rows[] = {
        {5, ShearModel::InverseTan1, {0.2186, 0.4116, 0.4116, 0.4804, 0.4804, 0.5821, 0.6972, 0.8233, 0.8233, 0.8257}},
        {5, ShearModel::InverseTan2, {0.2192, 0.4116, 0.4116, 0.4827, 0.4827, 0.5821, 0.7018, 0.8233, 0.8233, 0.832}},
        {10, ShearModel::InverseTan1, {0.0595, 0.1423, 0.1423, 0.2058, 0.2058, 0.2187, 0.2667, 0.2667, 0.2911, 0.335}},
        {10, ShearModel::InverseTan2, {0.0596, 0.1425, 0.1425, 0.2058, 0.2058, 0.2192, 0.2675, 0.2675, 0.2911, 0.3362}},
        {20, ShearModel::InverseTan1, {0.0153, 0.0377, 0.0377, 0.0595, 0.0739, 0.0739, 0.0949, 0.0949, 0.1029, 0.1029}},
        {20, ShearModel::InverseTan2, {0.0153, 0.0377, 0.0377, 0.0596, 0.0739, 0.0739, 0.095, 0.095, 0.1029, 0.1029}},
    };
    for (const Row& r : rows) {
        PresetCase pc{"table6/" + std::string(to_string(r.model)) + "/a_h=" + num(r.a_over_h),
                      frequency_case(r.a_over_h, 1, r.model, 10),
                      {}};
        for (int k = 0; k < 10; ++k) pc.expected.push_back({"omega_bar_" + std::to_string(k + 1), r.values[k]});
        p.cases.push_back(pc);
    }
    return p;
}

inline CaseConfig disk_buckling_case(double h_over_r, PowerIndex n, ShearModel model) {
    CaseConfig c;
    c.shape = Shape::Disk;
    c.radius = 1.0;
    c.thickness_ratio = h_over_r;
    c.ceramic = {"ZrO2-2", material_preset("ZrO2-2")};
    c.metal = {"Al", material_preset("Al")};
    c.scheme = Homogenization::RuleOfMixture;
    c.profile = GradingProfile::MetalFraction;
    c.n = n;
    c.shear_model = model;
    c.boundary = "CCCC";
    c.analysis = AnalysisKind::Buckle;
    c.modes = 1;
    c.report = ReportFamily::Buckling;
    return c;
}

inline Preset disk_buckling() {
    Preset p{"table7", "Clamped Al/ZrO2-2 disk under uniform radial compression, rule of mixture: p_bar", {}, {}};
    const double ratios[] = {0.1, 0.2, 0.25, 0.3};
    struct Row {
        ShearModel model;
        double n;
        double values[4];
    };
    const Row rows[] = {
        {ShearModel::InverseTan1, 0, {14.1859, 12.6743, 11.7405, 10.7745}},
        {ShearModel::InverseTan1, 0.5, {19.5439, 17.4441, 16.1492, 14.8118}},
        {ShearModel::InverseTan1, 2, {23.2342, 20.9728, 19.552, 18.0628}},
        {ShearModel::InverseTan1, 5, {25.6152, 23.1529, 21.6022, 19.9738}},
        {ShearModel::InverseTan1, 10, {27.3155, 24.6077, 22.9117, 21.1383}},
        {ShearModel::InverseTan2, 0, {14.2023, 12.7281, 11.8143, 10.8666}},
        {ShearModel::InverseTan2, 0.5, {19.5663, 17.518, 16.2506, 14.9381}},
        {ShearModel::InverseTan2, 2, {23.2592, 21.0569, 19.6687, 18.2099}},
        {ShearModel::InverseTan2, 5, {25.6418, 23.2426, 21.7268, 20.1313}},
        {ShearModel::InverseTan2, 10, {27.3429, 24.6994, 23.0389, 21.2986}},
    };
    for (const Row& r : rows)
        for (int k = 0; k < 4; ++k)
            p.cases.push_back({"table7/" + std::string(to_string(r.model)) + "/n=" + num(r.n) + "/h_R=" + num(ratios[k]),
                               disk_buckling_case(ratios[k], {PowerIndex::Kind::Graded, r.n}, r.model),
                               {{"p_bar", r.values[k]}}});
    return p;
}

/// Square of the first zero of J1: clamped thin-disk buckling coefficient.
inline double clamped_disk_coefficient() {
    double x = 3.8317;  // Newton on J1 from a nearby start
    for (int i = 0; i < 20; ++i) {
        const double j1 = std::cyl_bessel_j(1.0, x);
        const double dj1 = std::cyl_bessel_j(0.0, x) - j1 / x;
        x -= j1 / dj1;
    }
    return x * x;
}

inline Preset thin_disk_buckling() {
    Preset p{"thin-buckling", "Clamped isotropic Al disk h/R=0.01 versus the thin-plate Bessel coefficient", {}, {}};
    p.cases.push_back({"thin-buckling/model1/h_R=0.01",
                       disk_buckling_case(0.01, {PowerIndex::Kind::Metal, 0.0}, ShearModel::InverseTan1),
                       {{"p_bar", clamped_disk_coefficient()}}});
    return p;
}

inline Preset mesh_convergence() {
    CaseConfig c = square_case(5, "SiC", "Al", Homogenization::MoriTanaka);
    c.n = {PowerIndex::Kind::Graded, 1.0};
    c.shear_model = ShearModel::Reddy;
    c.boundary = "SSSS";
    c.load = Load{Load::Kind::Sinusoidal, 1.0};
    c.report = ReportFamily::MetalBending;
    c.sweep_axis = "mesh";
    for (int nel = 5; nel <= 25; nel += 2) c.sweep_values.push_back(nel);
    return {"convergence", "Al/SiC n=1 SSSS square a/h=5, sinusoidal load: cubic mesh sweep 5 to 25", {}, c};
}

inline Preset shear_locking() {
    CaseConfig c = square_case(10, "Al", "Al", Homogenization::RuleOfMixture);
    c.n = {PowerIndex::Kind::Metal, 0.0};
    c.shear_model = ShearModel::InverseTan1;
    c.boundary = "SSSS";
    c.load = Load{Load::Kind::Uniform, 1.0};
    c.report = ReportFamily::Rigidity;
    c.sweep_axis = "aspect";
    for (double r : {5.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6}) c.sweep_values.push_back(r);
    return {"locking", "Isotropic SSSS square, uniform load: w D/(q0 a^4) from a/h=5 to 1e6", {}, c};
}

}  // namespace detail

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        detail::bending_sinusoidal(), detail::bending_boundary(), detail::frequency_index(),
        detail::frequency_modes(),    detail::disk_buckling(),    detail::thin_disk_buckling(),
        detail::mesh_convergence(),   detail::shear_locking(),
    };
    return all;
}

inline const Preset& preset(const std::string& id) {
    for (const Preset& p : presets())
        if (p.id == id) return p;
    throw ConfigError("unknown preset '" + id + "'");
}

inline const PresetCase& preset_case(const std::string& label) {
    for (const Preset& p : presets())
        for (const PresetCase& c : p.cases)
            if (c.label == label) return c;
    throw ConfigError("unknown preset case '" + label + "'");
}

/// Computed value of a named quantity.
inline double quantity(const CaseResult& r, const std::string& name) {
    if (name == "w_bar" && r.report.w_bar) return *r.report.w_bar;
    if (name == "sigma_x_bar" && r.report.sigma_x_bar) return *r.report.sigma_x_bar;
    if (name == "p_bar" && !r.report.p_bar.empty()) return r.report.p_bar.front();
    if (name.rfind("omega_bar_", 0) == 0) {
        const std::size_t k = std::stoul(name.substr(10));
        if (k >= 1 && k <= r.report.omega_bar.size()) return r.report.omega_bar[k - 1];
    }
    throw Error("result has no quantity '" + name + "'");
}

inline double relative_error(double computed, double expected) {
    return std::abs(computed - expected) / std::abs(expected);
}

/// CSV of computed against reference values for a case preset, or the sweep CSV.
inline std::string run_preset(const Preset& p) {
    if (p.sweep) return sweep_csv(*p.sweep);
    std::ostringstream os;
    os << "case,quantity,computed,expected,rel_error\n";
    for (const PresetCase& pc : p.cases) {
        const CaseResult r = run_case(pc.config);
        for (const Expected& e : pc.expected) {
            const double v = quantity(r, e.quantity);
            os << pc.label << "," << e.quantity << "," << fmt(v) << "," << fmt(e.value) << ","
               << fmt(relative_error(v, e.value)) << "\n";
        }
    }
    return os.str();
}

}  // namespace rptiga
