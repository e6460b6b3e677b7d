// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rptiga/case.hpp"
#include "rptiga/presets.hpp"

using namespace rptiga;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Worst {
    double err = -1.0;
    std::string where;
    int checked = 0, failed = 0;

    void add(double err_, double tol, const std::string& label) {
        ++checked;
        if (!(err_ <= tol)) ++failed;
        if (err_ > err) {
            err = err_;
            where = label;
        }
    }
    Outcome outcome(double tol) const {
        std::ostringstream os;
        os << checked - failed << "/" << checked << " within " << tol * 100 << "%, worst " << fmt(err) << " at "
           << where;
        return {failed == 0 && checked > 0, os.str()};
    }
};

// Compare preset cases (optionally filtered) against their reference values.
Outcome golden(const std::string& id, double tol, const std::function<bool(const PresetCase&)>& keep) {
    Worst w;
    for (const PresetCase& pc : preset(id).cases) {
        if (!keep(pc)) continue;
        const CaseResult r = run_case(pc.config);
        for (const Expected& e : pc.expected) {
            const double v = quantity(r, e.quantity);
            w.add(relative_error(v, e.value), tol, pc.label + ":" + e.quantity + "=" + fmt(v) + " vs " + fmt(e.value));
        }
    }
    return w.outcome(tol);
}

Outcome golden_cases(const std::vector<std::string>& labels, double tol) {
    Worst w;
    for (const std::string& label : labels) {
        const PresetCase& pc = preset_case(label);
        const CaseResult r = run_case(pc.config);
        for (const Expected& e : pc.expected) {
            const double v = quantity(r, e.quantity);
            w.add(relative_error(v, e.value), tol, pc.label + ":" + e.quantity + "=" + fmt(v) + " vs " + fmt(e.value));
        }
    }
    return w.outcome(tol);
}

bool has(const std::string& label, const std::string& part) { return label.find(part) != std::string::npos; }

Outcome convergence() {
    const Preset& p = preset("convergence");
    const CaseConfig& t = *p.sweep;
    const CaseConfig fine = apply_sweep_value(t, "mesh", t.sweep_values.back());
    const CaseConfig prev = apply_sweep_value(t, "mesh", t.sweep_values[t.sweep_values.size() - 2]);
    const CaseConfig coarse = apply_sweep_value(t, "mesh", t.sweep_values.front());
    const double wf = *run_case(fine).raw.w_center, wp = *run_case(prev).raw.w_center;
    const double wc = *run_case(coarse).raw.w_center;
    const double change = std::abs(wf - wp) / std::abs(wf);
    std::ostringstream os;
    os << "center deflection change " << fmt(change) << " between " << prev.elements << "x" << prev.elements << " and "
       << fine.elements << "x" << fine.elements << " (coarsest-to-finest " << fmt(std::abs(wf - wc) / std::abs(wf))
       << ")";
    return {change <= 1e-3, os.str()};
}

// Thin-plate center deflection of a uniformly loaded simply supported square, w D/(q0 a^4).
double navier_uniform_square() {
    double s = 0.0;
    for (int m = 1; m < 4000; m += 2)
        for (int n = 1; n < 4000; n += 2) {
            const double sign = ((m + n) / 2 - 1) % 2 == 0 ? 1.0 : -1.0;
            const double k = double(m) * m + double(n) * n;
            s += sign / (double(m) * n * k * k);
        }
    return 16.0 / std::pow(pi, 6) * s;
}

Outcome locking() {
    CaseConfig c = *preset("locking").sweep;
    c.thickness_ratio = 1e6;
    c.sweep_axis.clear();
    c.sweep_values.clear();
    const double w = *run_case(c).report.w_bar;
    const double oracle = navier_uniform_square();
    const double err = relative_error(w, oracle);
    std::ostringstream os;
    os << "a/h=1e6 w D/(q0 a^4) = " << fmt(w) << " vs series " << fmt(oracle) << ", error " << fmt(err)
       << ", full Gauss rule";
    return {err <= 0.01, os.str()};
}

double first_bessel_j1_zero() {
    double lo = 3.0, hi = 4.5;  // J1 changes sign once here
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::cyl_bessel_j(1.0, lo) * std::cyl_bessel_j(1.0, mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome thin_buckling() {
    const PresetCase& pc = preset_case("thin-buckling/model1/h_R=0.01");
    const double p = run_case(pc.config).report.p_bar.front();
    const double j = first_bessel_j1_zero();
    const double err = relative_error(p, j * j);
    std::ostringstream os;
    os << "p_bar = " << fmt(p) << " vs j11^2 = " << fmt(j * j) << ", error " << fmt(err);
    return {err <= 0.01, os.str()};
}

// ---------------------------------------------------------------------------
// property suite

struct Checks {
    std::vector<std::string> failures;
    int count = 0;
    void expect(bool ok, const std::string& what) {
        ++count;
        if (!ok) failures.push_back(what);
    }
};

double asym(const SparseMatrix& A) { return (A - SparseMatrix(A.transpose())).norm() / A.norm(); }

Outcome properties() {
    Checks c;

    // partition of unity and derivative sums on a rational surface
    const Patch disk = make_disk_patch(1.0, 3, 6);
    for (int k = 0; k < 1000; ++k) {
        const SurfaceBasis sb = surface_basis(disk, (k % 40) / 39.0, (k / 40) / 24.0);
        c.expect(std::abs(sb.R.sum() - 1.0) < 1e-13 && sb.dR.colwise().sum().cwiseAbs().maxCoeff() < 1e-10 &&
                     sb.d2R.colwise().sum().cwiseAbs().maxCoeff() < 1e-8,
                 "partition of unity");
    }

    // shear functions: f' against central differences, zero at the surfaces
    const double h = 0.2;
    for (ShearModel m : kAllShearModels) {
        for (int k = 1; k < 20; ++k) {
            const double z = -h / 2 + h * k / 20.0, d = 1e-7 * h;
            const double fd = (shear_fn(m, z + d, h).f - shear_fn(m, z - d, h).f) / (2 * d);
            c.expect(std::abs(shear_fn(m, z, h).fprime - fd) < 1e-6 * std::max(1.0, std::abs(fd)),
                     std::string("f' finite difference ") + std::string(to_string(m)));
        }
        c.expect(std::abs(shear_fn(m, h / 2, h).fprime) < 1e-12 && std::abs(shear_fn(m, -h / 2, h).fprime) < 1e-12,
                 std::string("f'(+-h/2) = 0 ") + std::string(to_string(m)));
    }

    // section parity and the closed-form Reddy shear rigidity
    const Phase al = material_preset("Al");
    for (ShearModel m : kAllShearModels) {
        const SectionConstants sc = section_constants(FGMSpec::homogeneous(al), m, h);
        const double q = plane_stress_stiffness(al.E, al.nu).norm();
        c.expect(sc.B.norm() < 1e-12 * q * h * h && sc.E.norm() < 1e-12 * q * h * h &&
                     std::abs(sc.I[1]) < 1e-12 * al.rho * h * h && std::abs(sc.I[3]) < 1e-12 * al.rho * h * h,
                 std::string("homogeneous parity ") + std::string(to_string(m)));
    }
    const SectionConstants reddy = section_constants(FGMSpec::homogeneous(al), ShearModel::Reddy, h);
    c.expect(std::abs(reddy.Ds(0, 0) / (8.0 / 15.0 * al.shear_modulus() * h) - 1.0) < 1e-12, "Reddy Ds = 8Gh/15");

    // K, M, Kg symmetry and the rigid nullspace of the unconstrained stiffness
    PlateModel plate(make_square_patch(1.0, 1.0, 3, 3),
                     {material_preset("ZrO2-1"), al, 1.0, Homogenization::MoriTanaka, GradingProfile::CeramicTop},
                     ShearModel::InverseTan1, 0.1);
    plate.prestress = -Eigen::Matrix2d::Identity();
    plate.load = Load{Load::Kind::Uniform, 3.0};
    const GlobalSystem sys = assemble(plate, {true, true, true, true});
    c.expect(asym(sys.K) < 1e-14 && asym(sys.M) < 1e-14 && asym(sys.Kg) < 1e-14, "K, M, Kg symmetric");
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(sys.K)).eigenvalues();
    int zero = 0;
    for (int i = 0; i < ev.size(); ++i) zero += std::abs(ev(i)) < 1e-9 * ev.maxCoeff();
    c.expect(zero == 7, "7-dimensional rigid nullspace (found " + std::to_string(zero) + ")");

    // uniform load resultant on both deflection rows
    double fb = 0, fs = 0;
    for (int a = 0; a < plate.patch.num_control_points(); ++a) {
        fb += sys.F(kDofsPerPoint * a + WB);
        fs += sys.F(kDofsPerPoint * a + WS);
    }
    c.expect(std::abs(fb / 3.0 - 1.0) < 1e-10 && std::abs(fs / 3.0 - 1.0) < 1e-10, "load sums q0 * area");

    // eigen residuals
    const GlobalSystem bc = apply_boundary_conditions(sys, plate);
    const EigenResult vib = solve_vibration(bc, 6);
    const EigenResult buck = solve_buckling(bc, 3);
    const Eigen::MatrixXd K = Eigen::MatrixXd(reduce(bc.K, bc.free_dofs()));
    const Eigen::MatrixXd M = Eigen::MatrixXd(reduce(bc.M, bc.free_dofs()));
    const Eigen::MatrixXd G = Eigen::MatrixXd(reduce(bc.Kg, bc.free_dofs()));
    for (int i = 0; i < vib.count(); ++i)
        c.expect(eigen_residual(K, M, vib.values(i), vib.vectors.col(i)) <= kEigenResidualTol, "vibration residual");
    for (int i = 0; i < buck.count(); ++i)
        c.expect(eigen_residual(K, G, buck.values(i), buck.vectors.col(i)) <= kEigenResidualTol, "buckling residual");

    // traction-free surfaces in recovered profiles
    for (ShearModel m : kAllShearModels) {
        PlateModel pm = plate;
        pm.shear_model = m;
        pm.section = section_constants(pm.material, m, pm.thickness());
        const Eigen::VectorXd qm = solve_static(apply_boundary_conditions(assemble(pm, {true, false, false, true}), pm));
        const StressProfile p = stress_profile(qm, pm, 0.3, 0.4, uniform_thickness_samples(pm.thickness(), 101));
        double tmax = 0;
        for (double t : p.tau_xz) tmax = std::max(tmax, std::abs(t));
        c.expect(tmax > 0 && std::abs(p.tau_xz.front()) <= 1e-12 * tmax && std::abs(p.tau_xz.back()) <= 1e-12 * tmax,
                 std::string("tau_xz(+-h/2) = 0 ") + std::string(to_string(m)));
    }

    // Mori-Tanaka below the rule of mixture for Al/ZrO2
    for (double n : {0.5, 1.0, 2.0, 5.0, 10.0})
        for (int k = 0; k <= 100; ++k) {
            const double z = -0.5 + k / 100.0;
            FGMSpec s{material_preset("ZrO2-1"), al, n, Homogenization::MoriTanaka, GradingProfile::CeramicTop};
            const double mt = effective_props(z, 1.0, s).E;
            s.scheme = Homogenization::RuleOfMixture;
            c.expect(mt <= effective_props(z, 1.0, s).E * (1 + 1e-12), "Mori-Tanaka <= rule of mixture");
        }

    std::ostringstream os;
    os << c.count - c.failures.size() << "/" << c.count << " property checks hold";
    if (!c.failures.empty()) os << "; first failure: " << c.failures.front();
    return {c.failures.empty(), os.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "sinusoidal bending goldens (reddy, model1, model2; w_bar and sigma_x_bar)",
         [] { return golden("table3", 3e-3, [](const PresetCase&) { return true; }); }},
        {2, "boundary-condition bending goldens (model1)",
         [] { return golden("table4", 3e-3, [](const PresetCase& pc) { return has(pc.label, "/model1/"); }); }},
        {3, "frequency goldens (fundamental within 0.3%, ten modes at a/h=10 within 0.5%)",
         [] {
             const Outcome a = golden("table5", 3e-3, [](const PresetCase&) { return true; });
             const Outcome b = golden_cases({"table6/model1/a_h=10"}, 5e-3);
             return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
         }},
        {4, "clamped disk buckling goldens",
         [] {
             return golden_cases({"table7/model1/n=0/h_R=0.1", "table7/model1/n=2/h_R=0.2", "table7/model2/n=5/h_R=0.25"},
                                 3e-3);
         }},
        {5, "cubic mesh convergence 5x5 to 25x25", convergence},
        {6, "shear-locking freedom at a/h=1e6", locking},
        {7, "property suites", properties},
        {8, "thin-limit clamped disk buckling", thin_buckling},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
