#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rptiga/postprocess.hpp"
#include "rptiga/solvers.hpp"

using namespace rptiga;

namespace {

constexpr double pi = std::numbers::pi;

PlateModel isotropic_square(double a_over_h, int p, int nel, ShearModel model = ShearModel::Reddy) {
    const Phase al = material_preset("Al");
    return PlateModel(make_square_patch(1.0, 1.0, p, nel), FGMSpec::homogeneous(al), model, 1.0 / a_over_h);
}

// Center deflection of the simply supported square under q0 sin sin: two-term Navier solution of the
// wb/ws equations built from the section constants. Bending curvature is -wb'' and shear curvature +ws'',
// so the coupling enters with a minus sign.
double navier_center_deflection(const SectionConstants& sc, double a, double q0) {
    const double k = 2.0 * pi * pi / (a * a);
    Eigen::Matrix2d K;
    K << sc.D(0, 0) * k * k, -sc.F(0, 0) * k * k,
         -sc.F(0, 0) * k * k, sc.H(0, 0) * k * k + sc.Ds(0, 0) * k;
    const Eigen::Vector2d W = K.lu().solve(Eigen::Vector2d(q0, q0));
    return W.sum();
}

double center_deflection(const PlateModel& m) {
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, false, true}), m);
    return field_at(solve_static(s), m, 0.5, 0.5).w;
}

}  // namespace

TEST(Static, MatchesNavierSolutionForAllShearModels) {
    for (ShearModel model : kAllShearModels)
        for (double ah : {5.0, 20.0}) {
            PlateModel m = isotropic_square(ah, 4, 10, model);
            m.load = Load{Load::Kind::Sinusoidal, 1.0};
            const double exact = navier_center_deflection(m.section, 1.0, 1.0);
            EXPECT_NEAR(center_deflection(m) / exact, 1.0, 1e-6) << to_string(model) << " a/h=" << ah;
        }
}

TEST(Static, ZeroLoadGivesZeroSolution) {
    PlateModel m = isotropic_square(10, 3, 3);
    m.load = Load{Load::Kind::Uniform, 0.0};
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, false, true}), m);
    EXPECT_EQ(solve_static(s).norm(), 0.0);
}

TEST(Static, ResidualAndFixedDofs) {
    PlateModel m = isotropic_square(10, 3, 5);
    m.load = Load{Load::Kind::Uniform, 1e4};
    m.edges = edge_conditions_from_code("CFSS");
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, false, true}), m);
    const Eigen::VectorXd q = solve_static(s);
    for (int d : s.fixed_dofs) EXPECT_EQ(q(d), 0.0);
    const std::vector<int> free = s.free_dofs();
    const Eigen::VectorXd r = reduce(s.K, free) * reduce(q, free) - reduce(s.F, free);
    EXPECT_LT(r.norm() / reduce(s.F, free).norm(), kStaticResidualTol);
}

TEST(Static, UnsupportedPlateIsSingular) {
    PlateModel m = isotropic_square(10, 3, 3);
    m.load = Load{Load::Kind::Uniform, 1.0};
    m.edges = edge_conditions_from_code("FFFF");
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, false, true}), m);
    EXPECT_THROW(solve_static(s), SolverError);
    EXPECT_THROW(solve_static(apply_boundary_conditions(assemble(m, {}), m)), ConfigError);
}

TEST(Static, RefinementChangesCenterDeflectionLittle) {
    PlateModel coarse(make_square_patch(1.0, 1.0, 3, 11),
                      {material_preset("SiC"), material_preset("Al"), 1.0, Homogenization::MoriTanaka,
                       GradingProfile::CeramicTop},
                      ShearModel::Reddy, 0.2);
    coarse.load = Load{Load::Kind::Sinusoidal, 1.0};
    std::vector<double> mids;
    for (int k = 0; k < 11; ++k) mids.push_back((k + 0.5) / 11.0);
    PlateModel fine = coarse;
    fine.patch = h_refine(coarse.patch, mids, mids);
    EXPECT_NEAR(center_deflection(fine) / center_deflection(coarse), 1.0, 1e-3);
}

TEST(Static, ConstraintsStiffenThePlate) {
    PlateModel m = isotropic_square(10, 3, 6);
    m.load = Load{Load::Kind::Uniform, 1.0};
    double last = 0.0;
    for (const char* code : {"CCCC", "SSSS", "SFSF"}) {
        m.edges = edge_conditions_from_code(code);
        const double w = center_deflection(m);
        EXPECT_GT(w, last) << code;
        last = w;
    }
}

TEST(Vibration, ThinPlateFundamentalFrequency) {
    const double ah = 100;
    const PlateModel m = isotropic_square(ah, 3, 10);
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, true, false, false}), m);
    const EigenResult r = solve_vibration(s, 4);
    const Phase al = material_preset("Al");
    const double h = 1.0 / ah;
    const double exact = 2.0 * pi * pi * std::sqrt(al.flexural_rigidity(h) / (al.rho * h));
    EXPECT_NEAR(angular_frequencies(r)(0) / exact, 1.0, 2e-3);
}

TEST(Vibration, ModesAreOrderedMassNormalizedAndSatisfyRayleighQuotient) {
    PlateModel m(make_square_patch(1.0, 1.0, 3, 6),
                 {material_preset("ZrO2-1"), material_preset("Al"), 1.0, Homogenization::MoriTanaka,
                  GradingProfile::CeramicTop},
                 ShearModel::InverseTan2, 0.1);
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, true, false, false}), m);
    const EigenResult r = solve_vibration(s, 10);
    ASSERT_EQ(r.count(), 10);
    const Eigen::MatrixXd K = Eigen::MatrixXd(reduce(s.K, r.free_dofs));
    const Eigen::MatrixXd M = Eigen::MatrixXd(reduce(s.M, r.free_dofs));
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd v = r.vectors.col(i);
        EXPECT_NEAR(v.dot(M * v), 1.0, 1e-10);
        EXPECT_NEAR(v.dot(K * v) / r.values(i), 1.0, 1e-10);
        EXPECT_LT(eigen_residual(K, M, r.values(i), v), kEigenResidualTol);
        if (i > 0) EXPECT_GE(r.values(i), r.values(i - 1));
        EXPECT_EQ(r.mode(i).size(), m.num_dofs());
    }
    // the degenerate (1,2)/(2,1) pair of the square
    EXPECT_NEAR(r.values(1) / r.values(2), 1.0, 1e-8);
}

TEST(Vibration, ConstraintsRaiseFrequency) {
    PlateModel m = isotropic_square(10, 3, 6);
    double last = 1e300;
    for (const char* code : {"CCCC", "SSSS", "SFSF"}) {
        m.edges = edge_conditions_from_code(code);
        const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, true, false, false}), m);
        const double w = solve_vibration(s, 1).values(0);
        EXPECT_LT(w, last) << code;
        last = w;
    }
}

TEST(Buckling, ThinSquareUnderBiaxialCompression) {
    PlateModel m = isotropic_square(200, 3, 10);
    m.prestress = -Eigen::Matrix2d::Identity();
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, true, false}), m);
    const EigenResult r = solve_buckling(s, 3);
    const double exact = 2.0 * pi * pi * material_preset("Al").flexural_rigidity(1.0 / 200);
    EXPECT_NEAR(r.values(0) / exact, 1.0, 2e-3);
    EXPECT_NEAR(r.values(1) / r.values(2), 1.0, 1e-8);  // (1,2)/(2,1) pair
    const Eigen::MatrixXd K = Eigen::MatrixXd(reduce(s.K, r.free_dofs));
    const Eigen::MatrixXd G = Eigen::MatrixXd(reduce(s.Kg, r.free_dofs));
    for (int i = 0; i < r.count(); ++i) EXPECT_LT(eigen_residual(K, G, r.values(i), r.vectors.col(i)), kEigenResidualTol);
}

TEST(Buckling, TensionHasNoBucklingLoad) {
    PlateModel m = isotropic_square(20, 3, 4);
    m.prestress = Eigen::Matrix2d::Identity();
    const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, true, false}), m);
    EXPECT_THROW(solve_buckling(s, 1), SolverError);
}

TEST(Buckling, LoadFallsWithThicknessAndRisesWithCeramicContent) {
    auto pbar = [](double h_over_r, double n) {
        PlateModel m(make_disk_patch(1.0, 3, 7),
                     {material_preset("ZrO2-2"), material_preset("Al"), n, Homogenization::RuleOfMixture,
                      GradingProfile::MetalFraction},
                     ShearModel::InverseTan1, h_over_r);
        m.edges = edge_conditions_from_code("CCCC");
        m.prestress = -Eigen::Matrix2d::Identity();
        const GlobalSystem s = apply_boundary_conditions(assemble(m, {true, false, true, false}), m);
        return solve_buckling(s, 1).values(0) / material_preset("Al").flexural_rigidity(h_over_r);
    };
    EXPECT_GT(pbar(0.1, 1.0), pbar(0.2, 1.0));
    EXPECT_GT(pbar(0.2, 1.0), pbar(0.3, 1.0));
    EXPECT_LT(pbar(0.2, 0.0), pbar(0.2, 2.0));
    EXPECT_LT(pbar(0.2, 2.0), pbar(0.2, 10.0));
}

TEST(Solvers, ArgumentChecks) {
    PlateModel m = isotropic_square(10, 3, 3);
    const GlobalSystem k_only = apply_boundary_conditions(assemble(m, {}), m);
    EXPECT_THROW(solve_vibration(k_only, 1), ConfigError);
    EXPECT_THROW(solve_buckling(k_only, 1), ConfigError);
    const GlobalSystem km = apply_boundary_conditions(assemble(m, {true, true, false, false}), m);
    EXPECT_THROW(solve_vibration(km, 0), ConfigError);
}
