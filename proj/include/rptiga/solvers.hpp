#pragma once

// Reduced-system solves: static K q = F and the generalized symmetric
// eigenproblems for free vibration and linear buckling.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "rptiga/assembly.hpp"
#include "rptiga/error.hpp"

namespace rptiga {

inline constexpr double kStaticResidualTol = 1e-10;
inline constexpr double kEigenResidualTol = 1e-8;

/// Submatrix on the free DOFs.
inline SparseMatrix reduce(const SparseMatrix& A, const std::vector<int>& free) {
    std::vector<int> map(A.rows(), -1);
    for (std::size_t k = 0; k < free.size(); ++k) map[free[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A.nonZeros());
    for (int col = 0; col < A.outerSize(); ++col) {
        if (map[col] < 0) continue;
        for (SparseMatrix::InnerIterator it(A, col); it; ++it)
            if (map[it.row()] >= 0) t.emplace_back(map[it.row()], map[col], it.value());
    }
    SparseMatrix R(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
    R.setFromTriplets(t.begin(), t.end());
    return R;
}

inline Eigen::VectorXd reduce(const Eigen::VectorXd& v, const std::vector<int>& free) {
    Eigen::VectorXd r(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) r(k) = v(free[k]);
    return r;
}

/// Scatter a free-DOF vector back to full length; fixed DOFs are exact zeros.
inline Eigen::VectorXd expand(const Eigen::VectorXd& v, const std::vector<int>& free, int num_dofs) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(num_dofs);
    for (std::size_t k = 0; k < free.size(); ++k) full(free[k]) = v(k);
    return full;
}

namespace detail {

/// Symmetric Jacobi scaling s_i = 1/sqrt(A_ii).
inline Eigen::VectorXd jacobi_scaling(const SparseMatrix& A) {
    Eigen::VectorXd s(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
        const double d = A.coeff(i, i);
        s(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    return s;
}

inline SparseMatrix scaled(const SparseMatrix& A, const Eigen::VectorXd& s) {
    return s.asDiagonal() * A * s.asDiagonal();
}

}  // namespace detail

/// Full-length solution of the constrained static problem.
inline Eigen::VectorXd solve_static(const GlobalSystem& system) {
    if (!system.has_stiffness() || !system.has_load())
        throw ConfigError("solve_static: system needs a stiffness matrix and a load vector");
    const std::vector<int> free = system.free_dofs();
    const SparseMatrix K = reduce(system.K, free);
    const Eigen::VectorXd F = reduce(system.F, free);
    if (F.norm() == 0.0) return Eigen::VectorXd::Zero(system.num_dofs);

    const Eigen::VectorXd s = detail::jacobi_scaling(K);
    const SparseMatrix Ks = detail::scaled(K, s);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(Ks);
    if (ldlt.info() != Eigen::Success) throw SolverError("solve_static: factorization failed");
    const Eigen::VectorXd D = ldlt.vectorD();
    Eigen::Index imin = 0;
    const double dmin = D.minCoeff(&imin);
    if (!(dmin > 1e-14 * D.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "solve_static: reduced stiffness is singular or indefinite (smallest pivot " << dmin
           << " at reduced index " << imin << ")";
        throw SolverError(os.str());
    }

    Eigen::VectorXd y = ldlt.solve(s.cwiseProduct(F));
    // a few steps of iterative refinement for badly scaled (very thin) plates
    for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd r = s.cwiseProduct(F) - Ks * y;
        if (r.norm() <= 1e-3 * kStaticResidualTol * s.cwiseProduct(F).norm()) break;
        y += ldlt.solve(r);
    }
    const Eigen::VectorXd q = s.cwiseProduct(y);
    const double rel = (K * q - F).norm() / F.norm();
    if (!(rel <= kStaticResidualTol)) {
        std::ostringstream os;
        os << "solve_static: relative residual " << rel << " exceeds " << kStaticResidualTol;
        throw SolverError(os.str());
    }
    return expand(q, free, system.num_dofs);
}

struct EigenResult {
    Eigen::VectorXd values;       // ascending
    Eigen::MatrixXd vectors;      // columns over free DOFs
    std::vector<int> free_dofs;
    int num_dofs = 0;

    int count() const { return static_cast<int>(values.size()); }
    Eigen::VectorXd mode(int k) const { return expand(vectors.col(k), free_dofs, num_dofs); }
};

inline double eigen_residual(const Eigen::MatrixXd& K, const Eigen::MatrixXd& B, double lambda,
                             const Eigen::VectorXd& v) {
    return (K * v - lambda * (B * v)).norm() / (K.norm() * v.norm());
}

/// k smallest eigenpairs of K v = omega^2 M v; vectors are mass-normalized.
inline EigenResult solve_vibration(const GlobalSystem& system, int k) {
    if (!system.has_stiffness() || !system.has_mass())
        throw ConfigError("solve_vibration: system needs stiffness and mass matrices");
    if (k < 1) throw ConfigError("solve_vibration: mode count must be positive");
    const std::vector<int> free = system.free_dofs();
    const Eigen::MatrixXd K = Eigen::MatrixXd(reduce(system.K, free));
    const Eigen::MatrixXd M = Eigen::MatrixXd(reduce(system.M, free));

    Eigen::LLT<Eigen::MatrixXd> mllt(M);
    if (mllt.info() != Eigen::Success) throw SolverError("solve_vibration: mass matrix is not positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw SolverError("solve_vibration: eigensolver failed");

    const int take = std::min<int>(k, static_cast<int>(K.rows()));
    EigenResult out;
    out.values = es.eigenvalues().head(take);
    out.vectors = es.eigenvectors().leftCols(take);
    out.free_dofs = free;
    out.num_dofs = system.num_dofs;
    for (int i = 0; i < take; ++i) {
        const double res = eigen_residual(K, M, out.values(i), out.vectors.col(i));
        if (!(res <= kEigenResidualTol)) {
            std::ostringstream os;
            os << "solve_vibration: mode " << i + 1 << " residual " << res << " exceeds " << kEigenResidualTol;
            throw SolverError(os.str());
        }
    }
    return out;
}

/// Natural frequencies (rad/s) from eigenvalues omega^2.
inline Eigen::VectorXd angular_frequencies(const EigenResult& r) {
    return r.values.unaryExpr([](double l) { return std::sqrt(std::max(l, 0.0)); });
}

/// k smallest positive eigenvalues of K v = lambda Kg v.
inline EigenResult solve_buckling(const GlobalSystem& system, int k) {
    if (!system.has_stiffness() || !system.has_geometric())
        throw ConfigError("solve_buckling: system needs stiffness and geometric stiffness matrices");
    if (k < 1) throw ConfigError("solve_buckling: mode count must be positive");
    const std::vector<int> free = system.free_dofs();
    const SparseMatrix Kr = reduce(system.K, free);
    const Eigen::VectorXd s = detail::jacobi_scaling(Kr);
    const Eigen::MatrixXd Ks = Eigen::MatrixXd(detail::scaled(Kr, s));
    const Eigen::MatrixXd Gs = Eigen::MatrixXd(detail::scaled(reduce(system.Kg, free), s));

    Eigen::LLT<Eigen::MatrixXd> llt(Ks);
    if (llt.info() != Eigen::Success)
        throw SolverError("solve_buckling: reduced stiffness is not positive definite");

    // L^{-1} Kg L^{-T} y = mu y with mu = 1/lambda
    Eigen::MatrixXd C = llt.matrixL().solve(Gs);
    C = llt.matrixL().solve(C.transpose()).transpose();
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success) throw SolverError("solve_buckling: eigensolver failed");

    const Eigen::VectorXd& mu = es.eigenvalues();  // ascending
    const double mu_max = mu.cwiseAbs().maxCoeff();
    std::vector<int> positive;
    for (int i = static_cast<int>(mu.size()) - 1; i >= 0; --i)
        if (mu(i) > 1e-12 * mu_max) positive.push_back(i);
    if (positive.empty() || mu_max == 0.0) throw SolverError("solve_buckling: no positive buckling eigenvalue");

    const int take = std::min<int>(k, static_cast<int>(positive.size()));
    EigenResult out;
    out.values.resize(take);
    out.vectors.resize(Ks.rows(), take);
    out.free_dofs = free;
    out.num_dofs = system.num_dofs;
    const Eigen::MatrixXd K = Eigen::MatrixXd(Kr);
    const Eigen::MatrixXd G = Eigen::MatrixXd(reduce(system.Kg, free));
    for (int i = 0; i < take; ++i) {
        const int idx = positive[i];
        out.values(i) = 1.0 / mu(idx);
        Eigen::VectorXd v = llt.matrixU().solve(es.eigenvectors().col(idx));
        v = s.cwiseProduct(v);
        v /= v.norm();
        out.vectors.col(i) = v;
        const double res = eigen_residual(K, G, out.values(i), v);
        if (!(res <= kEigenResidualTol)) {
            std::ostringstream os;
            os << "solve_buckling: mode " << i + 1 << " residual " << res << " exceeds " << kEigenResidualTol;
            throw SolverError(os.str());
        }
    }
    return out;
}

}  // namespace rptiga
