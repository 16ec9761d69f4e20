#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ohit/errors.hpp"
#include "ohit/types.hpp"

namespace ohit {

// Per-cluster estimate: mean, unbiased sample covariance, shrinkage intensity
// and the shrunk matrix actually used for sampling.
struct ShrinkageEstimate {
    Vector mu;
    Matrix S;
    double lambda = 0.0;
    Matrix S_star;
    Index n = 0;
};

// Column means and unbiased sample covariance. The covariance is computed on
// one triangle and mirrored, so mirrored entries are exactly equal.
inline std::pair<Vector, Matrix> sample_moments(const Matrix& C) {
    const Index n = C.rows();
    if (n < 2)
        throw InsufficientDataError("covariance needs n >= 2, got n = " +
                                    std::to_string(n));
    const Vector mu = C.colwise().mean().transpose();
    const Matrix Xc = C.rowwise() - mu.transpose();

    Matrix S = Matrix::Zero(C.cols(), C.cols());
    S.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose(),
                                                 1.0 / static_cast<double>(n - 1));
    symmetrize_from_lower(S);
    return {mu, S};
}

// Estimated optimal intensity for the diagonal (unequal-variance) target:
//   lambda = clamp( sum_{i!=j} Var(s_ij) / sum_{i!=j} s_ij^2, 0, 1 )
// with Var(s_ij) = n/(n-1)^3 * sum_k (w_kij - wbar_ij)^2,
// w_kij the centered cross products. A zero denominator (S already diagonal)
// returns 1: the target equals S there, so the choice is arbitrary.
inline double shrinkage_intensity(const Matrix& C) {
    const Index n = C.rows();
    const Index d = C.cols();
    if (n < 2)
        throw InsufficientDataError("shrinkage intensity needs n >= 2, got n = " +
                                    std::to_string(n));

    const Vector mu = C.colwise().mean().transpose();
    const Matrix Xc = C.rowwise() - mu.transpose();
    const Matrix Xc2 = Xc.array().square().matrix();

    // sum_k w_kij^2 and wbar_ij, assembled as matrix products
    Matrix M2 = Matrix::Zero(d, d);
    M2.selfadjointView<Eigen::Lower>().rankUpdate(Xc2.transpose(), 1.0);
    symmetrize_from_lower(M2);
    Matrix Wbar = Matrix::Zero(d, d);
    Wbar.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose(),
                                                    1.0 / static_cast<double>(n));
    symmetrize_from_lower(Wbar);

    const double nn = static_cast<double>(n);
    const double var_scale = nn / ((nn - 1.0) * (nn - 1.0) * (nn - 1.0));
    const double s_scale = nn / (nn - 1.0);

    double num = 0.0, den = 0.0;
    for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) {
            const double var_s = var_scale * (M2(i, j) - nn * Wbar(i, j) * Wbar(i, j));
            const double s_ij = s_scale * Wbar(i, j);
            num += 2.0 * var_s;  // (i,j) and (j,i)
            den += 2.0 * s_ij * s_ij;
        }
    }
    if (den == 0.0) return 1.0;
    return std::clamp(num / den, 0.0, 1.0);
}

// S* = lambda * diag(S) + (1 - lambda) * S: off-diagonals scaled by
// (1 - lambda), diagonal untouched.
inline Matrix shrink_covariance(const Matrix& S, double lambda) {
    if (!is_exactly_symmetric(S))
        throw ContractViolation("shrink_covariance: S is not symmetric");
    if (lambda < 0.0 || lambda > 1.0)
        throw ParameterError("lambda must be in [0, 1]");

    Matrix out = (1.0 - lambda) * S;
    out.diagonal() = S.diagonal();
    symmetrize_from_lower(out);
    return out;
}

// Ridge escalation until a Cholesky factorization succeeds. The ridge scale
// is eps * max(max diagonal, 1e-12) with eps walking 1e-8 .. 1e-2.
inline Matrix ensure_positive_definite(const Matrix& S_star) {
    const Index d = S_star.rows();
    const bool diag_ok = (S_star.diagonal().array() > 0.0).all();

    if (diag_ok) {
        Eigen::LLT<Matrix> llt(S_star);
        if (llt.info() == Eigen::Success) return S_star;
    }

    const double base = std::max(S_star.diagonal().maxCoeff(), 1e-12);
    for (double eps = 1e-8; eps <= 1e-2 * (1.0 + 1e-9); eps *= 10.0) {
        Matrix M = S_star;
        M.diagonal().array() += eps * base;
        if (!(M.diagonal().array() > 0.0).all()) continue;
        Eigen::LLT<Matrix> llt(M);
        if (llt.info() == Eigen::Success) return M;
    }
    throw NumericalDegeneracyError(
        "matrix of size " + std::to_string(d) +
        " not factorizable after ridge escalation to 1e-2");
}

// Eigenvalue clamp used by the `er` ablation: eigenvalues below
// tau * lambda_max are raised to that floor. Returns S unchanged when no
// eigenvalue is below the floor.
inline Matrix regularize_er(const Matrix& S, double tau = 1e-4) {
    if (!is_exactly_symmetric(S))
        throw ContractViolation("regularize_er: S is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success)
        throw NumericalDegeneracyError("eigendecomposition failed");

    const Vector evals = es.eigenvalues();
    const double floor = tau * evals.maxCoeff();
    if ((evals.array() >= floor).all()) return S;

    const Vector clamped = evals.cwiseMax(floor);
    Matrix out = es.eigenvectors() * clamped.asDiagonal() *
                 es.eigenvectors().transpose();
    symmetrize_from_lower(out);
    return out;
}

// Standard per-cluster estimate: moments, optimal intensity, shrink, then the
// positive-definite safeguard.
inline ShrinkageEstimate shrink_estimate(const Matrix& C) {
    ShrinkageEstimate est;
    est.n = C.rows();
    std::tie(est.mu, est.S) = sample_moments(C);
    est.lambda = shrinkage_intensity(C);
    est.S_star = ensure_positive_definite(shrink_covariance(est.S, est.lambda));
    return est;
}

// Debug dump: cluster_id, n, lambda, condition-number estimate of S*.
inline void dump_estimates(std::ostream& out,
                           const std::vector<std::pair<int, ShrinkageEstimate>>& estimates,
                           char delim = ',') {
    for (const auto& [id, est] : estimates) {
        double cond = std::numeric_limits<double>::infinity();
        Eigen::SelfAdjointEigenSolver<Matrix> es(est.S_star,
                                                 Eigen::EigenvaluesOnly);
        if (es.info() == Eigen::Success) {
            const double lo = es.eigenvalues().minCoeff();
            const double hi = es.eigenvalues().maxCoeff();
            if (lo > 0.0) cond = hi / lo;
        }
        out << id << delim << est.n << delim << est.lambda << delim << cond
            << '\n';
    }
}

}  // namespace ohit
