#pragma once

#include <Eigen/Core>
#include <string>

#include "core/errors.hpp"

namespace lrbsl {

// Top-K factorization X ~ left * singular.asDiagonal() * right^T.
struct SvdTriple {
  Eigen::MatrixXd left;      // L x K, semiunitary
  Eigen::VectorXd singular;  // K, nonincreasing, >= 0
  Eigen::MatrixXd right;     // N x K, semiunitary
};

// Elementwise sign(m) * max(|m| - tau, 0).
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau);

// Singular value thresholding: U * soft(Sigma, tau) * V^T.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

// Deterministic top-K SVD. Each left singular vector is flipped so its
// largest-magnitude entry is positive, with the matching flip on the right.
SvdTriple truncated_svd(const Eigen::MatrixXd& x, int k);

enum class SolveSide { Left, Right };

// Solves G*Y = rhs (Left) or Y*G = rhs (Right) for symmetric positive-definite
// G via Cholesky with one refinement step. `context` names the system in the
// error raised when the factorization fails.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs,
                          SolveSide side, const std::string& context = "spd system");

// Tr(S * Lap * S^T), the graph smoothness functional.
double graph_trace(const Eigen::MatrixXd& s, const Eigen::MatrixXd& laplacian);

}  // namespace lrbsl
