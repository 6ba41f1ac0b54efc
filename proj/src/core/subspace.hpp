#pragma once

#include <Eigen/Core>

#include "core/admm.hpp"
#include "core/errors.hpp"

namespace lrbsl {

// Joint dictionary B = [A, t]: K learned background bases plus the target.
struct JointDictionary {
  Eigen::MatrixXd background;  // L x K
  Eigen::VectorXd target;      // L

  Eigen::MatrixXd assembled() const;
  void validate(Eigen::Index bands) const;
};

struct CodingResult {
  Eigen::MatrixXd coefficients;  // (K+1) x N, rows [S1; S2]
  AdmmDiagnostics diag;
};

struct SubspaceResult {
  Eigen::MatrixXd basis;  // L x K
  AdmmDiagnostics diag;
};

// Stage 1: min_S 1/2 ||X - B S||_F^2 + lambda1 ||S||_1 by ADMM with the
// splitting Z = S. Per iteration:
//   Z <- soft(S + G/mu, lambda1/mu)
//   S <- (B^T B + mu I)^-1 (B^T X + mu Z - G)
//   G <- G + mu (S - Z),  mu <- min(mu_max, mu * gamma)
// until ||S - Z||_F < eps or k_max iterations.
CodingResult sparse_code(const Eigen::MatrixXd& x, const JointDictionary& dict,
                         double lambda1, const AdmmConfig& cfg);

// Stage 2: min_A 1/2 ||X - A S1 - t S2||_F^2 + lambda2 ||A||_* by ADMM with
// the splitting D = A. Per iteration:
//   D <- svt(A + G/mu, lambda2/mu)
//   A <- ((X - t S2) S1^T + mu D - G) (S1 S1^T + mu I)^-1
//   G <- G + mu (A - D),  mu schedule as above
// until ||A - D||_F < eps. The Gram factor is S1 S1^T (K x K); anything
// larger would not conform with A.
// `initial_basis`, when given, warm-starts A (D and G still start at zero).
SubspaceResult learn_background(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                const Eigen::MatrixXd& s1, const Eigen::RowVectorXd& s2,
                                double lambda2, const AdmmConfig& cfg,
                                const Eigen::MatrixXd* initial_basis = nullptr);

struct LrbslResult {
  Eigen::MatrixXd basis;      // learned background subspace A, L x K
  AdmmDiagnostics coding;     // stage 1 diagnostics
  AdmmDiagnostics subspace;   // stage 2 diagnostics
};

// Full two-stage pass: truncated-SVD seed A0, sparse coding against [A0, t],
// row split S = [S1; S2], then nuclear-norm subspace refinement.
LrbslResult run_lrbsl(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, int k,
                      double lambda1, double lambda2, const AdmmConfig& cfg,
                      bool warm_start = false);

}  // namespace lrbsl
