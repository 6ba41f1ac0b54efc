#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "core/raster.hpp"
#include "core/subspace.hpp"

namespace lrbsl {

struct DetectionMap {
  int height = 0;
  int width = 0;
  Eigen::VectorXd scores;  // per pixel, row-major order, nonnegative
};

struct H0Result {
  Eigen::VectorXd residuals;  // squared column norms of X - A S1
  bool ridge_applied = false;
};

// Background-only hypothesis: least-squares fit against A, per-pixel squared
// residual. A near-singular Gram gets a small ridge and sets ridge_applied.
H0Result h0_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& background);

// Joint hypothesis: per-pixel squared residual of X - B S for the supplied
// coefficients.
Eigen::VectorXd h1_residuals(const Eigen::MatrixXd& x, const JointDictionary& dict,
                             const Eigen::MatrixXd& coefficients);

// Error-ratio score d_i = h0_i / (h1_i + eps_guard).
DetectionMap detect(const Eigen::VectorXd& h0, const Eigen::VectorXd& h1, int height, int width,
                    double eps_guard = 1e-12);

struct RocPoint {
  double threshold;  // +-inf at the endpoints
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // fpr nondecreasing, (0,0) first, (1,1) last
  double auc = 0.0;
};

// Sweeps every distinct score value (plus +-inf endpoints); trapezoidal AUC,
// computed in integer arithmetic so it equals the Mann-Whitney statistic.
RocCurve roc_auc(const Eigen::VectorXd& scores, const GroundTruthMask& mask);
RocCurve roc_auc(const DetectionMap& map, const GroundTruthMask& mask);

// Cosine of the spectral angle to the target; zero pixels score 0.
DetectionMap sam_baseline(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int height,
                          int width);

void write_roc_csv(const RocCurve& roc, const std::string& path);
void write_scores_csv(const DetectionMap& map, const std::string& path);

}  // namespace lrbsl
