#include "core/detector.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/prox.hpp"

namespace lrbsl {

H0Result h0_residuals(const Eigen::MatrixXd& x, const Eigen::MatrixXd& background) {
  if (background.rows() != x.rows())
    throw ValidationError("h0_residuals: band count mismatch");
  if (background.cols() < 1) throw ValidationError("h0_residuals: empty background");

  const Eigen::Index k = background.cols();
  Eigen::MatrixXd gram = background.transpose() * background;
  gram = ((gram + gram.transpose()) * 0.5).eval();

  H0Result out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    const double ridge = 1e-10 * gram.trace() / static_cast<double>(k);
    gram.diagonal().array() += ridge;
    out.ridge_applied = true;
  }

  Eigen::MatrixXd s1;
  try {
    s1 = spd_solve(gram, background.transpose() * x, SolveSide::Left, "A^T A");
  } catch (const NumericError&) {
    throw NumericError("h0_residuals: background Gram is rank-deficient beyond ridge rescue");
  }

  const Eigen::MatrixXd r = x - background * s1;
  out.residuals.resize(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) out.residuals(i) = r.col(i).squaredNorm();
  return out;
}

Eigen::VectorXd h1_residuals(const Eigen::MatrixXd& x, const JointDictionary& dict,
                             const Eigen::MatrixXd& coefficients) {
  dict.validate(x.rows());
  const Eigen::MatrixXd b = dict.assembled();
  if (coefficients.rows() != b.cols() || coefficients.cols() != x.cols())
    throw ValidationError("h1_residuals: coefficient dimensions do not match dictionary/pixels");
  const Eigen::MatrixXd r = x - b * coefficients;
  Eigen::VectorXd out(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) out(i) = r.col(i).squaredNorm();
  return out;
}

DetectionMap detect(const Eigen::VectorXd& h0, const Eigen::VectorXd& h1, int height, int width,
                    double eps_guard) {
  if (h0.size() != h1.size()) throw ValidationError("detect: residual lengths differ");
  if (h0.size() != static_cast<Eigen::Index>(height) * width)
    throw ValidationError("detect: residual length does not match dimensions");
  if (!(eps_guard > 0.0)) throw ValidationError("detect: eps_guard must be positive");

  DetectionMap map;
  map.height = height;
  map.width = width;
  map.scores = h0.array() / (h1.array() + eps_guard);
  if (!map.scores.allFinite()) throw NumericError("detect: non-finite scores");
  return map;
}

RocCurve roc_auc(const Eigen::VectorXd& scores, const GroundTruthMask& mask) {
  mask.validate();
  if (scores.size() != static_cast<Eigen::Index>(mask.height) * mask.width)
    throw ValidationError("roc_auc: score count does not match mask dimensions");
  if (!scores.allFinite()) throw ValidationError("roc_auc: non-finite scores");

  const Eigen::Index n = scores.size();
  std::int64_t n_pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) n_pos += (mask.flags[static_cast<std::size_t>(i)] != 0);
  const std::int64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("roc_auc: mask must contain both target and background pixels");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&scores](Eigen::Index a, Eigen::Index b) {
    return scores(a) > scores(b);
  });

  RocCurve roc;
  const double inf = std::numeric_limits<double>::infinity();
  roc.points.push_back({inf, 0.0, 0.0});

  // Tie groups flip together; integer area makes trapezoid == Mann-Whitney.
  std::int64_t tp = 0, fp = 0, area2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = scores(order[i]);
    const std::int64_t tp_prev = tp, fp_prev = fp;
    while (i < order.size() && scores(order[i]) == v) {
      if (mask.flags[static_cast<std::size_t>(order[i])]) ++tp; else ++fp;
      ++i;
    }
    area2 += (fp - fp_prev) * (tp + tp_prev);
    roc.points.push_back({v, static_cast<double>(fp) / static_cast<double>(n_neg),
                          static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  roc.points.push_back({-inf, 1.0, 1.0});
  roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return roc;
}

RocCurve roc_auc(const DetectionMap& map, const GroundTruthMask& mask) {
  if (map.height != mask.height || map.width != mask.width)
    throw ValidationError("roc_auc: map and mask dimensions differ");
  return roc_auc(map.scores, mask);
}

DetectionMap sam_baseline(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, int height,
                          int width) {
  if (target.size() != x.rows()) throw ValidationError("sam_baseline: target length mismatch");
  if (x.cols() != static_cast<Eigen::Index>(height) * width)
    throw ValidationError("sam_baseline: pixel count does not match dimensions");
  const double tn = target.norm();
  if (!(tn > 0.0)) throw ValidationError("sam_baseline: target spectrum is all-zero");

  DetectionMap map;
  map.height = height;
  map.width = width;
  map.scores.resize(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double xn = x.col(i).norm();
    map.scores(i) = xn > 0.0 ? std::max(x.col(i).dot(target) / (xn * tn), 0.0) : 0.0;
  }
  return map;
}

void write_roc_csv(const RocCurve& roc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write ROC csv " + path);
  out << "threshold,fpr,tpr\n";
  char buf[128];
  for (const auto& p : roc.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.fpr, p.tpr);
    out << buf;
  }
  if (!out) throw IoError("failed writing ROC csv " + path);
}

void write_scores_csv(const DetectionMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scores csv " + path);
  out << "row,col,score\n";
  char buf[96];
  for (int r = 0; r < map.height; ++r)
    for (int c = 0; c < map.width; ++c) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", r, c,
                    map.scores(static_cast<Eigen::Index>(r) * map.width + c));
      out << buf;
    }
  if (!out) throw IoError("failed writing scores csv " + path);
}

}  // namespace lrbsl
