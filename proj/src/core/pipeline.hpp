#pragma once

#include <optional>
#include <string>

#include "core/admm.hpp"
#include "core/detector.hpp"
#include "core/raster.hpp"

namespace lrbsl {

struct PipelineConfig {
  int k = 12;
  double lambda1 = 1e-4;
  double lambda2 = 1e-4;
  double lambda3 = 1.0;
  double lambda4 = 1.0;
  double sigma = 0.3;
  int omega = 10;
  AdmmConfig admm;
  bool warm_start = false;
  double eps_guard = 1e-12;

  void validate() const;
};

struct DetectReport {
  PipelineConfig params;
  int iters_alg1_stage1 = 0;
  int iters_alg1_stage2 = 0;
  int iters_alg2 = 0;
  double seconds_lrbsl = 0.0;
  double seconds_glr = 0.0;
  double seconds_total = 0.0;
  bool h0_ridge = false;
  std::optional<double> auc;

  std::string to_json() const;
};

struct PipelineResult {
  DetectionMap map;
  DetectReport report;
  std::optional<RocCurve> roc;
};

// Full detector: normalize -> flatten -> subspace learning -> region graphs
// -> graph-regularized coding -> error-ratio scores. The target spectrum is
// given in the raw cube's scale (it is rescaled alongside the cube) or, when
// null, averaged from the mask's target pixels. The mask, when present, also
// produces the ROC/AUC.
PipelineResult run_detect(const HsiCube& cube, const TargetSpectrum* target,
                          const GroundTruthMask* mask, const PipelineConfig& cfg);

}  // namespace lrbsl
