#include "core/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "core/graph.hpp"
#include "json.hpp"

namespace lrbsl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (k < 1) throw ValidationError("config: K must be >= 1");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda3 >= 0.0) || !(lambda4 >= 0.0))
    throw ValidationError("config: lambda parameters must be nonnegative");
  if (!(sigma > 0.0)) throw ValidationError("config: sigma must be positive");
  if (omega < 1) throw ValidationError("config: omega must be >= 1");
  if (!(eps_guard > 0.0)) throw ValidationError("config: eps_guard must be positive");
  admm.validate();
}

std::string DetectReport::to_json() const {
  nlohmann::json j;
  j["auc"] = auc ? nlohmann::json(*auc) : nlohmann::json(nullptr);
  j["params"] = {
      {"K", params.k},
      {"lambda1", params.lambda1},
      {"lambda2", params.lambda2},
      {"lambda3", params.lambda3},
      {"lambda4", params.lambda4},
      {"sigma", params.sigma},
      {"omega", params.omega},
      {"warm_start", params.warm_start},
      {"eps_guard", params.eps_guard},
      {"mu0", params.admm.mu0},
      {"mu_max", params.admm.mu_max},
      {"gamma", params.admm.gamma},
      {"eps", params.admm.eps},
      {"k_max", params.admm.k_max},
  };
  j["iters_alg1_stage1"] = iters_alg1_stage1;
  j["iters_alg1_stage2"] = iters_alg1_stage2;
  j["iters_alg2"] = iters_alg2;
  j["seconds_lrbsl"] = seconds_lrbsl;
  j["seconds_glr"] = seconds_glr;
  j["seconds_total"] = seconds_total;
  j["h0_ridge"] = h0_ridge;
  return j.dump(2) + "\n";
}

PipelineResult run_detect(const HsiCube& cube, const TargetSpectrum* target,
                          const GroundTruthMask* mask, const PipelineConfig& cfg) {
  cfg.validate();
  if (!target && !mask)
    throw ValidationError("detect: need a target spectrum or a mask to average one from");
  if (mask && (mask->height != cube.height || mask->width != cube.width))
    throw ValidationError("detect: mask dimensions do not match cube");

  const auto t_total = Clock::now();

  const NormalizedCube norm = normalize(cube);
  const Eigen::MatrixXd x = flatten(norm.cube);
  const Eigen::Index bands = x.rows();
  const Eigen::Index n = x.cols();

  Eigen::VectorXd t(bands);
  if (target) {
    if (static_cast<Eigen::Index>(target->values.size()) != bands)
      throw ValidationError("detect: target spectrum length does not match cube bands");
    for (Eigen::Index b = 0; b < bands; ++b) {
      const double v = target->values[static_cast<std::size_t>(b)];
      if (!std::isfinite(v)) throw ValidationError("detect: target spectrum has non-finite values");
      t(b) = v / norm.scale;
    }
  } else {
    const TargetSpectrum averaged = average_target_spectrum(norm.cube, *mask);
    for (Eigen::Index b = 0; b < bands; ++b) t(b) = averaged.values[static_cast<std::size_t>(b)];
  }
  if (t.cwiseAbs().maxCoeff() == 0.0)
    throw ValidationError("detect: target spectrum is all-zero");
  if (cfg.k > std::min(bands, n))
    throw ValidationError("detect: K exceeds min(bands, pixels)");

  PipelineResult out;
  out.report.params = cfg;

  const auto t_lrbsl = Clock::now();
  const LrbslResult lrbsl = run_lrbsl(x, t, cfg.k, cfg.lambda1, cfg.lambda2, cfg.admm,
                                      cfg.warm_start);
  out.report.seconds_lrbsl = seconds_since(t_lrbsl);
  out.report.iters_alg1_stage1 = lrbsl.coding.iterations;
  out.report.iters_alg1_stage2 = lrbsl.subspace.iterations;

  const JointDictionary dict{lrbsl.basis, t};

  const auto t_glr = Clock::now();
  const RegionPartition part = build_partition(cube.height, cube.width, cfg.omega);
  const std::vector<RegionGraph> graphs = build_graphs(x, part, cfg.sigma);
  const CodingResult glr = run_lrb_glr(x, dict, graphs, part, cfg.lambda3, cfg.lambda4, cfg.admm);
  out.report.seconds_glr = seconds_since(t_glr);
  out.report.iters_alg2 = glr.diag.iterations;

  const H0Result h0 = h0_residuals(x, lrbsl.basis);
  const Eigen::VectorXd h1 = h1_residuals(x, dict, glr.coefficients);
  out.report.h0_ridge = h0.ridge_applied;
  out.map = detect(h0.residuals, h1, cube.height, cube.width, cfg.eps_guard);

  if (mask) {
    out.roc = roc_auc(out.map, *mask);
    out.report.auc = out.roc->auc;
  }
  out.report.seconds_total = seconds_since(t_total);
  return out;
}

}  // namespace lrbsl
