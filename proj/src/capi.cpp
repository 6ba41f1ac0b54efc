#include "lrbslglr.h"

#include <cmath>
#include <cstring>
#include <string>

#include "core/detector.hpp"
#include "core/pipeline.hpp"
#include "core/raster.hpp"
#include "core/synth.hpp"

struct lrg_cube {
  lrbsl::HsiCube v;
};
struct lrg_mask {
  lrbsl::GroundTruthMask v;
};
struct lrg_spectrum {
  lrbsl::TargetSpectrum v;
};
struct lrg_result {
  lrbsl::PipelineResult v;
  std::string report_json;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const char* msg) { g_last_error = msg ? msg : "unknown error"; }

template <typename Fn>
lrg_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return LRG_OK;
  } catch (const lrbsl::ValidationError& e) {
    set_error(e.what());
    return LRG_ERR_VALIDATION;
  } catch (const lrbsl::IoError& e) {
    set_error(e.what());
    return LRG_ERR_IO;
  } catch (const lrbsl::NumericError& e) {
    set_error(e.what());
    return LRG_ERR_NUMERIC;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LRG_ERR_NUMERIC;
  } catch (...) {
    set_error("unknown failure");
    return LRG_ERR_NUMERIC;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw lrbsl::ValidationError(what);
}

lrbsl::PipelineConfig to_config(const lrg_params& p) {
  lrbsl::PipelineConfig cfg;
  cfg.k = p.k;
  cfg.lambda1 = p.lambda1;
  cfg.lambda2 = p.lambda2;
  cfg.lambda3 = p.lambda3;
  cfg.lambda4 = p.lambda4;
  cfg.sigma = p.sigma;
  cfg.omega = p.omega;
  cfg.admm.mu0 = p.mu0;
  cfg.admm.mu_max = p.mu_max;
  cfg.admm.gamma = p.gamma;
  cfg.admm.eps = p.eps;
  cfg.admm.k_max = p.k_max;
  cfg.warm_start = p.warm_start != 0;
  cfg.eps_guard = p.eps_guard;
  return cfg;
}

// A stored score map is a 1-band cube; scores are its band-0 plane.
Eigen::VectorXd map_scores(const lrg_cube* map) {
  require(map->v.bands == 1, "score map must be a 1-band cube");
  const int n = map->v.pixels();
  Eigen::VectorXd scores(n);
  for (int i = 0; i < n; ++i) scores(i) = map->v.values[static_cast<std::size_t>(i)];
  return scores;
}

}  // namespace

extern "C" {

const char* lrg_last_error(void) { return g_last_error.c_str(); }

/* ---- cube ---- */

lrg_status lrg_cube_load(const char* path, lrg_cube** out) {
  return guarded([&] {
    require(path && out, "lrg_cube_load: null argument");
    *out = new lrg_cube{lrbsl::load_cube(path)};
  });
}

lrg_status lrg_cube_save(const lrg_cube* cube, const char* path, const char* dtype) {
  return guarded([&] {
    require(cube && path, "lrg_cube_save: null argument");
    lrbsl::save_cube(cube->v, path, dtype ? dtype : "f64");
  });
}

lrg_status lrg_cube_dims(const lrg_cube* cube, int32_t* height, int32_t* width, int32_t* bands) {
  return guarded([&] {
    require(cube != nullptr, "lrg_cube_dims: null cube");
    if (height) *height = cube->v.height;
    if (width) *width = cube->v.width;
    if (bands) *bands = cube->v.bands;
  });
}

lrg_status lrg_cube_values(const lrg_cube* cube, double* buffer, size_t buffer_len) {
  return guarded([&] {
    require(cube && buffer, "lrg_cube_values: null argument");
    require(buffer_len >= cube->v.values.size(), "lrg_cube_values: buffer too small");
    std::memcpy(buffer, cube->v.values.data(), cube->v.values.size() * sizeof(double));
  });
}

void lrg_cube_free(lrg_cube* cube) { delete cube; }

/* ---- mask ---- */

lrg_status lrg_mask_load(const char* path, lrg_mask** out) {
  return guarded([&] {
    require(path && out, "lrg_mask_load: null argument");
    *out = new lrg_mask{lrbsl::load_mask(path)};
  });
}

lrg_status lrg_mask_save(const lrg_mask* mask, const char* path) {
  return guarded([&] {
    require(mask && path, "lrg_mask_save: null argument");
    lrbsl::save_mask(mask->v, path);
  });
}

lrg_status lrg_mask_dims(const lrg_mask* mask, int32_t* height, int32_t* width) {
  return guarded([&] {
    require(mask != nullptr, "lrg_mask_dims: null mask");
    if (height) *height = mask->v.height;
    if (width) *width = mask->v.width;
  });
}

void lrg_mask_free(lrg_mask* mask) { delete mask; }

/* ---- spectrum ---- */

lrg_status lrg_spectrum_load_csv(const char* path, lrg_spectrum** out) {
  return guarded([&] {
    require(path && out, "lrg_spectrum_load_csv: null argument");
    *out = new lrg_spectrum{lrbsl::load_spectrum_csv(path)};
  });
}

lrg_status lrg_spectrum_save_csv(const lrg_spectrum* spectrum, const char* path) {
  return guarded([&] {
    require(spectrum && path, "lrg_spectrum_save_csv: null argument");
    lrbsl::save_spectrum_csv(spectrum->v, path);
  });
}

lrg_status lrg_spectrum_from_mask(const lrg_cube* cube, const lrg_mask* mask, lrg_spectrum** out) {
  return guarded([&] {
    require(cube && mask && out, "lrg_spectrum_from_mask: null argument");
    *out = new lrg_spectrum{lrbsl::average_target_spectrum(cube->v, mask->v)};
  });
}

lrg_status lrg_spectrum_length(const lrg_spectrum* spectrum, int32_t* length) {
  return guarded([&] {
    require(spectrum && length, "lrg_spectrum_length: null argument");
    *length = static_cast<int32_t>(spectrum->v.values.size());
  });
}

lrg_status lrg_spectrum_values(const lrg_spectrum* spectrum, double* buffer, size_t buffer_len) {
  return guarded([&] {
    require(spectrum && buffer, "lrg_spectrum_values: null argument");
    require(buffer_len >= spectrum->v.values.size(), "lrg_spectrum_values: buffer too small");
    std::memcpy(buffer, spectrum->v.values.data(), spectrum->v.values.size() * sizeof(double));
  });
}

void lrg_spectrum_free(lrg_spectrum* spectrum) { delete spectrum; }

/* ---- pipeline ---- */

void lrg_params_init(lrg_params* params) {
  if (!params) return;
  const lrbsl::PipelineConfig cfg;
  params->k = cfg.k;
  params->lambda1 = cfg.lambda1;
  params->lambda2 = cfg.lambda2;
  params->lambda3 = cfg.lambda3;
  params->lambda4 = cfg.lambda4;
  params->sigma = cfg.sigma;
  params->omega = cfg.omega;
  params->mu0 = cfg.admm.mu0;
  params->mu_max = cfg.admm.mu_max;
  params->gamma = cfg.admm.gamma;
  params->eps = cfg.admm.eps;
  params->k_max = cfg.admm.k_max;
  params->warm_start = cfg.warm_start ? 1 : 0;
  params->eps_guard = cfg.eps_guard;
}

lrg_status lrg_detect(const lrg_cube* cube, const lrg_spectrum* target, const lrg_mask* mask,
                      const lrg_params* params, lrg_result** out) {
  return guarded([&] {
    require(cube && params && out, "lrg_detect: null argument");
    auto result = new lrg_result;
    try {
      result->v = lrbsl::run_detect(cube->v, target ? &target->v : nullptr,
                                    mask ? &mask->v : nullptr, to_config(*params));
      result->report_json = result->v.report.to_json();
    } catch (...) {
      delete result;
      throw;
    }
    *out = result;
  });
}

lrg_status lrg_result_scores(const lrg_result* result, double* buffer, size_t buffer_len) {
  return guarded([&] {
    require(result && buffer, "lrg_result_scores: null argument");
    const auto& scores = result->v.map.scores;
    require(buffer_len >= static_cast<size_t>(scores.size()), "lrg_result_scores: buffer too small");
    std::memcpy(buffer, scores.data(), static_cast<size_t>(scores.size()) * sizeof(double));
  });
}

lrg_status lrg_result_map_cube(const lrg_result* result, lrg_cube** out) {
  return guarded([&] {
    require(result && out, "lrg_result_map_cube: null argument");
    const auto& map = result->v.map;
    Eigen::MatrixXd row = map.scores.transpose();
    *out = new lrg_cube{lrbsl::unflatten(row, map.height, map.width)};
  });
}

const char* lrg_result_report_json(const lrg_result* result) {
  return result ? result->report_json.c_str() : "";
}

lrg_status lrg_result_auc(const lrg_result* result, double* auc) {
  return guarded([&] {
    require(result && auc, "lrg_result_auc: null argument");
    require(result->v.report.auc.has_value(), "lrg_result_auc: no mask was supplied, AUC unavailable");
    *auc = *result->v.report.auc;
  });
}

lrg_status lrg_result_seconds_total(const lrg_result* result, double* seconds) {
  return guarded([&] {
    require(result && seconds, "lrg_result_seconds_total: null argument");
    *seconds = result->v.report.seconds_total;
  });
}

lrg_status lrg_result_write_scores_csv(const lrg_result* result, const char* path) {
  return guarded([&] {
    require(result && path, "lrg_result_write_scores_csv: null argument");
    lrbsl::write_scores_csv(result->v.map, path);
  });
}

lrg_status lrg_result_write_roc_csv(const lrg_result* result, const char* path) {
  return guarded([&] {
    require(result && path, "lrg_result_write_roc_csv: null argument");
    require(result->v.roc.has_value(), "lrg_result_write_roc_csv: no mask was supplied, no ROC");
    lrbsl::write_roc_csv(*result->v.roc, path);
  });
}

void lrg_result_free(lrg_result* result) { delete result; }

/* ---- evaluation ---- */

lrg_status lrg_eval_auc(const lrg_cube* map, const lrg_mask* mask, double* auc) {
  return guarded([&] {
    require(map && mask && auc, "lrg_eval_auc: null argument");
    require(map->v.height == mask->v.height && map->v.width == mask->v.width,
            "lrg_eval_auc: map and mask dimensions differ");
    *auc = lrbsl::roc_auc(map_scores(map), mask->v).auc;
  });
}

lrg_status lrg_eval_write_roc_csv(const lrg_cube* map, const lrg_mask* mask, const char* path) {
  return guarded([&] {
    require(map && mask && path, "lrg_eval_write_roc_csv: null argument");
    require(map->v.height == mask->v.height && map->v.width == mask->v.width,
            "lrg_eval_write_roc_csv: map and mask dimensions differ");
    lrbsl::write_roc_csv(lrbsl::roc_auc(map_scores(map), mask->v), path);
  });
}

/* ---- synthetic scenes ---- */

void lrg_synth_spec_init(lrg_synth_spec* spec) {
  if (!spec) return;
  const lrbsl::SyntheticSpec s;
  spec->height = s.height;
  spec->width = s.width;
  spec->bands = s.bands;
  spec->background_rank = s.background_rank;
  spec->n_targets = s.n_targets;
  spec->target_abundance = s.target_abundance;
  spec->noise_snr_db = s.noise_snr_db;
  spec->seed = s.seed;
}

lrg_status lrg_synth(const lrg_synth_spec* spec, lrg_cube** cube, lrg_mask** mask,
                     lrg_spectrum** target) {
  return guarded([&] {
    require(spec != nullptr, "lrg_synth: null spec");
    lrbsl::SyntheticSpec s;
    s.height = spec->height;
    s.width = spec->width;
    s.bands = spec->bands;
    s.background_rank = spec->background_rank;
    s.n_targets = spec->n_targets;
    s.target_abundance = spec->target_abundance;
    s.noise_snr_db = spec->noise_snr_db;
    s.seed = spec->seed;
    lrbsl::SyntheticScene scene = lrbsl::generate_scene(s);
    if (cube) *cube = new lrg_cube{std::move(scene.cube)};
    if (mask) *mask = new lrg_mask{std::move(scene.mask)};
    if (target) *target = new lrg_spectrum{std::move(scene.target)};
  });
}

} /* extern "C" */
