// lrbslglr command-line tool: detect / synth / sweep / eval.
//
// Exit codes: 0 success, 1 argument validation, 2 IO, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrbslglr.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "lrbslglr: " << message << "\n";
  std::exit(code);
}

void check(lrg_status status) {
  if (status != LRG_OK) die(static_cast<int>(status), lrg_last_error());
}

// RAII for the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};
using CubeHandle = Handle<lrg_cube, lrg_cube_free>;
using MaskHandle = Handle<lrg_mask, lrg_mask_free>;
using SpectrumHandle = Handle<lrg_spectrum, lrg_spectrum_free>;
using ResultHandle = Handle<lrg_result, lrg_result_free>;

// key=value configuration file; '#' starts a comment. CLI flags take
// precedence over file values, which take precedence over defaults.
class ConfigFile {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) die(kExitIo, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        die(kExitValidation, "config " + path + " line " + std::to_string(lineno) +
                                 ": expected key=value");
      values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }

  // An empty `flag` marks a config-only key with no CLI counterpart.
  template <typename T>
  void apply(const CLI::App& cmd, const std::string& flag, const std::string& key, T& target) const {
    if (!flag.empty() && cmd.count(flag) > 0) return;  // explicit flag wins
    const auto it = values_.find(key);
    if (it == values_.end()) return;
    if (!parse(it->second, target))
      die(kExitValidation, "config key '" + key + "': cannot parse '" + it->second + "'");
  }

 private:
  static bool parse(const std::string& s, double& out) {
    try {
      std::size_t pos = 0;
      out = std::stod(s, &pos);
      return pos == s.size();
    } catch (const std::exception&) {
      return false;
    }
  }
  static bool parse(const std::string& s, int32_t& out) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      out = static_cast<int32_t>(v);
      return pos == s.size();
    } catch (const std::exception&) {
      return false;
    }
  }
  static bool parse(const std::string& s, uint64_t& out) {
    try {
      std::size_t pos = 0;
      out = std::stoull(s, &pos);
      return pos == s.size();
    } catch (const std::exception&) {
      return false;
    }
  }
  static bool parse(const std::string& s, bool& out) {
    if (s == "1" || s == "true" || s == "on" || s == "yes") {
      out = true;
      return true;
    }
    if (s == "0" || s == "false" || s == "off" || s == "no") {
      out = false;
      return true;
    }
    return false;
  }

  std::map<std::string, std::string> values_;
};

struct ParamFlags {
  lrg_params params;
  bool warm_start_flag = false;
  std::string config_path;

  void add_to(CLI::App* cmd) {
    lrg_params_init(&params);
    cmd->add_option("--K", params.k, "background subspace size")->capture_default_str();
    cmd->add_option("--lambda1", params.lambda1, "stage-1 sparsity weight")->capture_default_str();
    cmd->add_option("--lambda2", params.lambda2, "nuclear-norm weight")->capture_default_str();
    cmd->add_option("--lambda3", params.lambda3, "graph smoothness weight")->capture_default_str();
    cmd->add_option("--lambda4", params.lambda4, "joint-coding sparsity weight")->capture_default_str();
    cmd->add_option("--sigma", params.sigma, "squared-distance threshold for region graphs")
        ->capture_default_str();
    cmd->add_option("--omega", params.omega, "region grid cell side, pixels")->capture_default_str();
    cmd->add_flag("--warm-start", warm_start_flag, "seed the subspace refinement with the SVD basis");
    cmd->add_option("--config", config_path, "key=value config file (flags override it)");
  }

  // Config keys mirror the flag names, plus the ADMM knobs that have no flag.
  void finalize(const CLI::App& cmd) {
    ConfigFile cfg;
    if (!config_path.empty()) cfg.load(config_path);
    cfg.apply(cmd, "--K", "K", params.k);
    cfg.apply(cmd, "--lambda1", "lambda1", params.lambda1);
    cfg.apply(cmd, "--lambda2", "lambda2", params.lambda2);
    cfg.apply(cmd, "--lambda3", "lambda3", params.lambda3);
    cfg.apply(cmd, "--lambda4", "lambda4", params.lambda4);
    cfg.apply(cmd, "--sigma", "sigma", params.sigma);
    cfg.apply(cmd, "--omega", "omega", params.omega);
    bool warm = warm_start_flag;
    cfg.apply(cmd, "--warm-start", "warm_start", warm);
    params.warm_start = warm ? 1 : 0;
    cfg.apply(cmd, "", "mu0", params.mu0);
    cfg.apply(cmd, "", "mu_max", params.mu_max);
    cfg.apply(cmd, "", "gamma", params.gamma);
    cfg.apply(cmd, "", "eps", params.eps);
    cfg.apply(cmd, "", "k_max", params.k_max);
    cfg.apply(cmd, "", "eps_guard", params.eps_guard);
    validate();
  }

  void validate() const {
    if (params.k < 1) die(kExitValidation, "--K must be >= 1");
    if (params.omega < 1) die(kExitValidation, "--omega must be >= 1");
    if (!(params.sigma > 0.0)) die(kExitValidation, "--sigma must be positive");
    if (params.lambda1 < 0 || params.lambda2 < 0 || params.lambda3 < 0 || params.lambda4 < 0)
      die(kExitValidation, "--lambda1..4 must be nonnegative");
    if (!(params.mu0 > 0.0) || !(params.mu_max >= params.mu0))
      die(kExitValidation, "mu0/mu_max must satisfy 0 < mu0 <= mu_max");
    if (!(params.gamma > 1.0)) die(kExitValidation, "gamma must be > 1");
    if (!(params.eps > 0.0)) die(kExitValidation, "eps must be positive");
    if (params.k_max < 1) die(kExitValidation, "k_max must be >= 1");
    if (!(params.eps_guard > 0.0)) die(kExitValidation, "eps_guard must be positive");
  }
};

void make_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) die(kExitIo, "cannot create output directory " + out);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) die(kExitIo, "cannot write " + path);
  f << text;
  if (!f) die(kExitIo, "failed writing " + path);
}

double report_auc_or_die(const lrg_result* result) {
  double auc = 0.0;
  check(lrg_result_auc(result, &auc));
  return auc;
}

// Runs the detector and writes map, scores, report (and roc when mask given)
// into out_dir. Returns the result handle for callers that need the numbers.
void run_detect_to_dir(const lrg_cube* cube, const lrg_spectrum* target, const lrg_mask* mask,
                       const lrg_params& params, const std::string& out_dir,
                       ResultHandle& result) {
  check(lrg_detect(cube, target, mask, &params, result.out()));
  make_out_dir(out_dir);

  CubeHandle map;
  check(lrg_result_map_cube(result.get(), map.out()));
  check(lrg_cube_save(map.get(), (fs::path(out_dir) / "map").string().c_str(), "f64"));
  check(lrg_result_write_scores_csv(result.get(), (fs::path(out_dir) / "scores.csv").string().c_str()));
  write_text((fs::path(out_dir) / "report.json").string(), lrg_result_report_json(result.get()));
  if (mask)
    check(lrg_result_write_roc_csv(result.get(), (fs::path(out_dir) / "roc.csv").string().c_str()));
}

int cmd_detect(const std::string& cube_path, const std::string& target_path,
               const std::string& mask_path, const ParamFlags& flags, const std::string& out_dir) {
  if (target_path.empty() && mask_path.empty())
    die(kExitValidation, "detect needs --target or --mask to define the target spectrum");

  CubeHandle cube;
  check(lrg_cube_load(cube_path.c_str(), cube.out()));
  MaskHandle mask;
  if (!mask_path.empty()) check(lrg_mask_load(mask_path.c_str(), mask.out()));
  SpectrumHandle target;
  if (!target_path.empty()) check(lrg_spectrum_load_csv(target_path.c_str(), target.out()));

  ResultHandle result;
  run_detect_to_dir(cube.get(), target.get(), mask.get(), flags.params, out_dir, result);

  if (mask.get()) std::printf("auc=%.17g\n", report_auc_or_die(result.get()));
  double seconds = 0.0;
  check(lrg_result_seconds_total(result.get(), &seconds));
  std::printf("seconds=%.3f\nout=%s\n", seconds, out_dir.c_str());
  return 0;
}

int cmd_synth(const lrg_synth_spec& spec, const std::string& out_dir) {
  CubeHandle cube;
  MaskHandle mask;
  SpectrumHandle target;
  check(lrg_synth(&spec, cube.out(), mask.out(), target.out()));
  make_out_dir(out_dir);
  check(lrg_cube_save(cube.get(), (fs::path(out_dir) / "cube").string().c_str(), "f64"));
  check(lrg_mask_save(mask.get(), (fs::path(out_dir) / "mask.pgm").string().c_str()));
  check(lrg_spectrum_save_csv(target.get(), (fs::path(out_dir) / "target.csv").string().c_str()));
  std::printf("out=%s\n", out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& cube_path, const std::string& target_path,
              const std::string& mask_path, ParamFlags flags, const std::string& param,
              const std::string& values_csv, const std::string& out_dir) {
  static const std::map<std::string, int> kParams = {
      {"K", 0},       {"sigma", 1},   {"omega", 2},   {"lambda1", 3},
      {"lambda2", 4}, {"lambda3", 5}, {"lambda4", 6},
  };
  const auto it = kParams.find(param);
  if (it == kParams.end())
    die(kExitValidation, "--param must be one of K, sigma, omega, lambda1..lambda4");
  if (mask_path.empty()) die(kExitValidation, "sweep needs --mask to evaluate AUC");

  std::vector<double> values;
  std::stringstream ss(values_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      die(kExitValidation, "--values: cannot parse '" + tok + "'");
    }
  }
  if (values.empty()) die(kExitValidation, "--values must list at least one value");

  CubeHandle cube;
  check(lrg_cube_load(cube_path.c_str(), cube.out()));
  MaskHandle mask;
  check(lrg_mask_load(mask_path.c_str(), mask.out()));
  SpectrumHandle target;
  if (!target_path.empty()) check(lrg_spectrum_load_csv(target_path.c_str(), target.out()));

  make_out_dir(out_dir);
  std::string csv = "value,auc,seconds\n";
  for (double v : values) {
    switch (it->second) {
      case 0:
      case 2: {
        if (v < 1.0 || v != std::floor(v))
          die(kExitValidation, "--values for " + param + " must be positive integers");
        if (it->second == 0)
          flags.params.k = static_cast<int32_t>(v);
        else
          flags.params.omega = static_cast<int32_t>(v);
        break;
      }
      case 1:
        flags.params.sigma = v;
        break;
      case 3:
        flags.params.lambda1 = v;
        break;
      case 4:
        flags.params.lambda2 = v;
        break;
      case 5:
        flags.params.lambda3 = v;
        break;
      case 6:
        flags.params.lambda4 = v;
        break;
    }
    flags.validate();

    char run_name[64];
    std::snprintf(run_name, sizeof(run_name), "%s_%g", param.c_str(), v);
    ResultHandle result;
    run_detect_to_dir(cube.get(), target.get(), mask.get(), flags.params,
                      (fs::path(out_dir) / run_name).string(), result);
    double seconds = 0.0;
    check(lrg_result_seconds_total(result.get(), &seconds));
    char row[128];
    std::snprintf(row, sizeof(row), "%g,%.17g,%.3f\n", v, report_auc_or_die(result.get()), seconds);
    csv += row;
    std::printf("%s auc=%.6f\n", run_name, report_auc_or_die(result.get()));
  }
  write_text((fs::path(out_dir) / "sweep.csv").string(), csv);
  return 0;
}

int cmd_eval(const std::string& map_path, const std::string& mask_path, const std::string& out_dir) {
  CubeHandle map;
  check(lrg_cube_load(map_path.c_str(), map.out()));
  MaskHandle mask;
  check(lrg_mask_load(mask_path.c_str(), mask.out()));
  double auc = 0.0;
  check(lrg_eval_auc(map.get(), mask.get(), &auc));
  make_out_dir(out_dir);
  check(lrg_eval_write_roc_csv(map.get(), mask.get(), (fs::path(out_dir) / "roc.csv").string().c_str()));
  std::printf("auc=%.17g\n", auc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral target detection: low-rank background subspace learning with "
               "graph-regularized sparse coding"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "run the full detector on a cube");
  std::string cube_path, target_path, mask_path, out_dir = ".";
  detect->add_option("--cube", cube_path, "input cube (<base>.json/.raw pair)")->required();
  detect->add_option("--target", target_path, "target spectrum CSV, one reflectance per line");
  detect->add_option("--mask", mask_path, "ground-truth PGM mask (target average and AUC)");
  detect->add_option("--out,-o", out_dir, "output directory")->capture_default_str();
  ParamFlags detect_flags;
  detect_flags.add_to(detect);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic detection scene");
  lrg_synth_spec spec;
  lrg_synth_spec_init(&spec);
  std::string synth_out = ".";
  double snr = spec.noise_snr_db;
  synth->add_option("--height", spec.height)->capture_default_str();
  synth->add_option("--width", spec.width)->capture_default_str();
  synth->add_option("--bands", spec.bands)->capture_default_str();
  synth->add_option("--rank", spec.background_rank, "number of background endmembers")
      ->capture_default_str();
  synth->add_option("--targets", spec.n_targets, "implanted target pixel count")
      ->capture_default_str();
  synth->add_option("--abundance", spec.target_abundance, "target abundance in (0,1]")
      ->capture_default_str();
  synth->add_option("--snr", snr, "noise SNR in dB; 'inf' for noise-free")->capture_default_str();
  synth->add_option("--seed", spec.seed)->capture_default_str();
  synth->add_option("--out,-o", synth_out, "output directory")->capture_default_str();
  std::string synth_config;
  synth->add_option("--config", synth_config, "key=value config file (flags override it)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "re-run detection over a parameter range");
  std::string sweep_cube, sweep_target, sweep_mask, sweep_param, sweep_values, sweep_out = ".";
  sweep->add_option("--cube", sweep_cube)->required();
  sweep->add_option("--target", sweep_target);
  sweep->add_option("--mask", sweep_mask, "ground-truth PGM mask (required for AUC)");
  sweep->add_option("--param", sweep_param, "K, sigma, omega, or lambda1..lambda4")->required();
  sweep->add_option("--values", sweep_values, "comma-separated list")->required();
  sweep->add_option("--out,-o", sweep_out)->capture_default_str();
  ParamFlags sweep_flags;
  sweep_flags.add_to(sweep);

  // eval
  auto* eval = app.add_subcommand("eval", "score a stored detection map against a mask");
  std::string eval_map, eval_mask, eval_out = ".";
  eval->add_option("--map", eval_map, "detection map cube")->required();
  eval->add_option("--mask", eval_mask, "ground-truth PGM mask")->required();
  eval->add_option("--out,-o", eval_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lrbslglr: " << e.what() << "\n";
    return kExitValidation;
  }

  if (detect->parsed()) {
    detect_flags.finalize(*detect);
    return cmd_detect(cube_path, target_path, mask_path, detect_flags, out_dir);
  }
  if (synth->parsed()) {
    ConfigFile cfg;
    if (!synth_config.empty()) cfg.load(synth_config);
    cfg.apply(*synth, "--height", "height", spec.height);
    cfg.apply(*synth, "--width", "width", spec.width);
    cfg.apply(*synth, "--bands", "bands", spec.bands);
    cfg.apply(*synth, "--rank", "rank", spec.background_rank);
    cfg.apply(*synth, "--targets", "targets", spec.n_targets);
    cfg.apply(*synth, "--abundance", "abundance", spec.target_abundance);
    cfg.apply(*synth, "--snr", "snr", snr);
    cfg.apply(*synth, "--seed", "seed", spec.seed);
    spec.noise_snr_db = snr;
    return cmd_synth(spec, synth_out);
  }
  if (sweep->parsed()) {
    sweep_flags.finalize(*sweep);
    return cmd_sweep(sweep_cube, sweep_target, sweep_mask, sweep_flags, sweep_param, sweep_values,
                     sweep_out);
  }
  if (eval->parsed()) return cmd_eval(eval_map, eval_mask, eval_out);
  return kExitValidation;
}
