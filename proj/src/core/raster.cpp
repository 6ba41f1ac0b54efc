#include "core/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace lrbsl {

namespace {

using nlohmann::json;

// Accepts <base>, <base>.json or <base>.raw and returns <base>.
std::string container_base(const std::string& path) {
  if (path.size() > 5 && path.ends_with(".json")) return path.substr(0, path.size() - 5);
  if (path.size() > 4 && path.ends_with(".raw")) return path.substr(0, path.size() - 4);
  return path;
}

int require_positive_int(const json& j, const char* field, const std::string& sidecar) {
  if (!j.contains(field) || !j[field].is_number_integer())
    throw IoError("sidecar " + sidecar + ": missing or non-integer field '" + field + "'");
  const std::int64_t v = j[field].get<std::int64_t>();
  if (v <= 0 || v > std::numeric_limits<int>::max())
    throw IoError("sidecar " + sidecar + ": field '" + field + "' out of range");
  return static_cast<int>(v);
}

std::string require_string(const json& j, const char* field, const std::string& sidecar) {
  if (!j.contains(field) || !j[field].is_string())
    throw IoError("sidecar " + sidecar + ": missing or non-string field '" + field + "'");
  return j[field].get<std::string>();
}

}  // namespace

void HsiCube::validate() const {
  if (height <= 0 || width <= 0 || bands <= 0)
    throw ValidationError("cube dimensions must be positive");
  if (values.size() != static_cast<std::size_t>(bands) * pixels())
    throw ValidationError("cube value count does not match dimensions");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("cube contains non-finite values");
}

int GroundTruthMask::count_targets() const {
  int n = 0;
  for (auto f : flags) n += (f != 0);
  return n;
}

void GroundTruthMask::validate() const {
  if (height <= 0 || width <= 0) throw ValidationError("mask dimensions must be positive");
  if (flags.size() != static_cast<std::size_t>(height) * width)
    throw ValidationError("mask flag count does not match dimensions");
}

HsiCube load_cube(const std::string& path) {
  const std::string base = container_base(path);
  const std::string sidecar = base + ".json";
  const std::string payload = base + ".raw";

  std::ifstream js(sidecar);
  if (!js) throw IoError("cannot open sidecar " + sidecar);
  json j = json::parse(js, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw IoError("corrupt sidecar " + sidecar);

  HsiCube cube;
  cube.height = require_positive_int(j, "height", sidecar);
  cube.width = require_positive_int(j, "width", sidecar);
  cube.bands = require_positive_int(j, "bands", sidecar);
  const std::string dtype = require_string(j, "dtype", sidecar);
  if (dtype != "f32" && dtype != "f64")
    throw IoError("sidecar " + sidecar + ": dtype must be 'f32' or 'f64', got '" + dtype + "'");
  if (require_string(j, "interleave", sidecar) != "bsq")
    throw IoError("sidecar " + sidecar + ": only 'bsq' interleave is supported");
  if (require_string(j, "byte_order", sidecar) != "le")
    throw IoError("sidecar " + sidecar + ": only 'le' byte order is supported");

  const std::size_t pixels = static_cast<std::size_t>(cube.height) * cube.width;
  if (cube.bands != 0 &&
      pixels > std::numeric_limits<std::size_t>::max() / 16 / static_cast<std::size_t>(cube.bands))
    throw IoError("sidecar " + sidecar + ": declared dimensions overflow");
  const std::size_t count = pixels * cube.bands;
  const std::size_t value_size = dtype == "f32" ? 4 : 8;
  const std::size_t expected_bytes = count * value_size;

  std::error_code ec;
  const auto actual_bytes = std::filesystem::file_size(payload, ec);
  if (ec) throw IoError("cannot stat payload " + payload);
  if (actual_bytes != expected_bytes)
    throw IoError("payload " + payload + ": size mismatch, declared dimensions need " +
                  std::to_string(expected_bytes) + " bytes but file has " +
                  std::to_string(actual_bytes));

  std::ifstream ps(payload, std::ios::binary);
  if (!ps) throw IoError("cannot open payload " + payload);

  cube.values.resize(count);
  if (dtype == "f32") {
    std::vector<float> raw(count);
    ps.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expected_bytes));
    if (!ps) throw IoError("short read on payload " + payload);
    std::copy(raw.begin(), raw.end(), cube.values.begin());
  } else {
    ps.read(reinterpret_cast<char*>(cube.values.data()), static_cast<std::streamsize>(expected_bytes));
    if (!ps) throw IoError("short read on payload " + payload);
  }

  for (std::size_t i = 0; i < count; ++i)
    if (!std::isfinite(cube.values[i]))
      throw IoError("payload " + payload + ": non-finite value at flat index " + std::to_string(i));
  return cube;
}

void save_cube(const HsiCube& cube, const std::string& path, const std::string& dtype) {
  cube.validate();
  if (dtype != "f32" && dtype != "f64")
    throw ValidationError("save_cube: dtype must be 'f32' or 'f64'");

  const std::string base = container_base(path);
  json j;
  j["height"] = cube.height;
  j["width"] = cube.width;
  j["bands"] = cube.bands;
  j["dtype"] = dtype;
  j["interleave"] = "bsq";
  j["byte_order"] = "le";

  std::ofstream js(base + ".json");
  if (!js) throw IoError("cannot write sidecar " + base + ".json");
  js << j.dump(2) << "\n";
  if (!js) throw IoError("failed writing sidecar " + base + ".json");

  std::ofstream ps(base + ".raw", std::ios::binary);
  if (!ps) throw IoError("cannot write payload " + base + ".raw");
  if (dtype == "f32") {
    std::vector<float> raw(cube.values.begin(), cube.values.end());
    ps.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size() * sizeof(float)));
  } else {
    ps.write(reinterpret_cast<const char*>(cube.values.data()),
             static_cast<std::streamsize>(cube.values.size() * sizeof(double)));
  }
  if (!ps) throw IoError("failed writing payload " + base + ".raw");
}

GroundTruthMask load_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mask " + path);

  // Token stream with '#' comments, per the PGM grammar.
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("mask " + path + ": truncated PGM");
  };

  if (next_token() != "P2") throw IoError("mask " + path + ": expected ASCII PGM magic 'P2'");
  auto parse_int = [&path](const std::string& tok, const char* what) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw IoError("mask " + path + ": bad " + what + " token '" + tok + "'");
    }
  };

  GroundTruthMask mask;
  const long w = parse_int(next_token(), "width");
  const long h = parse_int(next_token(), "height");
  const long maxval = parse_int(next_token(), "maxval");
  if (w <= 0 || h <= 0 || maxval <= 0 || w > 1000000 || h > 1000000)
    throw IoError("mask " + path + ": PGM header fields out of range");
  mask.width = static_cast<int>(w);
  mask.height = static_cast<int>(h);

  const std::size_t count = static_cast<std::size_t>(mask.width) * mask.height;
  mask.flags.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const long v = parse_int(next_token(), "pixel");
    if (v < 0 || v > maxval)
      throw IoError("mask " + path + ": pixel value " + std::to_string(v) + " out of range");
    mask.flags[i] = v > 0 ? 1 : 0;
  }
  return mask;
}

void save_mask(const GroundTruthMask& mask, const std::string& path) {
  mask.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mask " + path);
  out << "P2\n" << mask.width << " " << mask.height << "\n1\n";
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c)
      out << (mask.flags[static_cast<std::size_t>(r) * mask.width + c] ? 1 : 0)
          << (c + 1 == mask.width ? '\n' : ' ');
  }
  if (!out) throw IoError("failed writing mask " + path);
}

TargetSpectrum load_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum " + path);
  TargetSpectrum s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos != line.size()) throw std::invalid_argument(line);
      if (!std::isfinite(v)) throw std::invalid_argument(line);
      s.values.push_back(v);
    } catch (const std::exception&) {
      throw IoError("spectrum " + path + ": bad value on line " + std::to_string(lineno));
    }
  }
  if (s.values.empty()) throw IoError("spectrum " + path + ": no values");
  return s;
}

void save_spectrum_csv(const TargetSpectrum& spectrum, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write spectrum " + path);
  char buf[64];
  for (double v : spectrum.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  if (!out) throw IoError("failed writing spectrum " + path);
}

NormalizedCube normalize(const HsiCube& cube) {
  cube.validate();
  const double maxv = *std::max_element(cube.values.begin(), cube.values.end());
  if (!(maxv > 0.0)) throw ValidationError("normalize: degenerate scene, global maximum is not positive");
  NormalizedCube out;
  out.scale = maxv;
  out.cube = cube;
  for (double& v : out.cube.values) v /= maxv;
  return out;
}

Eigen::MatrixXd flatten(const HsiCube& cube) {
  cube.validate();
  const int n = cube.pixels();
  Eigen::MatrixXd x(cube.bands, n);
  for (int b = 0; b < cube.bands; ++b) {
    const double* band = cube.values.data() + static_cast<std::size_t>(b) * n;
    for (int i = 0; i < n; ++i) x(b, i) = band[i];
  }
  return x;
}

HsiCube unflatten(const Eigen::MatrixXd& x, int height, int width) {
  if (height <= 0 || width <= 0) throw ValidationError("unflatten: dimensions must be positive");
  if (x.cols() != static_cast<Eigen::Index>(height) * width)
    throw ValidationError("unflatten: column count does not match height*width");
  HsiCube cube;
  cube.height = height;
  cube.width = width;
  cube.bands = static_cast<int>(x.rows());
  cube.values.resize(static_cast<std::size_t>(cube.bands) * cube.pixels());
  const int n = cube.pixels();
  for (int b = 0; b < cube.bands; ++b) {
    double* band = cube.values.data() + static_cast<std::size_t>(b) * n;
    for (int i = 0; i < n; ++i) band[i] = x(b, i);
  }
  return cube;
}

TargetSpectrum average_target_spectrum(const HsiCube& cube, const GroundTruthMask& mask) {
  cube.validate();
  mask.validate();
  if (mask.height != cube.height || mask.width != cube.width)
    throw ValidationError("average_target_spectrum: mask dimensions do not match cube");
  const int n_targets = mask.count_targets();
  if (n_targets == 0) throw ValidationError("average_target_spectrum: mask has no target pixels");

  const int n = cube.pixels();
  TargetSpectrum t;
  t.values.assign(cube.bands, 0.0);
  for (int b = 0; b < cube.bands; ++b) {
    const double* band = cube.values.data() + static_cast<std::size_t>(b) * n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask.flags[i]) acc += band[i];
    t.values[b] = acc / n_targets;
  }
  return t;
}

}  // namespace lrbsl
