#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace lrbsl {

// Hyperspectral raster, band-sequential: values[b * height * width + r * width + c].
// Stored as 64-bit reals regardless of the file dtype.
struct HsiCube {
  int height = 0;
  int width = 0;
  int bands = 0;
  std::vector<double> values;

  int pixels() const { return height * width; }
  double at(int row, int col, int band) const {
    return values[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(row) * width + col];
  }
  double& at(int row, int col, int band) {
    return values[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(row) * width + col];
  }
  void validate() const;
};

struct GroundTruthMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> flags;  // nonzero = target, row-major

  int count_targets() const;
  void validate() const;
};

struct TargetSpectrum {
  std::vector<double> values;
};

// Cube container IO. `path` may be the base name or either of the
// `<base>.json` / `<base>.raw` pair.
//
// Sidecar fields: height, width, bands (positive), dtype ("f32"|"f64"),
// interleave ("bsq"), byte_order ("le"). Payload: bands*height*width
// little-endian values, band-sequential, row-major within band.
HsiCube load_cube(const std::string& path);
void save_cube(const HsiCube& cube, const std::string& path, const std::string& dtype = "f64");

// ASCII PGM (P2) mask, 0 = background, any positive value = target.
GroundTruthMask load_mask(const std::string& path);
void save_mask(const GroundTruthMask& mask, const std::string& path);

// One reflectance value per line.
TargetSpectrum load_spectrum_csv(const std::string& path);
void save_spectrum_csv(const TargetSpectrum& spectrum, const std::string& path);

struct NormalizedCube {
  HsiCube cube;
  double scale = 1.0;  // the global max the values were divided by
};

// Divides every value by the global maximum; errors on an all-zero cube.
NormalizedCube normalize(const HsiCube& cube);

// L x N pixel matrix; column i is the spectrum of pixel i in row-major
// pixel order (i = row * width + col). Region indexing depends on this
// ordering staying fixed.
Eigen::MatrixXd flatten(const HsiCube& cube);
HsiCube unflatten(const Eigen::MatrixXd& x, int height, int width);

// Arithmetic mean over the mask's flagged columns of flatten(cube).
TargetSpectrum average_target_spectrum(const HsiCube& cube, const GroundTruthMask& mask);

}  // namespace lrbsl
