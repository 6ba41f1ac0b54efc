#pragma once

#include <cstdint>

#include "core/raster.hpp"

namespace lrbsl {

// Desk-scale detection scene: low-rank background from smooth nonnegative
// endmembers, a handful of implanted target pixels, white noise. The target
// spectrum is a brightened variant of one background material plus a narrow
// out-of-span feature sized in noise units; the background includes pure
// material patches and target-brightness decoys so spectral angle alone
// does not separate the classes.
struct SyntheticSpec {
  int height = 50;
  int width = 50;
  int bands = 40;
  int background_rank = 8;
  int n_targets = 20;
  double target_abundance = 1.0;   // in (0, 1]
  double noise_snr_db = 30.0;      // +inf = noise-free
  std::uint64_t seed = 10;

  void validate() const;
};

struct SyntheticScene {
  HsiCube cube;
  GroundTruthMask mask;
  TargetSpectrum target;
};

// Deterministic: the same spec always yields the same scene, bit for bit.
SyntheticScene generate_scene(const SyntheticSpec& spec);

// Generator used by the scene builder; stdlib engine, hand-rolled variates so
// the stream does not depend on library internals.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed) {}

  double uniform();               // [0, 1)
  double normal();                // standard normal, Box-Muller
  int below(int n);               // unbiased integer in [0, n)

 private:
  std::uint64_t next();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrbsl
