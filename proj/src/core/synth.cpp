#include "core/synth.hpp"

#include <Eigen/Core>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace lrbsl {

void SyntheticSpec::validate() const {
  if (height < 1 || width < 1 || bands < 1)
    throw ValidationError("synth: dimensions must be positive");
  if (background_rank < 1 || background_rank >= bands)
    throw ValidationError("synth: background_rank must be in [1, bands)");
  const long long n = static_cast<long long>(height) * width;
  if (n_targets < 0 || n_targets >= n)
    throw ValidationError("synth: n_targets must be in [0, pixels)");
  if (!(target_abundance > 0.0) || target_abundance > 1.0)
    throw ValidationError("synth: target_abundance must be in (0, 1]");
  if (std::isnan(noise_snr_db)) throw ValidationError("synth: noise_snr_db must not be NaN");
}

std::uint64_t DetRng::next() {
  // splitmix64
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double DetRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double DetRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

int DetRng::below(int n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return static_cast<int>(v % bound);
}

namespace {

// Scene recipe constants. The background is a bright, spectrally tight
// terrain: one shared continuum plus a small per-material deviation. The
// target is a brightened variant of material 0 carrying a narrow mid-band
// feature orthogonal to the background span, sized in noise units so it is
// detectable per pixel without dominating the scene's singular values. Two
// background sub-populations give the scene texture: near-pure material
// patches, and "decoy" patches of material 0 at the target's brightness,
// which rival the target pixels in spectral angle while staying inside the
// background subspace.
constexpr double kContinuumFloor = 0.55;
constexpr double kContinuumSpan = 0.30;
constexpr double kMaterialSpread = 0.08;
constexpr double kPatchFraction = 0.10;
constexpr double kPatchPurity = 0.85;
constexpr double kDecoyFraction = 0.03;
constexpr double kDecoyPurity = 0.97;
constexpr double kTargetBrightness = 1.4;
constexpr double kFeatureNoiseMultiple = 2.5;  // implanted out-of-span energy, in noise sigmas
constexpr double kFeatureNoiseFreeScale = 0.03;  // relative fallback when the scene is noise-free

// Smooth nonnegative curve: a random walk shifted to zero minimum and
// scaled to unit maximum.
Eigen::VectorXd walk_curve(DetRng& rng, int bands) {
  Eigen::VectorXd w(bands);
  double acc = 0.0;
  for (int b = 0; b < bands; ++b) {
    acc += rng.normal();
    w(b) = acc;
  }
  w.array() -= w.minCoeff();
  const double mx = w.maxCoeff();
  if (mx <= 0.0) return Eigen::VectorXd::Ones(bands);
  return w / mx;
}

}  // namespace

SyntheticScene generate_scene(const SyntheticSpec& spec) {
  spec.validate();
  DetRng rng(spec.seed);

  const int n = spec.height * spec.width;
  const int bands = spec.bands;
  const int rank = spec.background_rank;

  const Eigen::VectorXd continuum =
      (kContinuumFloor + kContinuumSpan * walk_curve(rng, bands).array()).matrix();
  Eigen::MatrixXd endmembers(bands, rank);
  for (int r = 0; r < rank; ++r)
    endmembers.col(r) = continuum + kMaterialSpread * walk_curve(rng, bands);

  // Narrow spectral feature, kept orthogonal to the background span so the
  // implanted targets are separable from every background mixture.
  const double center = 0.5 * (bands - 1);
  const double width = std::max(bands / 15.0, 0.75);
  Eigen::VectorXd feature(bands);
  for (int b = 0; b < bands; ++b)
    feature(b) = std::exp(-0.5 * std::pow((b - center) / width, 2.0));
  if (rank < bands) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(endmembers);
    const Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(bands, rank);
    feature -= q * (q.transpose() * feature);
  }
  const double feature_norm = feature.norm();
  if (feature_norm > 1e-12) feature /= feature_norm;

  Eigen::MatrixXd abundances(rank, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int r = 0; r < rank; ++r) {
      abundances(r, i) = rng.uniform();
      sum += abundances(r, i);
    }
    if (sum <= 0.0) {
      abundances(0, i) = 1.0;
      sum = 1.0;
    }
    abundances.col(i) /= sum;

    const double kind = rng.uniform();
    if (kind < kDecoyFraction) {
      abundances.col(i) *= (1.0 - kDecoyPurity);
      abundances(0, i) += kDecoyPurity;
      abundances.col(i) *= kTargetBrightness;
    } else if (kind < kDecoyFraction + kPatchFraction) {
      const int material = rng.below(rank);
      abundances.col(i) *= (1.0 - kPatchPurity);
      abundances(material, i) += kPatchPurity;
    }
  }

  Eigen::MatrixXd x = endmembers * abundances;

  const double signal_power = x.squaredNorm() / (static_cast<double>(bands) * n);
  const bool noisy = std::isfinite(spec.noise_snr_db);
  const double noise_std =
      noisy ? std::sqrt(signal_power / std::pow(10.0, spec.noise_snr_db / 10.0)) : 0.0;

  const Eigen::VectorXd base = endmembers.col(0);
  const double feature_scale =
      noisy ? kFeatureNoiseMultiple * noise_std / spec.target_abundance
            : kFeatureNoiseFreeScale * base.norm();
  Eigen::VectorXd target = kTargetBrightness * base + feature_scale * feature;
  target = target.cwiseMax(0.0);

  // Distinct target pixels by partial Fisher-Yates.
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < spec.n_targets; ++i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(i + rng.below(n - i))]);

  GroundTruthMask mask;
  mask.height = spec.height;
  mask.width = spec.width;
  mask.flags.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < spec.n_targets; ++i) {
    const int p = order[static_cast<std::size_t>(i)];
    mask.flags[static_cast<std::size_t>(p)] = 1;
    x.col(p) = (1.0 - spec.target_abundance) * x.col(p) + spec.target_abundance * target;
  }

  if (noisy) {
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < bands; ++b)
        x(b, i) = std::max(x(b, i) + noise_std * rng.normal(), 0.0);
  }

  SyntheticScene scene;
  scene.cube = unflatten(x, spec.height, spec.width);
  scene.mask = std::move(mask);
  scene.target.values.assign(target.data(), target.data() + bands);
  return scene;
}

}  // namespace lrbsl
