#pragma once

#include <cstdint>
#include <random>

namespace bitr {

// Standard normal helpers. The CDF goes through std::erfc so that upper
// tails keep full relative precision.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_sf(double z);  // 1 - Phi(z)
double normal_quantile(double p);

/// 64-bit mixer used to derive independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable random source: mt19937_64 with hand-rolled uniform/normal draws,
/// so streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_quantile(uniform()); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bitr
