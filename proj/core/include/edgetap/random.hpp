#pragma once

#include <cstdint>
#include <random>

namespace edgetap {

// Reproducible random source. Bits come from std::mt19937_64, whose output
// sequence is fixed by the C++ standard; uniforms take the top 53 bits and
// normals use the Box-Muller transform (both outputs of each pair are used).
// std::normal_distribution is avoided because its algorithm is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();

  double standard_normal();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; derives independent child seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace edgetap
