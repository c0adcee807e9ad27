#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace easirp {

// Named-stream seed splitter. A master seed is combined with the FNV-1a hash of
// the stream name and finalized with SplitMix64:
//
//   derive_seed(master, name) = splitmix64(master ^ fnv1a64(name))
//
// The function is part of the reproducibility contract and must not change.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept;

namespace streams {
inline constexpr std::string_view kData = "data";
inline constexpr std::string_view kProjection = "rp";
inline constexpr std::string_view kEasiInit = "easi-init";
inline constexpr std::string_view kMlp = "mlp";
}  // namespace streams

// Portable random source. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the distributions below are implemented here so that
// results do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on (0, 1].
  double uniform_open_zero();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();
  // Laplace with zero mean and the given scale b (variance 2 b^2).
  double laplace(double scale);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace easirp
