#pragma once

#include <cstdint>

namespace easirp {

// Floating-point operation tally. Additions and subtractions share one counter.
struct OpCount {
  std::uint64_t multiplies = 0;
  std::uint64_t adds = 0;

  void mul(std::uint64_t k = 1) noexcept { multiplies += k; }
  void add(std::uint64_t k = 1) noexcept { adds += k; }
  std::uint64_t total() const noexcept { return multiplies + adds; }

  OpCount& operator+=(const OpCount& o) noexcept {
    multiplies += o.multiplies;
    adds += o.adds;
    return *this;
  }
  friend OpCount operator+(OpCount a, const OpCount& b) noexcept { return a += b; }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

// Counting policy that compiles away.
struct NoOpCount {
  void mul(std::uint64_t = 1) noexcept {}
  void add(std::uint64_t = 1) noexcept {}
};

}  // namespace easirp
