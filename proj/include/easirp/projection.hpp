#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "easirp/linalg.hpp"
#include "easirp/op_count.hpp"

namespace easirp {

// Sparse ternary random projection matrix with entries in {-1, 0, +1}.
//
// Entries are i.i.d. with P(+1) = P(-1) = 1 / (2 * rows) and P(0) = 1 - 1 / rows,
// drawn row-major from Rng(seed). The matrix is fully determined by
// (rows, cols, seed), which is all that gets persisted.
class TernaryMatrix {
 public:
  static TernaryMatrix sample(std::size_t out_dim, std::size_t in_dim, std::uint64_t seed);
  // Explicit entries, for tests and hand-built projections. Seed is recorded as 0.
  static TernaryMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<std::int8_t> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::int8_t operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  const std::vector<std::int8_t>& entries() const noexcept { return entries_; }
  std::size_t nonzeros() const noexcept;
  // FNV-1a over the entry bytes; lets a model file detect a mismatched regeneration.
  std::uint64_t digest() const noexcept;

  Matrix to_dense() const;

  friend bool operator==(const TernaryMatrix&, const TernaryMatrix&) = default;

 private:
  TernaryMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::vector<std::int8_t> entries)
      : rows_(rows), cols_(cols), seed_(seed), entries_(std::move(entries)) {}

  std::size_t rows_;
  std::size_t cols_;
  std::uint64_t seed_;
  std::vector<std::int8_t> entries_;
};

// v = R x using only additions and subtractions, accumulating left to right over
// columns starting from 0.
Vector project(const TernaryMatrix& r, std::span<const double> x);
Vector project(const TernaryMatrix& r, std::span<const double> x, OpCount& ops);
inline Vector project(const TernaryMatrix& r, const Vector& x) { return project(r, std::span<const double>(x.data(), x.size())); }

}  // namespace easirp
