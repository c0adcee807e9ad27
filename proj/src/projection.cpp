#include "easirp/projection.hpp"

#include <algorithm>
#include <string>
#include <string_view>

#include "easirp/errors.hpp"
#include "easirp/random.hpp"

namespace easirp {

TernaryMatrix TernaryMatrix::sample(std::size_t out_dim, std::size_t in_dim, std::uint64_t seed) {
  if (out_dim == 0 || in_dim == 0) throw ArgumentError("projection dimensions must be positive");
  if (out_dim > in_dim) {
    throw ArgumentError("projection output dimension " + std::to_string(out_dim) + " exceeds input dimension " +
                        std::to_string(in_dim));
  }
  Rng rng(seed);
  const std::uint64_t buckets = 2 * static_cast<std::uint64_t>(out_dim);
  std::vector<std::int8_t> entries(out_dim * in_dim);
  for (auto& e : entries) {
    const std::uint64_t k = rng.below(buckets);
    e = k == 0 ? std::int8_t{1} : (k == 1 ? std::int8_t{-1} : std::int8_t{0});
  }
  return TernaryMatrix(out_dim, in_dim, seed, std::move(entries));
}

TernaryMatrix TernaryMatrix::from_entries(std::size_t rows, std::size_t cols, std::vector<std::int8_t> entries) {
  if (rows == 0 || cols == 0 || entries.size() != rows * cols) throw ArgumentError("bad ternary matrix shape");
  if (!std::all_of(entries.begin(), entries.end(), [](std::int8_t e) { return e >= -1 && e <= 1; })) {
    throw ArgumentError("ternary entries must be -1, 0 or +1");
  }
  return TernaryMatrix(rows, cols, 0, std::move(entries));
}

std::size_t TernaryMatrix::nonzeros() const noexcept {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](std::int8_t e) { return e != 0; }));
}

std::uint64_t TernaryMatrix::digest() const noexcept {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(entries_.data()), entries_.size()));
}

Matrix TernaryMatrix::to_dense() const {
  Matrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) d(r, c) = (*this)(r, c);
  return d;
}

namespace {

template <class Counter>
Vector project_impl(const TernaryMatrix& r, std::span<const double> x, Counter& ops) {
  if (x.size() != r.cols()) {
    throw ArgumentError("projection expects " + std::to_string(r.cols()) + " inputs, got " + std::to_string(x.size()));
  }
  Vector v(r.rows());
  const std::int8_t* row = r.entries().data();
  for (std::size_t i = 0; i < r.rows(); ++i, row += r.cols()) {
    double acc = 0.0;
    for (std::size_t j = 0; j < r.cols(); ++j) {
      if (row[j] > 0) {
        acc += x[j];
        ops.add();
      } else if (row[j] < 0) {
        acc -= x[j];
        ops.add();
      }
    }
    v[static_cast<Eigen::Index>(i)] = acc;
  }
  return v;
}

}  // namespace

Vector project(const TernaryMatrix& r, std::span<const double> x) {
  NoOpCount none;
  return project_impl(r, x, none);
}

Vector project(const TernaryMatrix& r, std::span<const double> x, OpCount& ops) { return project_impl(r, x, ops); }

}  // namespace easirp
