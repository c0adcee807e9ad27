#include "easirp/easi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "easirp/errors.hpp"
#include "easirp/random.hpp"

namespace easirp {

void EasiConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
  if (!terms.second_order && !terms.higher_order) {
    throw ConfigError("at least one of the second-order and higher-order terms must be enabled");
  }
  if (max_epochs == 0) throw ConfigError("max epochs must be positive");
  if (!(convergence_tol > 0.0)) throw ConfigError("convergence tolerance must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
}

SeparationMatrix::SeparationMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.rows() > values_.cols()) {
    throw ArgumentError("separation matrix must be n x m with 1 <= n <= m");
  }
  if (!values_.allFinite()) throw ArgumentError("separation matrix has non-finite entries");
}

SeparationMatrix SeparationMatrix::truncated_identity(std::size_t n, std::size_t m) {
  return SeparationMatrix(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
}

SeparationMatrix SeparationMatrix::seeded_orthonormal(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || n > m) throw ArgumentError("seeded orthonormal init needs 1 <= n <= m");
  Rng rng(seed);
  Matrix g(m, n);
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.normal();
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  return SeparationMatrix(q.transpose());
}

SeparationMatrix SeparationMatrix::initial(std::size_t n, std::size_t m, const EasiConfig& cfg) {
  switch (cfg.init) {
    case InitScheme::TruncatedIdentity: return truncated_identity(n, m);
    case InitScheme::SeededOrthonormal: return seeded_orthonormal(n, m, cfg.init_seed);
  }
  throw ConfigError("unknown init scheme");
}

namespace {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Stage 1: y = B x. d mults and d - 1 adds per output.
template <class S, class C>
void forward_into(const Mat<S>& b, const S* x, Vec<S>& y, C& ops) {
  const Eigen::Index n = b.rows();
  const Eigen::Index d = b.cols();
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S acc = b(i, 0) * x[0];
    for (Eigen::Index j = 1; j < d; ++j) acc += b(i, j) * x[j];
    y[i] = acc;
  }
  ops.mul(static_cast<std::uint64_t>(n * d));
  ops.add(static_cast<std::uint64_t>(n * (d - 1)));
}

// Stage 2: g(y) = y^3.
template <class S, class C>
void cubic_into(const Vec<S>& y, Vec<S>& g, C& ops) {
  g.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) g[i] = (y[i] * y[i]) * y[i];
  ops.mul(2 * static_cast<std::uint64_t>(y.size()));
}

// Stage 3: the bracketed relative-gradient term.
//   second order: y_i y_j for i <= j (mirrored), minus 1 on the diagonal
//   higher order: a_ij = g_i y_j - y_i g_j for i < j, a_ji = -a_ij, a_ii = 0
//   both: off-diagonal pairs combine as s_ij + a_ij and s_ij - a_ij
template <class S, class C>
void relative_gradient_into(const Vec<S>& y, const Vec<S>& g, TermFlags terms, Mat<S>& h, C& ops) {
  const Eigen::Index n = y.size();
  h.resize(n, n);
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t pairs = un * (un - 1) / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = terms.second_order ? y[i] * y[i] - S(1) : S(0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const S s = terms.second_order ? y[i] * y[j] : S(0);
      if (terms.higher_order) {
        const S a = g[i] * y[j] - y[i] * g[j];
        if (terms.second_order) {
          h(i, j) = s + a;
          h(j, i) = s - a;
        } else {
          h(i, j) = a;
          h(j, i) = -a;
        }
      } else {
        h(i, j) = s;
        h(j, i) = s;
      }
    }
  }
  if (terms.second_order) {
    ops.mul(un * (un + 1) / 2);
    ops.add(un);
  }
  if (terms.higher_order) {
    ops.mul(2 * pairs);
    ops.add(pairs);
  }
  if (terms.second_order && terms.higher_order) ops.add(2 * pairs);
}

// Stages 4 and 5: B' = B - mu * (H B).
template <class S, class C>
void apply_update(const Mat<S>& b, const Mat<S>& h, S mu, Mat<S>& out, C& ops) {
  const Eigen::Index n = b.rows();
  const Eigen::Index d = b.cols();
  out.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      S acc = h(i, 0) * b(0, j);
      for (Eigen::Index k = 1; k < n; ++k) acc += h(i, k) * b(k, j);
      out(i, j) = b(i, j) - mu * acc;
    }
  }
  const auto un = static_cast<std::uint64_t>(n);
  const auto ud = static_cast<std::uint64_t>(d);
  ops.mul(un * un * ud);
  ops.add(ud * un * (un - 1));
  ops.mul(un * ud);
  ops.add(un * ud);
}

template <class S>
bool all_finite(const Mat<S>& m) {
  return m.allFinite();
}

void check_dims(const SeparationMatrix& b, std::size_t x_size) {
  if (x_size != b.cols()) {
    throw ArgumentError("input has " + std::to_string(x_size) + " entries, separation matrix expects " +
                        std::to_string(b.cols()));
  }
}

template <class S, class C>
UpdateResult update_step_impl(const SeparationMatrix& b, std::span<const double> x, const EasiConfig& cfg, C& ops,
                              std::size_t sample_index) {
  check_dims(b, x.size());
  const Mat<S> bs = b.values().template cast<S>();
  const Vec<S> xs = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())).template cast<S>();
  Vec<S> y, g;
  Mat<S> h, next;
  forward_into<S>(bs, xs.data(), y, ops);
  if (cfg.terms.higher_order) cubic_into<S>(y, g, ops);
  relative_gradient_into<S>(y, g, cfg.terms, h, ops);
  apply_update<S>(bs, h, static_cast<S>(cfg.learning_rate), next, ops);
  if (!all_finite(next)) throw DivergenceError(sample_index, 0);
  return {y.template cast<double>(), SeparationMatrix(next.template cast<double>())};
}

template <class S, class C>
TrainResult train_impl(const SampleStream& samples, std::size_t n, const EasiConfig& cfg, C& ops) {
  const std::size_t d = samples.dim();
  const std::size_t count = samples.size();
  const Mat<S> init = SeparationMatrix::initial(n, d, cfg).values().template cast<S>();
  Mat<S> b = init;
  Mat<S> next, h, h_sum;
  Vec<S> y, g, xs(static_cast<Eigen::Index>(d));
  std::vector<double> buf(d);
  const S mu = static_cast<S>(cfg.learning_rate);

  TrainTrace trace;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const Mat<S> start = b;
    for (std::size_t first = 0; first < count; first += cfg.batch_size) {
      const std::size_t last = std::min(count, first + cfg.batch_size);
      for (std::size_t i = first; i < last; ++i) {
        samples.read(i, buf);
        for (std::size_t k = 0; k < d; ++k) xs[static_cast<Eigen::Index>(k)] = static_cast<S>(buf[k]);
        forward_into<S>(b, xs.data(), y, ops);
        if (cfg.terms.higher_order) cubic_into<S>(y, g, ops);
        relative_gradient_into<S>(y, g, cfg.terms, h, ops);
        if (cfg.batch_size == 1) break;
        if (i == first) {
          h_sum = h;
        } else {
          h_sum += h;
          ops.add(static_cast<std::uint64_t>(h.size()));
        }
      }
      if (cfg.batch_size > 1) {
        h = h_sum * (S(1) / static_cast<S>(last - first));
        ops.mul(static_cast<std::uint64_t>(h.size()));
      }
      apply_update<S>(b, h, mu, next, ops);
      if (!all_finite(next)) throw DivergenceError(last - 1, epoch);
      b.swap(next);
    }
    const double start_norm = start.template cast<double>().norm();
    const double delta = (b - start).template cast<double>().norm();
    const double rel = start_norm > 0.0 ? delta / start_norm : delta;
    if (!std::isfinite(rel)) throw DivergenceError(count - 1, epoch);
    trace.relative_updates.push_back(rel);
    trace.epochs_run = epoch;
    if (rel < cfg.convergence_tol) {
      trace.converged = true;
      break;
    }
  }
  return {SeparationMatrix(b.template cast<double>()), std::move(trace)};
}

template <class C>
TrainResult train_dispatch(const SampleStream& samples, std::size_t n, const EasiConfig& cfg, C& ops) {
  cfg.validate();
  if (samples.size() == 0) throw ArgumentError("training stream is empty");
  if (n == 0 || n > samples.dim()) {
    throw ConfigError("output dimension " + std::to_string(n) + " must lie in [1, " + std::to_string(samples.dim()) +
                      "]");
  }
  if (cfg.precision == Precision::Single) return train_impl<float>(samples, n, cfg, ops);
  return train_impl<double>(samples, n, cfg, ops);
}

template <class C>
Vector forward_public(const SeparationMatrix& b, std::span<const double> x, C& ops) {
  check_dims(b, x.size());
  Vector y;
  forward_into<double>(b.values(), x.data(), y, ops);
  return y;
}

}  // namespace

Vector forward(const SeparationMatrix& b, std::span<const double> x) {
  NoOpCount none;
  return forward_public(b, x, none);
}

Vector forward(const SeparationMatrix& b, std::span<const double> x, OpCount& ops) { return forward_public(b, x, ops); }

Vector g_cubic(const Vector& y) {
  NoOpCount none;
  Vector g;
  cubic_into<double>(y, g, none);
  return g;
}

Matrix relative_gradient(const Vector& y, const Vector& gy, TermFlags terms) {
  if (y.size() != gy.size()) throw ArgumentError("y and g(y) must have the same length");
  if (!terms.second_order && !terms.higher_order) {
    throw ConfigError("at least one of the second-order and higher-order terms must be enabled");
  }
  NoOpCount none;
  Matrix h;
  relative_gradient_into<double>(y, gy, terms, h, none);
  return h;
}

UpdateResult update_step(const SeparationMatrix& b, std::span<const double> x, const EasiConfig& cfg,
                         std::size_t sample_index) {
  cfg.validate();
  NoOpCount none;
  if (cfg.precision == Precision::Single) return update_step_impl<float>(b, x, cfg, none, sample_index);
  return update_step_impl<double>(b, x, cfg, none, sample_index);
}

UpdateResult update_step(const SeparationMatrix& b, std::span<const double> x, const EasiConfig& cfg, OpCount& ops,
                         std::size_t sample_index) {
  cfg.validate();
  if (cfg.precision == Precision::Single) return update_step_impl<float>(b, x, cfg, ops, sample_index);
  return update_step_impl<double>(b, x, cfg, ops, sample_index);
}

void DatasetStream::read(std::size_t index, std::span<double> out) const {
  const auto row = data_.sample(index);
  std::copy(row.begin(), row.end(), out.begin());
}

TrainResult train(const SampleStream& samples, std::size_t n, const EasiConfig& cfg) {
  NoOpCount none;
  return train_dispatch(samples, n, cfg, none);
}

TrainResult train(const Dataset& data, std::size_t n, const EasiConfig& cfg) {
  const DatasetStream stream(data);
  return train(stream, n, cfg);
}

TrainResult train(const SampleStream& samples, std::size_t n, const EasiConfig& cfg, OpCount& ops) {
  return train_dispatch(samples, n, cfg, ops);
}

}  // namespace easirp
