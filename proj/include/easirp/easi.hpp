#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "easirp/data.hpp"
#include "easirp/linalg.hpp"
#include "easirp/op_count.hpp"

namespace easirp {

enum class InitScheme { TruncatedIdentity, SeededOrthonormal };
enum class Nonlinearity { Cubic };
enum class Precision { Double, Single };

// Which parts of the relative gradient are active.
//   second order only  -> adaptive whitening
//   higher order only  -> rotation (keeps an orthogonal matrix orthogonal to first order)
//   both               -> full EASI separation
struct TermFlags {
  bool second_order = true;
  bool higher_order = true;
  friend bool operator==(const TermFlags&, const TermFlags&) = default;
};

struct EasiConfig {
  double learning_rate = 1e-3;
  TermFlags terms;
  std::size_t max_epochs = 50;
  double convergence_tol = 1e-4;
  // 1 updates after every sample; larger values average H over the batch first.
  std::size_t batch_size = 1;
  InitScheme init = InitScheme::TruncatedIdentity;
  std::uint64_t init_seed = 0;
  Nonlinearity nonlinearity = Nonlinearity::Cubic;
  Precision precision = Precision::Double;

  // Throws ConfigError.
  void validate() const;
};

// n x m separation matrix with n <= m and finite entries. The whitening matrix W
// and the rotation U are the same type used in restricted update modes.
class SeparationMatrix {
 public:
  explicit SeparationMatrix(Matrix values);

  // [I_n | 0]
  static SeparationMatrix truncated_identity(std::size_t n, std::size_t m);
  // Transposed thin Q factor of a seeded n-column Gaussian matrix (orthonormal rows).
  static SeparationMatrix seeded_orthonormal(std::size_t n, std::size_t m, std::uint64_t seed);
  static SeparationMatrix initial(std::size_t n, std::size_t m, const EasiConfig& cfg);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

// y = B x, each output accumulated left to right.
Vector forward(const SeparationMatrix& b, std::span<const double> x);
Vector forward(const SeparationMatrix& b, std::span<const double> x, OpCount& ops);
inline Vector forward(const SeparationMatrix& b, const Vector& x) { return forward(b, std::span<const double>(x.data(), x.size())); }

// Elementwise y^3, evaluated as (y * y) * y.
Vector g_cubic(const Vector& y);

// H = [second order] (y y^T - I) + [higher order] (g y^T - y g^T).
//
// The higher-order part is formed once per unordered pair (i < j) and mirrored
// with a sign flip, so it is exactly antisymmetric with a zero diagonal.
Matrix relative_gradient(const Vector& y, const Vector& gy, TermFlags terms);

struct UpdateResult {
  Vector y;
  SeparationMatrix next;
};

// One adaptive step: y = B x, H = relative_gradient(y, y^3), B' = B - mu * (H B).
// Throws DivergenceError (tagged with `sample_index`) if B' has non-finite entries.
UpdateResult update_step(const SeparationMatrix& b, std::span<const double> x, const EasiConfig& cfg,
                         std::size_t sample_index = 0);
UpdateResult update_step(const SeparationMatrix& b, std::span<const double> x, const EasiConfig& cfg, OpCount& ops,
                         std::size_t sample_index = 0);

// Random-access source of training samples. Implementations may compute samples
// on demand (e.g. projecting each raw sample as it is read).
class SampleStream {
 public:
  virtual ~SampleStream() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual void read(std::size_t index, std::span<double> out) const = 0;
};

class DatasetStream final : public SampleStream {
 public:
  explicit DatasetStream(const Dataset& data) : data_(data) {}
  std::size_t size() const override { return data_.sample_count(); }
  std::size_t dim() const override { return data_.feature_count(); }
  void read(std::size_t index, std::span<double> out) const override;

 private:
  const Dataset& data_;
};

struct TrainTrace {
  // ||B_end - B_start||_F / ||B_start||_F for each epoch.
  std::vector<double> relative_updates;
  std::size_t epochs_run = 0;
  bool converged = false;
};

struct TrainResult {
  SeparationMatrix separation;
  TrainTrace trace;
};

// Serial EASI training: samples are visited in order each epoch until the
// epoch-level relative update drops below cfg.convergence_tol or cfg.max_epochs
// is reached.
TrainResult train(const SampleStream& samples, std::size_t n, const EasiConfig& cfg);
TrainResult train(const Dataset& data, std::size_t n, const EasiConfig& cfg);
// Same, counting every arithmetic operation of the update loop.
TrainResult train(const SampleStream& samples, std::size_t n, const EasiConfig& cfg, OpCount& ops);

}  // namespace easirp
