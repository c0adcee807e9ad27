#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "easirp/linalg.hpp"

namespace easirp {

/// Immutable table of real-valued samples (one per row) with optional class labels.
///
/// Construction validates that every entry is finite and that labels, when
/// present, are non-negative and one per sample.
class Dataset {
 public:
  explicit Dataset(RowMatrix samples, std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t sample_count() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t feature_count() const noexcept { return static_cast<std::size_t>(samples_.cols()); }
  const RowMatrix& samples() const noexcept { return samples_; }
  std::span<const double> sample(std::size_t i) const {
    return {samples_.data() + i * feature_count(), feature_count()};
  }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  // 1 + the largest label; 0 when unlabeled.
  int class_count() const noexcept { return class_count_; }

 private:
  RowMatrix samples_;
  std::optional<std::vector<int>> labels_;
  int class_count_ = 0;
};

// Breiman's waveform generator (version 2: 21 signal features followed by 19
// pure-noise features). The last `drop_last` features are removed.
Dataset generate_waveform(std::size_t sample_count, std::uint64_t seed, std::size_t drop_last = 0);

// The three triangular base waves over 21 positions; height 6, peaks at
// positions 7, 11 and 15 (1-based).
double waveform_base(int wave, int position);
inline constexpr std::size_t kWaveformSignalFeatures = 21;
inline constexpr std::size_t kWaveformFeatures = 40;
// Wave pair (a, b) combined for each class.
std::pair<int, int> waveform_class_waves(int label);

// Reads comma-separated reals. A first row containing any non-numeric cell is
// treated as a header. `label_column` (zero-based) is parsed as an integer label
// and excluded from the features.
Dataset load_csv(const std::filesystem::path& path, std::optional<std::size_t> label_column = std::nullopt);

// Writes features (and labels as the final column, when present) with
// round-trip precision.
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Order-preserving split into [0, train_count) and [train_count, N).
std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t train_count);

enum class SourceDistribution { Uniform, Laplace, Sign };

struct SyntheticIcaSpec {
  Matrix mixing;  // m x n, full column rank
  SourceDistribution distribution = SourceDistribution::Uniform;
};

struct IcaMixture {
  Dataset mixtures;   // samples = sources * A^T
  RowMatrix sources;  // N x n, each component zero-mean unit-variance in distribution
};

IcaMixture generate_ica_mixture(const SyntheticIcaSpec& spec, std::size_t sample_count, std::uint64_t seed);

}  // namespace easirp
