#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "easirp/data.hpp"
#include "easirp/easi.hpp"
#include "easirp/op_count.hpp"
#include "easirp/projection.hpp"

namespace easirp {

enum class Mode { RandomProjection, PcaWhiten, Ica, RpThenIca };

// "rp", "pca", "ica", "rp+ica"
std::string_view mode_name(Mode mode);
// Throws ConfigError on an unknown name.
Mode parse_mode(std::string_view name);

bool uses_projection(Mode mode);
bool uses_separation(Mode mode);

// Term flags each mode runs EASI with. RP followed by EASI bypasses the
// second-order term unless explicitly kept for comparison runs.
TermFlags forced_terms(Mode mode, bool keep_second_order = false);

struct PipelineConfig {
  Mode mode = Mode::Ica;
  std::size_t m = 0;
  // Projection output dimension; only meaningful for the two RP modes.
  std::size_t p = 0;
  std::size_t n = 0;
  std::uint64_t rp_seed = 0;
  // Multiplies the projection output when != 1.
  double rp_scale = 1.0;
  EasiConfig easi;
  bool standardize_input = false;
  // RP+ICA only: keep the y y^T - I term instead of bypassing it.
  bool keep_second_order = false;
  // RP+ICA only: project the training set once instead of on every epoch.
  bool cache_projection = false;

  // Builds a config with the mode's forced term flags. For RP mode n is set to p;
  // for PCA/ICA p is cleared.
  static PipelineConfig make(Mode mode, std::size_t m, std::size_t p, std::size_t n, EasiConfig easi = {},
                             std::uint64_t rp_seed = 0);

  // Throws ConfigError on inconsistent dimensions or term flags.
  void validate() const;

  std::size_t output_dim() const { return mode == Mode::RandomProjection ? p : n; }
  // Width of the vectors the separation matrix sees.
  std::size_t separation_input_dim() const { return mode == Mode::RpThenIca ? p : m; }
};

// Per-feature affine normalization estimated on the training set.
struct FeatureScaling {
  Vector mean;
  Vector stddev;  // population; zero variances are replaced by 1

  static FeatureScaling estimate(const Dataset& data);
  void apply(std::span<const double> x, std::span<double> out) const;
};

class FittedPipeline {
 public:
  // Throws ConfigError if the components do not match what the mode requires.
  FittedPipeline(PipelineConfig config, std::optional<TernaryMatrix> projection,
                 std::optional<SeparationMatrix> separation, std::optional<TrainTrace> trace = std::nullopt,
                 std::optional<FeatureScaling> scaling = std::nullopt);

  const PipelineConfig& config() const noexcept { return config_; }
  const std::optional<TernaryMatrix>& projection() const noexcept { return projection_; }
  const std::optional<SeparationMatrix>& separation() const noexcept { return separation_; }
  const std::optional<TrainTrace>& trace() const noexcept { return trace_; }
  const std::optional<FeatureScaling>& scaling() const noexcept { return scaling_; }

 private:
  PipelineConfig config_;
  std::optional<TernaryMatrix> projection_;
  std::optional<SeparationMatrix> separation_;
  std::optional<TrainTrace> trace_;
  std::optional<FeatureScaling> scaling_;
};

// Random-access view of a dataset mapped through a projection, computed on each read.
class ProjectedStream final : public SampleStream {
 public:
  ProjectedStream(const Dataset& data, const TernaryMatrix& projection, double scale = 1.0);
  std::size_t size() const override { return data_.sample_count(); }
  std::size_t dim() const override { return projection_.rows(); }
  void read(std::size_t index, std::span<double> out) const override;

 private:
  const Dataset& data_;
  const TernaryMatrix& projection_;
  double scale_;
};

FittedPipeline fit(const PipelineConfig& cfg, const Dataset& train);

// Inference path: RP -> R x; PCA/ICA -> B x; RP+ICA -> B (R x).
Vector transform(const FittedPipeline& fp, std::span<const double> x);
Vector transform(const FittedPipeline& fp, std::span<const double> x, OpCount& ops);
Dataset transform(const FittedPipeline& fp, const Dataset& data);

// Model file, schema version 1. See docs/model-format.md.
std::string to_model_text(const FittedPipeline& fp);
FittedPipeline from_model_text(std::string_view text);
void save(const FittedPipeline& fp, const std::filesystem::path& path);
FittedPipeline load(const std::filesystem::path& path);

}  // namespace easirp
