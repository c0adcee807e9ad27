#include "easirp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "easirp/errors.hpp"

namespace easirp {

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::RandomProjection: return "rp";
    case Mode::PcaWhiten: return "pca";
    case Mode::Ica: return "ica";
    case Mode::RpThenIca: return "rp+ica";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "rp") return Mode::RandomProjection;
  if (name == "pca") return Mode::PcaWhiten;
  if (name == "ica") return Mode::Ica;
  if (name == "rp+ica") return Mode::RpThenIca;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected rp, pca, ica or rp+ica)");
}

bool uses_projection(Mode mode) { return mode == Mode::RandomProjection || mode == Mode::RpThenIca; }
bool uses_separation(Mode mode) { return mode != Mode::RandomProjection; }

TermFlags forced_terms(Mode mode, bool keep_second_order) {
  switch (mode) {
    case Mode::PcaWhiten: return {.second_order = true, .higher_order = false};
    case Mode::Ica: return {.second_order = true, .higher_order = true};
    case Mode::RpThenIca: return {.second_order = keep_second_order, .higher_order = true};
    case Mode::RandomProjection: return {.second_order = false, .higher_order = false};
  }
  return {};
}

PipelineConfig PipelineConfig::make(Mode mode, std::size_t m, std::size_t p, std::size_t n, EasiConfig easi,
                                    std::uint64_t rp_seed) {
  PipelineConfig cfg;
  cfg.mode = mode;
  cfg.m = m;
  cfg.p = uses_projection(mode) ? p : 0;
  cfg.n = mode == Mode::RandomProjection ? p : n;
  cfg.rp_seed = rp_seed;
  cfg.easi = easi;
  cfg.easi.terms = forced_terms(mode);
  return cfg;
}

void PipelineConfig::validate() const {
  const auto dims = [&] {
    return "m=" + std::to_string(m) + " p=" + std::to_string(p) + " n=" + std::to_string(n);
  };
  if (m == 0 || n == 0) throw ConfigError("dimensions must be positive (" + dims() + ")");
  switch (mode) {
    case Mode::RandomProjection:
      if (p == 0 || p > m || n != p) throw ConfigError("rp mode needs m >= p >= 1 and n == p (" + dims() + ")");
      break;
    case Mode::RpThenIca:
      if (p == 0 || p > m || n > p) throw ConfigError("rp+ica mode needs m >= p >= n (" + dims() + ")");
      break;
    case Mode::PcaWhiten:
    case Mode::Ica:
      if (n > m) throw ConfigError(std::string(mode_name(mode)) + " mode needs m >= n (" + dims() + ")");
      break;
  }
  if (!(rp_scale > 0.0) || !std::isfinite(rp_scale)) throw ConfigError("projection scale must be positive");
  if (mode != Mode::RpThenIca && (keep_second_order || cache_projection)) {
    throw ConfigError("keep_second_order and cache_projection apply to rp+ica only");
  }
  if (uses_separation(mode)) easi.validate();
  {
    if (easi.terms != forced_terms(mode, keep_second_order)) {
      throw ConfigError(std::string(mode_name(mode)) + " mode requires second_order=" +
                        (forced_terms(mode, keep_second_order).second_order ? "on" : "off") +
                        " and higher_order=" + (forced_terms(mode, keep_second_order).higher_order ? "on" : "off"));
    }
  }
}

FeatureScaling FeatureScaling::estimate(const Dataset& data) {
  const RowMatrix& x = data.samples();
  FeatureScaling s;
  s.mean = x.colwise().mean().transpose();
  s.stddev = ((x.rowwise() - s.mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
  for (Eigen::Index i = 0; i < s.stddev.size(); ++i)
    if (!(s.stddev[i] > 0.0)) s.stddev[i] = 1.0;
  return s;
}

void FeatureScaling::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = (x[i] - mean[k]) / stddev[k];
  }
}

FittedPipeline::FittedPipeline(PipelineConfig config, std::optional<TernaryMatrix> projection,
                               std::optional<SeparationMatrix> separation, std::optional<TrainTrace> trace,
                               std::optional<FeatureScaling> scaling)
    : config_(std::move(config)),
      projection_(std::move(projection)),
      separation_(std::move(separation)),
      trace_(std::move(trace)),
      scaling_(std::move(scaling)) {
  config_.validate();
  if (uses_projection(config_.mode) != projection_.has_value()) {
    throw ConfigError(std::string(mode_name(config_.mode)) + " mode " +
                      (projection_ ? "must not carry" : "requires") + " a projection matrix");
  }
  if (uses_separation(config_.mode) != separation_.has_value()) {
    throw ConfigError(std::string(mode_name(config_.mode)) + " mode " +
                      (separation_ ? "must not carry" : "requires") + " a separation matrix");
  }
  if (projection_ && (projection_->rows() != config_.p || projection_->cols() != config_.m)) {
    throw ConfigError("projection matrix is " + std::to_string(projection_->rows()) + "x" +
                      std::to_string(projection_->cols()) + ", expected " + std::to_string(config_.p) + "x" +
                      std::to_string(config_.m));
  }
  if (separation_ &&
      (separation_->rows() != config_.n || separation_->cols() != config_.separation_input_dim())) {
    throw ConfigError("separation matrix is " + std::to_string(separation_->rows()) + "x" +
                      std::to_string(separation_->cols()) + ", expected " + std::to_string(config_.n) + "x" +
                      std::to_string(config_.separation_input_dim()));
  }
  if (config_.standardize_input != scaling_.has_value()) {
    throw ConfigError("feature scaling must be present exactly when standardize_input is set");
  }
  if (scaling_ && (static_cast<std::size_t>(scaling_->mean.size()) != config_.m ||
                   static_cast<std::size_t>(scaling_->stddev.size()) != config_.m)) {
    throw ConfigError("feature scaling vectors must have m entries");
  }
}

ProjectedStream::ProjectedStream(const Dataset& data, const TernaryMatrix& projection, double scale)
    : data_(data), projection_(projection), scale_(scale) {
  if (data.feature_count() != projection.cols()) throw ArgumentError("projection width does not match dataset");
}

void ProjectedStream::read(std::size_t index, std::span<double> out) const {
  Vector v = project(projection_, data_.sample(index));
  if (scale_ != 1.0) v *= scale_;
  std::copy(v.data(), v.data() + v.size(), out.begin());
}

namespace {

Dataset standardized(const Dataset& data, const FeatureScaling& scaling) {
  RowMatrix x(data.samples().rows(), data.samples().cols());
  for (std::size_t r = 0; r < data.sample_count(); ++r) {
    scaling.apply(data.sample(r), std::span<double>(x.data() + r * data.feature_count(), data.feature_count()));
  }
  std::optional<std::vector<int>> labels;
  if (data.has_labels()) labels = data.labels();
  return Dataset(std::move(x), std::move(labels));
}

}  // namespace

FittedPipeline fit(const PipelineConfig& cfg, const Dataset& train_data) {
  cfg.validate();
  if (train_data.feature_count() != cfg.m) {
    throw ConfigError("training data has " + std::to_string(train_data.feature_count()) + " features, config m=" +
                      std::to_string(cfg.m));
  }

  std::optional<FeatureScaling> scaling;
  std::optional<Dataset> scaled;
  if (cfg.standardize_input) {
    scaling = FeatureScaling::estimate(train_data);
    scaled.emplace(standardized(train_data, *scaling));
  }
  const Dataset& data = scaled ? *scaled : train_data;

  switch (cfg.mode) {
    case Mode::RandomProjection:
      return FittedPipeline(cfg, TernaryMatrix::sample(cfg.p, cfg.m, cfg.rp_seed), std::nullopt, std::nullopt,
                            std::move(scaling));
    case Mode::PcaWhiten:
    case Mode::Ica: {
      auto result = train(data, cfg.n, cfg.easi);
      return FittedPipeline(cfg, std::nullopt, std::move(result.separation), std::move(result.trace),
                            std::move(scaling));
    }
    case Mode::RpThenIca: {
      auto r = TernaryMatrix::sample(cfg.p, cfg.m, cfg.rp_seed);
      const ProjectedStream projected(data, r, cfg.rp_scale);
      std::optional<TrainResult> result;
      if (cfg.cache_projection) {
        RowMatrix v(data.sample_count(), cfg.p);
        std::vector<double> buf(cfg.p);
        for (std::size_t i = 0; i < data.sample_count(); ++i) {
          projected.read(i, buf);
          for (std::size_t k = 0; k < cfg.p; ++k) v(i, k) = buf[k];
        }
        result.emplace(train(Dataset(std::move(v)), cfg.n, cfg.easi));
      } else {
        result.emplace(train(projected, cfg.n, cfg.easi));
      }
      return FittedPipeline(cfg, std::move(r), std::move(result->separation), std::move(result->trace),
                            std::move(scaling));
    }
  }
  throw ConfigError("unknown mode");
}

namespace {

template <class C>
Vector transform_impl(const FittedPipeline& fp, std::span<const double> x, C& ops) {
  const PipelineConfig& cfg = fp.config();
  if (x.size() != cfg.m) {
    throw ArgumentError("transform expects " + std::to_string(cfg.m) + " features, got " + std::to_string(x.size()));
  }
  Vector scaled;
  if (fp.scaling()) {
    scaled.resize(static_cast<Eigen::Index>(cfg.m));
    fp.scaling()->apply(x, std::span<double>(scaled.data(), cfg.m));
    ops.add(cfg.m);
    ops.mul(cfg.m);  // division
    x = std::span<const double>(scaled.data(), cfg.m);
  }
  Vector v;
  if (fp.projection()) {
    v = project(*fp.projection(), x, ops);
    if (cfg.rp_scale != 1.0) {
      v *= cfg.rp_scale;
      ops.mul(cfg.p);
    }
    if (!fp.separation()) return v;
    x = std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
  }
  return forward(*fp.separation(), x, ops);
}

}  // namespace

Vector transform(const FittedPipeline& fp, std::span<const double> x) {
  OpCount ignored;
  return transform_impl(fp, x, ignored);
}

Vector transform(const FittedPipeline& fp, std::span<const double> x, OpCount& ops) {
  return transform_impl(fp, x, ops);
}

Dataset transform(const FittedPipeline& fp, const Dataset& data) {
  const std::size_t out = fp.config().output_dim();
  RowMatrix z(data.sample_count(), out);
  for (std::size_t i = 0; i < data.sample_count(); ++i) z.row(static_cast<Eigen::Index>(i)) = transform(fp, data.sample(i)).transpose();
  std::optional<std::vector<int>> labels;
  if (data.has_labels()) labels = data.labels();
  return Dataset(std::move(z), std::move(labels));
}

}  // namespace easirp
