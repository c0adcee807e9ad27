#include "easirp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "easirp/errors.hpp"
#include "easirp/random.hpp"

namespace easirp {

void MlpConfig::validate() const {
  if (epochs == 0) throw ConfigError("mlp epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("mlp batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("mlp learning rate must be positive");
  for (std::size_t w : hidden_layers)
    if (w == 0) throw ConfigError("hidden layer widths must be positive");
}

Mlp::Mlp(std::vector<Matrix> weights, std::vector<Vector> biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.empty() || weights_.size() != biases_.size()) throw ArgumentError("mlp needs one bias per layer");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (biases_[l].size() != weights_[l].rows()) throw ArgumentError("bias width mismatch in layer " + std::to_string(l));
    if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) {
      throw ArgumentError("layer " + std::to_string(l) + " input width does not chain");
    }
  }
}

Vector Mlp::logits(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ArgumentError("mlp expects " + std::to_string(input_dim()) + " inputs, got " + std::to_string(x.size()));
  }
  Vector a = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vector z = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

int Mlp::predict(std::span<const double> x) const {
  const Vector z = logits(x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < z.size(); ++k)
    if (z[k] > z[best]) best = k;
  return static_cast<int>(best);
}

Mlp train_mlp(const Dataset& data, const MlpConfig& cfg) {
  cfg.validate();
  const auto& labels = data.labels();
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw ArgumentError("mlp training needs at least two classes");
  }

  std::vector<std::size_t> widths{data.feature_count()};
  widths.insert(widths.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  widths.push_back(static_cast<std::size_t>(data.class_count()));
  const std::size_t layers = widths.size() - 1;

  Rng rng(cfg.seed);
  std::vector<Matrix> w(layers);
  std::vector<Vector> b(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    w[l].resize(static_cast<Eigen::Index>(widths[l + 1]), static_cast<Eigen::Index>(widths[l]));
    for (Eigen::Index c = 0; c < w[l].cols(); ++c)
      for (Eigen::Index r = 0; r < w[l].rows(); ++r) w[l](r, c) = rng.uniform(-bound, bound);
    b[l] = Vector::Zero(static_cast<Eigen::Index>(widths[l + 1]));
  }

  const std::size_t n = data.sample_count();
  std::vector<std::size_t> order(n);
  std::vector<Matrix> act(layers + 1);  // activations, one column per batch sample
  std::vector<Matrix> grad_w(layers);
  std::vector<Vector> grad_b(layers);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t first = 0; first < n; first += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - first);
      const auto cols = static_cast<Eigen::Index>(count);
      act[0].resize(static_cast<Eigen::Index>(widths[0]), cols);
      for (std::size_t k = 0; k < count; ++k) {
        const auto x = data.sample(order[first + k]);
        act[0].col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
      }
      for (std::size_t l = 0; l < layers; ++l) {
        act[l + 1] = (w[l] * act[l]).colwise() + b[l];
        if (l + 1 < layers) act[l + 1] = act[l + 1].cwiseMax(0.0);
      }

      // Softmax cross-entropy gradient w.r.t. logits: p - onehot, averaged over the batch.
      Matrix delta = act[layers];
      for (Eigen::Index k = 0; k < cols; ++k) {
        auto z = delta.col(k);
        z.array() -= z.maxCoeff();
        z = z.array().exp().matrix();
        z /= z.sum();
        z[labels[order[first + static_cast<std::size_t>(k)]]] -= 1.0;
      }
      delta /= static_cast<double>(count);

      for (std::size_t l = layers; l-- > 0;) {
        grad_w[l] = delta * act[l].transpose();
        grad_b[l] = delta.rowwise().sum();
        if (l > 0) {
          Matrix back = w[l].transpose() * delta;
          delta = (act[l].array() > 0.0).select(back, 0.0);
        }
      }
      for (std::size_t l = 0; l < layers; ++l) {
        w[l] -= cfg.learning_rate * grad_w[l];
        b[l] -= cfg.learning_rate * grad_b[l];
      }
    }
  }
  return Mlp(std::move(w), std::move(b));
}

double accuracy(const Mlp& model, const Dataset& test) {
  if (test.feature_count() != model.input_dim()) {
    throw ArgumentError("test set has " + std::to_string(test.feature_count()) + " features, model expects " +
                        std::to_string(model.input_dim()));
  }
  const auto& labels = test.labels();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.sample_count(); ++i)
    if (model.predict(test.sample(i)) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(test.sample_count());
}

}  // namespace easirp
