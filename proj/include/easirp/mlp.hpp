#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "easirp/data.hpp"
#include "easirp/linalg.hpp"

namespace easirp {

struct MlpConfig {
  std::vector<std::size_t> hidden_layers{64, 64};
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fully connected classifier: ReLU hidden layers, softmax output.
class Mlp {
 public:
  Mlp(std::vector<Matrix> weights, std::vector<Vector> biases);

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(weights_.front().cols()); }
  std::size_t class_count() const noexcept { return static_cast<std::size_t>(weights_.back().rows()); }
  const std::vector<Matrix>& weights() const noexcept { return weights_; }
  const std::vector<Vector>& biases() const noexcept { return biases_; }

  Vector logits(std::span<const double> x) const;
  // argmax of the logits; ties go to the lower class index.
  int predict(std::span<const double> x) const;

 private:
  std::vector<Matrix> weights_;  // layer l maps width[l] -> width[l+1]
  std::vector<Vector> biases_;
};

// Mini-batch SGD on softmax cross-entropy. Samples are reshuffled every epoch
// from the config seed; weights start uniform in +-1/sqrt(fan_in), biases at 0.
Mlp train_mlp(const Dataset& data, const MlpConfig& cfg);

// Fraction of samples whose predicted class equals the label.
double accuracy(const Mlp& model, const Dataset& test);

}  // namespace easirp
