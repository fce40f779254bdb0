#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/encoding.hpp"
#include "pursuit/game.hpp"

namespace pursuit {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyBatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kNumOutputs = kNumDirs;

using Outputs = std::array<double, kNumOutputs>;

// Two-layer perceptron: tanh hidden layer, five independent logistic outputs.
// Weight matrices are row-major: w1 is hidden_count x input_dim, w2 is
// kNumOutputs x hidden_count. The same layout doubles as a gradient.
struct MLPParams {
  int input_dim = 0;
  int hidden_count = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  std::size_t num_params() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> values);
  // Dimensions consistent and every value finite.
  bool is_consistent() const;

  friend bool operator==(const MLPParams&, const MLPParams&) = default;
};

struct TrainingSet {
  std::vector<FeatureVector> features;
  std::vector<TargetVector> targets;

  void add(FeatureVector x, TargetVector t);
  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }
};

// clamp(ceil(sqrt(n)), 4, 30)
int hidden_units_for(std::size_t n_samples);

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
MLPParams init_mlp(int input_dim, int hidden_count, Rng& rng);

// All weights and biases zero: every output is exactly 0.5.
MLPParams zero_mlp(int input_dim, int hidden_count);

Outputs forward(const MLPParams& params, std::span<const double> x);

// Loss is binary cross-entropy summed over the five outputs and averaged over
// the examples.
double loss(const MLPParams& params, const TrainingSet& batch);

struct LossGradient {
  double loss = 0.0;
  MLPParams grad;
};

// Exact analytic gradient of loss(). Throws EmptyBatch.
LossGradient loss_and_gradient(const MLPParams& params, const TrainingSet& batch);
MLPParams gradient(const MLPParams& params, const TrainingSet& batch);

struct TrainOptions {
  double learning_rate = 0.5;
  double momentum = 0.9;
  int iterations = 200;
};

struct TrainResult {
  MLPParams params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Fresh network sized by hidden_units_for(|set|), full-batch gradient descent
// with momentum. The returned parameters are the lowest-loss iterate, so
// final_loss <= initial_loss always holds. Throws EmptyTrainingSet.
TrainResult train(const TrainingSet& set, int input_dim, Rng& rng,
                  const TrainOptions& options = {});

void to_json(nlohmann::json& j, const MLPParams& p);
void from_json(const nlohmann::json& j, MLPParams& p);

}  // namespace pursuit
