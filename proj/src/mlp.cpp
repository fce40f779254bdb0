#include "pursuit/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace pursuit {

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -[t log s(z) + (1 - t) log(1 - s(z))] without forming s(z).
double bce_with_logit(double z, double t) {
  return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
}

void check_input(const MLPParams& p, std::size_t n) {
  if (static_cast<int>(n) != p.input_dim) {
    throw DimensionMismatch("network expects " + std::to_string(p.input_dim) +
                            " inputs, got " + std::to_string(n));
  }
}

MLPParams shaped_zero(int input_dim, int hidden_count) {
  MLPParams p;
  p.input_dim = input_dim;
  p.hidden_count = hidden_count;
  p.w1.assign(static_cast<std::size_t>(hidden_count) * input_dim, 0.0);
  p.b1.assign(hidden_count, 0.0);
  p.w2.assign(static_cast<std::size_t>(kNumOutputs) * hidden_count, 0.0);
  p.b2.assign(kNumOutputs, 0.0);
  return p;
}

// Pre-activations of the output layer; fills hidden with tanh activations.
void forward_logits(const MLPParams& p, const double* x, double* hidden,
                    double* logits) {
  const int d = p.input_dim;
  const int h = p.hidden_count;
  for (int j = 0; j < h; ++j) {
    const double* row = p.w1.data() + static_cast<std::size_t>(j) * d;
    double z = p.b1[j];
    for (int i = 0; i < d; ++i) z += row[i] * x[i];
    hidden[j] = std::tanh(z);
  }
  for (int k = 0; k < kNumOutputs; ++k) {
    const double* row = p.w2.data() + static_cast<std::size_t>(k) * h;
    double z = p.b2[k];
    for (int j = 0; j < h; ++j) z += row[j] * hidden[j];
    logits[k] = z;
  }
}

void check_batch(const MLPParams& p, const TrainingSet& batch) {
  if (batch.features.size() != batch.targets.size()) {
    throw std::invalid_argument("training set has mismatched feature/target counts");
  }
  for (const FeatureVector& x : batch.features) check_input(p, x.size());
}

}  // namespace

std::vector<double> MLPParams::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  out.insert(out.end(), w1.begin(), w1.end());
  out.insert(out.end(), b1.begin(), b1.end());
  out.insert(out.end(), w2.begin(), w2.end());
  out.insert(out.end(), b2.begin(), b2.end());
  return out;
}

void MLPParams::assign_flat(std::span<const double> values) {
  if (values.size() != num_params()) {
    throw DimensionMismatch("flat parameter vector has wrong length");
  }
  auto it = values.begin();
  for (auto* v : {&w1, &b1, &w2, &b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
    it += static_cast<std::ptrdiff_t>(v->size());
  }
}

bool MLPParams::is_consistent() const {
  if (input_dim < 1 || hidden_count < 1) return false;
  if (w1.size() != static_cast<std::size_t>(hidden_count) * input_dim) return false;
  if (b1.size() != static_cast<std::size_t>(hidden_count)) return false;
  if (w2.size() != static_cast<std::size_t>(kNumOutputs) * hidden_count) return false;
  if (b2.size() != static_cast<std::size_t>(kNumOutputs)) return false;
  const std::vector<double> all = flatten();
  return std::all_of(all.begin(), all.end(), [](double v) { return std::isfinite(v); });
}

void TrainingSet::add(FeatureVector x, TargetVector t) {
  if (!features.empty() && x.size() != features.front().size()) {
    throw DimensionMismatch("feature length differs from the rest of the set");
  }
  features.push_back(std::move(x));
  targets.push_back(t);
}

int hidden_units_for(std::size_t n_samples) {
  const int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_samples))));
  return std::clamp(root, 4, 30);
}

MLPParams init_mlp(int input_dim, int hidden_count, Rng& rng) {
  if (input_dim < 1 || hidden_count < 1) {
    throw std::invalid_argument("network dimensions must be >= 1");
  }
  MLPParams p = shaped_zero(input_dim, hidden_count);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_count));
  std::uniform_real_distribution<double> u1(-bound1, bound1);
  std::uniform_real_distribution<double> u2(-bound2, bound2);
  for (double& w : p.w1) w = u1(rng);
  for (double& w : p.w2) w = u2(rng);
  return p;
}

MLPParams zero_mlp(int input_dim, int hidden_count) {
  if (input_dim < 1 || hidden_count < 1) {
    throw std::invalid_argument("network dimensions must be >= 1");
  }
  return shaped_zero(input_dim, hidden_count);
}

Outputs forward(const MLPParams& params, std::span<const double> x) {
  check_input(params, x.size());
  std::vector<double> hidden(params.hidden_count);
  Outputs logits{};
  forward_logits(params, x.data(), hidden.data(), logits.data());
  Outputs out{};
  for (int k = 0; k < kNumOutputs; ++k) out[k] = logistic(logits[k]);
  return out;
}

double loss(const MLPParams& params, const TrainingSet& batch) {
  if (batch.empty()) throw EmptyBatch("loss of an empty batch");
  check_batch(params, batch);
  std::vector<double> hidden(params.hidden_count);
  Outputs logits{};
  double total = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n) {
    forward_logits(params, batch.features[n].data(), hidden.data(), logits.data());
    for (int k = 0; k < kNumOutputs; ++k) {
      total += bce_with_logit(logits[k], batch.targets[n][k]);
    }
  }
  return total / static_cast<double>(batch.size());
}

LossGradient loss_and_gradient(const MLPParams& params, const TrainingSet& batch) {
  if (batch.empty()) throw EmptyBatch("gradient of an empty batch");
  check_batch(params, batch);

  const int d = params.input_dim;
  const int h = params.hidden_count;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  LossGradient out;
  out.grad = shaped_zero(d, h);
  MLPParams& g = out.grad;

  std::vector<double> hidden(h);
  std::vector<double> delta_hidden(h);
  Outputs logits{};
  Outputs delta_out{};
  double total = 0.0;

  for (std::size_t n = 0; n < batch.size(); ++n) {
    const double* x = batch.features[n].data();
    const TargetVector& t = batch.targets[n];
    forward_logits(params, x, hidden.data(), logits.data());

    for (int k = 0; k < kNumOutputs; ++k) {
      total += bce_with_logit(logits[k], t[k]);
      // d(BCE)/d(logit) = sigmoid(logit) - target
      delta_out[k] = (logistic(logits[k]) - t[k]) * inv_n;
      g.b2[k] += delta_out[k];
    }

    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (int k = 0; k < kNumOutputs; ++k) {
      const double dk = delta_out[k];
      const double* w_row = params.w2.data() + static_cast<std::size_t>(k) * h;
      double* g_row = g.w2.data() + static_cast<std::size_t>(k) * h;
      for (int j = 0; j < h; ++j) {
        g_row[j] += dk * hidden[j];
        delta_hidden[j] += dk * w_row[j];
      }
    }

    for (int j = 0; j < h; ++j) {
      const double dj = delta_hidden[j] * (1.0 - hidden[j] * hidden[j]);
      g.b1[j] += dj;
      double* g_row = g.w1.data() + static_cast<std::size_t>(j) * d;
      for (int i = 0; i < d; ++i) g_row[i] += dj * x[i];
    }
  }
  out.loss = total * inv_n;
  return out;
}

MLPParams gradient(const MLPParams& params, const TrainingSet& batch) {
  return loss_and_gradient(params, batch).grad;
}

TrainResult train(const TrainingSet& set, int input_dim, Rng& rng,
                  const TrainOptions& options) {
  if (set.empty()) throw EmptyTrainingSet("cannot train on an empty training set");

  MLPParams params = init_mlp(input_dim, hidden_units_for(set.size()), rng);
  std::vector<double> theta = params.flatten();
  std::vector<double> velocity(theta.size(), 0.0);

  TrainResult result;
  result.params = params;

  double best_loss = 0.0;
  for (int it = 0; it <= options.iterations; ++it) {
    params.assign_flat(theta);
    LossGradient lg = loss_and_gradient(params, set);
    if (it == 0) {
      result.initial_loss = lg.loss;
      best_loss = lg.loss;
    } else if (lg.loss < best_loss) {
      best_loss = lg.loss;
      result.params = params;
    }
    if (it == options.iterations) break;

    const std::vector<double> grad = lg.grad.flatten();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      velocity[i] = options.momentum * velocity[i] - options.learning_rate * grad[i];
      theta[i] += velocity[i];
    }
  }
  result.final_loss = best_loss;
  return result;
}

void to_json(nlohmann::json& j, const MLPParams& p) {
  j = nlohmann::json{{"hidden_count", p.hidden_count},
                     {"w1", p.w1},
                     {"b1", p.b1},
                     {"w2", p.w2},
                     {"b2", p.b2}};
}

void from_json(const nlohmann::json& j, MLPParams& p) {
  MLPParams out;
  out.hidden_count = j.at("hidden_count").get<int>();
  out.w1 = j.at("w1").get<std::vector<double>>();
  out.b1 = j.at("b1").get<std::vector<double>>();
  out.w2 = j.at("w2").get<std::vector<double>>();
  out.b2 = j.at("b2").get<std::vector<double>>();
  if (out.hidden_count < 1 || out.w1.size() % out.hidden_count != 0) {
    throw DimensionMismatch("serialized network has inconsistent dimensions");
  }
  out.input_dim = static_cast<int>(out.w1.size() / out.hidden_count);
  if (!out.is_consistent()) {
    throw DimensionMismatch("serialized network has inconsistent dimensions");
  }
  p = std::move(out);
}

}  // namespace pursuit
