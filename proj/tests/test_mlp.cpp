#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gradient_oracle.hpp"
#include "pursuit/mlp.hpp"

using namespace pursuit;

namespace {

int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Five tight clusters on the unit circle, one per direction: each class is
// linearly separable from the rest.
TrainingSet circle_clusters(Rng& rng) {
  std::normal_distribution<double> jitter(0.0, 0.05);
  TrainingSet set;
  for (int n = 0; n < 20; ++n) {
    const int k = n % kNumDirs;
    const double a = 2.0 * std::numbers::pi * k / kNumDirs;
    set.add({std::cos(a) + jitter(rng), std::sin(a) + jitter(rng)},
            target_vector(dir_from_index(k)));
  }
  return set;
}

}  // namespace

TEST_CASE("hidden unit schedule") {
  CHECK(hidden_units_for(0) == 4);
  CHECK(hidden_units_for(10) == 4);
  CHECK(hidden_units_for(17) == 5);
  CHECK(hidden_units_for(100) == 10);
  CHECK(hidden_units_for(101) == 11);
  CHECK(hidden_units_for(900) == 30);
  CHECK(hidden_units_for(2000) == 30);
}

TEST_CASE("init_mlp") {
  Rng a(3);
  Rng b(3);
  const MLPParams p = init_mlp(8, 6, a);
  CHECK(p == init_mlp(8, 6, b));
  CHECK(p.is_consistent());
  CHECK(p.w1.size() == 48);
  CHECK(p.w2.size() == 30);
  for (double w : p.w1) CHECK(std::abs(w) <= 1.0 / std::sqrt(8.0));
  for (double w : p.w2) CHECK(std::abs(w) <= 1.0 / std::sqrt(6.0));
  for (double v : p.b1) CHECK(v == 0.0);
  for (double v : p.b2) CHECK(v == 0.0);

  Rng c(4);
  CHECK(init_mlp(8, 6, c).w1 != p.w1);
  CHECK_THROWS(init_mlp(0, 6, c));
}

TEST_CASE("forward pass") {
  const MLPParams zero = zero_mlp(8, 4);
  const std::vector<double> x{0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8};
  for (double o : forward(zero, x)) CHECK(o == 0.5);

  Rng rng(12);
  const MLPParams p = testutil::random_network(8, 7, rng);
  const Outputs a = forward(p, x);
  CHECK(a == forward(p, x));
  for (double o : a) CHECK((o > 0.0 && o < 1.0));

  // Large logits stay strictly inside (0, 1).
  MLPParams big = zero_mlp(8, 4);
  big.b2 = {30.0, -30.0, 0.0, 5.0, -5.0};
  for (double o : forward(big, x)) CHECK((o > 0.0 && o < 1.0));

  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("loss matches the reference implementation") {
  Rng rng(21);
  for (int k = 0; k < 5; ++k) {
    const MLPParams p = testutil::random_network(8, 5 + k, rng);
    const TrainingSet set = testutil::random_batch(8, 7, rng);
    CHECK(loss(p, set) == doctest::Approx(testutil::reference_loss(p, set)).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient agrees with central differences") {
  Rng rng(5150);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int hidden = 3 + trial % 6;
    const MLPParams p = testutil::random_network(8, hidden, rng);
    const TrainingSet set = testutil::random_batch(8, 1 + trial % 9, rng);
    const auto analytic = gradient(p, set).flatten();
    const auto numeric = testutil::numeric_gradient(p, set, 1e-5);
    worst = std::max(worst, testutil::max_relative_error(analytic, numeric));
  }
  MESSAGE("max relative error " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient edge cases") {
  Rng rng(9);
  const MLPParams p = testutil::random_network(8, 5, rng);
  CHECK_THROWS_AS(gradient(p, TrainingSet{}), EmptyBatch);
  CHECK_THROWS_AS(loss(p, TrainingSet{}), EmptyBatch);

  SUBCASE("two-example batch is the mean of single-example gradients") {
    const TrainingSet both = testutil::random_batch(8, 2, rng);
    TrainingSet first, second;
    first.add(both.features[0], both.targets[0]);
    second.add(both.features[1], both.targets[1]);
    const auto g = gradient(p, both).flatten();
    const auto g1 = gradient(p, first).flatten();
    const auto g2 = gradient(p, second).flatten();
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g[i] == doctest::Approx(0.5 * (g1[i] + g2[i])).epsilon(1e-12));
    }
  }

  SUBCASE("perfect fit is stationary") {
    // Output biases saturate toward the one-hot target; hidden weights zero.
    MLPParams fit = zero_mlp(8, 4);
    fit.b2 = {40.0, -40.0, -40.0, -40.0, -40.0};
    TrainingSet set;
    set.add(std::vector<double>(8, 0.3), target_vector(MoveDir::Up));
    set.add(std::vector<double>(8, -0.1), target_vector(MoveDir::Up));
    double norm = 0.0;
    for (double g : gradient(fit, set).flatten()) norm += g * g;
    CHECK(std::sqrt(norm) < 1e-6);
  }

  SUBCASE("dimension mismatch") {
    TrainingSet bad;
    bad.add({1.0, 2.0}, target_vector(MoveDir::Up));
    CHECK_THROWS_AS(gradient(p, bad), DimensionMismatch);
  }
}

TEST_CASE("training") {
  Rng data_rng(1);
  const TrainingSet set = circle_clusters(data_rng);

  Rng a(77);
  const TrainResult r = train(set, 2, a);
  CHECK(r.params.hidden_count == hidden_units_for(20));
  CHECK(r.final_loss <= r.initial_loss);
  CHECK(r.final_loss == doctest::Approx(loss(r.params, set)));

  int correct = 0;
  for (std::size_t n = 0; n < set.size(); ++n) {
    correct += argmax(forward(r.params, set.features[n])) == argmax(set.targets[n]);
  }
  MESSAGE("training accuracy " << correct << "/20");
  CHECK(correct >= 19);

  Rng b(77);
  CHECK(train(set, 2, b).params == r.params);

  Rng c(0);
  CHECK_THROWS_AS(train(TrainingSet{}, 2, c), EmptyTrainingSet);
}

TEST_CASE("final loss never exceeds initial loss") {
  Rng rng(31);
  for (int k = 0; k < 10; ++k) {
    const TrainingSet set = testutil::random_batch(8, 5 + 10 * k, rng);
    const TrainResult r = train(set, 8, rng);
    CHECK(r.final_loss <= r.initial_loss);
  }
}

TEST_CASE("parameter JSON round trip") {
  Rng rng(8);
  const MLPParams p = init_mlp(8, 6, rng);
  const nlohmann::json j = p;
  CHECK(j.size() == 5);
  CHECK(j.at("hidden_count") == 6);
  CHECK(j.at("w1").size() == 48);
  const MLPParams back = j.get<MLPParams>();
  CHECK(back == p);

  nlohmann::json broken = j;
  broken["b2"] = {1.0, 2.0};
  CHECK_THROWS(broken.get<MLPParams>());
}
