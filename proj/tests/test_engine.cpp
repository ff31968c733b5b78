#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "driftmix/engine.hpp"
#include "oracles.hpp"

using namespace driftmix;
using Catch::Approx;

namespace {

Mode make_mode(std::int64_t id, std::vector<double> mean, std::vector<double> variance,
               double weight) {
  Mode m;
  m.id = id;
  m.mean = std::move(mean);
  m.variance = std::move(variance);
  m.weight = weight;
  return m;
}

ModelConfig test_config(std::size_t dim) {
  ModelConfig cfg;
  cfg.dimension = dim;
  cfg.z = {4.0};
  return cfg;
}

}  // namespace

TEST_CASE("mahalanobis distance of a mode's own mean is zero") {
  const Mode m = make_mode(0, {1.0, -2.0, 3.0}, {0.5, 1.0, 2.0}, 1.0);
  REQUIRE(mahalanobis_distance(m.mean, m) == 0.0);
}

TEST_CASE("mahalanobis distance matches hand-computed cases") {
  const Mode m2 = make_mode(0, {0.0, 0.0}, {1.0, 4.0}, 1.0);
  REQUIRE(mahalanobis_distance({1.0, 2.0}, m2) == Approx(1.4142135623730951).epsilon(1e-12));
  const Mode m1 = make_mode(0, {0.0}, {4.0}, 1.0);
  REQUIRE(mahalanobis_distance({2.0}, m1) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mahalanobis distance rejects dimension mismatch") {
  const Mode m = make_mode(0, {0.0, 0.0}, {1.0, 1.0}, 1.0);
  REQUIRE_THROWS_AS(mahalanobis_distance({1.0}, m), std::invalid_argument);
}

TEST_CASE("mahalanobis agrees with a dense-matrix oracle on random inputs") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const Mode m = oracles::random_mode(rng, 20, i);
    const auto x = oracles::random_vector(rng, 20, -5.0, 5.0);
    const double ours = mahalanobis_distance(x, m);
    const double ref = oracles::dense_mahalanobis(x, m.mean, m.variance);
    REQUIRE(std::abs(ours - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("find_best_match on an empty mixture is a miss") {
  Mixture mix;
  const MatchResult r = find_best_match(mix, {1.0, 2.0}, 4.8);
  REQUIRE_FALSE(r.hit());
  REQUIRE_FALSE(r.distance.has_value());
}

TEST_CASE("find_best_match hits the mode at distance zero") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {1.0, 2.0}, {1.0, 1.0}, 1.0));
  const MatchResult r = find_best_match(mix, {1.0, 2.0}, 4.8);
  REQUIRE(r.hit());
  REQUIRE(*r.mode_index == 0);
  REQUIRE(*r.distance == 0.0);
}

TEST_CASE("find_best_match picks the nearer of two modes") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {3.0}, {1.0}, 0.5));  // distance 3
  mix.modes.push_back(make_mode(1, {1.0}, {1.0}, 0.5));  // distance 1
  const MatchResult r = find_best_match(mix, {0.0}, 4.8);
  REQUIRE(r.hit());
  REQUIRE(*r.mode_index == 1);
  REQUIRE(*r.distance == Approx(1.0));
}

TEST_CASE("find_best_match breaks distance ties by the lower id") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {1.0}, {1.0}, 0.5));
  mix.modes.push_back(make_mode(1, {-1.0}, {1.0}, 0.5));
  const MatchResult r = find_best_match(mix, {0.0}, 4.8);
  REQUIRE(r.hit());
  REQUIRE(mix.modes[*r.mode_index].id == 0);
}

TEST_CASE("a miss at exactly theta_match is not a hit") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {4.8}, {1.0}, 1.0));
  REQUIRE_FALSE(find_best_match(mix, {0.0}, 4.8).hit());
}

TEST_CASE("weight update with zero alpha changes nothing") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.3));
  mix.modes.push_back(make_mode(1, {1.0}, {1.0}, 0.7));
  update_weights(mix, 0, 0.0);
  REQUIRE(mix.modes[0].weight == 0.3);
  REQUIRE(mix.modes[1].weight == 0.7);
}

TEST_CASE("hit mode gains weight, the rest decay") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.5));
  update_weights(mix, 0, 0.01);
  REQUIRE(mix.modes[0].weight == Approx(0.505).epsilon(1e-12));
}

TEST_CASE("a miss decays every mode") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.6));
  mix.modes.push_back(make_mode(1, {1.0}, {1.0}, 0.4));
  update_weights(mix, std::nullopt, 0.01);
  REQUIRE(mix.modes[0].weight == Approx(0.594).epsilon(1e-12));
  REQUIRE(mix.modes[1].weight == Approx(0.396).epsilon(1e-12));
}

TEST_CASE("beta equals alpha at zero distance and halves at the midpoint") {
  REQUIRE(compute_beta(0.0, 4.8, 0.01) == 0.01);
  REQUIRE(compute_beta(2.4, 4.8, 0.01) == Approx(0.005).epsilon(1e-12));
  REQUIRE(compute_beta(4.0, 4.8, 0.01) == Approx(0.0016666666666666663).epsilon(1e-9));
}

TEST_CASE("beta rejects non-hit distances") {
  REQUIRE_THROWS_AS(compute_beta(4.8, 4.8, 0.01), std::invalid_argument);
  REQUIRE_THROWS_AS(compute_beta(5.0, 4.8, 0.01), std::invalid_argument);
  REQUIRE_THROWS_AS(compute_beta(-0.1, 4.8, 0.01), std::invalid_argument);
}

TEST_CASE("beta stays in (0, alpha] across the hit range") {
  const double theta = 4.8;
  const double alpha = 0.01;
  for (int i = 0; i < 1000; ++i) {
    const double dist = theta * (static_cast<double>(i) / 1000.0);
    const double beta = compute_beta(dist, theta, alpha);
    REQUIRE(beta > 0.0);
    REQUIRE(beta <= alpha);
  }
  // halving the distance moves beta linearly toward alpha
  const double b1 = compute_beta(3.0, theta, alpha);
  const double b2 = compute_beta(1.5, theta, alpha);
  REQUIRE(alpha - b2 == Approx(0.5 * (alpha - b1)).epsilon(1e-12));
}

TEST_CASE("hit update leaves the mean fixed when the sample equals it") {
  Mode m = make_mode(0, {1.0, 2.0}, {1.0, 2.0}, 0.5);
  update_hit_mode(m, {1.0, 2.0}, 0.25, 1e-6);
  REQUIRE(m.mean == std::vector<double>{1.0, 2.0});
  REQUIRE(m.variance[0] == Approx(0.75).epsilon(1e-12));
  REQUIRE(m.variance[1] == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("hit update uses the already-updated mean in the variance step") {
  Mode m = make_mode(0, {0.0}, {1.0}, 0.5);
  update_hit_mode(m, {1.0}, 0.5, 1e-6);
  REQUIRE(m.mean[0] == Approx(0.5).epsilon(1e-12));
  REQUIRE(m.variance[0] == Approx(0.625).epsilon(1e-12));
}

TEST_CASE("hit update with vanishing beta only floors the variance") {
  Mode m = make_mode(0, {0.0}, {1e-9}, 0.5);
  update_hit_mode(m, {0.0}, 1e-15, 1e-6);
  REQUIRE(m.mean[0] == 0.0);
  REQUIRE(m.variance[0] == 1e-6);
}

TEST_CASE("repeated identical samples cannot collapse variance below the floor") {
  ModelConfig cfg = test_config(2);
  Model model(cfg);
  for (int i = 0; i < 5000; ++i) model.process({1.0, -1.0});
  for (double v : model.mixture().modes.front().variance) {
    REQUIRE(v >= cfg.variance_floor);
  }
}

TEST_CASE("create_mode copies the sample and broadcasts scalar Z") {
  ModelConfig cfg = test_config(3);
  cfg.z = {2.5};
  const Mode m = create_mode({1.0, 2.0, 3.0}, cfg, 7);
  REQUIRE(m.id == 7);
  REQUIRE(m.mean == std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(m.variance == std::vector<double>{2.5, 2.5, 2.5});
  REQUIRE(m.weight == cfg.w0);
}

TEST_CASE("create_mode keeps per-dimension Z as given") {
  ModelConfig cfg = test_config(2);
  cfg.z = {1.0, 9.0};
  const Mode m = create_mode({0.0, 0.0}, cfg, 0);
  REQUIRE(m.variance == std::vector<double>{1.0, 9.0});
}

TEST_CASE("capacity enforcement is a no-op at the limit") {
  Mixture mix;
  for (int i = 0; i < 4; ++i) mix.modes.push_back(make_mode(i, {0.0}, {1.0}, 0.25));
  enforce_capacity(mix, 4);
  REQUIRE(mix.modes.size() == 4);
}

TEST_CASE("capacity enforcement deletes the smallest weight") {
  Mixture mix;
  const double weights[] = {0.4, 0.3, 0.2, 0.09, 0.01};
  for (int i = 0; i < 5; ++i) mix.modes.push_back(make_mode(i, {0.0}, {1.0}, weights[i]));
  enforce_capacity(mix, 4, /*protected_id=*/3);
  REQUIRE(mix.modes.size() == 4);
  for (const Mode& m : mix.modes) REQUIRE(m.weight != 0.01);
}

TEST_CASE("capacity enforcement never deletes the protected mode") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.5));
  mix.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.4));
  mix.modes.push_back(make_mode(2, {0.0}, {1.0}, 0.001));  // the just-created mode
  enforce_capacity(mix, 2, /*protected_id=*/2);
  REQUIRE(mix.modes.size() == 2);
  REQUIRE(mix.modes[0].id == 0);
  REQUIRE(mix.modes[1].id == 2);
}

TEST_CASE("capacity tie-break deletes the oldest id") {
  Mixture mix;
  for (int i = 0; i < 3; ++i) mix.modes.push_back(make_mode(i, {0.0}, {1.0}, 0.2));
  enforce_capacity(mix, 2);
  REQUIRE(mix.modes.size() == 2);
  REQUIRE(mix.modes[0].id == 1);
}

TEST_CASE("normalize_weights rescales to a unit sum") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.2));
  mix.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.2));
  normalize_weights(mix);
  REQUIRE(mix.modes[0].weight == Approx(0.5).epsilon(1e-12));
  REQUIRE(mix.modes[1].weight == Approx(0.5).epsilon(1e-12));

  Mixture single;
  single.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.37));
  normalize_weights(single);
  REQUIRE(single.modes[0].weight == 1.0);
}

TEST_CASE("normalize_weights rejects an empty mixture") {
  Mixture mix;
  REQUIRE_THROWS_AS(normalize_weights(mix), std::domain_error);
}

TEST_CASE("an almost-normalized mixture stays put") {
  Mixture mix;
  mix.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.505));
  mix.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.396));
  mix.modes.push_back(make_mode(2, {0.0}, {1.0}, 0.099));
  normalize_weights(mix);
  REQUIRE(mix.modes[0].weight == Approx(0.505).epsilon(1e-9));
  REQUIRE(mix.modes[1].weight == Approx(0.396).epsilon(1e-9));
  REQUIRE(mix.modes[2].weight == Approx(0.099).epsilon(1e-9));
}

TEST_CASE("anomaly score is one minus the matched weight") {
  Mixture mix;
  mix.modes.push_back(make_mode(5, {0.0}, {1.0}, 0.3));
  mix.modes.push_back(make_mode(6, {0.0}, {1.0}, 0.7));
  REQUIRE(anomaly_score(mix, 5) == Approx(0.7).epsilon(1e-12));
  REQUIRE(anomaly_score(mix, 6) == Approx(0.3).epsilon(1e-12));

  Mixture sole;
  sole.modes.push_back(make_mode(0, {0.0}, {1.0}, 1.0));
  REQUIRE(anomaly_score(sole, 0) == 0.0);

  REQUIRE_THROWS_AS(anomaly_score(mix, 99), std::invalid_argument);
}

TEST_CASE("classification accumulates fitness-sorted weight up to G") {
  Mixture single;
  single.modes.push_back(make_mode(0, {0.0}, {1.0}, 1.0));
  REQUIRE(classify_modes(single, 0.95) == std::vector<std::int64_t>{0});

  Mixture three;
  three.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.7));
  three.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.2));
  three.modes.push_back(make_mode(2, {0.0}, {1.0}, 0.1));
  // 0.7 + 0.2 = 0.9 < 0.95, so the third mode enters as well
  REQUIRE(classify_modes(three, 0.95).size() == 3);

  Mixture two;
  two.modes.push_back(make_mode(0, {0.0}, {1.0}, 0.96));
  two.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.04));
  REQUIRE(classify_modes(two, 0.95) == std::vector<std::int64_t>{0});
}

TEST_CASE("classification ranks by weight over sigma norm") {
  Mixture mix;
  // same weight, but the tighter mode ranks first
  mix.modes.push_back(make_mode(0, {0.0}, {9.0}, 0.5));
  mix.modes.push_back(make_mode(1, {0.0}, {1.0}, 0.5));
  const auto normal = classify_modes(mix, 0.6);
  REQUIRE(normal.front() == 1);
}

TEST_CASE("first sample creates a sole mode with unit weight") {
  Model model(test_config(2));
  const ScoredSample s = model.process({1.0, 2.0});
  REQUIRE_FALSE(s.was_hit);
  REQUIRE(s.mode_count_after == 1);
  REQUIRE(model.mixture().modes.front().weight == 1.0);
  REQUIRE(model.mixture().samples_seen == 1);
  // a miss carries no prior weight, so it scores as fully anomalous
  REQUIRE(s.score == 1.0);
  REQUIRE(s.label == Label::normal);  // the sole mode covers the whole normal set
}

TEST_CASE("repeating one sample drives its score strictly down") {
  Model model(test_config(3));
  // background modes hold the remaining weight; a sole mode would sit at
  // the fixed point (weight 1, score 0) immediately
  for (int i = 0; i < 20; ++i) model.process({100.0, 0.0, 0.0});
  for (int i = 0; i < 20; ++i) model.process({-100.0, 50.0, 0.0});

  const FeatureVector x{1.0, -2.0, 0.5};
  const ScoredSample first = model.process(x);
  REQUIRE_FALSE(first.was_hit);
  REQUIRE(first.score == 1.0);
  const std::int64_t id = first.matched_mode_id;

  double prev = first.score;
  double prev_weight = 0.0;
  for (int i = 0; i < 50; ++i) {
    const ScoredSample s = model.process(x);
    REQUIRE(s.was_hit);
    REQUIRE(s.matched_mode_id == id);
    REQUIRE(s.score < prev);
    const double w = 1.0 - s.score;
    REQUIRE(w > prev_weight);
    prev = s.score;
    prev_weight = w;
  }
}

TEST_CASE("a far-away vector is a miss labeled abnormal with score one") {
  ModelConfig cfg = test_config(2);
  Model model(cfg);
  for (int i = 0; i < 200; ++i) model.process({0.0, 0.0});
  // place the probe beyond theta_match of the trained mode by construction
  const Mode& trained = model.mixture().modes.front();
  FeatureVector probe = trained.mean;
  probe[0] += (cfg.theta_match + 1.0) * std::sqrt(trained.variance[0]) * 10.0;
  REQUIRE(mahalanobis_distance(probe, trained) > cfg.theta_match);
  const ScoredSample s = model.process(probe);
  REQUIRE_FALSE(s.was_hit);
  REQUIRE(s.score == 1.0);
  REQUIRE(s.label == Label::abnormal);
}

TEST_CASE("weights sum to one after every step") {
  std::mt19937_64 rng(7);
  ModelConfig cfg = test_config(5);
  cfg.z = {36.0};
  cfg.capacity = 6;
  cfg.merge_enabled = false;
  Model agmm(cfg);
  ModelConfig ucfg = uagmm_config(5);
  ucfg.z = {36.0};
  Model uagmm(ucfg);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    FeatureVector x(5);
    for (double& v : x) v = gauss(rng);
    agmm.process(x);
    uagmm.process(x);
    REQUIRE(std::abs(total_weight(agmm.mixture()) - 1.0) <= 1e-9);
    REQUIRE(std::abs(total_weight(uagmm.mixture()) - 1.0) <= 1e-9);
  }
}

TEST_CASE("capped model never exceeds its capacity") {
  ModelConfig cfg = test_config(4);
  cfg.capacity = 3;
  cfg.merge_enabled = false;
  Model model(cfg);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    FeatureVector x(4);
    for (double& v : x) v = gauss(rng);
    model.process(x);
    REQUIRE(model.mixture().modes.size() <= 3);
  }
}

TEST_CASE("unconstrained model only loses modes to merging") {
  ModelConfig cfg = uagmm_config(4);
  cfg.z = {4.0 * 36.0};
  Model model(cfg);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 6.0);
  std::size_t prev_count = 0;
  for (int i = 0; i < 800; ++i) {
    FeatureVector x(4);
    for (double& v : x) v = gauss(rng);
    std::vector<MergeEvent> events;
    model.process(x, &events);
    const std::size_t count = model.mixture().modes.size();
    // each step adds at most one mode and removes one per merge event
    REQUIRE(count + events.size() >= prev_count);
    REQUIRE(count <= prev_count + 1);
    prev_count = count;
  }
}

TEST_CASE("identical config and stream give bit-identical score sequences") {
  std::mt19937_64 rng(99);
  std::vector<FeatureVector> stream;
  std::normal_distribution<double> gauss(0.0, 4.0);
  for (int i = 0; i < 400; ++i) {
    FeatureVector x(6);
    for (double& v : x) v = gauss(rng);
    stream.push_back(x);
  }
  Model a(uagmm_config(6));
  Model b(uagmm_config(6));
  for (const auto& x : stream) {
    const ScoredSample sa = a.process(x);
    const ScoredSample sb = b.process(x);
    REQUIRE(sa.score == sb.score);
    REQUIRE(sa.matched_mode_id == sb.matched_mode_id);
    REQUIRE(sa.was_hit == sb.was_hit);
    REQUIRE(sa.label == sb.label);
    REQUIRE(sa.mode_count_after == sb.mode_count_after);
  }
}
