#include <gtest/gtest.h>

#include <numeric>

#include "bytegram/error.hpp"
#include "bytegram/forest.hpp"
#include "bytegram/rng.hpp"

using namespace bytegram;

namespace {

// Column 0 equals the label; the rest is noise.
FeatureMatrix separable(Rng& rng, std::size_t rows, std::size_t noise, std::vector<std::size_t>& labels) {
  FeatureMatrix x(rows, 1 + noise);
  labels.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = r % 2;
    x.at(r, 0) = static_cast<float>(labels[r]);
    for (std::size_t j = 1; j <= noise; ++j) x.at(r, j) = static_cast<float>(rng.below(2));
  }
  return x;
}

ForestConfig small(std::size_t trees, std::uint64_t seed = 0) {
  ForestConfig c;
  c.n_trees = trees;
  c.feature_cap = 5000;
  c.seed = seed;
  return c;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(ForestConfig, Validation) {
  ForestConfig c;
  EXPECT_EQ(c.n_trees, 3000u);
  EXPECT_EQ(c.feature_cap, 5000u);
  EXPECT_EQ(c.split_features(100), 10u);
  EXPECT_EQ(c.split_features(101), 11u);
  c.features_per_split = 500;
  EXPECT_EQ(c.split_features(100), 100u);
  c.n_trees = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ForestConfig{};
  c.feature_cap = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(TrainForest, SeparableByOneFeature) {
  Rng rng(1);
  std::vector<std::size_t> labels;
  const FeatureMatrix x = separable(rng, 60, 3, labels);
  const TrainedForest f = train_forest(x, labels, 2, small(50));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto p = f.predict_proba(x.row(r));
    EXPECT_EQ(p[labels[r]], 1.0);
  }
  EXPECT_GT(f.importances[0], 0.9);
  EXPECT_NEAR(sum(f.importances), 1.0, 1e-9);
  for (const auto& t : f.trees) {
    for (const auto& n : t.nodes) {
      if (!n.is_leaf()) EXPECT_LT(static_cast<std::size_t>(n.feature), x.cols());
    }
  }
}

TEST(TrainForest, ShuffledLabelsGiveChanceOutOfBag) {
  Rng rng(2);
  const std::size_t rows = 400, k = 4;
  FeatureMatrix x(rows, 20);
  std::vector<std::size_t> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = r % k;
    for (std::size_t j = 0; j < 20; ++j) x.at(r, j) = static_cast<float>(rng.below(8));
  }
  rng.shuffle(labels);
  OobEstimate oob;
  train_forest(x, labels, k, small(100), 1, &oob);
  const double acc = oob.accuracy(labels);
  EXPECT_GT(acc, 0.25 - 0.1);
  EXPECT_LT(acc, 0.25 + 0.1);
}

TEST(TrainForest, DeterministicAcrossRunsAndThreads) {
  Rng rng(3);
  std::vector<std::size_t> labels;
  FeatureMatrix x = separable(rng, 80, 30, labels);
  for (std::size_t r = 0; r < 80; r += 7) labels[r] = 1 - labels[r];  // label noise forces deep trees
  const auto a = train_forest(x, labels, 2, small(40, 9), 1);
  const auto b = train_forest(x, labels, 2, small(40, 9), 1);
  const auto c = train_forest(x, labels, 2, small(40, 9), 4);
  EXPECT_EQ(serialize_forest(a), serialize_forest(b));
  EXPECT_EQ(serialize_forest(a), serialize_forest(c));
  EXPECT_NE(serialize_forest(a), serialize_forest(train_forest(x, labels, 2, small(40, 10))));
}

TEST(TrainForest, ProbabilitiesOnTheSimplex) {
  Rng rng(4);
  const std::size_t rows = 90, k = 3;
  FeatureMatrix x(rows, 12);
  std::vector<std::size_t> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = r % k;
    for (std::size_t j = 0; j < 12; ++j) x.at(r, j) = static_cast<float>(rng.below(5) + (j == labels[r] ? 3 : 0));
  }
  ForestConfig cfg = small(30);
  cfg.max_depth = 3;
  cfg.min_leaf = 2;
  const auto f = train_forest(x, labels, k, cfg);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto p = f.predict_proba(x.row(r));
    EXPECT_NEAR(sum(p), 1.0, 1e-9);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
  std::vector<float> wrong(5, 0.0f);
  EXPECT_THROW(f.predict_proba(wrong), ValidationError);
}

TEST(TrainForest, RejectsDegenerateLabels) {
  FeatureMatrix x(4, 2);
  const std::vector<std::size_t> one{0, 0, 0, 0};
  EXPECT_THROW(train_forest(x, one, 1, small(5)), TrainingError);
  const std::vector<std::size_t> missing{0, 0, 2, 2};
  EXPECT_THROW(train_forest(x, missing, 3, small(5)), TrainingError);
}

TEST(TrainForest, ConstantFeaturesGiveUniformImportance) {
  FeatureMatrix x(6, 3);
  const std::vector<std::size_t> labels{0, 1, 0, 1, 0, 1};
  const auto f = train_forest(x, labels, 2, small(5));
  for (double v : f.importances) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(TopColumns, TiesGoToLowerColumn) {
  const std::vector<double> imp{0.1, 0.3, 0.1, 0.3, 0.2};
  EXPECT_EQ(top_columns(imp, 2), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(top_columns(imp, 4), (std::vector<std::size_t>{0, 1, 3, 4}));
  EXPECT_EQ(top_columns(imp, 9), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(PruneAndRetrain, CapAtDimKeepsEverything) {
  Rng rng(5);
  std::vector<std::size_t> labels;
  const FeatureMatrix x = separable(rng, 40, 5, labels);
  ForestConfig cfg = small(20);
  cfg.feature_cap = 6;
  const auto initial = train_forest(x, labels, 2, cfg);
  const auto pruned = prune_and_retrain(initial, x, labels, cfg);
  EXPECT_EQ(pruned.kept_columns, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(serialize_forest(pruned.forest), serialize_forest(initial));
  EXPECT_NEAR(sum(pruned.forest.importances), 1.0, 1e-9);
}

TEST(PruneAndRetrain, SingleSurvivorIsTheSeparator) {
  Rng rng(6);
  std::vector<std::size_t> labels;
  const FeatureMatrix x = separable(rng, 60, 20, labels);
  ForestConfig cfg = small(30);
  cfg.feature_cap = 1;
  const auto pruned = prune_and_retrain(train_forest(x, labels, 2, cfg), x, labels, cfg);
  EXPECT_EQ(pruned.kept_columns, (std::vector<std::size_t>{0}));
  EXPECT_EQ(pruned.forest.dim, 1u);
  EXPECT_NEAR(pruned.forest.importances[0], 1.0, 1e-12);
}

TEST(ForestFormat, RoundTripAndCorruption) {
  Rng rng(7);
  std::vector<std::size_t> labels;
  const FeatureMatrix x = separable(rng, 50, 6, labels);
  const auto f = train_forest(x, labels, 2, small(10));
  const std::string bytes = serialize_forest(f);
  EXPECT_EQ(bytes.substr(0, 8), "BGFOREST");
  const auto back = parse_forest(bytes);
  EXPECT_EQ(serialize_forest(back), bytes);
  for (std::size_t r = 0; r < x.rows(); ++r) EXPECT_EQ(back.predict_proba(x.row(r)), f.predict_proba(x.row(r)));
  EXPECT_THROW(parse_forest(bytes.substr(0, bytes.size() - 3)), LoadError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(parse_forest(bad_magic), LoadError);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(parse_forest(bad_version), LoadError);
  EXPECT_THROW(parse_forest(bytes + "x"), LoadError);
}
