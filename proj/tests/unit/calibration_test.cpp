#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bytegram/calibration.hpp"
#include "bytegram/error.hpp"
#include "bytegram/forest.hpp"
#include "bytegram/metrics.hpp"
#include "bytegram/rng.hpp"

using namespace bytegram;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Noisy 3-class data whose raw forest votes are overconfident.
FeatureMatrix noisy(Rng& rng, std::size_t rows, std::vector<std::size_t>& labels) {
  FeatureMatrix x(rows, 8);
  labels.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = r % 3;
    for (std::size_t j = 0; j < 8; ++j) {
      x.at(r, j) = static_cast<float>(rng.below(10)) + (j == labels[r] ? 3.0f : 0.0f);
    }
  }
  return x;
}

ForestConfig cfg(std::size_t trees) {
  ForestConfig c;
  c.n_trees = trees;
  c.seed = 1;
  return c;
}

}  // namespace

TEST(CalibrationMethod, Parse) {
  EXPECT_EQ(parse_calibration_method("none"), CalibrationMethod::kNone);
  EXPECT_EQ(parse_calibration_method("sigmoid"), CalibrationMethod::kSigmoid);
  EXPECT_EQ(to_string(CalibrationMethod::kSigmoid), "sigmoid");
  EXPECT_THROW(parse_calibration_method("isotonic"), ConfigError);
}

TEST(FitSigmoid, DecreasingInParameterForPositiveScores) {
  std::vector<double> scores;
  std::vector<std::uint8_t> positive;
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.unit();
    scores.push_back(s);
    positive.push_back(rng.bernoulli(s) ? 1 : 0);
  }
  const auto p = fit_sigmoid(scores, positive);
  EXPECT_LT(p.a, 0.0);  // higher score, higher probability
  EXPECT_LT(p(0.1), p(0.9));
  EXPECT_GT(p(0.9), 0.5);
  EXPECT_LT(p(0.1), 0.5);
}

TEST(FitSigmoid, HandlesSeparableData) {
  const std::vector<double> scores{0, 0, 0, 1, 1, 1};
  const std::vector<std::uint8_t> positive{0, 0, 0, 1, 1, 1};
  const auto p = fit_sigmoid(scores, positive);
  EXPECT_TRUE(std::isfinite(p.a) && std::isfinite(p.b));
  EXPECT_GT(p(1.0), 0.7);
  EXPECT_LT(p(0.0), 0.3);
}

TEST(Calibrator, NonePassesThrough) {
  Calibrator c;
  const std::vector<double> raw{0.2, 0.5, 0.3};
  EXPECT_EQ(c.apply(raw), raw);
}

TEST(Calibrator, OutputsOnTheSimplex) {
  Calibrator c;
  c.method = CalibrationMethod::kSigmoid;
  c.per_class = {{-5.0, 2.0}, {-3.0, 1.0}, {-8.0, 4.0}};
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> raw{rng.unit(), rng.unit(), rng.unit()};
    const double s = sum(raw);
    for (auto& v : raw) v /= s;
    const auto p = c.apply(raw);
    EXPECT_NEAR(sum(p), 1.0, 1e-9);
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Calibrator, SerializeRoundTrip) {
  Calibrator c;
  c.method = CalibrationMethod::kSigmoid;
  c.per_class = {{-5.5, 2.25}, {-3.0, 1.0 / 3.0}};
  const std::vector<std::string> fams{"a", "b"};
  const auto back = Calibrator::parse(c.serialize(fams), fams);
  ASSERT_EQ(back.per_class.size(), 2u);
  EXPECT_EQ(back.per_class[1].b, 1.0 / 3.0);
  EXPECT_EQ(back.serialize(fams), c.serialize(fams));
  EXPECT_THROW(Calibrator::parse(c.serialize(fams), {"a", "c"}), LoadError);
}

TEST(StratifiedFolds, BalancedAndValidated) {
  const std::vector<std::size_t> labels{0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
  const auto folds = stratified_folds(labels, 3, 3, 5);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<int> per_fold(3, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) ++per_fold[folds[i]];
    }
    for (int n : per_fold) EXPECT_GE(n, 1);
  }
  EXPECT_EQ(folds, stratified_folds(labels, 3, 3, 5));
  try {
    stratified_folds(labels, 3, 4, 5);
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("fewer"), std::string::npos);
  }
  EXPECT_THROW(stratified_folds(labels, 3, 1, 5), CalibrationError);
}

TEST(FitCalibrator, PreservesArgmaxOnSeparableTrainingData) {
  const std::size_t rows = 30;
  FeatureMatrix x(rows, 3);
  std::vector<std::size_t> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = r % 3;
    x.at(r, labels[r]) = 1.0f;
  }
  const auto forest = train_forest(x, labels, 3, cfg(30));
  const auto cal = fit_calibrator(x, labels, 3, cfg(30), 3, CalibrationMethod::kSigmoid);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto raw = forest.predict_proba(x.row(r));
    const auto p = cal.apply(raw);
    EXPECT_EQ(std::max_element(p.begin(), p.end()) - p.begin(), static_cast<long>(labels[r]));
  }
}

TEST(FitCalibrator, ImprovesHeldOutLoglossOfOverconfidentVotes) {
  Rng rng(3);
  std::vector<std::size_t> train_labels, test_labels;
  const FeatureMatrix train = noisy(rng, 300, train_labels);
  const FeatureMatrix test = noisy(rng, 300, test_labels);
  // Few trees: votes are coarse and often put zero mass on the true class.
  ForestConfig c = cfg(5);
  const auto forest = train_forest(train, train_labels, 3, c);
  const auto cal = fit_calibrator(train, train_labels, 3, c, 3, CalibrationMethod::kSigmoid);
  PredictionMatrix raw, calibrated;
  raw.class_order = calibrated.class_order = {"a", "b", "c"};
  for (std::size_t r = 0; r < test.rows(); ++r) {
    const auto p = forest.predict_proba(test.row(r));
    raw.p.push_back(p);
    calibrated.p.push_back(cal.apply(p));
    raw.truth.push_back(test_labels[r]);
    calibrated.truth.push_back(test_labels[r]);
  }
  EXPECT_LE(logloss(calibrated), logloss(raw));
}

TEST(OutOfFold, RowsPredictedByForestsThatDidNotSeeThem) {
  Rng rng(4);
  std::vector<std::size_t> labels;
  const FeatureMatrix x = noisy(rng, 60, labels);
  const auto oof = out_of_fold_proba(x, labels, 3, cfg(20), 3);
  ASSERT_EQ(oof.size(), 60u);
  for (const auto& p : oof) EXPECT_NEAR(sum(p), 1.0, 1e-9);
  EXPECT_EQ(oof, out_of_fold_proba(x, labels, 3, cfg(20), 3, 4));
}
