#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bytegram/forest.hpp"
#include "bytegram/matrix.hpp"

namespace bytegram {

enum class CalibrationMethod { kNone, kSigmoid };

std::string_view to_string(CalibrationMethod method);
// Throws ConfigError.
CalibrationMethod parse_calibration_method(std::string_view text);

// p = 1 / (1 + exp(a * score + b))
struct SigmoidParams {
  double a = 0.0;
  double b = 0.0;

  double operator()(double score) const;
};

// Platt scaling fitted with the Newton / backtracking procedure of Lin, Lin
// and Weng, on smoothed targets (n+ + 1)/(n+ + 2) and 1/(n- + 2).
SigmoidParams fit_sigmoid(std::span<const double> scores, std::span<const std::uint8_t> positive);

struct Calibrator {
  CalibrationMethod method = CalibrationMethod::kNone;
  std::vector<SigmoidParams> per_class;

  // Per-class sigmoid of each class's raw score, renormalized to sum to 1.
  // kNone passes raw fractions through.
  std::vector<double> apply(std::span<const double> raw) const;

  std::string serialize(const std::vector<std::string>& families) const;
  static Calibrator parse(std::string_view text, const std::vector<std::string>& families);
};

// Fold index per row; each class is shuffled with `seed` and dealt
// round-robin. Throws CalibrationError if a class has fewer rows than folds.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t n_classes,
                                          std::size_t folds, std::uint64_t seed);

// Cross-validated raw forest probabilities: each row predicted by a forest
// trained on the other folds.
std::vector<std::vector<double>> out_of_fold_proba(const FeatureMatrix& x, std::span<const std::size_t> labels,
                                                   std::size_t n_classes, const ForestConfig& config,
                                                   std::size_t folds, unsigned threads = 1);

Calibrator fit_calibrator(const FeatureMatrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
                          const ForestConfig& config, std::size_t folds, CalibrationMethod method,
                          unsigned threads = 1);

// Fits the per-class sigmoids directly on given raw probabilities.
Calibrator fit_calibrator_on(const std::vector<std::vector<double>>& raw, std::span<const std::size_t> labels,
                             std::size_t n_classes);

}  // namespace bytegram
