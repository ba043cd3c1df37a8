#pragma once

#include <string>
#include <vector>

namespace bytegram {

// Probabilities per sample over class_order, with the true class index.
struct PredictionMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::vector<double>> p;
  std::vector<std::size_t> truth;
  std::vector<std::string> class_order;

  // Throws ValidationError on shape errors or a row not summing to 1 +- 1e-9.
  void validate() const;
};

inline constexpr double kDefaultLoglossEpsilon = 1e-15;

// Mean negative natural log of the probability of the true class, each
// probability clipped to [eps, 1 - eps] after row normalization.
double logloss(const PredictionMatrix& pm, double epsilon = kDefaultLoglossEpsilon);

struct ClassificationReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  std::vector<double> precision;  // per class, 0 when nothing was predicted as it
  std::vector<double> recall;     // per class, 0 when it has no samples
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

ClassificationReport classification_report(const PredictionMatrix& pm);

std::string format_report(const ClassificationReport& report, const std::vector<std::string>& class_order,
                          double logloss_value);

}  // namespace bytegram
