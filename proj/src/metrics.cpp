#include "bytegram/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bytegram/error.hpp"

namespace bytegram {

void PredictionMatrix::validate() const {
  const std::size_t m = class_order.size();
  if (p.size() != truth.size()) throw ValidationError("prediction matrix: row count differs from truth count");
  if (!sample_ids.empty() && sample_ids.size() != p.size()) {
    throw ValidationError("prediction matrix: sample id count differs from row count");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != m) throw ValidationError("prediction matrix: row " + std::to_string(i) + " has wrong width");
    if (truth[i] >= m) throw ValidationError("prediction matrix: truth index out of range in row " + std::to_string(i));
    double sum = 0.0;
    for (double v : p[i]) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("prediction matrix: probability outside [0,1] in row " + std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("prediction matrix: row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

double logloss(const PredictionMatrix& pm, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ValidationError("logloss: epsilon must lie in (0, 0.5)");
  pm.validate();
  if (pm.p.empty()) throw ValidationError("logloss: no predictions");
  double total = 0.0;
  for (std::size_t i = 0; i < pm.p.size(); ++i) {
    const auto& row = pm.p[i];
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    const double q = std::clamp(row[pm.truth[i]] / sum, epsilon, 1.0 - epsilon);
    total -= std::log(q);
  }
  return total / static_cast<double>(pm.p.size());
}

ClassificationReport classification_report(const PredictionMatrix& pm) {
  pm.validate();
  const std::size_t m = pm.class_order.size();
  ClassificationReport r;
  r.confusion.assign(m, std::vector<std::size_t>(m, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pm.p.size(); ++i) {
    const auto predicted = static_cast<std::size_t>(std::max_element(pm.p[i].begin(), pm.p[i].end()) - pm.p[i].begin());
    ++r.confusion[pm.truth[i]][predicted];
    if (predicted == pm.truth[i]) ++correct;
  }
  r.accuracy = pm.p.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(pm.p.size());
  r.precision.assign(m, 0.0);
  r.recall.assign(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t j = 0; j < m; ++j) {
      predicted += r.confusion[j][c];
      actual += r.confusion[c][j];
    }
    const double tp = static_cast<double>(r.confusion[c][c]);
    if (predicted) r.precision[c] = tp / static_cast<double>(predicted);
    if (actual) r.recall[c] = tp / static_cast<double>(actual);
  }
  if (m) {
    r.macro_precision = std::accumulate(r.precision.begin(), r.precision.end(), 0.0) / static_cast<double>(m);
    r.macro_recall = std::accumulate(r.recall.begin(), r.recall.end(), 0.0) / static_cast<double>(m);
  }
  return r;
}

std::string format_report(const ClassificationReport& report, const std::vector<std::string>& class_order,
                          double logloss_value) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "logloss          %.9g\naccuracy         %.9g\nmacro_precision  %.9g\nmacro_recall     %.9g\n",
                logloss_value, report.accuracy, report.macro_precision, report.macro_recall);
  out += buf;
  out += "confusion (rows = true, columns = predicted)\n";
  out += "family";
  for (const auto& c : class_order) out += "\t" + c;
  out += "\n";
  for (std::size_t i = 0; i < class_order.size(); ++i) {
    out += class_order[i];
    for (auto v : report.confusion[i]) out += "\t" + std::to_string(v);
    out += "\n";
  }
  return out;
}

}  // namespace bytegram
