#include "bytegram/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bytegram/bytes.hpp"
#include "bytegram/error.hpp"
#include "bytegram/rng.hpp"

namespace bytegram {

std::string_view to_string(CalibrationMethod method) {
  return method == CalibrationMethod::kSigmoid ? "sigmoid" : "none";
}

CalibrationMethod parse_calibration_method(std::string_view text) {
  if (text == "sigmoid") return CalibrationMethod::kSigmoid;
  if (text == "none") return CalibrationMethod::kNone;
  throw ConfigError("unknown calibration method '" + std::string(text) + "' (expected none or sigmoid)");
}

double SigmoidParams::operator()(double score) const {
  const double z = a * score + b;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

SigmoidParams fit_sigmoid(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  const std::size_t n = scores.size();
  double prior1 = 0.0;
  for (auto p : positive) prior1 += p ? 1.0 : 0.0;
  const double prior0 = static_cast<double>(n) - prior1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = positive[i] ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = scores[i] * a + b;
      f += z >= 0.0 ? target[i] * z + std::log1p(std::exp(-z)) : (target[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = scores[i] * a + b;
      double p, q;
      if (z >= 0.0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = target[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

std::vector<double> Calibrator::apply(std::span<const double> raw) const {
  std::vector<double> out(raw.begin(), raw.end());
  if (method == CalibrationMethod::kNone) return out;
  if (per_class.size() != raw.size()) throw ValidationError("calibrator: class count mismatch");
  for (std::size_t c = 0; c < raw.size(); ++c) out[c] = per_class[c](raw[c]);
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  if (!(sum > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& p : out) p /= sum;
  return out;
}

std::string Calibrator::serialize(const std::vector<std::string>& families) const {
  std::string out = "method\t" + std::string(to_string(method)) + "\n";
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    out += families.at(c) + "\t" + format_real(per_class[c].a) + "\t" + format_real(per_class[c].b) + "\n";
  }
  return out;
}

Calibrator Calibrator::parse(std::string_view text, const std::vector<std::string>& families) {
  Calibrator cal;
  auto lines = split(text, '\n');
  if (lines.empty()) throw LoadError("calibrator: empty");
  auto head = split(lines[0], '\t');
  if (head.size() != 2 || head[0] != "method") throw LoadError("calibrator: missing method line");
  try {
    cal.method = parse_calibration_method(head[1]);
  } catch (const ConfigError& e) {
    throw LoadError(std::string("calibrator: ") + e.what());
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = split(lines[i], '\t');
    const std::size_t c = cal.per_class.size();
    if (f.size() != 3 || c >= families.size() || f[0] != families[c]) {
      throw LoadError("calibrator: malformed or out-of-order line " + std::to_string(i + 1));
    }
    try {
      cal.per_class.push_back({parse_real(f[1]), parse_real(f[2])});
    } catch (const ValidationError& e) {
      throw LoadError(std::string("calibrator: ") + e.what());
    }
  }
  if (cal.method == CalibrationMethod::kSigmoid && cal.per_class.size() != families.size()) {
    throw LoadError("calibrator: expected one sigmoid per family");
  }
  return cal;
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t n_classes,
                                          std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw CalibrationError("calibration needs at least 2 folds");
  std::vector<std::vector<std::size_t>> rows(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) rows.at(labels[i]).push_back(i);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (rows[c].size() < folds) {
      throw CalibrationError("calibration: class " + std::to_string(c) + " has " + std::to_string(rows[c].size()) +
                             " samples, so some of the " + std::to_string(folds) +
                             " folds would miss it; use fewer folds");
    }
  }
  std::vector<std::size_t> fold_of(labels.size(), 0);
  Rng rng(seed);
  for (auto& r : rows) {
    rng.shuffle(r);
    for (std::size_t j = 0; j < r.size(); ++j) fold_of[r[j]] = j % folds;
  }
  return fold_of;
}

std::vector<std::vector<double>> out_of_fold_proba(const FeatureMatrix& x, std::span<const std::size_t> labels,
                                                   std::size_t n_classes, const ForestConfig& config,
                                                   std::size_t folds, unsigned threads) {
  const auto fold_of = stratified_folds(labels, n_classes, folds, config.seed);
  std::vector<std::vector<double>> proba(x.rows());
  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::vector<std::size_t> train_rows, held_rows;
    for (std::size_t i = 0; i < x.rows(); ++i) (fold_of[i] == fold ? held_rows : train_rows).push_back(i);
    std::vector<std::size_t> train_labels;
    for (auto i : train_rows) train_labels.push_back(labels[i]);
    const auto forest = train_forest(x.select_rows(train_rows), train_labels, n_classes, config, threads);
    for (auto i : held_rows) proba[i] = forest.predict_proba(x.row(i));
  }
  return proba;
}

Calibrator fit_calibrator_on(const std::vector<std::vector<double>>& raw, std::span<const std::size_t> labels,
                             std::size_t n_classes) {
  Calibrator cal;
  cal.method = CalibrationMethod::kSigmoid;
  std::vector<double> scores(raw.size());
  std::vector<std::uint8_t> positive(raw.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      scores[i] = raw[i].at(c);
      positive[i] = labels[i] == c ? 1 : 0;
    }
    cal.per_class.push_back(fit_sigmoid(scores, positive));
  }
  return cal;
}

Calibrator fit_calibrator(const FeatureMatrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
                          const ForestConfig& config, std::size_t folds, CalibrationMethod method,
                          unsigned threads) {
  if (method == CalibrationMethod::kNone) return {};
  const auto raw = out_of_fold_proba(x, labels, n_classes, config, folds, threads);
  return fit_calibrator_on(raw, labels, n_classes);
}

}  // namespace bytegram
