#include "bytegram/config.hpp"

#include <map>

#include "bytegram/bytes.hpp"
#include "bytegram/error.hpp"

namespace bytegram {

namespace {

std::string join_lengths(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  try {
    if (key == "seed") {
      seed = parse_uint(value);
    } else if (key == "threads") {
      threads = static_cast<unsigned>(parse_uint(value));
    } else if (key == "train_fraction") {
      train_fraction = parse_real(value);
    } else if (key == "lengths") {
      stage1.lengths.clear();
      for (auto part : split(value, ',')) stage1.lengths.push_back(parse_uint(part));
    } else if (key == "alpha") {
      stage1.alpha = parse_real(value);
    } else if (key == "beta") {
      stage1.beta = parse_uint(value);
    } else if (key.starts_with("factor.")) {
      stage1.factors[parse_uint(key.substr(7))] = parse_real(value);
    } else if (key == "factor") {
      // Shorthand: one factor for every configured length.
      const double f = parse_real(value);
      for (auto n : stage1.lengths) stage1.factors[n] = f;
    } else if (key == "gamma") {
      stage2.gamma = parse_real(value);
    } else if (key == "memory_cap_bytes") {
      if (value == "none") {
        stage2.memory_cap_bytes.reset();
      } else {
        stage2.memory_cap_bytes = parse_uint(value);
      }
    } else if (key == "budget") {
      stage3.budget = parse_uint(value);
    } else if (key == "n_trees") {
      forest.n_trees = parse_uint(value);
    } else if (key == "feature_cap") {
      forest.feature_cap = parse_uint(value);
    } else if (key == "max_depth") {
      if (value == "none") {
        forest.max_depth.reset();
      } else {
        forest.max_depth = parse_uint(value);
      }
    } else if (key == "min_leaf") {
      forest.min_leaf = parse_uint(value);
    } else if (key == "features_per_split") {
      if (value == "auto") {
        forest.features_per_split.reset();
      } else {
        forest.features_per_split = parse_uint(value);
      }
    } else if (key == "calibration") {
      calibration = parse_calibration_method(value);
    } else if (key == "calibration_folds") {
      calibration_folds = parse_uint(value);
    } else {
      throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
  } catch (const ValidationError& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

RunConfig RunConfig::resolved() const {
  RunConfig r = *this;
  r.stage1.seed = seed;
  r.forest.seed = seed;
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("train_fraction must lie in (0, 1]");
  if (calibration == CalibrationMethod::kSigmoid && calibration_folds < 2) {
    throw ConfigError("calibration_folds must be >= 2");
  }
  r.stage1.validate();
  r.stage2.validate();
  r.forest.validate();
  return r;
}

std::string RunConfig::serialize() const {
  std::map<std::string, std::string> kv;
  kv["seed"] = std::to_string(seed);
  kv["train_fraction"] = format_real(train_fraction);
  kv["lengths"] = join_lengths(stage1.lengths);
  kv["alpha"] = format_real(stage1.alpha);
  kv["beta"] = std::to_string(stage1.beta);
  for (const auto& [n, f] : stage1.factors) kv["factor." + std::to_string(n)] = format_real(f);
  kv["gamma"] = format_real(stage2.gamma);
  kv["memory_cap_bytes"] = stage2.memory_cap_bytes ? std::to_string(*stage2.memory_cap_bytes) : "none";
  kv["budget"] = std::to_string(stage3.budget);
  kv["n_trees"] = std::to_string(forest.n_trees);
  kv["feature_cap"] = std::to_string(forest.feature_cap);
  kv["max_depth"] = forest.max_depth ? std::to_string(*forest.max_depth) : "none";
  kv["min_leaf"] = std::to_string(forest.min_leaf);
  kv["features_per_split"] = forest.features_per_split ? std::to_string(*forest.features_per_split) : "auto";
  kv["calibration"] = std::string(to_string(calibration));
  kv["calibration_folds"] = std::to_string(calibration_folds);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

RunConfig apply_config_text(RunConfig base, std::string_view text) {
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  return apply_config_text(std::move(base), read_text(path));
}

}  // namespace bytegram
