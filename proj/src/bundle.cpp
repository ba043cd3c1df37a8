#include "bytegram/bundle.hpp"

#include <algorithm>
#include <map>

#include "bytegram/error.hpp"

namespace bytegram {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFiles[] = {"thresholds", "features", "forest", "calibrator"};

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::vector<std::size_t> parse_indices(std::string_view text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  for (auto part : split(text, ',')) out.push_back(parse_uint(part));
  return out;
}

struct BundleFiles {
  std::string thresholds;
  std::string features;
  std::string forest;
  std::string calibrator;

  const std::string& get(std::string_view name) const {
    if (name == "thresholds") return thresholds;
    if (name == "features") return features;
    if (name == "forest") return forest;
    return calibrator;
  }
};

BundleFiles encode_files(const ModelBundle& b) {
  return {b.thresholds.serialize(), dump_features(b.features, b.families), serialize_forest(b.forest),
          b.calibrator.serialize(b.families)};
}

std::string meta_text(const ModelBundle& b, const BundleFiles& files) {
  std::string out = "format_version=" + std::to_string(b.format_version) + "\n";
  out += "families=" + std::to_string(b.families.size()) + "\n";
  for (std::size_t i = 0; i < b.families.size(); ++i) out += "family." + std::to_string(i) + "=" + b.families[i] + "\n";
  const std::string config_text = b.config.serialize();
  for (std::string_view line : split(config_text, '\n')) {
    if (!line.empty()) out += "config." + std::string(line) + "\n";
  }
  out += "train_samples=" + std::to_string(b.train_samples) + "\n";
  out += "manifest_digest=" + b.manifest_digest + "\n";
  out += "thresholds.config_digest=" + b.thresholds.config_digest + "\n";
  out += "thresholds.sampled_file_count=" + std::to_string(b.thresholds.sampled_file_count) + "\n";
  out += "dim=" + std::to_string(b.dim()) + "\n";
  out += "gram_columns=" + std::to_string(b.features.size()) + "\n";
  std::vector<std::size_t> one_grams(b.one_gram_columns.begin(), b.one_gram_columns.end());
  out += "one_gram_columns=" + join_indices(one_grams) + "\n";
  for (std::size_t i = 0; i < b.features.size(); ++i) {
    out += "feature.origin." + std::to_string(i) + "=" + join_indices(b.features[i].origin_families) + "\n";
  }
  for (const char* name : kFiles) out += std::string("digest.") + name + "=" + sha256_hex(files.get(name)) + "\n";
  return out;
}

}  // namespace

std::string bundle_meta(const ModelBundle& bundle) { return meta_text(bundle, encode_files(bundle)); }

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
  if (fs::exists(dir / "meta")) {
    throw ValidationError("refusing to overwrite the existing bundle in " + dir.string());
  }
  fs::create_directories(dir);
  const BundleFiles files = encode_files(bundle);
  for (const char* name : kFiles) write_text(dir / name, files.get(name));
  // meta last: its presence marks a complete bundle.
  write_text(dir / "meta", meta_text(bundle, files));
}

ModelBundle load_bundle(const fs::path& dir) {
  if (!fs::is_regular_file(dir / "meta")) throw LoadError("not a model bundle (no meta file): " + dir.string());
  std::map<std::string, std::string, std::less<>> meta;
  const std::string meta_raw = read_text(dir / "meta");
  for (std::string_view line : split(meta_raw, '\n')) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw LoadError("meta: malformed line: " + std::string(line));
    meta.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw LoadError("meta: missing key " + std::string(key));
    return it->second;
  };

  ModelBundle b;
  try {
    b.format_version = static_cast<int>(parse_uint(get("format_version")));
    if (b.format_version != kBundleFormatVersion) {
      throw LoadError("unsupported bundle format_version " + get("format_version") + " (expected " +
                      std::to_string(kBundleFormatVersion) + ")");
    }
    BundleFiles files;
    for (const char* name : kFiles) {
      if (!fs::is_regular_file(dir / name)) throw LoadError("bundle file missing: " + (dir / name).string());
      std::string content = read_text(dir / name);
      if (sha256_hex(content) != get(std::string("digest.") + name)) {
        throw LoadError("bundle file corrupted (digest mismatch): " + (dir / name).string());
      }
      if (std::string_view(name) == "thresholds") files.thresholds = std::move(content);
      else if (std::string_view(name) == "features") files.features = std::move(content);
      else if (std::string_view(name) == "forest") files.forest = std::move(content);
      else files.calibrator = std::move(content);
    }

    const std::size_t k = parse_uint(get("families"));
    for (std::size_t i = 0; i < k; ++i) b.families.push_back(get("family." + std::to_string(i)));
    RunConfig config;
    for (const auto& [key, value] : meta) {
      if (key.starts_with("config.")) config.set(std::string_view(key).substr(7), value);
    }
    b.config = config;
    b.train_samples = parse_uint(get("train_samples"));
    b.manifest_digest = get("manifest_digest");

    b.thresholds = EntropyThresholds::parse(files.thresholds);
    b.thresholds.config_digest = get("thresholds.config_digest");
    b.thresholds.sampled_file_count = parse_uint(get("thresholds.sampled_file_count"));

    b.features = parse_features(files.features, b.families);
    if (b.features.size() != parse_uint(get("gram_columns"))) throw LoadError("meta: gram column count mismatch");
    for (std::size_t i = 0; i < b.features.size(); ++i) {
      b.features[i].origin_families = parse_indices(get("feature.origin." + std::to_string(i)));
    }
    for (auto v : parse_indices(get("one_gram_columns"))) {
      if (v > 255) throw LoadError("meta: one-gram column out of range");
      b.one_gram_columns.push_back(static_cast<Byte>(v));
    }
    b.forest = parse_forest(files.forest);
    b.calibrator = Calibrator::parse(files.calibrator, b.families);
  } catch (const ValidationError& e) {
    throw LoadError(std::string("bundle ") + dir.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("bundle ") + dir.string() + ": " + e.what());
  }
  if (b.forest.dim != b.dim() || parse_uint(get("dim")) != b.dim()) throw LoadError("bundle: dimension mismatch");
  if (b.forest.n_classes != b.families.size()) throw LoadError("bundle: class count mismatch");
  return b;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Classifier::Classifier(ModelBundle bundle)
    : bundle_(std::make_shared<const ModelBundle>(std::move(bundle))),
      featurizer_(build_automaton(bundle_->features)) {}

std::vector<float> Classifier::features(ByteView bytes) const {
  const FeatureVector v = featurizer_.featurize(bytes);
  std::vector<float> row;
  row.reserve(bundle_->dim());
  // featurizer columns are canonical, as are bundle features
  for (auto p : v.presence) row.push_back(static_cast<float>(p));
  for (Byte b : bundle_->one_gram_columns) row.push_back(static_cast<float>(v.one_grams[b]));
  return row;
}

std::vector<double> Classifier::raw_proba(ByteView bytes) const {
  return bundle_->forest.predict_proba(features(bytes));
}

Prediction Classifier::predict(ByteView bytes) const {
  Prediction p;
  p.proba = bundle_->calibrator.apply(raw_proba(bytes));
  p.family = argmax(p.proba);
  return p;
}

Prediction predict(const ModelBundle& bundle, ByteView bytes) { return Classifier(bundle).predict(bytes); }

}  // namespace bytegram
