#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bytegram/calibration.hpp"
#include "bytegram/config.hpp"
#include "bytegram/entropy.hpp"
#include "bytegram/featurizer.hpp"
#include "bytegram/forest.hpp"
#include "bytegram/selector.hpp"

namespace bytegram {

inline constexpr int kBundleFormatVersion = 1;

// Everything needed to classify raw bytes. Forest columns are the surviving
// gram features (canonical order) followed by the surviving one-gram byte
// values (ascending).
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  RunConfig config;
  std::vector<std::string> families;
  EntropyThresholds thresholds;
  std::vector<TaggedFeature> features;
  std::vector<Byte> one_gram_columns;
  TrainedForest forest;
  Calibrator calibrator;
  std::string manifest_digest;
  std::size_t train_samples = 0;

  std::size_t dim() const { return features.size() + one_gram_columns.size(); }
};

// Writes meta, thresholds, features, forest and calibrator into dir.
// Throws ValidationError if dir already holds a bundle.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
// Throws LoadError on a missing file, digest mismatch, unknown
// format_version or malformed content.
ModelBundle load_bundle(const std::filesystem::path& dir);

// The meta text exactly as written by save_bundle.
std::string bundle_meta(const ModelBundle& bundle);

struct Prediction {
  std::vector<double> proba;  // canonical family order, sums to 1
  std::size_t family = 0;     // argmax, lowest index on ties
};

std::size_t argmax(std::span<const double> values);

// Immutable serving object; predict is safe to call concurrently.
class Classifier {
 public:
  explicit Classifier(ModelBundle bundle);

  const ModelBundle& bundle() const { return *bundle_; }

  std::vector<float> features(ByteView bytes) const;
  std::vector<double> raw_proba(ByteView bytes) const;
  Prediction predict(ByteView bytes) const;

 private:
  std::shared_ptr<const ModelBundle> bundle_;
  Featurizer featurizer_;
};

Prediction predict(const ModelBundle& bundle, ByteView bytes);

}  // namespace bytegram
