#pragma once

#include <string>
#include <vector>

#include "bytegram/bundle.hpp"
#include "bytegram/error.hpp"
#include "bytegram/config.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/featurizer.hpp"
#include "bytegram/miner.hpp"
#include "bytegram/selector.hpp"

namespace bytegram {

struct StageTiming {
  std::string label;
  double seconds = 0.0;
};

// Intermediate results kept for debug dumps.
struct TrainArtifacts {
  std::vector<FamilyRepresentatives> representatives;
  std::vector<TaggedFeature> selected;
  std::vector<FeatureVector> vectors;
};

struct TrainOutput {
  ModelBundle bundle;
  std::vector<StageTiming> timings;  // five entries, one per stage
  TrainArtifacts artifacts;
};

// Thrown with the failing stage's label prepended to the message.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message) : Error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

inline constexpr const char* kStageLabels[5] = {
    "stage 1  entropy thresholds",
    "stage 2  family representatives",
    "stage 3  pairwise selection",
    "stage 4  feature vectors",
    "stage 5  forest training",
};

// Runs all five stages on the training corpus. Errors raised by a stage are
// rethrown as StageError naming it.
TrainOutput train_pipeline(const Corpus& train, const RunConfig& config, std::string manifest_digest = {});

std::string format_timing_table(const std::vector<StageTiming>& timings);

}  // namespace bytegram
