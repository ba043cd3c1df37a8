#include "bytegram/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "bytegram/parallel.hpp"

namespace bytegram {

namespace {

template <typename Fn>
auto timed_stage(std::size_t stage, std::vector<StageTiming>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    timings.push_back({kStageLabels[stage], elapsed.count()});
  };
  try {
    auto result = fn();
    finish();
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(kStageLabels[stage], e.what());
  }
}

}  // namespace

TrainOutput train_pipeline(const Corpus& train, const RunConfig& raw_config, std::string manifest_digest) {
  const RunConfig config = raw_config.resolved();
  if (train.k() < 2) {
    throw StageError("input", "need ≥ 2 families to train, found " + std::to_string(train.k()));
  }
  const unsigned threads = resolve_threads(config.threads);
  TrainOutput out;
  auto& timings = out.timings;

  const EntropyThresholds thresholds =
      timed_stage(0, timings, [&] { return compute_thresholds(train, config.stage1, threads); });

  out.artifacts.representatives =
      timed_stage(1, timings, [&] { return mine_all(train, thresholds, config.stage2, threads); });

  out.artifacts.selected = timed_stage(2, timings, [&] {
    return select_pairwise(out.artifacts.representatives, train, config.stage3, threads);
  });

  out.artifacts.vectors = timed_stage(3, timings, [&] {
    const Featurizer featurizer = build_automaton(out.artifacts.selected);
    std::vector<FeatureVector> vectors(train.size());
    parallel_for(train.size(), threads, [&](std::size_t i) {
      vectors[i] = featurizer.featurize(train.samples()[i].bytes());
      vectors[i].sample_id = train.samples()[i].id;
    });
    return vectors;
  });

  out.bundle = timed_stage(4, timings, [&] {
    const FeatureMatrix matrix = to_matrix(out.artifacts.vectors);
    const auto& labels = train.labels();
    const TrainedForest initial = train_forest(matrix, labels, train.k(), config.forest, threads);
    PruneResult pruned = prune_and_retrain(initial, matrix, labels, config.forest, threads);

    ModelBundle b;
    b.config = config;
    b.families = train.families();
    b.thresholds = thresholds;
    const std::size_t grams = out.artifacts.selected.size();
    for (auto col : pruned.kept_columns) {
      if (col < grams) {
        b.features.push_back(out.artifacts.selected[col]);
      } else {
        b.one_gram_columns.push_back(static_cast<Byte>(col - grams));
      }
    }
    const FeatureMatrix reduced = matrix.select_columns(pruned.kept_columns);
    b.calibrator = fit_calibrator(reduced, labels, train.k(), config.forest, config.calibration_folds,
                                  config.calibration, threads);
    b.forest = std::move(pruned.forest);
    b.manifest_digest = std::move(manifest_digest);
    b.train_samples = train.size();
    return b;
  });
  return out;
}

std::string format_timing_table(const std::vector<StageTiming>& timings) {
  std::string out = "stage                              seconds\n";
  double total = 0.0;
  char buf[128];
  for (const auto& t : timings) {
    std::snprintf(buf, sizeof buf, "%-32s %10.3f\n", t.label.c_str(), t.seconds);
    out += buf;
    total += t.seconds;
  }
  std::snprintf(buf, sizeof buf, "%-32s %10.3f\n", "total", total);
  out += buf;
  return out;
}

}  // namespace bytegram
