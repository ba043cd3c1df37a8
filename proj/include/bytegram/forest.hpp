#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bytegram/matrix.hpp"

namespace bytegram {

struct ForestConfig {
  std::size_t n_trees = 3000;
  std::size_t feature_cap = 5000;  // C, columns kept after importance pruning
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_depth;
  std::size_t min_leaf = 1;
  std::optional<std::size_t> features_per_split;  // default ceil(sqrt(dim))

  void validate() const;
  std::size_t split_features(std::size_t dim) const;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;   // value <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t value = 0;  // leaf: offset of its class distribution

  bool is_leaf() const { return feature == kLeaf; }
};

// Nodes are stored in pre-order: a split's left child directly follows it.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::vector<double> leaf_values;  // n_classes fractions per leaf

  std::span<const double> leaf_distribution(std::span<const float> row, std::size_t n_classes) const;
};

struct TrainedForest {
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  std::vector<DecisionTree> trees;
  std::vector<double> importances;  // per column, sum to 1

  // Mean of the trees' leaf class distributions, summed in tree order.
  std::vector<double> predict_proba(std::span<const float> row) const;
};

// Out-of-bag class distributions per training row (all zeros when a row was
// in every bootstrap).
struct OobEstimate {
  std::vector<std::vector<double>> proba;
  std::vector<bool> covered;

  double accuracy(std::span<const std::size_t> labels) const;
};

// Bootstrap per tree, Gini splits over a random subset of features per node
// (drawing past the subset size while only constant features were seen),
// grown to purity unless limited. Tree t uses seed + t, so the result is
// independent of the thread count. Importances are mean impurity decrease.
// Throws TrainingError unless every one of >= 2 classes has a sample.
TrainedForest train_forest(const FeatureMatrix& x, std::span<const std::size_t> labels,
                           std::size_t n_classes, const ForestConfig& config, unsigned threads = 1,
                           OobEstimate* oob = nullptr);

// The `cap` columns of highest importance, ties to the lower column, returned
// in ascending column order.
std::vector<std::size_t> top_columns(std::span<const double> importances, std::size_t cap);

struct PruneResult {
  std::vector<std::size_t> kept_columns;  // ascending indices into the input matrix
  TrainedForest forest;                   // trained on the kept columns only
};

// Keeps the feature_cap most important columns and retrains on them. A cap
// >= dim keeps every column and still retrains.
PruneResult prune_and_retrain(const TrainedForest& forest, const FeatureMatrix& x,
                              std::span<const std::size_t> labels, const ForestConfig& config,
                              unsigned threads = 1);

// Little-endian, length-prefixed pre-order encoding; see README.
std::string serialize_forest(const TrainedForest& forest);
// Throws LoadError on any structural inconsistency.
TrainedForest parse_forest(std::string_view data);

}  // namespace bytegram
