#include "bytegram/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "bytegram/error.hpp"
#include "bytegram/parallel.hpp"
#include "bytegram/rng.hpp"

namespace bytegram {

namespace {

double gini(std::span<const double> class_weight, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double w : class_weight) sum_sq += (w / total) * (w / total);
  return 1.0 - sum_sq;
}

struct Split {
  std::int32_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
  double proxy = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
              const ForestConfig& config, std::uint64_t seed)
      : x_(x),
        labels_(labels),
        k_(n_classes),
        config_(config),
        rng_(seed),
        mtry_(config.split_features(x.cols())),
        features_(x.cols()),
        importance_(x.cols(), 0.0) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  // Returns the per-sample bootstrap counts.
  std::vector<std::uint32_t> bootstrap() {
    std::vector<std::uint32_t> counts(x_.rows(), 0);
    for (std::size_t i = 0; i < x_.rows(); ++i) ++counts[rng_.below(x_.rows())];
    return counts;
  }

  DecisionTree grow(const std::vector<std::uint32_t>& counts) {
    weights_ = counts;
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] != 0) samples.push_back(i);
    }
    build(samples, 0);
    return std::move(tree_);
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  std::uint32_t build(const std::vector<std::size_t>& samples, std::size_t depth) {
    std::vector<double> class_weight(k_, 0.0);
    for (auto i : samples) class_weight[labels_[i]] += weights_[i];
    const double total = std::accumulate(class_weight.begin(), class_weight.end(), 0.0);
    const double impurity = gini(class_weight, total);

    const auto index = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    const bool depth_limited = config_.max_depth && depth >= *config_.max_depth;
    Split best;
    if (impurity > 0.0 && !depth_limited && samples.size() >= 2 * config_.min_leaf) {
      best = find_split(samples, total);
    }
    if (best.feature == TreeNode::kLeaf) {
      TreeNode& leaf = tree_.nodes[index];
      leaf.value = static_cast<std::uint32_t>(tree_.leaf_values.size());
      for (double w : class_weight) tree_.leaf_values.push_back(w / total);
      return index;
    }

    std::vector<std::size_t> left, right;
    std::vector<double> left_weight(k_, 0.0), right_weight(k_, 0.0);
    for (auto i : samples) {
      const bool goes_left = x_.at(i, static_cast<std::size_t>(best.feature)) <= best.threshold;
      (goes_left ? left : right).push_back(i);
      (goes_left ? left_weight : right_weight)[labels_[i]] += weights_[i];
    }
    const double wl = std::accumulate(left_weight.begin(), left_weight.end(), 0.0);
    const double wr = std::accumulate(right_weight.begin(), right_weight.end(), 0.0);
    importance_[static_cast<std::size_t>(best.feature)] +=
        total * impurity - wl * gini(left_weight, wl) - wr * gini(right_weight, wr);

    tree_.nodes[index].feature = best.feature;
    tree_.nodes[index].threshold = best.threshold;
    const std::uint32_t l = build(left, depth + 1);
    const std::uint32_t r = build(right, depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

  Split find_split(const std::vector<std::size_t>& samples, double total) {
    Split best;
    std::vector<std::pair<float, std::size_t>> column(samples.size());
    std::vector<double> left_weight(k_);
    std::vector<double> right_weight(k_);
    std::vector<double> node_weight(k_, 0.0);
    for (auto i : samples) node_weight[labels_[i]] += weights_[i];

    std::size_t evaluated = 0;
    const std::size_t dim = features_.size();
    for (std::size_t drawn = 0; drawn < dim && evaluated < mtry_; ++drawn) {
      std::size_t pick = drawn + rng_.below(dim - drawn);
      std::swap(features_[drawn], features_[pick]);
      const std::size_t f = features_[drawn];

      for (std::size_t s = 0; s < samples.size(); ++s) column[s] = {x_.at(samples[s], f), samples[s]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here
      ++evaluated;

      std::fill(left_weight.begin(), left_weight.end(), 0.0);
      right_weight = node_weight;
      double wl = 0.0;
      for (std::size_t s = 0; s + 1 < column.size(); ++s) {
        const std::size_t i = column[s].second;
        const double w = weights_[i];
        left_weight[labels_[i]] += w;
        right_weight[labels_[i]] -= w;
        wl += w;
        if (column[s].first == column[s + 1].first) continue;
        const std::size_t n_left = s + 1;
        if (n_left < config_.min_leaf || column.size() - n_left < config_.min_leaf) continue;
        const double wr = total - wl;
        double proxy = 0.0;
        for (std::size_t c = 0; c < k_; ++c) {
          proxy += left_weight[c] * left_weight[c] / wl + right_weight[c] * right_weight[c] / wr;
        }
        if (proxy > best.proxy) {
          best.proxy = proxy;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = (static_cast<double>(column[s].first) + static_cast<double>(column[s + 1].first)) / 2.0;
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const std::size_t> labels_;
  std::size_t k_;
  const ForestConfig& config_;
  Rng rng_;
  std::size_t mtry_;
  std::vector<std::size_t> features_;
  std::vector<double> importance_;
  std::vector<std::uint32_t> weights_;
  DecisionTree tree_;
};

// Little-endian primitives.
void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  double f64() {
    std::uint64_t bits = uint(8);
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw LoadError("forest: truncated data");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

constexpr std::string_view kForestMagic = "BGFOREST";
constexpr std::uint32_t kForestVersion = 1;

void encode_node(const DecisionTree& tree, std::uint32_t index, std::size_t k, std::string& out) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) {
    put_u8(out, 0);
    for (std::size_t c = 0; c < k; ++c) put_f64(out, tree.leaf_values[node.value + c]);
    return;
  }
  put_u8(out, 1);
  put_u32(out, static_cast<std::uint32_t>(node.feature));
  put_f64(out, node.threshold);
  encode_node(tree, node.left, k, out);
  encode_node(tree, node.right, k, out);
}

std::uint32_t decode_node(Reader& in, DecisionTree& tree, std::size_t k, std::size_t dim,
                          std::size_t max_nodes) {
  if (tree.nodes.size() >= max_nodes) throw LoadError("forest: more nodes than declared");
  const auto index = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  const auto tag = in.uint(1);
  if (tag == 0) {
    tree.nodes[index].value = static_cast<std::uint32_t>(tree.leaf_values.size());
    for (std::size_t c = 0; c < k; ++c) tree.leaf_values.push_back(in.f64());
    return index;
  }
  if (tag != 1) throw LoadError("forest: bad node tag");
  const auto feature = in.uint(4);
  if (feature >= dim) throw LoadError("forest: split column out of range");
  tree.nodes[index].feature = static_cast<std::int32_t>(feature);
  tree.nodes[index].threshold = in.f64();
  const auto l = decode_node(in, tree, k, dim, max_nodes);
  const auto r = decode_node(in, tree, k, dim, max_nodes);
  tree.nodes[index].left = l;
  tree.nodes[index].right = r;
  return index;
}

}  // namespace

void ForestConfig::validate() const {
  if (n_trees < 1) throw ConfigError("forest: n_trees must be >= 1");
  if (feature_cap < 1) throw ConfigError("forest: feature cap C must be >= 1");
  if (min_leaf < 1) throw ConfigError("forest: min_leaf must be >= 1");
  if (features_per_split && *features_per_split < 1) throw ConfigError("forest: features_per_split must be >= 1");
}

std::size_t ForestConfig::split_features(std::size_t dim) const {
  if (features_per_split) return std::min(*features_per_split, dim);
  auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
  return std::clamp<std::size_t>(root, 1, std::max<std::size_t>(dim, 1));
}

std::span<const double> DecisionTree::leaf_distribution(std::span<const float> row,
                                                        std::size_t n_classes) const {
  std::uint32_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return {leaf_values.data() + nodes[i].value, n_classes};
}

std::vector<double> TrainedForest::predict_proba(std::span<const float> row) const {
  if (row.size() != dim) throw ValidationError("forest: row has " + std::to_string(row.size()) +
                                               " columns, expected " + std::to_string(dim));
  std::vector<double> proba(n_classes, 0.0);
  for (const auto& tree : trees) {
    auto d = tree.leaf_distribution(row, n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) proba[c] += d[c];
  }
  for (double& p : proba) p /= static_cast<double>(trees.size());
  return proba;
}

double OobEstimate::accuracy(std::span<const std::size_t> labels) const {
  std::size_t hit = 0, seen = 0;
  for (std::size_t i = 0; i < proba.size(); ++i) {
    if (!covered[i]) continue;
    ++seen;
    auto best = std::max_element(proba[i].begin(), proba[i].end()) - proba[i].begin();
    if (static_cast<std::size_t>(best) == labels[i]) ++hit;
  }
  return seen == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(seen);
}

TrainedForest train_forest(const FeatureMatrix& x, std::span<const std::size_t> labels,
                           std::size_t n_classes, const ForestConfig& config, unsigned threads,
                           OobEstimate* oob) {
  config.validate();
  if (labels.size() != x.rows()) throw ValidationError("forest: label count differs from row count");
  if (x.cols() == 0) throw TrainingError("forest: the feature matrix has no columns");
  std::vector<std::size_t> per_class(n_classes, 0);
  for (auto l : labels) {
    if (l >= n_classes) throw ValidationError("forest: label out of range");
    ++per_class[l];
  }
  const auto populated = std::count_if(per_class.begin(), per_class.end(), [](auto c) { return c > 0; });
  if (n_classes < 2 || populated < 2) {
    throw TrainingError("forest: training needs >= 2 classes with samples (single class given)");
  }
  if (populated != static_cast<std::ptrdiff_t>(n_classes)) {
    throw TrainingError("forest: every class needs at least one training sample");
  }

  TrainedForest forest;
  forest.n_classes = n_classes;
  forest.dim = x.cols();
  forest.trees.resize(config.n_trees);
  std::vector<std::vector<double>> tree_importance(config.n_trees);
  std::vector<std::vector<std::uint32_t>> in_bag(oob ? config.n_trees : 0);

  parallel_for(config.n_trees, threads, [&](std::size_t t) {
    TreeBuilder builder(x, labels, n_classes, config, config.seed + t);
    auto counts = builder.bootstrap();
    forest.trees[t] = builder.grow(counts);
    tree_importance[t] = builder.importance();
    if (oob) in_bag[t] = std::move(counts);
  });

  // Per-tree normalized, averaged over trees that split at all, renormalized.
  std::vector<double> importance(x.cols(), 0.0);
  std::size_t contributing = 0;
  for (const auto& ti : tree_importance) {
    const double sum = std::accumulate(ti.begin(), ti.end(), 0.0);
    if (sum <= 0.0) continue;
    ++contributing;
    for (std::size_t c = 0; c < ti.size(); ++c) importance[c] += ti[c] / sum;
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (contributing == 0 || total <= 0.0) {
    std::fill(importance.begin(), importance.end(), 1.0 / static_cast<double>(x.cols()));
  } else {
    for (double& v : importance) v /= total;
  }
  forest.importances = std::move(importance);

  if (oob) {
    oob->proba.assign(x.rows(), std::vector<double>(n_classes, 0.0));
    oob->covered.assign(x.rows(), false);
    for (std::size_t t = 0; t < config.n_trees; ++t) {
      for (std::size_t i = 0; i < x.rows(); ++i) {
        if (in_bag[t][i] != 0) continue;
        auto d = forest.trees[t].leaf_distribution(x.row(i), n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) oob->proba[i][c] += d[c];
        oob->covered[i] = true;
      }
    }
  }
  return forest;
}

std::vector<std::size_t> top_columns(std::span<const double> importances, std::size_t cap) {
  std::vector<std::size_t> order(importances.size());
  std::iota(order.begin(), order.end(), 0);
  cap = std::min(cap, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cap), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (importances[a] != importances[b]) return importances[a] > importances[b];
                      return a < b;
                    });
  order.resize(cap);
  std::sort(order.begin(), order.end());
  return order;
}

PruneResult prune_and_retrain(const TrainedForest& forest, const FeatureMatrix& x,
                              std::span<const std::size_t> labels, const ForestConfig& config,
                              unsigned threads) {
  if (forest.dim != x.cols()) throw ValidationError("prune: forest was trained on a different matrix");
  PruneResult out;
  out.kept_columns = top_columns(forest.importances, config.feature_cap);
  const FeatureMatrix reduced =
      out.kept_columns.size() == x.cols() ? x : x.select_columns(out.kept_columns);
  out.forest = train_forest(reduced, labels, forest.n_classes, config, threads);
  return out;
}

std::string serialize_forest(const TrainedForest& forest) {
  std::string out(kForestMagic);
  put_u32(out, kForestVersion);
  put_u32(out, static_cast<std::uint32_t>(forest.n_classes));
  put_u32(out, static_cast<std::uint32_t>(forest.dim));
  put_u32(out, static_cast<std::uint32_t>(forest.trees.size()));
  for (double v : forest.importances) put_f64(out, v);
  for (const auto& tree : forest.trees) {
    std::string payload;
    put_u32(payload, static_cast<std::uint32_t>(tree.nodes.size()));
    encode_node(tree, 0, forest.n_classes, payload);
    put_u64(out, payload.size());
    out += payload;
  }
  return out;
}

TrainedForest parse_forest(std::string_view data) {
  Reader in(data);
  if (in.take(kForestMagic.size()) != kForestMagic) throw LoadError("forest: bad magic");
  if (in.uint(4) != kForestVersion) throw LoadError("forest: unsupported encoding version");
  TrainedForest forest;
  forest.n_classes = in.uint(4);
  forest.dim = in.uint(4);
  const std::size_t n_trees = in.uint(4);
  if (forest.n_classes < 2 || forest.dim == 0 || n_trees == 0) throw LoadError("forest: empty header");
  forest.importances.reserve(forest.dim);
  for (std::size_t c = 0; c < forest.dim; ++c) forest.importances.push_back(in.f64());
  forest.trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    const std::size_t length = in.uint(8);
    Reader tree_in(in.take(length));
    const std::size_t node_count = tree_in.uint(4);
    DecisionTree tree;
    tree.nodes.reserve(node_count);
    decode_node(tree_in, tree, forest.n_classes, forest.dim, node_count);
    if (tree.nodes.size() != node_count || !tree_in.done()) throw LoadError("forest: tree length mismatch");
    forest.trees.push_back(std::move(tree));
  }
  if (!in.done()) throw LoadError("forest: trailing bytes");
  return forest;
}

}  // namespace bytegram
