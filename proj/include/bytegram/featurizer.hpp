#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bytegram/aho_corasick.hpp"
#include "bytegram/bytes.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/matrix.hpp"
#include "bytegram/selector.hpp"

namespace bytegram {

// Selected grams frozen in canonical order (length, then bytes). Column j
// names the same gram in training and in classification.
class PatternSet {
 public:
  // Throws BuildError on duplicates or an empty gram.
  explicit PatternSet(std::vector<Gram> grams);

  const std::vector<Gram>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }
  std::optional<std::size_t> column_of(const Gram& gram) const;

 private:
  std::vector<Gram> patterns_;
  std::unordered_map<Gram, std::size_t> index_;
};

struct FeatureVector {
  std::string sample_id;
  std::vector<std::uint8_t> presence;  // one 0/1 entry per pattern
  std::array<std::uint64_t, 256> one_grams{};

  std::size_t dim() const { return presence.size() + one_grams.size(); }
  // presence columns, then the 256 one-gram counts.
  std::vector<float> dense() const;
};

// Per-pattern occurrence counts; diagnostics only, never model input.
struct MatchStats {
  std::vector<std::uint32_t> occurrences;
};

class Featurizer {
 public:
  explicit Featurizer(PatternSet patterns);

  const PatternSet& pattern_set() const { return patterns_; }
  std::size_t dim() const { return patterns_.size() + 256; }

  // One pass over bytes: presence bits from the automaton, byte histogram
  // alongside.
  FeatureVector featurize(ByteView bytes, MatchStats* stats = nullptr) const;

 private:
  PatternSet patterns_;
  std::optional<AhoCorasick> automaton_;  // empty pattern sets have none
};

// Compiles the grams of the selected features. Throws BuildError on
// duplicate grams.
Featurizer build_automaton(const std::vector<TaggedFeature>& features);

// Header `B \t k`, then per sample `id \t family \t hex(presence bitmap) \t
// 256 space-separated counts`. Bit j of the bitmap is bit (7 - j%8) of byte j/8.
std::string dump_feature_matrix(const std::vector<FeatureVector>& vectors, const Corpus& corpus,
                                std::size_t pattern_count);

// Dense matrix of vectors, one row each.
FeatureMatrix to_matrix(const std::vector<FeatureVector>& vectors);

}  // namespace bytegram
