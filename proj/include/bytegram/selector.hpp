#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bytegram/bytes.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/miner.hpp"

namespace bytegram {

// Two family indices in canonical order, first < second.
struct FamilyPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend auto operator<=>(const FamilyPair&, const FamilyPair&) = default;
};

// How the files of a family pair split on presence of one gram.
struct PairSplit {
  std::size_t present_1 = 0;
  std::size_t present_2 = 0;
  std::size_t n_1 = 0;
  std::size_t n_2 = 0;

  std::size_t total() const { return n_1 + n_2; }
  std::size_t present() const { return present_1 + present_2; }  // |L|
  std::size_t absent() const { return total() - present(); }      // |R|
  // |L|/|F| and |R|/|F|: the weights of the two sides.
  double present_weight() const;
  double absent_weight() const;
};

struct PairTag {
  FamilyPair pair;
  double gain = 0.0;

  friend bool operator==(const PairTag&, const PairTag&) = default;
};

struct TaggedFeature {
  Gram gram;
  double entropy = 0.0;
  std::vector<PairTag> tags;                  // ascending pair
  std::vector<std::size_t> origin_families;   // ascending; families it represents

  bool tagged_with(const FamilyPair& pair) const;
  const PairTag* tag_for(const FamilyPair& pair) const;
};

struct Stage3Config {
  std::size_t budget = 50000;

  void validate(std::size_t k) const;
};

// Label entropy (bits) of a two-family set holding n_1 and n_2 files.
// Throws DomainError when both are zero.
double pair_entropy(std::size_t n_1, std::size_t n_2);

// Entropy of the pair minus the weighted entropies of the files that contain
// the gram and the files that do not. Empty sides contribute 0.
double info_gain(const PairSplit& split);

std::size_t pair_count(std::size_t k);
// floor(B / C(k,2)); the remainder of the budget is not redistributed.
std::size_t per_pair_quota(std::size_t budget, std::size_t k);
// (0,1), (0,2), ..., (k-2,k-1).
std::vector<FamilyPair> enumerate_pairs(std::size_t k);

// Length ascending, then bytes lexicographic: the canonical gram order.
bool canonical_less(const Gram& a, const Gram& b);
// Selection order within a pair: gain descending, then canonical.
bool selection_before(double gain_a, const Gram& a, double gain_b, const Gram& b);

// Files of each family containing each gram.
struct PresenceTable {
  std::vector<Gram> grams;                          // canonical order
  std::vector<std::vector<std::uint32_t>> counts;   // [family][gram]
  std::vector<std::size_t> family_sizes;
};

PresenceTable count_presence(const Corpus& train, std::vector<Gram> grams, unsigned threads = 1);

// Stage 3. Per pair, candidates are the union of both families'
// representatives; the top per_pair_quota by selection_before are taken and
// the union over pairs is returned deduplicated, with merged tags, in
// canonical gram order.
std::vector<TaggedFeature> select_pairwise(const std::vector<FamilyRepresentatives>& reps,
                                           const Corpus& train, const Stage3Config& config,
                                           unsigned threads = 1);

// `hex(gram) \t length \t entropy \t famA|famB:gain;...`
std::string dump_features(const std::vector<TaggedFeature>& features,
                          const std::vector<std::string>& families);
// Inverse of dump_features. origin_families are not part of the format.
std::vector<TaggedFeature> parse_features(std::string_view text,
                                          const std::vector<std::string>& families);

}  // namespace bytegram
