#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bytegram/bytes.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/entropy.hpp"

namespace bytegram {

struct Stage2Config {
  double gamma = 0.1;
  // Soft cap on the estimated size of one family's candidate table.
  std::optional<std::size_t> memory_cap_bytes;

  void validate() const;
};

struct Representative {
  Gram gram;
  std::size_t count = 0;  // family files containing the gram
  double entropy = 0.0;

  friend bool operator==(const Representative&, const Representative&) = default;
};

struct FamilyRepresentatives {
  std::string family;
  std::map<std::size_t, std::vector<Representative>> per_length;  // sorted by gram

  std::size_t total() const;
};

struct OneGramHistogram {
  std::string sample_id;
  std::array<std::uint64_t, 256> counts{};
};

// Distinct length-n windows of `bytes` whose entropy is >= threshold, sorted.
std::vector<Gram> file_presence_grams(ByteView bytes, std::size_t n, double threshold);

// max(1, floor(gamma * family_size)).
std::size_t min_presence_count(double gamma, std::size_t family_size);

// Stage 2 for one family: per length, every gram passing the entropy
// threshold that is present in at least min_presence_count files. A file
// contributes at most 1 to a gram's count.
FamilyRepresentatives mine_family(const std::string& family, std::span<const Sample> samples,
                                  const EntropyThresholds& thresholds, const Stage2Config& config);

// mine_family for every family of the corpus, in canonical family order.
std::vector<FamilyRepresentatives> mine_all(const Corpus& train, const EntropyThresholds& thresholds,
                                            const Stage2Config& config, unsigned threads = 1);

std::vector<Sample> family_samples(const Corpus& corpus, std::size_t family);

OneGramHistogram one_gram_histogram(ByteView bytes);

// `family \t N \t hex(gram) \t count \t entropy`, one line per representative.
std::string dump_representatives(const std::vector<FamilyRepresentatives>& reps);

}  // namespace bytegram
