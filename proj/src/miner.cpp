#include "bytegram/miner.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "bytegram/error.hpp"
#include "bytegram/parallel.hpp"

namespace bytegram {

namespace {

// Rough per-entry cost of an unordered_map node plus bucket slot.
constexpr std::size_t kEntryOverhead = 64;

struct Candidate {
  std::uint32_t count = 0;
  std::uint32_t last_file = 0;
};

template <typename Fn>
void for_each_passing_window(ByteView bytes, std::size_t n, double threshold, Fn&& fn) {
  if (bytes.size() < n) return;
  WindowEntropy window(n);
  window.reset(bytes.first(n));
  for (std::size_t start = 0;; ++start) {
    if (window.value() >= threshold) fn(as_chars(bytes.subspan(start, n)));
    if (start + n >= bytes.size()) break;
    window.slide(bytes[start], bytes[start + n]);
  }
}

}  // namespace

void Stage2Config::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("stage 2: gamma must lie in (0, 1]");
}

std::size_t FamilyRepresentatives::total() const {
  std::size_t n = 0;
  for (const auto& [len, reps] : per_length) n += reps.size();
  return n;
}

std::size_t min_presence_count(double gamma, std::size_t family_size) {
  return std::max<std::size_t>(1, floor_fraction(gamma, family_size));
}

std::vector<Gram> file_presence_grams(ByteView bytes, std::size_t n, double threshold) {
  if (n < 2) throw DomainError("N-gram length must be >= 2");
  std::unordered_set<std::string_view> seen;
  for_each_passing_window(bytes, n, threshold, [&](std::string_view g) { seen.insert(g); });
  std::vector<Gram> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

FamilyRepresentatives mine_family(const std::string& family, std::span<const Sample> samples,
                                  const EntropyThresholds& thresholds, const Stage2Config& config) {
  config.validate();
  if (samples.empty()) throw MiningError("stage 2: family '" + family + "' has no samples");

  FamilyRepresentatives out;
  out.family = family;
  const std::size_t min_count = min_presence_count(config.gamma, samples.size());

  for (const auto& lt : thresholds.per_length) {
    const std::size_t n = lt.n;
    // Keys view into the samples' bytes, which outlive this table.
    std::unordered_map<std::string_view, Candidate> table;
    for (std::size_t f = 0; f < samples.size(); ++f) {
      const auto file_tag = static_cast<std::uint32_t>(f + 1);
      for_each_passing_window(samples[f].bytes(), n, lt.threshold, [&](std::string_view g) {
        Candidate& c = table[g];
        if (c.last_file != file_tag) {
          c.last_file = file_tag;
          ++c.count;
        }
      });
      if (config.memory_cap_bytes && table.size() * (n + kEntryOverhead) > *config.memory_cap_bytes) {
        throw MiningError("stage 2: candidate table for family '" + family + "', N=" +
                          std::to_string(n) + " exceeds the memory cap of " +
                          std::to_string(*config.memory_cap_bytes) +
                          " bytes; raise factor." + std::to_string(n) + " or shard the corpus");
      }
    }
    auto& kept = out.per_length[n];
    for (const auto& [g, c] : table) {
      if (c.count >= min_count) kept.push_back({Gram(g), c.count, entropy_of(g)});
    }
    std::sort(kept.begin(), kept.end(),
              [](const Representative& a, const Representative& b) { return a.gram < b.gram; });
  }
  return out;
}

std::vector<Sample> family_samples(const Corpus& corpus, std::size_t family) {
  std::vector<Sample> out;
  const auto& labels = corpus.labels();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (labels[i] == family) out.push_back(corpus.samples()[i]);
  }
  return out;
}

std::vector<FamilyRepresentatives> mine_all(const Corpus& train, const EntropyThresholds& thresholds,
                                            const Stage2Config& config, unsigned threads) {
  std::vector<FamilyRepresentatives> out(train.k());
  parallel_for(train.k(), threads, [&](std::size_t f) {
    auto samples = family_samples(train, f);
    out[f] = mine_family(train.families()[f], samples, thresholds, config);
  });
  return out;
}

OneGramHistogram one_gram_histogram(ByteView bytes) {
  OneGramHistogram h;
  for (Byte b : bytes) ++h.counts[b];
  return h;
}

std::string dump_representatives(const std::vector<FamilyRepresentatives>& reps) {
  std::string out;
  for (const auto& fr : reps) {
    for (const auto& [n, list] : fr.per_length) {
      for (const auto& r : list) {
        out += fr.family + "\t" + std::to_string(n) + "\t" + to_hex(r.gram) + "\t" +
               std::to_string(r.count) + "\t" + format_real(r.entropy) + "\n";
      }
    }
  }
  return out;
}

}  // namespace bytegram
