#include "bytegram/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bytegram/aho_corasick.hpp"
#include "bytegram/error.hpp"
#include "bytegram/parallel.hpp"

namespace bytegram {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double side_entropy(std::size_t a, std::size_t b) { return a + b == 0 ? 0.0 : pair_entropy(a, b); }

}  // namespace

double PairSplit::present_weight() const {
  return static_cast<double>(present()) / static_cast<double>(total());
}

double PairSplit::absent_weight() const {
  return static_cast<double>(absent()) / static_cast<double>(total());
}

bool TaggedFeature::tagged_with(const FamilyPair& pair) const { return tag_for(pair) != nullptr; }

const PairTag* TaggedFeature::tag_for(const FamilyPair& pair) const {
  for (const auto& t : tags) {
    if (t.pair == pair) return &t;
  }
  return nullptr;
}

void Stage3Config::validate(std::size_t k) const {
  if (budget < pair_count(k)) {
    throw ConfigError("stage 3: budget B=" + std::to_string(budget) +
                      " is smaller than the number of family pairs (" +
                      std::to_string(pair_count(k)) + ")");
  }
}

double pair_entropy(std::size_t n_1, std::size_t n_2) {
  if (n_1 + n_2 == 0) throw DomainError("pair entropy of an empty set is undefined");
  const double total = static_cast<double>(n_1 + n_2);
  const double g_1 = static_cast<double>(n_1) / total;
  const double g_2 = static_cast<double>(n_2) / total;
  return -plogp(g_1) - plogp(g_2);
}

double info_gain(const PairSplit& s) {
  if (s.present_1 > s.n_1 || s.present_2 > s.n_2) {
    throw DomainError("pair split has more present files than family files");
  }
  const double h_all = pair_entropy(s.n_1, s.n_2);
  const double h_present = side_entropy(s.present_1, s.present_2);
  const double h_absent = side_entropy(s.n_1 - s.present_1, s.n_2 - s.present_2);
  const double gain = h_all - h_present * s.present_weight() - h_absent * s.absent_weight();
  return std::clamp(gain, 0.0, h_all);
}

std::size_t pair_count(std::size_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

std::size_t per_pair_quota(std::size_t budget, std::size_t k) {
  const std::size_t pairs = pair_count(k);
  return pairs == 0 ? 0 : budget / pairs;
}

std::vector<FamilyPair> enumerate_pairs(std::size_t k) {
  std::vector<FamilyPair> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) pairs.push_back({a, b});
  }
  return pairs;
}

bool canonical_less(const Gram& a, const Gram& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool selection_before(double gain_a, const Gram& a, double gain_b, const Gram& b) {
  if (gain_a != gain_b) return gain_a > gain_b;
  return canonical_less(a, b);
}

PresenceTable count_presence(const Corpus& train, std::vector<Gram> grams, unsigned threads) {
  std::sort(grams.begin(), grams.end(), canonical_less);
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());

  PresenceTable table;
  table.grams = std::move(grams);
  table.counts.assign(train.k(), std::vector<std::uint32_t>(table.grams.size(), 0));
  table.family_sizes.assign(train.k(), 0);
  for (auto label : train.labels()) ++table.family_sizes[label];
  if (table.grams.empty()) return table;

  const AhoCorasick automaton(table.grams);
  const auto groups = train.by_family();
  parallel_for(train.k(), threads, [&](std::size_t f) {
    auto& counts = table.counts[f];
    std::vector<std::uint32_t> last_seen(table.grams.size(), 0);
    std::uint32_t stamp = 0;
    for (auto i : groups[f]) {
      ++stamp;
      automaton.scan(train.samples()[i].bytes(), [&](std::uint32_t id, std::size_t) {
        if (last_seen[id] != stamp) {
          last_seen[id] = stamp;
          ++counts[id];
        }
      });
    }
  });
  return table;
}

std::vector<TaggedFeature> select_pairwise(const std::vector<FamilyRepresentatives>& reps,
                                           const Corpus& train, const Stage3Config& config,
                                           unsigned threads) {
  const std::size_t k = train.k();
  if (k < 2) throw TrainingError("stage 3: need >= 2 families, got " + std::to_string(k));
  if (reps.size() != k) throw ValidationError("stage 3: one representative set per family expected");
  config.validate(k);

  // Union of all representatives, with the families each one represents.
  std::map<Gram, std::vector<std::size_t>> origins;
  for (std::size_t f = 0; f < k; ++f) {
    for (const auto& [n, list] : reps[f].per_length) {
      for (const auto& r : list) origins[r.gram].push_back(f);
    }
  }
  std::vector<Gram> all;
  all.reserve(origins.size());
  for (const auto& [g, fams] : origins) all.push_back(g);
  const PresenceTable presence = count_presence(train, std::move(all), threads);
  const auto& grams = presence.grams;

  std::vector<std::vector<std::uint32_t>> family_candidates(k);
  for (std::uint32_t id = 0; id < grams.size(); ++id) {
    for (auto f : origins.at(grams[id])) family_candidates[f].push_back(id);
  }

  const auto pairs = enumerate_pairs(k);
  const std::size_t quota = per_pair_quota(config.budget, k);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> chosen(pairs.size());

  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    std::vector<std::uint32_t> candidates;
    std::set_union(family_candidates[a].begin(), family_candidates[a].end(),
                   family_candidates[b].begin(), family_candidates[b].end(),
                   std::back_inserter(candidates));
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(candidates.size());
    for (auto id : candidates) {
      PairSplit split{presence.counts[a][id], presence.counts[b][id], presence.family_sizes[a],
                      presence.family_sizes[b]};
      scored.emplace_back(id, info_gain(split));
    }
    const std::size_t take = std::min(quota, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      [&](const auto& x, const auto& y) {
                        return selection_before(x.second, grams[x.first], y.second, grams[y.first]);
                      });
    scored.resize(take);
    chosen[p] = std::move(scored);
  });

  // Deterministic merge: pairs in canonical order, ids in canonical gram order.
  std::map<std::uint32_t, std::vector<PairTag>> tags;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto& [id, gain] : chosen[p]) tags[id].push_back({pairs[p], gain});
  }
  std::vector<TaggedFeature> out;
  out.reserve(tags.size());
  for (auto& [id, t] : tags) {
    TaggedFeature tf;
    tf.gram = grams[id];
    tf.entropy = entropy_of(tf.gram);
    tf.tags = std::move(t);
    tf.origin_families = origins.at(tf.gram);
    out.push_back(std::move(tf));
  }
  return out;
}

std::string dump_features(const std::vector<TaggedFeature>& features,
                          const std::vector<std::string>& families) {
  std::string out;
  for (const auto& f : features) {
    out += to_hex(f.gram) + "\t" + std::to_string(f.gram.size()) + "\t" + format_real(f.entropy) + "\t";
    for (std::size_t i = 0; i < f.tags.size(); ++i) {
      const auto& t = f.tags[i];
      out += (i ? ";" : "") + families.at(t.pair.first) + "|" + families.at(t.pair.second) + ":" +
             format_real(t.gain);
    }
    out += "\n";
  }
  return out;
}

std::vector<TaggedFeature> parse_features(std::string_view text,
                                          const std::vector<std::string>& families) {
  auto family_at = [&](std::string_view name) {
    auto it = std::find(families.begin(), families.end(), name);
    if (it == families.end()) throw LoadError("features: unknown family '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - families.begin());
  };
  std::vector<TaggedFeature> out;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 4) throw LoadError("features: malformed line: " + std::string(line));
    TaggedFeature tf;
    try {
      tf.gram = from_hex(f[0]);
      if (parse_uint(f[1]) != tf.gram.size()) throw LoadError("features: length mismatch for " + std::string(f[0]));
      tf.entropy = parse_real(f[2]);
    } catch (const ValidationError& e) {
      throw LoadError(std::string("features: ") + e.what());
    }
    if (!f[3].empty()) {
      for (std::string_view tag : split(f[3], ';')) {
        auto colon = tag.rfind(':');
        auto bar = tag.find('|');
        if (colon == std::string_view::npos || bar == std::string_view::npos || bar > colon) {
          throw LoadError("features: malformed tag: " + std::string(tag));
        }
        PairTag pt;
        pt.pair = {family_at(tag.substr(0, bar)), family_at(tag.substr(bar + 1, colon - bar - 1))};
        pt.gain = parse_real(tag.substr(colon + 1));
        tf.tags.push_back(pt);
      }
    }
    out.push_back(std::move(tf));
  }
  return out;
}

}  // namespace bytegram
