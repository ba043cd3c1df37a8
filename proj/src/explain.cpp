#include "bytegram/explain.hpp"

#include <algorithm>
#include <cstdio>

#include "bytegram/error.hpp"

namespace bytegram {

namespace {

std::size_t family_lookup(const std::vector<std::string>& families, const std::string& name) {
  auto it = std::find(families.begin(), families.end(), name);
  if (it == families.end()) {
    std::string valid;
    for (const auto& f : families) valid += (valid.empty() ? "" : ", ") + f;
    throw LookupError("unknown family '" + name + "'; valid families: " + valid);
  }
  return static_cast<std::size_t>(it - families.begin());
}

void rank(std::vector<ExplainEntry>& entries, const ModelBundle& bundle, std::size_t top_n) {
  std::sort(entries.begin(), entries.end(), [&](const ExplainEntry& a, const ExplainEntry& b) {
    return selection_before(a.score, bundle.features[a.feature].gram, b.score, bundle.features[b.feature].gram);
  });
  if (entries.size() > top_n) entries.resize(top_n);
}

std::string pair_name(const FamilyPair& p, const ModelBundle& b) {
  return b.families[p.first] + "|" + b.families[p.second];
}

}  // namespace

ExplainReport explain(const ModelBundle& bundle, const std::optional<std::pair<std::string, std::string>>& pair,
                      std::size_t top_n) {
  std::vector<FamilyPair> pairs;
  std::vector<std::size_t> families;
  if (pair) {
    std::size_t a = family_lookup(bundle.families, pair->first);
    std::size_t b = family_lookup(bundle.families, pair->second);
    if (a == b) throw LookupError("a family pair needs two different families");
    if (a > b) std::swap(a, b);
    pairs.push_back({a, b});
    families = {a, b};
  } else {
    pairs = enumerate_pairs(bundle.families.size());
    for (std::size_t f = 0; f < bundle.families.size(); ++f) families.push_back(f);
  }

  ExplainReport report;
  if (top_n == 0) return report;
  for (const auto& p : pairs) {
    PairSection section{p, {}};
    for (std::size_t i = 0; i < bundle.features.size(); ++i) {
      if (const PairTag* t = bundle.features[i].tag_for(p)) section.entries.push_back({i, t->gain});
    }
    rank(section.entries, bundle, top_n);
    report.pairs.push_back(std::move(section));
  }
  for (auto f : families) {
    FamilySection section{f, {}};
    for (std::size_t i = 0; i < bundle.features.size(); ++i) {
      const auto& feat = bundle.features[i];
      if (!std::binary_search(feat.origin_families.begin(), feat.origin_families.end(), f)) continue;
      double score = 0.0;
      bool involved = false;
      for (const auto& t : feat.tags) {
        if (t.pair.first == f || t.pair.second == f) {
          score += t.gain;
          involved = true;
        }
      }
      if (involved) section.entries.push_back({i, score});
    }
    rank(section.entries, bundle, top_n);
    report.families.push_back(std::move(section));
  }
  return report;
}

std::string render_text(const ExplainReport& report, const ModelBundle& bundle) {
  std::string out;
  char buf[128];
  auto entry_line = [&](const ExplainEntry& e) {
    const auto& f = bundle.features[e.feature];
    std::snprintf(buf, sizeof buf, "  %-8.6f  N=%-3zu  H=%-6.4f  ", e.score, f.gram.size(), f.entropy);
    return std::string(buf) + to_hex(f.gram) + "  \"" + printable(f.gram) + "\"\n";
  };
  if (report.pairs.empty() && report.families.empty()) return "(empty report)\n";
  for (const auto& s : report.pairs) {
    out += "pair " + pair_name(s.pair, bundle) + "\n";
    if (s.entries.empty()) out += "  (no surviving features are tagged with this pair)\n";
    for (const auto& e : s.entries) out += entry_line(e);
    out += "\n";
  }
  for (const auto& s : report.families) {
    out += "family " + bundle.families[s.family] + "\n";
    if (s.entries.empty()) out += "  (no surviving features originate from this family)\n";
    for (const auto& e : s.entries) out += entry_line(e);
    out += "\n";
  }
  return out;
}

std::string render_tsv(const ExplainReport& report, const ModelBundle& bundle) {
  std::string out;
  auto lines = [&](const std::vector<ExplainEntry>& entries) {
    std::vector<TaggedFeature> feats;
    for (const auto& e : entries) feats.push_back(bundle.features[e.feature]);
    return dump_features(feats, bundle.families);
  };
  for (const auto& s : report.pairs) out += "# pair " + pair_name(s.pair, bundle) + "\n" + lines(s.entries);
  for (const auto& s : report.families) out += "# family " + bundle.families[s.family] + "\n" + lines(s.entries);
  return out;
}

}  // namespace bytegram
