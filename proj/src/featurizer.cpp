#include "bytegram/featurizer.hpp"

#include <algorithm>

#include "bytegram/error.hpp"

namespace bytegram {

PatternSet::PatternSet(std::vector<Gram> grams) : patterns_(std::move(grams)) {
  std::sort(patterns_.begin(), patterns_.end(), canonical_less);
  for (std::size_t j = 0; j < patterns_.size(); ++j) {
    if (patterns_[j].empty()) throw BuildError("empty pattern");
    if (!index_.emplace(patterns_[j], j).second) {
      throw BuildError("duplicate pattern " + to_hex(patterns_[j]));
    }
  }
}

std::optional<std::size_t> PatternSet::column_of(const Gram& gram) const {
  auto it = index_.find(gram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<float> FeatureVector::dense() const {
  std::vector<float> out;
  out.reserve(dim());
  for (auto p : presence) out.push_back(static_cast<float>(p));
  for (auto c : one_grams) out.push_back(static_cast<float>(c));
  return out;
}

Featurizer::Featurizer(PatternSet patterns) : patterns_(std::move(patterns)) {
  if (patterns_.size() != 0) automaton_.emplace(patterns_.patterns());
}

FeatureVector Featurizer::featurize(ByteView bytes, MatchStats* stats) const {
  FeatureVector v;
  v.presence.assign(patterns_.size(), 0);
  if (stats) stats->occurrences.assign(patterns_.size(), 0);
  auto& hist = v.one_grams;
  if (!automaton_) {
    for (Byte b : bytes) ++hist[b];
    return v;
  }
  automaton_->scan(
      bytes, [&](Byte b) { ++hist[b]; },
      [&](std::uint32_t id, std::size_t) {
        v.presence[id] = 1;
        if (stats) ++stats->occurrences[id];
      });
  return v;
}

Featurizer build_automaton(const std::vector<TaggedFeature>& features) {
  std::vector<Gram> grams;
  grams.reserve(features.size());
  for (const auto& f : features) grams.push_back(f.gram);
  return Featurizer(PatternSet(std::move(grams)));
}

std::string dump_feature_matrix(const std::vector<FeatureVector>& vectors, const Corpus& corpus,
                                std::size_t pattern_count) {
  std::unordered_map<std::string, std::string> family_of;
  for (const auto& s : corpus.samples()) family_of[s.id] = s.family;
  std::string out = std::to_string(pattern_count) + "\t" + std::to_string(corpus.k()) + "\n";
  for (const auto& v : vectors) {
    std::string bitmap((v.presence.size() + 7) / 8, '\0');
    for (std::size_t j = 0; j < v.presence.size(); ++j) {
      if (v.presence[j]) bitmap[j / 8] = static_cast<char>(bitmap[j / 8] | (0x80 >> (j % 8)));
    }
    auto fam = family_of.find(v.sample_id);
    out += v.sample_id + "\t" + (fam == family_of.end() ? std::string() : fam->second) + "\t" +
           to_hex(bitmap) + "\t";
    for (std::size_t c = 0; c < 256; ++c) out += (c ? " " : "") + std::to_string(v.one_grams[c]);
    out += "\n";
  }
  return out;
}

FeatureMatrix to_matrix(const std::vector<FeatureVector>& vectors) {
  const std::size_t cols = vectors.empty() ? 0 : vectors.front().dim();
  FeatureMatrix m(vectors.size(), cols);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    if (vectors[r].dim() != cols) throw ValidationError("feature vectors differ in dimension");
    auto d = vectors[r].dense();
    std::copy(d.begin(), d.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace bytegram
