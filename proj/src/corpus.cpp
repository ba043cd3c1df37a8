#include "bytegram/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "bytegram/error.hpp"
#include "bytegram/rng.hpp"

namespace bytegram {

namespace {

constexpr double kFractionSlack = 1e-9;

std::vector<std::string> sorted_families(const std::vector<Sample>& samples) {
  std::set<std::string> unique;
  for (const auto& s : samples) unique.insert(s.family);
  return {unique.begin(), unique.end()};
}

}  // namespace

std::size_t ceil_fraction(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - kFractionSlack));
}

std::size_t floor_fraction(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + kFractionSlack));
}

Corpus::Corpus(std::vector<Sample> samples) : Corpus(samples, sorted_families(samples)) {}

Corpus::Corpus(std::vector<Sample> samples, std::vector<std::string> families)
    : samples_(std::move(samples)), families_(std::move(families)) {
  if (!std::is_sorted(families_.begin(), families_.end()) ||
      std::adjacent_find(families_.begin(), families_.end()) != families_.end()) {
    throw ValidationError("family order must be strictly lexicographic");
  }
  std::unordered_set<std::string> ids;
  labels_.reserve(samples_.size());
  for (const auto& s : samples_) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sample id: " + s.id);
    labels_.push_back(family_index(s.family));
  }
}

std::size_t Corpus::family_index(std::string_view family) const {
  auto it = std::lower_bound(families_.begin(), families_.end(), family);
  if (it == families_.end() || *it != family) {
    std::string valid;
    for (const auto& f : families_) valid += (valid.empty() ? "" : ", ") + f;
    throw LookupError("unknown family '" + std::string(family) + "'; valid families: " + valid);
  }
  return static_cast<std::size_t>(it - families_.begin());
}

std::vector<std::vector<std::size_t>> Corpus::by_family() const {
  std::vector<std::vector<std::size_t>> groups(families_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) groups[labels_[i]].push_back(i);
  return groups;
}

Corpus Corpus::subset(const std::vector<std::string>& ids) const {
  std::unordered_set<std::string> keep(ids.begin(), ids.end());
  std::vector<Sample> kept;
  for (const auto& s : samples_) {
    if (keep.count(s.id)) kept.push_back(s);
  }
  return Corpus(std::move(kept), families_);
}

Corpus load_corpus(const std::filesystem::path& root, const std::filesystem::path& manifest) {
  std::string text;
  try {
    text = read_text(manifest);
  } catch (const LoadError&) {
    throw LoadError("cannot read manifest: " + manifest.string());
  }
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ValidationError(manifest.string() + ":" + std::to_string(line_no) +
                            ": expected '<relative_path>\\t<family>'");
    }
    std::string rel(fields[0]);
    if (!seen.insert(rel).second) {
      throw ValidationError(manifest.string() + ":" + std::to_string(line_no) +
                            ": duplicate path " + rel);
    }
    auto full = root / rel;
    if (!std::filesystem::is_regular_file(full)) {
      throw LoadError("missing sample file: " + full.string());
    }
    Sample s;
    s.id = rel;
    s.path = rel;
    s.family = std::string(fields[1]);
    // These characters delimit family names in the features and meta formats.
    if (s.family.find_first_of("|;:,=") != std::string::npos) {
      throw ValidationError(manifest.string() + ":" + std::to_string(line_no) + ": family label '" + s.family +
                            "' contains one of | ; : , =");
    }
    s.data = std::make_shared<const Bytes>(read_file(full));
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ValidationError("empty manifest: " + manifest.string());
  return Corpus(std::move(samples));
}

std::string Split::serialize() const {
  std::string out = "seed\t" + std::to_string(seed) + "\nfraction\t" + format_real(fraction) + "\n";
  for (const auto& id : train_ids) out += "train\t" + id + "\n";
  for (const auto& id : test_ids) out += "test\t" + id + "\n";
  return out;
}

Split stratified_split(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split fraction must lie in (0, 1), got " + format_real(fraction));
  }
  auto groups = corpus.by_family();
  std::string too_small;
  for (std::size_t f = 0; f < groups.size(); ++f) {
    if (groups[f].size() < 2) too_small += (too_small.empty() ? "" : ", ") + corpus.families()[f];
  }
  if (!too_small.empty()) {
    throw ValidationError("families need at least 2 samples to split: " + too_small);
  }

  Split split;
  split.seed = seed;
  split.fraction = fraction;
  Rng rng(seed);
  for (const auto& group : groups) {
    std::vector<std::string> ids;
    for (auto i : group) ids.push_back(corpus.samples()[i].id);
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    std::size_t n_train = ceil_fraction(fraction, ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_train ? split.train_ids : split.test_ids).push_back(ids[i]);
    }
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

}  // namespace bytegram
