#include "bytegram/entropy.hpp"

#include <algorithm>

#include "bytegram/error.hpp"
#include "bytegram/parallel.hpp"
#include "bytegram/rng.hpp"

namespace bytegram {

double entropy_of(ByteView gram) {
  if (gram.empty()) throw DomainError("entropy of an empty gram is undefined");
  std::array<std::size_t, 256> counts{};
  for (Byte b : gram) ++counts[b];
  std::vector<std::size_t> present;
  present.reserve(64);
  for (auto c : counts) {
    if (c != 0) present.push_back(c);
  }
  std::sort(present.begin(), present.end());
  double h = 0.0;
  for (std::size_t i = 0; i < present.size();) {
    std::size_t j = i;
    while (j < present.size() && present[j] == present[i]) ++j;
    h += static_cast<double>(j - i) * entropy_term(present[i], gram.size());
    i = j;
  }
  return h;
}

WindowEntropy::WindowEntropy(std::size_t length)
    : length_(length), count_hist_(length + 1, 0), terms_(length + 1, 0.0) {
  if (length == 0) throw DomainError("window length must be positive");
  for (std::size_t c = 1; c <= length; ++c) terms_[c] = entropy_term(c, length);
}

void WindowEntropy::reset(ByteView window) {
  counts_.fill(0);
  std::fill(count_hist_.begin(), count_hist_.end(), 0);
  for (Byte b : window.first(length_)) ++counts_[b];
  for (auto c : counts_) {
    if (c != 0) ++count_hist_[c];
  }
}

void WindowEntropy::slide(Byte leaving, Byte entering) {
  if (leaving == entering) return;
  --count_hist_[counts_[leaving]];
  --counts_[leaving];
  if (counts_[leaving] != 0) ++count_hist_[counts_[leaving]];
  if (counts_[entering] != 0) --count_hist_[counts_[entering]];
  ++counts_[entering];
  ++count_hist_[counts_[entering]];
}

double WindowEntropy::value() const {
  double h = 0.0;
  for (std::size_t c = 1; c <= length_; ++c) {
    if (count_hist_[c] != 0) h += static_cast<double>(count_hist_[c]) * terms_[c];
  }
  return h;
}

void Stage1Config::validate() const {
  if (lengths.empty()) throw ConfigError("stage 1: at least one N-gram length is required");
  if (!std::is_sorted(lengths.begin(), lengths.end()) ||
      std::adjacent_find(lengths.begin(), lengths.end()) != lengths.end()) {
    throw ConfigError("stage 1: lengths must be strictly ascending");
  }
  for (auto n : lengths) {
    if (n < 2) throw ConfigError("stage 1: every length must be >= 2");
    auto it = factors.find(n);
    if (it == factors.end()) throw ConfigError("stage 1: no factor for N=" + std::to_string(n));
    if (!(it->second >= 1.0)) throw ConfigError("stage 1: factor for N=" + std::to_string(n) + " must be >= 1");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("stage 1: alpha must lie in (0, 1]");
  if (beta < 1) throw ConfigError("stage 1: beta must be >= 1");
}

double Stage1Config::factor(std::size_t n) const {
  auto it = factors.find(n);
  if (it == factors.end()) throw ConfigError("stage 1: no factor for N=" + std::to_string(n));
  return it->second;
}

std::string Stage1Config::canonical() const {
  std::string out = "lengths=";
  for (std::size_t i = 0; i < lengths.size(); ++i) out += (i ? "," : "") + std::to_string(lengths[i]);
  out += "\nalpha=" + format_real(alpha) + "\nbeta=" + std::to_string(beta) + "\n";
  for (auto n : lengths) out += "factor." + std::to_string(n) + "=" + format_real(factor(n)) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  return out;
}

double EntropyThresholds::threshold(std::size_t n) const {
  for (const auto& t : per_length) {
    if (t.n == n) return t.threshold;
  }
  throw LookupError("no entropy threshold for N=" + std::to_string(n));
}

std::vector<std::size_t> EntropyThresholds::lengths() const {
  std::vector<std::size_t> out;
  for (const auto& t : per_length) out.push_back(t.n);
  return out;
}

std::string EntropyThresholds::serialize() const {
  std::string out;
  for (const auto& t : per_length) {
    out += std::to_string(t.n) + "\t" + format_real(t.avg_entropy) + "\t" + format_real(t.factor) +
           "\t" + format_real(t.threshold) + "\n";
  }
  return out;
}

EntropyThresholds EntropyThresholds::parse(std::string_view text) {
  EntropyThresholds out;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 4) throw LoadError("malformed thresholds line: " + std::string(line));
    LengthThreshold t;
    t.n = parse_uint(f[0]);
    t.avg_entropy = parse_real(f[1]);
    t.factor = parse_real(f[2]);
    t.threshold = parse_real(f[3]);
    out.per_length.push_back(t);
  }
  return out;
}

EntropyThresholds compute_thresholds(const Corpus& train, const Stage1Config& config,
                                     unsigned threads) {
  config.validate();
  if (train.size() == 0) throw ThresholdError("stage 1: the training set is empty");

  const auto& samples = train.samples();
  std::size_t drawn = std::max<std::size_t>(1, ceil_fraction(config.alpha, samples.size()));
  drawn = std::min(drawn, samples.size());

  EntropyThresholds out;
  out.per_length.resize(config.lengths.size());
  parallel_for(config.lengths.size(), threads, [&](std::size_t li) {
    const std::size_t n = config.lengths[li];
    Rng rng(config.seed ^ static_cast<std::uint64_t>(n));
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    double sum = 0.0;
    std::size_t grams = 0;
    for (std::size_t d = 0; d < drawn; ++d) {
      ByteView bytes = samples[order[d]].bytes();
      if (bytes.size() < n) continue;
      const std::uint64_t starts = bytes.size() - n + 1;
      for (std::size_t b = 0; b < config.beta; ++b) {
        sum += entropy_of(bytes.subspan(rng.below(starts), n));
        ++grams;
      }
    }
    if (grams == 0) {
      throw ThresholdError("stage 1: no sampled file is at least " + std::to_string(n) +
                           " bytes long, cannot derive a threshold for N=" + std::to_string(n));
    }
    LengthThreshold& t = out.per_length[li];
    t.n = n;
    t.avg_entropy = sum / static_cast<double>(grams);
    t.factor = config.factor(n);
    t.threshold = t.avg_entropy * t.factor;
  });
  out.config_digest = sha256_hex(config.canonical());
  out.sampled_file_count = drawn;
  return out;
}

}  // namespace bytegram
