#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bytegram/bytes.hpp"
#include "bytegram/corpus.hpp"

namespace bytegram {

// Shannon entropy (base 2) of the byte-value distribution inside one gram.
// Throws DomainError for an empty gram.
double entropy_of(ByteView gram);
inline double entropy_of(std::string_view gram) { return entropy_of(as_bytes(gram)); }

// Contribution of one byte value occurring `count` times in a window of
// `length` bytes. entropy_of and WindowEntropy sum these terms in ascending
// count order, so both produce bit-identical results.
inline double entropy_term(std::size_t count, std::size_t length) {
  const double p = static_cast<double>(count) / static_cast<double>(length);
  return -(p * std::log2(p));
}

// Entropy of a fixed-length window sliding over a buffer, O(length) per step
// and exactly equal to entropy_of on the same window.
class WindowEntropy {
 public:
  explicit WindowEntropy(std::size_t length);

  void reset(ByteView window);
  void slide(Byte leaving, Byte entering);
  double value() const;

 private:
  std::size_t length_;
  std::array<std::uint32_t, 256> counts_{};
  std::vector<std::uint32_t> count_hist_;  // count_hist_[c] = byte values seen c times
  std::vector<double> terms_;
};

struct Stage1Config {
  std::vector<std::size_t> lengths{4, 8, 16, 32};
  double alpha = 0.1;
  std::size_t beta = 256;
  std::map<std::size_t, double> factors{{4, 1.05}, {8, 1.05}, {16, 1.15}, {32, 1.15}};
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
  double factor(std::size_t n) const;
  // Stable text form; its SHA-256 is the thresholds' config digest.
  std::string canonical() const;
};

struct LengthThreshold {
  std::size_t n = 0;
  double avg_entropy = 0.0;
  double factor = 1.0;
  double threshold = 0.0;  // avg_entropy * factor
};

struct EntropyThresholds {
  std::vector<LengthThreshold> per_length;  // ascending n
  std::string config_digest;
  std::size_t sampled_file_count = 0;

  // Throws LookupError for a length that was not computed.
  double threshold(std::size_t n) const;
  std::vector<std::size_t> lengths() const;

  // One line per length: `N \t avg \t factor \t t_N`.
  std::string serialize() const;
  static EntropyThresholds parse(std::string_view text);
};

// Stage 1. Per length N, with an Rng seeded by (seed XOR N): shuffle the
// train-sample indices, keep the first max(1, ceil(alpha*|train|)), then draw
// beta window starts uniformly (with replacement) from each kept sample of
// length >= N. Shorter samples contribute nothing.
EntropyThresholds compute_thresholds(const Corpus& train, const Stage1Config& config,
                                     unsigned threads = 1);

}  // namespace bytegram
