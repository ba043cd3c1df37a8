#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bytegram/bytes.hpp"

namespace bytegram {

struct Sample {
  std::string id;  // the manifest-relative path; unique within a corpus
  std::string path;
  std::string family;
  std::shared_ptr<const Bytes> data;

  ByteView bytes() const { return data ? ByteView(*data) : ByteView(); }
  std::size_t size() const { return data ? data->size() : 0; }
};

// Immutable labeled sample collection. Families are kept in lexicographic
// order; every per-family index in the pipeline refers to that order.
class Corpus {
 public:
  explicit Corpus(std::vector<Sample> samples);
  // Keeps an explicit family order, e.g. the parent's order for a subset.
  Corpus(std::vector<Sample> samples, std::vector<std::string> families);

  const std::vector<Sample>& samples() const { return samples_; }
  const std::vector<std::string>& families() const { return families_; }
  std::size_t k() const { return families_.size(); }
  std::size_t size() const { return samples_.size(); }

  // Throws LookupError naming the valid families.
  std::size_t family_index(std::string_view family) const;
  // Family index of every sample, in sample order.
  const std::vector<std::size_t>& labels() const { return labels_; }
  // Sample indices of each family, in sample order.
  std::vector<std::vector<std::size_t>> by_family() const;

  // Keeps samples whose id is listed; sample order and family order preserved.
  Corpus subset(const std::vector<std::string>& ids) const;

 private:
  std::vector<Sample> samples_;
  std::vector<std::string> families_;
  std::vector<std::size_t> labels_;
};

// Manifest lines are `<relative_path>\t<family>`.
Corpus load_corpus(const std::filesystem::path& root, const std::filesystem::path& manifest);

struct Split {
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
  std::uint64_t seed = 0;
  double fraction = 0.0;

  std::string serialize() const;
};

// Per family, ceil(fraction * n_f) samples go to train. Throws
// ValidationError listing every family with fewer than two samples.
Split stratified_split(const Corpus& corpus, double fraction, std::uint64_t seed);

// Number of the n items kept when taking a fraction, rounding up. A small
// tolerance absorbs representation error such as 0.7 * 10 != 7.
std::size_t ceil_fraction(double fraction, std::size_t n);
// Rounding down, with the same tolerance.
std::size_t floor_fraction(double fraction, std::size_t n);

}  // namespace bytegram
