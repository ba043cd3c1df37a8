#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bytegram/bytes.hpp"

namespace bytegram {

struct PlantedGram {
  Gram bytes;
  double probability = 1.0;  // per-file injection probability
};

// A synthetic labeled corpus: uniform random noise files with planted
// per-family signatures and decoys shared by every family.
struct SynthSpec {
  std::vector<std::string> families;
  std::vector<std::size_t> files_per_family;  // one entry per family
  std::size_t file_size = 4096;
  std::vector<std::vector<PlantedGram>> signatures;  // per family
  std::vector<PlantedGram> decoys;
  double gamma = 0.1;
  std::vector<std::size_t> lengths{4, 8, 16, 32};
  std::uint64_t seed = 0;

  // Throws SpecError.
  void validate() const;
};

// Families family_a, family_b, ...; signatures are printable ASCII grams
// with pairwise-distinct bytes, e.g. "famAsig0" padded to signature_length.
struct SynthShape {
  std::size_t families = 2;
  std::size_t files_per_family = 5;
  std::size_t file_size = 4096;
  std::size_t signatures_per_family = 1;
  std::size_t signature_length = 8;
  double injection_probability = 1.0;
  std::size_t shared_decoys = 0;
  std::size_t decoy_length = 8;
  double decoy_probability = 0.5;
  double gamma = 0.1;
  std::uint64_t seed = 0;
};

SynthSpec make_synth_spec(const SynthShape& shape);

// key=value text: the SynthShape fields plus optional repeatable
// `signature=<family index>:<hex>:<probability>` lines replacing the
// generated signatures of that family, and `files_per_family=a,b,...`.
SynthSpec parse_synth_spec(std::string_view text);

struct GeneratedCorpus {
  std::filesystem::path manifest;
  std::filesystem::path ground_truth;
  std::vector<std::string> families;
};

// Writes <out>/<family>/<family>_NNNN.bin, <out>/manifest.tsv and
// <out>/ground_truth.tsv (`family \t hex(gram) \t realized_presence_count`;
// decoys are listed with family `*`). Each signature is present in at least
// ceil(gamma * n_f) + 1 files of its family, every file carries at least one
// of its family's signatures, and each decoy is present in exactly
// round(p * n_f) files of every family.
GeneratedCorpus generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace bytegram
