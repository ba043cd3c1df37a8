#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bytegram/bundle.hpp"
#include "bytegram/config.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/rng.hpp"
#include "bytegram/synthgen.hpp"

namespace fixtures {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string random_bytes(bytegram::Rng& rng, std::size_t n);
// Bytes drawn from the first `alphabet` byte values; small alphabets give repeats.
std::string random_bytes(bytegram::Rng& rng, std::size_t n, unsigned alphabet);

bytegram::Sample make_sample(const std::string& id, const std::string& family, const std::string& bytes);
bytegram::Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& family_and_bytes);

// Writes each sample's bytes to root/<id> and a manifest; returns the manifest path.
std::filesystem::path write_corpus(const std::filesystem::path& root, const std::vector<bytegram::Sample>& samples);

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};
CliResult run_cli(const std::vector<std::string>& args);

// 6 families x 50 files x 4 KiB, two 8-byte signatures per family injected at
// 0.8, three shared decoys at 0.5.
bytegram::SynthSpec benchmark_spec(std::uint64_t seed);
// Training settings matching benchmark_spec: factor 1 for every length,
// 200 trees, B = 600, C = 100, 70/30 split.
bytegram::RunConfig benchmark_config(std::uint64_t seed);
std::vector<std::string> benchmark_train_flags(std::uint64_t seed);

// A 3-family synthetic corpus and a model trained on all of it, built once
// per process: 3 x 12 files x 1 KiB, one 8-byte signature per family, one
// decoy, 40 trees.
struct SmallModel {
  TempDir dir;
  std::filesystem::path corpus_dir;
  std::filesystem::path manifest;
  std::filesystem::path bundle_dir;
  bytegram::SynthSpec spec;
  bytegram::RunConfig config;
  bytegram::ModelBundle bundle;
};
const SmallModel& small_model();

}  // namespace fixtures
