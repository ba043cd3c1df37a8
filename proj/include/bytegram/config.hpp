#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "bytegram/calibration.hpp"
#include "bytegram/entropy.hpp"
#include "bytegram/forest.hpp"
#include "bytegram/miner.hpp"
#include "bytegram/selector.hpp"

namespace bytegram {

// Every setting of a training run. The flat key=value form (see set()) is
// what config files contain and what a bundle's meta records.
struct RunConfig {
  std::uint64_t seed = 0;
  unsigned threads = 0;          // 0 = all cores; never affects results
  double train_fraction = 1.0;   // < 1 trains on the train side of a stratified split
  Stage1Config stage1;
  Stage2Config stage2;
  Stage3Config stage3;
  ForestConfig forest;
  CalibrationMethod calibration = CalibrationMethod::kSigmoid;
  std::size_t calibration_folds = 3;

  // Throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  // Copies `seed` into the per-stage seeds and validates the stage configs.
  RunConfig resolved() const;
  // Sorted key=value lines of every result-affecting setting (threads excluded).
  std::string serialize() const;
};

// Parses a key=value file on top of `base`; '#' starts a comment line.
RunConfig apply_config_text(RunConfig base, std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

}  // namespace bytegram
