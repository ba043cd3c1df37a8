#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <sstream>

#include "bytegram/bytes.hpp"
#include "bytegram/cli.hpp"
#include "bytegram/pipeline.hpp"

namespace fixtures {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("bytegram_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string random_bytes(bytegram::Rng& rng, std::size_t n) { return random_bytes(rng, n, 256); }

std::string random_bytes(bytegram::Rng& rng, std::size_t n, unsigned alphabet) {
  std::string out(n, '\0');
  for (char& c : out) c = static_cast<char>(rng.below(alphabet));
  return out;
}

bytegram::Sample make_sample(const std::string& id, const std::string& family, const std::string& bytes) {
  bytegram::Sample s;
  s.id = id;
  s.path = id;
  s.family = family;
  s.data = std::make_shared<const bytegram::Bytes>(bytes.begin(), bytes.end());
  return s;
}

bytegram::Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& family_and_bytes) {
  std::vector<bytegram::Sample> samples;
  for (std::size_t i = 0; i < family_and_bytes.size(); ++i) {
    const auto& [family, bytes] = family_and_bytes[i];
    samples.push_back(make_sample(family + "/" + std::to_string(i), family, bytes));
  }
  return bytegram::Corpus(std::move(samples));
}

fs::path write_corpus(const fs::path& root, const std::vector<bytegram::Sample>& samples) {
  std::string manifest;
  for (const auto& s : samples) {
    const fs::path p = root / s.id;
    fs::create_directories(p.parent_path());
    bytegram::write_text(p, bytegram::as_chars(s.bytes()));
    manifest += s.id + "\t" + s.family + "\n";
  }
  bytegram::write_text(root / "manifest.tsv", manifest);
  return root / "manifest.tsv";
}

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = bytegram::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bytegram::SynthSpec benchmark_spec(std::uint64_t seed) {
  bytegram::SynthShape shape;
  shape.families = 6;
  shape.files_per_family = 50;
  shape.file_size = 4096;
  shape.signatures_per_family = 2;
  shape.signature_length = 8;
  shape.injection_probability = 0.8;
  shape.shared_decoys = 3;
  shape.decoy_length = 8;
  shape.decoy_probability = 0.5;
  shape.seed = seed;
  return bytegram::make_synth_spec(shape);
}

bytegram::RunConfig benchmark_config(std::uint64_t seed) {
  bytegram::RunConfig c;
  c.seed = seed;
  c.set("factor", "1.0");
  c.set("n_trees", "200");
  c.set("budget", "600");
  c.set("feature_cap", "100");
  c.set("train_fraction", "0.7");
  return c.resolved();
}

std::vector<std::string> benchmark_train_flags(std::uint64_t seed) {
  return {"--seed", std::to_string(seed), "--train-fraction", "0.7", "--set", "factor=1.0",
          "--set", "n_trees=200", "--set", "budget=600", "--set", "feature_cap=100"};
}

const SmallModel& small_model() {
  // Destroyed at exit, which removes the directory.
  static const std::unique_ptr<SmallModel> model = [] {
    auto m = std::make_unique<SmallModel>();
    bytegram::SynthShape shape;
    shape.families = 3;
    shape.files_per_family = 12;
    shape.file_size = 1024;
    shape.signatures_per_family = 1;
    shape.signature_length = 8;
    shape.injection_probability = 0.9;
    shape.shared_decoys = 1;
    shape.seed = 11;
    m->spec = bytegram::make_synth_spec(shape);
    m->corpus_dir = m->dir / "corpus";
    m->manifest = bytegram::generate(m->spec, m->corpus_dir).manifest;
    bytegram::RunConfig c;
    c.seed = 3;
    c.threads = 1;
    c.set("factor", "1.0");
    c.set("n_trees", "40");
    c.set("budget", "60");
    c.set("feature_cap", "40");
    m->config = c.resolved();
    const bytegram::Corpus corpus = bytegram::load_corpus(m->corpus_dir, m->manifest);
    m->bundle = bytegram::train_pipeline(corpus, m->config, "digest").bundle;
    m->bundle_dir = m->dir / "bundle";
    bytegram::save_bundle(m->bundle, m->bundle_dir);
    return m;
  }();
  return *model;
}

}  // namespace fixtures
