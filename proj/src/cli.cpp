#include "bytegram/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

#include "bytegram/bundle.hpp"
#include "bytegram/config.hpp"
#include "bytegram/corpus.hpp"
#include "bytegram/error.hpp"
#include "bytegram/explain.hpp"
#include "bytegram/metrics.hpp"
#include "bytegram/parallel.hpp"
#include "bytegram/pipeline.hpp"
#include "bytegram/synthgen.hpp"

namespace bytegram::cli {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string corpus, manifest, config, out, dump_dir;
  std::vector<std::string> overrides;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct ClassifyArgs {
  std::string bundle, input, output;
  unsigned threads = 0;
};

struct EvaluateArgs {
  std::string bundle, corpus, manifest, predictions;
  bool holdout = false;
  unsigned threads = 0;
};

struct ExplainArgs {
  std::string bundle, pair, format = "text";
  std::size_t top = 10;
};

struct SynthArgs {
  std::string spec, out;
};

std::string manifest_path(const std::string& corpus, const std::string& manifest) {
  return manifest.empty() ? (fs::path(corpus) / "manifest.tsv").string() : manifest;
}

void dump_artifacts(const TrainOutput& result, const Corpus& train, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "thresholds.tsv", result.bundle.thresholds.serialize());
  write_text(dir / "representatives.tsv", dump_representatives(result.artifacts.representatives));
  write_text(dir / "selected.tsv", dump_features(result.artifacts.selected, train.families()));
  write_text(dir / "feature_matrix.tsv",
             dump_feature_matrix(result.artifacts.vectors, train, result.artifacts.selected.size()));
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig config;
  if (!a.config.empty()) config = load_config_file(a.config, config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed) config.seed = *a.seed;
  if (a.train_fraction) config.set("train_fraction", format_real(*a.train_fraction));
  if (a.threads) config.threads = *a.threads;
  config = config.resolved();

  const std::string manifest = manifest_path(a.corpus, a.manifest);
  const Corpus corpus = load_corpus(a.corpus, manifest);
  Corpus train = corpus;
  if (config.train_fraction < 1.0) {
    const Split split = stratified_split(corpus, config.train_fraction, config.seed);
    train = corpus.subset(split.train_ids);
  }
  const TrainOutput result = train_pipeline(train, config, sha256_hex(read_text(manifest)));
  save_bundle(result.bundle, a.out);
  if (!a.dump_dir.empty()) dump_artifacts(result, train, a.dump_dir);
  out << format_timing_table(result.timings);
  out << "bundle written to " << a.out << " (" << result.bundle.dim() << " features, "
      << result.bundle.forest.trees.size() << " trees)\n";
  return kOk;
}

std::vector<std::string> list_inputs(const fs::path& input) {
  std::vector<std::string> rel;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::recursive_directory_iterator(input)) {
      if (!entry.is_directory()) rel.push_back(fs::relative(entry.path(), input).generic_string());
    }
    std::sort(rel.begin(), rel.end());
  } else {
    rel.push_back(input.filename().generic_string());
  }
  return rel;
}

std::string classify_header(const std::vector<std::string>& families) {
  std::string line = "path\tpredicted";
  for (const auto& f : families) line += "\t" + f;
  return line + "\n";
}

int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  const Classifier classifier(load_bundle(a.bundle));
  const auto& families = classifier.bundle().families;
  const fs::path input(a.input);
  if (!fs::exists(input)) throw LoadError("input not found: " + a.input);
  const fs::path base = fs::is_directory(input) ? input : input.parent_path();
  const auto rel = list_inputs(input);

  std::vector<std::string> lines(rel.size());
  std::vector<std::uint8_t> failed(rel.size(), 0);
  parallel_for(rel.size(), a.threads, [&](std::size_t i) {
    try {
      const Bytes data = read_file(base / rel[i]);
      const Prediction p = classifier.predict(data);
      std::string line = rel[i] + "\t" + families[p.family];
      for (double v : p.proba) line += "\t" + format_real9(v);
      lines[i] = line + "\n";
    } catch (const Error& e) {
      lines[i] = rel[i] + "\tERROR\t" + e.what() + "\n";
      failed[i] = 1;
    }
  });

  std::string text = classify_header(families);
  for (const auto& l : lines) text += l;
  if (a.output.empty() || a.output == "-") {
    out << text;
  } else {
    write_text(a.output, text);
  }
  const auto n_failed = std::count(failed.begin(), failed.end(), 1);
  if (n_failed > 0) {
    err << n_failed << " of " << rel.size() << " inputs could not be classified\n";
    return kDataError;
  }
  return kOk;
}

// Reads a classify output file; every path must appear in the manifest.
PredictionMatrix read_predictions(const fs::path& predictions, const fs::path& manifest) {
  std::map<std::string, std::string, std::less<>> truth;
  const std::string manifest_text = read_text(manifest);
  for (auto line : split(manifest_text, '\n')) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw ValidationError("manifest: expected <path>\\t<family>");
    truth[std::string(cols[0])] = std::string(trim(cols[1]));
  }
  PredictionMatrix pm;
  bool header = true;
  const std::string predictions_text = read_text(predictions);
  for (auto line : split(predictions_text, '\n')) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (header) {
      if (cols.size() < 3 || cols[0] != "path" || cols[1] != "predicted") {
        throw ValidationError("predictions: expected a `path\\tpredicted\\t<families>` header");
      }
      for (std::size_t j = 2; j < cols.size(); ++j) pm.class_order.emplace_back(trim(cols[j]));
      header = false;
      continue;
    }
    if (cols.size() != pm.class_order.size() + 2) {
      throw ValidationError("predictions: malformed row for " + std::string(cols[0]));
    }
    const auto it = truth.find(cols[0]);
    if (it == truth.end()) throw ValidationError("predictions: " + std::string(cols[0]) + " is not in the manifest");
    const auto cls = std::find(pm.class_order.begin(), pm.class_order.end(), it->second);
    if (cls == pm.class_order.end()) throw ValidationError("predictions: unknown family " + it->second);
    std::vector<double> row;
    for (std::size_t j = 2; j < cols.size(); ++j) row.push_back(parse_real(trim(cols[j])));
    pm.sample_ids.emplace_back(cols[0]);
    pm.p.push_back(std::move(row));
    pm.truth.push_back(static_cast<std::size_t>(cls - pm.class_order.begin()));
  }
  if (header) throw ValidationError("predictions: file is empty");
  return pm;
}

PredictionMatrix predict_corpus(const ModelBundle& bundle, const Corpus& corpus, unsigned threads) {
  const Classifier classifier(bundle);
  PredictionMatrix pm;
  pm.class_order = bundle.families;
  pm.sample_ids.resize(corpus.size());
  pm.p.resize(corpus.size());
  pm.truth.resize(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const Sample& s = corpus.samples()[i];
    const auto cls = std::find(bundle.families.begin(), bundle.families.end(), s.family);
    if (cls == bundle.families.end()) throw ValidationError("family " + s.family + " is unknown to the bundle");
    pm.sample_ids[i] = s.id;
    pm.p[i] = classifier.predict(s.bytes()).proba;
    pm.truth[i] = static_cast<std::size_t>(cls - bundle.families.begin());
  });
  return pm;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  PredictionMatrix pm;
  if (!a.predictions.empty()) {
    if (a.manifest.empty()) throw ConfigError("--predictions requires --manifest");
    pm = read_predictions(a.predictions, a.manifest);
  } else {
    if (a.bundle.empty() || a.corpus.empty()) throw ConfigError("evaluate needs --bundle and --corpus, or --predictions");
    const ModelBundle bundle = load_bundle(a.bundle);
    Corpus corpus = load_corpus(a.corpus, manifest_path(a.corpus, a.manifest));
    if (a.holdout) {
      const double fraction = bundle.config.train_fraction;
      if (fraction >= 1.0) throw ConfigError("--holdout: the bundle was trained on the whole corpus");
      corpus = corpus.subset(stratified_split(corpus, fraction, bundle.config.seed).test_ids);
    }
    pm = predict_corpus(bundle, corpus, a.threads);
  }
  const double ll = logloss(pm);
  out << "samples\t" << pm.p.size() << "\n";
  out << format_report(classification_report(pm), pm.class_order, ll);
  return kOk;
}

int cmd_explain(const ExplainArgs& a, std::ostream& out) {
  const ModelBundle bundle = load_bundle(a.bundle);
  std::optional<std::pair<std::string, std::string>> pair;
  if (!a.pair.empty()) {
    const auto parts = split(a.pair, ',');
    if (parts.size() != 2) throw ConfigError("--pair expects A,B");
    pair.emplace(std::string(trim(parts[0])), std::string(trim(parts[1])));
  }
  const ExplainReport report = explain(bundle, pair, a.top);
  out << (a.format == "tsv" ? render_tsv(report, bundle) : render_text(report, bundle));
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const SynthSpec spec = parse_synth_spec(read_text(a.spec));
  const GeneratedCorpus corpus = generate(spec, a.out);
  out << "manifest\t" << corpus.manifest.string() << "\n";
  out << "ground_truth\t" << corpus.ground_truth.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bytegram: byte N-gram mining and file-family classification"};
  app.name("bytegram");
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "run all five stages and write a model bundle");
  train->add_option("--corpus", ta.corpus, "corpus root directory")->required();
  train->add_option("--manifest", ta.manifest, "manifest file (default <corpus>/manifest.tsv)");
  train->add_option("--config", ta.config, "key=value config file");
  train->add_option("--set", ta.overrides, "config override key=value (repeatable)");
  train->add_option("--seed", ta.seed, "global seed");
  train->add_option("--train-fraction", ta.train_fraction, "train on a stratified split of this fraction");
  train->add_option("--threads", ta.threads, "worker threads (0 = all cores)");
  train->add_option("--out", ta.out, "bundle directory")->required();
  train->add_option("--dump-dir", ta.dump_dir, "write intermediate stage outputs here");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "classify a file or every file under a directory");
  classify->add_option("--bundle", ca.bundle, "bundle directory")->required();
  classify->add_option("--input", ca.input, "file or directory")->required();
  classify->add_option("--output", ca.output, "output file (default stdout)");
  classify->add_option("--threads", ca.threads, "worker threads (0 = all cores)");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "logloss, accuracy, macro precision/recall, confusion matrix");
  evaluate->add_option("--bundle", ea.bundle, "bundle directory");
  evaluate->add_option("--corpus", ea.corpus, "corpus root directory");
  evaluate->add_option("--manifest", ea.manifest, "manifest file");
  evaluate->add_flag("--holdout", ea.holdout, "evaluate only the test side of the bundle's split");
  evaluate->add_option("--predictions", ea.predictions, "classify output file to score instead of a bundle");
  evaluate->add_option("--threads", ea.threads, "worker threads (0 = all cores)");

  ExplainArgs xa;
  auto* explain_cmd = app.add_subcommand("explain", "top features per family pair and per family");
  explain_cmd->add_option("--bundle", xa.bundle, "bundle directory")->required();
  explain_cmd->add_option("--pair", xa.pair, "restrict to one pair: A,B");
  explain_cmd->add_option("--top", xa.top, "features per section")->capture_default_str();
  explain_cmd->add_option("--format", xa.format, "text or tsv")
      ->check(CLI::IsMember({"text", "tsv"}))
      ->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus from a spec file");
  synth->add_option("--spec", sa.spec, "key=value synth spec")->required();
  synth->add_option("--out", sa.out, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) {
      err << sub->help();
      return kUsage;
    }
    err << app.help();
    return kUsage;
  }

  try {
    if (*train) return cmd_train(ta, out);
    if (*classify) return cmd_classify(ca, out, err);
    if (*evaluate) return cmd_evaluate(ea, out);
    if (*explain_cmd) return cmd_explain(xa, out);
    if (*synth) return cmd_synth(sa, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace bytegram::cli
