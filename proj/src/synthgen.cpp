#include "bytegram/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bytegram/corpus.hpp"
#include "bytegram/entropy.hpp"
#include "bytegram/error.hpp"
#include "bytegram/rng.hpp"

namespace bytegram {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPadAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
constexpr int kMaxResample = 10000;

std::string family_name(std::size_t i) {
  std::string suffix;
  do {
    suffix.insert(suffix.begin(), static_cast<char>('a' + i % 26));
    i = i / 26;
  } while (i-- > 0);
  return "family_" + suffix;
}

// prefix padded with alphabet characters not yet used, so every byte is distinct.
Gram padded_gram(std::string prefix, std::size_t length, Rng& rng) {
  if (prefix.size() > length) prefix.resize(length);
  std::string pool;
  for (char c : kPadAlphabet) {
    if (prefix.find(c) == std::string::npos) pool.push_back(c);
  }
  std::vector<char> shuffled(pool.begin(), pool.end());
  rng.shuffle(shuffled);
  for (std::size_t i = 0; prefix.size() < length && i < shuffled.size(); ++i) prefix.push_back(shuffled[i]);
  if (prefix.size() < length) throw SpecError("planted grams longer than 62 bytes are not supported");
  return prefix;
}

std::vector<std::size_t> pick_files(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  order.resize(count);
  return order;
}

}  // namespace

void SynthSpec::validate() const {
  if (families.size() < 1) throw SpecError("synth: at least one family is required");
  if (files_per_family.size() != families.size() || signatures.size() != families.size()) {
    throw SpecError("synth: per-family lists must match the family count");
  }
  std::set<Gram> seen;
  auto check_gram = [&](const PlantedGram& g, const std::string& what) {
    if (std::find(lengths.begin(), lengths.end(), g.bytes.size()) == lengths.end()) {
      throw SpecError("synth: " + what + " length " + std::to_string(g.bytes.size()) + " is not a mined length");
    }
    if (g.bytes.size() > file_size) {
      throw SpecError("synth: " + what + " (" + std::to_string(g.bytes.size()) + " bytes) is longer than file_size");
    }
    if (entropy_of(g.bytes) < 2.0) throw SpecError("synth: " + what + " has entropy below 2 bits");
    if (!(g.probability > 0.0 && g.probability <= 1.0)) throw SpecError("synth: " + what + " probability must lie in (0, 1]");
    if (!seen.insert(g.bytes).second) throw SpecError("synth: planted gram " + to_hex(g.bytes) + " is used twice");
  };
  for (std::size_t f = 0; f < families.size(); ++f) {
    if (files_per_family[f] < 1) throw SpecError("synth: family " + families[f] + " has no files");
    bool representative = false;
    for (const auto& s : signatures[f]) {
      check_gram(s, "signature of " + families[f]);
      if (s.probability > gamma) representative = true;
    }
    if (!representative) {
      throw SpecError("synth: family " + families[f] + " needs a signature with injection probability above gamma");
    }
  }
  for (const auto& d : decoys) check_gram(d, "decoy");
}

SynthSpec make_synth_spec(const SynthShape& shape) {
  SynthSpec spec;
  spec.file_size = shape.file_size;
  spec.gamma = shape.gamma;
  spec.seed = shape.seed;
  Rng rng(shape.seed ^ 0x5eed5eed5eedULL);
  for (std::size_t f = 0; f < shape.families; ++f) {
    spec.families.push_back(family_name(f));
    spec.files_per_family.push_back(shape.files_per_family);
    std::vector<PlantedGram> sigs;
    for (std::size_t j = 0; j < shape.signatures_per_family; ++j) {
      std::string prefix;
      const std::string digit(1, static_cast<char>('0' + j % 10));
      const char letter = f < 26 ? static_cast<char>('A' + f) : '\0';
      if (letter != '\0' && j < 10) {
        prefix = shape.signature_length >= 8 ? std::string("fam") + letter + "sig" + digit : std::string(1, letter) + digit;
      }
      sigs.push_back({padded_gram(prefix, shape.signature_length, rng), shape.injection_probability});
    }
    spec.signatures.push_back(std::move(sigs));
  }
  for (std::size_t d = 0; d < shape.shared_decoys; ++d) {
    std::string prefix;
    if (d < 10) {
      const std::string digit(1, static_cast<char>('0' + d));
      prefix = shape.decoy_length >= 8 ? "decoy" + digit : "dc" + digit;
    }
    spec.decoys.push_back({padded_gram(prefix, shape.decoy_length, rng), shape.decoy_probability});
  }
  return spec;
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthShape shape;
  std::vector<std::size_t> files_list;
  std::map<std::size_t, std::vector<PlantedGram>> explicit_sigs;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SpecError("synth spec line " + std::to_string(line_no) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    try {
      if (key == "seed") shape.seed = parse_uint(value);
      else if (key == "families") shape.families = parse_uint(value);
      else if (key == "files_per_family") {
        files_list.clear();
        for (auto part : split(value, ',')) files_list.push_back(parse_uint(part));
      } else if (key == "file_size") shape.file_size = parse_uint(value);
      else if (key == "signatures_per_family") shape.signatures_per_family = parse_uint(value);
      else if (key == "signature_length") shape.signature_length = parse_uint(value);
      else if (key == "injection_probability") shape.injection_probability = parse_real(value);
      else if (key == "shared_decoys") shape.shared_decoys = parse_uint(value);
      else if (key == "decoy_length") shape.decoy_length = parse_uint(value);
      else if (key == "decoy_probability") shape.decoy_probability = parse_real(value);
      else if (key == "gamma") shape.gamma = parse_real(value);
      else if (key == "signature") {
        auto parts = split(value, ':');
        if (parts.size() != 3) throw SpecError("signature must be <family index>:<hex>:<probability>");
        explicit_sigs[parse_uint(parts[0])].push_back({from_hex(parts[1]), parse_real(parts[2])});
      } else {
        throw SpecError("unknown synth spec key '" + std::string(key) + "'");
      }
    } catch (const ValidationError& e) {
      throw SpecError("synth spec line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (files_list.size() == 1) shape.files_per_family = files_list[0];
  SynthSpec spec = make_synth_spec(shape);
  if (files_list.size() > 1) {
    if (files_list.size() != shape.families) throw SpecError("files_per_family list must have one entry per family");
    spec.files_per_family = files_list;
  }
  for (auto& [f, sigs] : explicit_sigs) {
    if (f >= spec.families.size()) throw SpecError("signature for unknown family index " + std::to_string(f));
    spec.signatures[f] = std::move(sigs);
  }
  return spec;
}

GeneratedCorpus generate(const SynthSpec& spec, const fs::path& out_dir) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t k = spec.families.size();

  // Injection plan: planted[f][file] = grams to inject.
  std::vector<std::vector<std::vector<const PlantedGram*>>> planted(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t n = spec.files_per_family[f];
    const auto& sigs = spec.signatures[f];
    const std::size_t need = std::min(n, ceil_fraction(spec.gamma, n) + 1);
    std::vector<std::vector<std::uint8_t>> has(sigs.size(), std::vector<std::uint8_t>(n, 0));
    for (std::size_t s = 0; s < sigs.size(); ++s) {
      // Signatures that must be representative are resampled until they are.
      const bool enforce = sigs[s].probability > spec.gamma;
      for (int attempt = 0;; ++attempt) {
        std::size_t realized = 0;
        for (std::size_t i = 0; i < n; ++i) realized += (has[s][i] = rng.bernoulli(sigs[s].probability) ? 1 : 0);
        if (!enforce || realized >= need) break;
        if (attempt == kMaxResample) throw SpecError("synth: cannot realize signature presence for " + spec.families[f]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto carries = [&] {
        for (std::size_t s = 0; s < sigs.size(); ++s) {
          if (has[s][i]) return true;
        }
        return false;
      };
      for (int attempt = 0; !carries(); ++attempt) {
        if (attempt == kMaxResample) throw SpecError("synth: cannot give every file a signature");
        for (std::size_t s = 0; s < sigs.size(); ++s) has[s][i] = rng.bernoulli(sigs[s].probability) ? 1 : 0;
      }
    }
    planted[f].resize(n);
    for (std::size_t s = 0; s < sigs.size(); ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        if (has[s][i]) planted[f][i].push_back(&sigs[s]);
      }
    }
    for (const auto& d : spec.decoys) {
      const auto count = static_cast<std::size_t>(std::llround(d.probability * static_cast<double>(n)));
      for (auto i : pick_files(n, std::min(count, n), rng)) planted[f][i].push_back(&d);
    }
  }

  fs::create_directories(out_dir);
  GeneratedCorpus out;
  out.families = spec.families;
  out.manifest = out_dir / "manifest.tsv";
  out.ground_truth = out_dir / "ground_truth.tsv";
  std::string manifest;
  std::vector<std::vector<std::string>> contents(k);

  for (std::size_t f = 0; f < k; ++f) {
    fs::create_directories(out_dir / spec.families[f]);
    for (std::size_t i = 0; i < spec.files_per_family[f]; ++i) {
      std::string data(spec.file_size, '\0');
      for (char& c : data) c = static_cast<char>(rng.below(256));
      std::vector<std::pair<std::size_t, std::size_t>> used;  // [begin, end)
      for (const PlantedGram* g : planted[f][i]) {
        const std::size_t len = g->bytes.size();
        for (int attempt = 0;; ++attempt) {
          if (attempt == kMaxResample) throw SpecError("synth: file_size too small to place every planted gram");
          const std::size_t at = rng.below(spec.file_size - len + 1);
          const bool overlaps = std::any_of(used.begin(), used.end(), [&](const auto& u) {
            return at < u.second && u.first < at + len;
          });
          if (overlaps) continue;
          data.replace(at, len, g->bytes);
          used.emplace_back(at, at + len);
          break;
        }
      }
      char name[64];
      std::snprintf(name, sizeof name, "_%04zu.bin", i);
      const std::string rel = spec.families[f] + "/" + spec.families[f] + name;
      write_text(out_dir / rel, data);
      manifest += rel + "\t" + spec.families[f] + "\n";
      contents[f].push_back(std::move(data));
    }
  }
  write_text(out.manifest, manifest);

  auto realized = [&](std::size_t f, const Gram& g) {
    return std::count_if(contents[f].begin(), contents[f].end(),
                         [&](const std::string& d) { return d.find(g) != std::string::npos; });
  };
  std::string truth;
  for (std::size_t f = 0; f < k; ++f) {
    for (const auto& s : spec.signatures[f]) {
      truth += spec.families[f] + "\t" + to_hex(s.bytes) + "\t" + std::to_string(realized(f, s.bytes)) + "\n";
    }
  }
  for (const auto& d : spec.decoys) {
    std::size_t total = 0;
    for (std::size_t f = 0; f < k; ++f) total += static_cast<std::size_t>(realized(f, d.bytes));
    truth += "*\t" + to_hex(d.bytes) + "\t" + std::to_string(total) + "\n";
  }
  write_text(out.ground_truth, truth);
  return out;
}

}  // namespace bytegram
