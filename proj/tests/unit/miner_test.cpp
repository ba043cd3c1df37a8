#include <gtest/gtest.h>

#include <numeric>

#include "bytegram/entropy.hpp"
#include "bytegram/error.hpp"
#include "bytegram/miner.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bytegram;

namespace {

EntropyThresholds flat(double t, std::vector<std::size_t> lengths = {4, 8, 16, 32}) {
  EntropyThresholds out;
  for (auto n : lengths) out.per_length.push_back({n, t, 1.0, t});
  return out;
}

std::vector<Sample> samples_of(const std::vector<std::string>& files) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < files.size(); ++i) out.push_back(fixtures::make_sample("s" + std::to_string(i), "f", files[i]));
  return out;
}

std::map<Gram, std::size_t> as_map(const FamilyRepresentatives& r, std::size_t n) {
  std::map<Gram, std::size_t> out;
  auto it = r.per_length.find(n);
  if (it == r.per_length.end()) return out;
  for (const auto& rep : it->second) out[rep.gram] = rep.count;
  return out;
}

// Files built from shared chunks so grams recur across files.
std::vector<std::string> shared_files(Rng& rng, std::size_t count, std::size_t size, unsigned alphabet) {
  std::vector<std::string> pool;
  for (int i = 0; i < 5; ++i) pool.push_back(fixtures::random_bytes(rng, 20 + rng.below(60), alphabet));
  std::vector<std::string> files(count);
  for (auto& f : files) {
    while (f.size() < size) f += rng.bernoulli(0.5) ? pool[rng.below(5)] : fixtures::random_bytes(rng, 10, alphabet);
    f.resize(size);
  }
  return files;
}

}  // namespace

TEST(FilePresenceGrams, Examples) {
  EXPECT_TRUE(file_presence_grams(as_bytes(std::string(100, '\0')), 4, 0.5).empty());
  const auto one = file_presence_grams(as_bytes(std::string("\x01\x02\x03\x04", 4)), 4, 0.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], std::string("\x01\x02\x03\x04", 4));
  EXPECT_TRUE(file_presence_grams(as_bytes(std::string("abc")), 4, 0.0).empty());
  EXPECT_THROW(file_presence_grams(as_bytes(std::string("abc")), 1, 0.0), DomainError);
}

TEST(FilePresenceGrams, RandomFileMatchesSlidingWindowOracle) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const std::string f = fixtures::random_bytes(rng, 64, i % 2 ? 256 : 3);
    const auto got = file_presence_grams(as_bytes(f), 8, 0.0);
    const auto want = oracle::presence_grams(f, 8, 0.0);
    EXPECT_EQ(std::set<Gram>(got.begin(), got.end()), want);
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    if (i % 2) EXPECT_EQ(got.size(), 57u);
    const double t = 1.5;
    const auto filtered = file_presence_grams(as_bytes(f), 8, t);
    EXPECT_EQ(std::set<Gram>(filtered.begin(), filtered.end()), oracle::presence_grams(f, 8, t));
  }
}

TEST(MinPresenceCount, FloorClampedToOne) {
  EXPECT_EQ(min_presence_count(0.1, 3), 1u);
  EXPECT_EQ(min_presence_count(0.1, 9), 1u);
  EXPECT_EQ(min_presence_count(0.1, 10), 1u);
  EXPECT_EQ(min_presence_count(0.1, 35), 3u);
  EXPECT_EQ(min_presence_count(1.0, 7), 7u);
}

TEST(MineFamily, GramInTwoOfThreeFiles) {
  const std::string g = "WXYZ";
  const auto fam = samples_of({"aa" + g + "bb" + g, "cc" + g, std::string(10, 'q')});
  const auto reps = mine_family("f", fam, flat(0.0, {4}), Stage2Config{});
  const auto m = as_map(reps, 4);
  ASSERT_TRUE(m.count(g));
  EXPECT_EQ(m.at(g), 2u);  // two occurrences in the first file count once
  for (const auto& r : reps.per_length.at(4)) EXPECT_EQ(r.entropy, entropy_of(r.gram));
}

TEST(MineFamily, IdenticalFilesCountEveryFile) {
  Rng rng(2);
  const std::string f = fixtures::random_bytes(rng, 300, 50);
  const auto reps = mine_family("f", samples_of(std::vector<std::string>(10, f)), flat(1.0), Stage2Config{});
  EXPECT_GT(reps.total(), 0u);
  for (const auto& [n, list] : reps.per_length) {
    for (const auto& r : list) EXPECT_EQ(r.count, 10u);
  }
}

TEST(MineFamily, MatchesNaiveOracleOnTinyCorpora) {
  Rng rng(3);
  for (int inst = 0; inst < 8; ++inst) {
    const auto files = shared_files(rng, 1 + rng.below(20), rng.below(2048), inst % 2 ? 4 : 256);
    const double t = inst % 3 == 0 ? 0.0 : 1.0 + rng.unit() * 2.0;
    Stage2Config cfg;
    cfg.gamma = 0.25;
    const auto reps = mine_family("f", samples_of(files), flat(t), cfg);
    for (std::size_t n : {4, 8, 16, 32}) {
      EXPECT_EQ(as_map(reps, n), oracle::mine(files, n, t, 1, 4)) << "inst " << inst << " N=" << n;
    }
  }
}

TEST(MineFamily, InvariantsHold) {
  Rng rng(4);
  const auto files = shared_files(rng, 15, 600, 16);
  const auto th = flat(1.8);
  const auto reps = mine_family("f", samples_of(files), th, Stage2Config{});
  for (const auto& [n, list] : reps.per_length) {
    EXPECT_TRUE(std::is_sorted(list.begin(), list.end(), [](auto& a, auto& b) { return a.gram < b.gram; }));
    for (std::size_t i = 0; i < list.size(); ++i) {
      EXPECT_GE(list[i].entropy, th.threshold(n));
      EXPECT_GE(list[i].count, min_presence_count(0.1, files.size()));
      EXPECT_LE(list[i].count, files.size());
      if (i) EXPECT_NE(list[i].gram, list[i - 1].gram);
    }
  }
}

TEST(MineFamily, LoweringThresholdNeverRemoves) {
  Rng rng(5);
  const auto files = shared_files(rng, 12, 500, 12);
  const auto high = mine_family("f", samples_of(files), flat(2.5), Stage2Config{});
  const auto low = mine_family("f", samples_of(files), flat(1.5), Stage2Config{});
  for (std::size_t n : {4, 8, 16, 32}) {
    const auto lo = as_map(low, n);
    for (const auto& [g, c] : as_map(high, n)) {
      ASSERT_TRUE(lo.count(g));
      EXPECT_EQ(lo.at(g), c);
    }
  }
}

TEST(MineFamily, EqualsUnionThenFilterOfPerFileSets) {
  Rng rng(6);
  const auto files = shared_files(rng, 10, 400, 8);
  Stage2Config cfg;
  cfg.gamma = 0.3;
  const auto reps = mine_family("f", samples_of(files), flat(1.0, {8}), cfg);
  std::map<Gram, std::size_t> merged;
  for (const auto& f : files) {
    for (const auto& g : file_presence_grams(as_bytes(f), 8, 1.0)) ++merged[g];
  }
  std::erase_if(merged, [&](const auto& kv) { return kv.second < min_presence_count(0.3, files.size()); });
  EXPECT_EQ(as_map(reps, 8), merged);
}

TEST(MineFamily, MemoryCapFailsLoudly) {
  Rng rng(7);
  Stage2Config cfg;
  cfg.memory_cap_bytes = 1024;
  const auto files = std::vector<std::string>{fixtures::random_bytes(rng, 4096)};
  try {
    mine_family("f", samples_of(files), flat(0.0), cfg);
    FAIL();
  } catch (const MiningError& e) {
    EXPECT_NE(std::string(e.what()).find("factor"), std::string::npos);
  }
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(MineAll, ThreadInvariantAndCanonical) {
  Rng rng(8);
  std::vector<std::pair<std::string, std::string>> labelled;
  for (int i = 0; i < 24; ++i) labelled.emplace_back(std::string(1, static_cast<char>('c' - i % 3)), fixtures::random_bytes(rng, 300, 10));
  const Corpus c = fixtures::make_corpus(labelled);
  const auto a = mine_all(c, flat(1.0), Stage2Config{}, 1);
  const auto b = mine_all(c, flat(1.0), Stage2Config{}, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].family, "a");
  EXPECT_EQ(dump_representatives(a), dump_representatives(b));
}

TEST(OneGramHistogram, Examples) {
  const auto h = one_gram_histogram(as_bytes(std::string("\x00\x00\x01\xff", 4)));
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[255], 1u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}), 4u);
  const auto empty = one_gram_histogram(ByteView{});
  EXPECT_EQ(std::accumulate(empty.counts.begin(), empty.counts.end(), std::uint64_t{0}), 0u);
  Rng rng(9);
  const auto kib = one_gram_histogram(as_bytes(fixtures::random_bytes(rng, 1024)));
  EXPECT_EQ(std::accumulate(kib.counts.begin(), kib.counts.end(), std::uint64_t{0}), 1024u);
}

TEST(DumpRepresentatives, LineFormat) {
  FamilyRepresentatives r;
  r.family = "fam";
  r.per_length[4] = {{"ABCD", 3, 2.0}};
  EXPECT_EQ(dump_representatives({r}), "fam\t4\t41424344\t3\t2\n");
}
