#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "bytegram/bytes.hpp"
#include "bytegram/error.hpp"
#include "bytegram/parallel.hpp"
#include "bytegram/rng.hpp"
#include "fixtures.hpp"

using namespace bytegram;

TEST(Hex, RoundTripsEveryByteValue) {
  std::string all;
  for (int b = 0; b < 256; ++b) all.push_back(static_cast<char>(b));
  EXPECT_EQ(from_hex(to_hex(all)), all);
  EXPECT_EQ(to_hex(std::string("\x00\xff\x10", 3)), "00ff10");
  EXPECT_EQ(from_hex("ABcd"), "\xab\xcd");
}

TEST(Hex, RejectsMalformedInput) {
  EXPECT_THROW(from_hex("abc"), ValidationError);
  EXPECT_THROW(from_hex("zz"), ValidationError);
}

TEST(Printable, ReplacesNonPrintableBytes) {
  EXPECT_EQ(printable(std::string("AB\x00\x7f~ \n", 7)), "AB..~ .");
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Reals, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.1972245773362196, 1e-300, 123456789.125}) {
    EXPECT_EQ(parse_real(format_real(v)), v);
  }
  EXPECT_EQ(format_real9(1.0 / 3.0), "0.333333333");
  EXPECT_THROW(parse_real("1.0x"), ValidationError);
  EXPECT_THROW(parse_uint("-1"), ValidationError);
  EXPECT_EQ(parse_uint("18446744073709551615"), 18446744073709551615ull);
}

TEST(Text, SplitKeepsEmptyFields) {
  const std::string s = "a\t\tb";
  const auto parts = split(s, '\t');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(trim("  x y \r\n"), "x y");
}

TEST(Files, ReadMissingFileIsLoadError) {
  fixtures::TempDir dir;
  EXPECT_THROW(read_file(dir / "absent"), LoadError);
  write_text(dir / "f", std::string("\x00\x01", 2));
  EXPECT_EQ(read_file(dir / "f"), (Bytes{0, 1}));
}

TEST(Rng, BelowStaysInRangeAndIsSeeded) {
  Rng a(42), b(42);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull, (1ull << 63) + 5}) {
    for (int i = 0; i < 200; ++i) {
      const auto x = a.below(bound);
      EXPECT_LT(x, bound);
      EXPECT_EQ(x, b.below(bound));
    }
  }
}

TEST(Rng, UnitAndShuffle) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.shuffle(v);
  EXPECT_EQ(std::set<int>(v.begin(), v.end()).size(), 50u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (unsigned threads : {1u, 4u}) {
    try {
      parallel_for(100, threads, [](std::size_t i) {
        if (i == 17 || i == 60) throw ValidationError(std::to_string(i));
      });
      FAIL();
    } catch (const ValidationError& e) {
      EXPECT_STREQ(e.what(), "17");
    }
  }
}
