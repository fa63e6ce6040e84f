#include "doctest.h"

#include <atomic>
#include <set>

#include "chronoplay/common.hpp"

using namespace chronoplay;

TEST_CASE("fnv1a64 is stable and input-sensitive") {
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  CHECK(hex64(0).size() == 16);
  CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("text utilities") {
  CHECK(to_lower("RTX 4070") == "rtx 4070");
  CHECK(collapse_whitespace("  Harran   City ") == "Harran City");
  CHECK(trim("\t x \n") == "x");
  CHECK(tokenize("Night-Runner 2!") == std::vector<std::string>{"night", "runner", "2"});
  CHECK(tokenize("...") == std::vector<std::string>{});
}

TEST_CASE("instant parsing") {
  CHECK(parse_instant("1700000000") == 1700000000);
  CHECK(parse_instant("-5") == -5);
  CHECK(parse_instant("1970-01-01") == 0);
  CHECK(parse_instant("2024-03-01") == 1709251200);
  CHECK(!parse_instant("2024-13-01").has_value());
  CHECK(!parse_instant("2023-02-29").has_value());
  CHECK(parse_instant("2024-02-29").has_value());  // leap year
  CHECK(!parse_instant("nonsense").has_value());
}

TEST_CASE("duration parsing") {
  CHECK(parse_duration("90s") == 90);
  CHECK(parse_duration("15m") == 900);
  CHECK(parse_duration("2h") == 7200);
  CHECK(parse_duration("5d") == 5 * kSecondsPerDay);
  CHECK(parse_duration("1w") == 7 * kSecondsPerDay);
  CHECK(parse_duration("6mo") == 6 * kSecondsPerMonth);
  CHECK(!parse_duration("5x").has_value());
  CHECK(!parse_duration("").has_value());
}

TEST_CASE("rng determinism and substreams") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng base(7);
  Rng s1 = base.substream("synth");
  Rng s2 = base.substream("mock");
  CHECK(s1.next_u64() != s2.next_u64());

  Rng bounded_rng(3);
  for (int i = 0; i < 100; ++i) CHECK(bounded_rng.bounded(5) < 5);
  CHECK_THROWS_AS((void)bounded_rng.bounded(0), Error);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(97, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
}
