#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ska/complexity.hpp"

using namespace ska;

TEST_CASE("unconditional complexity of short strings") {
  Oracle o((SpaceSchedule()));
  CHECK(o.complexity(BitString(), {}, 0).value == c_empty);
  for (uint64_t v = 1; v <= 30; ++v) {
    BitString x = BitString::from_index(v);
    auto r = o.complexity(x, {}, 0);
    REQUIRE(r.finite());
    // one OUT instruction for single bits, LIT otherwise
    const int expected = x.size() == 1 ? 3 : int(x.size()) + c_literal;
    CHECK(r.value == expected);
  }
}

TEST_CASE("conditional complexity given the string itself") {
  Oracle o((SpaceSchedule()));
  for (uint64_t v = 1; v <= 30; ++v) {
    BitString x = BitString::from_index(v);
    auto r = o.complexity(x, {x}, 0);
    REQUIRE(r.finite());
    CHECK(r.value == c_copy);
    // single bits are also printable by an OUT opcode that sorts earlier
    if (x.size() >= 2) CHECK(r.witness->code == BitString::parse("011"));
  }
}

TEST_CASE("chain-rule inequalities, exhaustive to length 3") {
  Oracle o(SpaceSchedule(), OracleOptions{32, ~0ull, false});
  int sub = -100, mono_x = -100, mono_cond = -100, rev = -100;
  for (uint64_t xi = 0; xi < 15; ++xi) {
    for (uint64_t yi = 0; yi < 15; ++yi) {
      BitString x = BitString::from_index(xi), y = BitString::from_index(yi);
      BitString pair = encode_condition({x, y});
      int cxy = o.complexity(x, {y}, 0).value;
      int cy = o.complexity(y, {}, 0).value;
      int cx = o.complexity(x, {}, 0).value;
      int cp = o.complexity(pair, {}, 0, int(pair.size()) + 5).value;
      int cpy = o.complexity(pair, {y}, 0, int(pair.size()) + 5).value;
      sub = std::max(sub, cp - (cxy + cy));
      mono_x = std::max(mono_x, cxy - cx);
      mono_cond = std::max(mono_cond, o.complexity(x, {y, y}, 0).value - cxy);
      rev = std::max(rev, cxy - cpy);
    }
  }
  // exact maxima, frozen from an exhaustive scan of the pinned machine
  CHECK(sub == 10);
  CHECK(mono_x == 0);
  CHECK(mono_cond == 0);
  CHECK(rev == -4);
}

TEST_CASE("candidate sets are exact level sets") {
  Oracle o((SpaceSchedule()));
  // no 3-bit string has complexity <= 5; all have complexity 6
  CHECK(o.candidate_set(5, {}, 0, 3).empty());
  auto all3 = o.candidate_set(6, {}, 0, 3);
  CHECK(all3.size() == 8);
  for (size_t i = 0; i < all3.size(); ++i) CHECK(all3[i] == BitString::from_index(7 + i));
  // conditioning on x pulls exactly x below the copy cost
  BitString x = BitString::parse("101");
  auto b3 = o.candidate_set(3, {x}, 0, 3);
  REQUIRE(b3.size() == 1);
  CHECK(b3[0] == x);
  CHECK(o.candidate_set(-1, {}, 0, 3).empty());
}

TEST_CASE("batch queries agree with single queries") {
  Oracle o((SpaceSchedule()));
  std::vector<BitString> targets;
  for (uint64_t v = 0; v < 15; ++v) targets.push_back(BitString::from_index(v));
  BitString y = BitString::parse("01");
  auto batch = o.complexity_batch(targets, {y}, 0, 8);
  REQUIRE(batch.size() == targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    auto single = o.complexity(targets[i], {y}, 0, 8);
    CHECK(batch[i].status == single.status);
    if (single.finite()) CHECK(batch[i].value == single.value);
  }
}

TEST_CASE("infinite is a definite answer, distinct from an exhausted budget") {
  Oracle tight(SpaceSchedule(), OracleOptions{12, 50, false});
  CHECK_THROWS_AS(tight.complexity(BitString::parse("10110"), {}, 0), budget_exceeded);

  Oracle o((SpaceSchedule()));
  auto r = o.complexity(BitString::parse("10110"), {}, 0, 4);
  CHECK_FALSE(r.finite());
  CHECK(r.value == -1);
  CHECK_FALSE(r.witness.has_value());
  CHECK_THROWS_AS(o.min_program(BitString::parse("10110"), {}, 0, 4), no_program);
}

TEST_CASE("witness verification mode re-executes every witness") {
  Oracle o(SpaceSchedule(), OracleOptions{12, ~0ull, true});
  for (uint64_t v = 0; v < 31; ++v)
    CHECK(o.complexity(BitString::from_index(v), {}, 0).finite());
}

TEST_CASE("k_star: equality gives 0, independence gives n") {
  SpaceSchedule s;
  s.i_max = 4;
  Oracle o(s);
  BitString x = BitString::parse("1011");
  CHECK(o.k_star(x, x, 3) == 0);
  // a condition that does not mention x never helps on this machine
  CHECK(o.k_star(x, BitString::parse("0011"), 3) == 4);
}

TEST_CASE("space levels outside the schedule are rejected") {
  Oracle o((SpaceSchedule()));
  CHECK_THROWS_AS(o.complexity(BitString::parse("1"), {}, 7), std::out_of_range);
  SpaceSchedule bad;
  bad.ratio_num = 1;
  CHECK_THROWS_AS(Oracle{bad}, std::invalid_argument);
}

TEST_CASE("dump records are stable") {
  Oracle o((SpaceSchedule()));
  BitString x = BitString::parse("10");
  auto r = o.complexity(x, {}, 0);
  std::ostringstream os;
  o.dump_record(os, x, {}, 0, r);
  CHECK(os.str() ==
        "x=10 cond=" + digest(BitString()) + " level=0 value=5 witness=10010\n");
}
