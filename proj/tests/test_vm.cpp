#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "ska/vm.hpp"

using namespace ska;

namespace {

struct Fixture {
  BitString prog, cond;
  uint32_t space = 0;
  uint64_t cap = 0;
  RunOutcome::Kind kind = RunOutcome::Kind::Invalid;
  BitString out;
  uint32_t cells = 0;
  uint64_t steps = 0;
};

BitString parse_dash(const std::string& s) {
  return s == "-" ? BitString() : BitString::parse(s);
}

std::vector<Fixture> load_fixtures(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(bool(is));
  std::vector<Fixture> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Fixture f;
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      REQUIRE(eq != std::string::npos);
      std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (k == "prog") f.prog = parse_dash(v);
      else if (k == "cond") f.cond = parse_dash(v);
      else if (k == "space") f.space = uint32_t(std::stoul(v));
      else if (k == "cap") f.cap = v == "config" ? kStepCapConfigBound : std::stoull(v);
      else if (k == "kind") {
        if (v == "halted") f.kind = RunOutcome::Kind::Halted;
        else if (v == "space") f.kind = RunOutcome::Kind::SpaceExceeded;
        else if (v == "step") f.kind = RunOutcome::Kind::StepExceeded;
        else { REQUIRE(v == "invalid"); f.kind = RunOutcome::Kind::Invalid; }
      } else if (k == "out") f.out = parse_dash(v);
      else if (k == "cells") f.cells = uint32_t(std::stoul(v));
      else if (k == "steps") f.steps = std::stoull(v);
      else FAIL("unknown fixture key ", k);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST_CASE("golden fixtures replay bit-exactly") {
  auto fixtures = load_fixtures("tests/golden/vm_fixtures.txt");
  REQUIRE(fixtures.size() >= 30);
  for (const auto& f : fixtures) {
    CAPTURE(f.prog.str());
    CAPTURE(f.cond.str());
    RunOutcome o = run_program(Program{f.prog}, f.cond, VmLimits{f.space, f.cap});
    CHECK(o.kind == f.kind);
    if (o.halted()) CHECK(o.output == f.out);
    CHECK(o.cells_used == f.cells);
    CHECK(o.steps_used == f.steps);
  }
}

TEST_CASE("configuration bound is sound over exhaustive enumeration") {
  const std::vector<BitString> conds = {BitString(),
                                        encode_condition({BitString::parse("1011")})};
  const std::vector<uint32_t> spaces = {0, 4, 64};
  detail::VmScratch scratch;
  for (const auto& cond : conds) {
    for (uint32_t space : spaces) {
      VmLimits lim{space, kStepCapConfigBound};
      enumerate_programs(11, [&](const Program& p) {
        RunOutcome o = detail::run_raw(std::span<const uint8_t>(p.code.bits()),
                                       std::span<const uint8_t>(cond.bits()), lim, scratch);
        const uint64_t bound = configuration_bound(p.code.size(), cond.size(), space);
        if (o.kind == RunOutcome::Kind::StepExceeded) {
          // certified non-halting runs report the full cap
          CHECK(o.steps_used == bound);
        } else {
          CHECK(o.steps_used <= bound);
        }
        if (o.kind == RunOutcome::Kind::SpaceExceeded) CHECK(o.cells_used == space);
        if (o.halted()) CHECK(o.cells_used <= space);
      });
    }
  }
}

TEST_CASE("canonical program enumeration") {
  CHECK(program_count(0) == 1);
  CHECK(program_count(3) == 15);
  CHECK(program_at(0).code == BitString());
  CHECK(program_at(1).code == BitString::parse("0"));
  CHECK(program_at(2).code == BitString::parse("1"));
  CHECK(program_at(3).code == BitString::parse("00"));
  CHECK(program_at(6).code == BitString::parse("11"));

  // every program up to length 8 exactly once, in canonical order
  std::set<std::string> seen;
  BitString prev;
  bool first = true;
  uint64_t count = 0;
  enumerate_programs(8, [&](const Program& p) {
    CHECK(seen.insert(p.code.str() + "#" + std::to_string(p.code.size())).second);
    if (!first) CHECK(canonical_less(prev, p.code));
    prev = p.code;
    first = false;
    CHECK(p.code.index() == count);
    ++count;
  });
  CHECK(count == program_count(8));
}

TEST_CASE("cost constants are witnessed") {
  // c_empty: the empty program prints the empty string
  RunOutcome o = run_program(Program{BitString()}, BitString(), VmLimits{});
  CHECK(o.halted());
  CHECK(o.output.empty());

  // c_literal: LIT x prints x with 3 bits of overhead
  BitString x = BitString::parse("110010");
  BitString lit = BitString::parse("100");
  lit.append(x);
  CHECK(lit.size() == x.size() + size_t(c_literal));
  o = run_program(Program{lit}, BitString(), VmLimits{});
  CHECK(o.halted());
  CHECK(o.output == x);

  // c_copy: CPART recovers x from the canonical condition encoding
  o = run_program(Program{BitString::parse("011")}, encode_condition({x}), VmLimits{});
  CHECK(o.halted());
  CHECK(o.output == x);
}

TEST_CASE("runs are deterministic") {
  BitString prog = BitString::parse("011111010010");
  BitString cond = BitString::parse("01111011");
  RunOutcome a = run_program(Program{prog}, cond, VmLimits{8, kStepCapConfigBound});
  RunOutcome b = run_program(Program{prog}, cond, VmLimits{8, kStepCapConfigBound});
  CHECK(a.kind == b.kind);
  CHECK(a.output == b.output);
  CHECK(a.steps_used == b.steps_used);
  CHECK(a.cells_used == b.cells_used);
}

TEST_CASE("oversized programs are rejected") {
  BitString big(std::vector<uint8_t>(kMaxProgramBits + 1, 0));
  CHECK_THROWS_AS(run_program(Program{big}, BitString(), VmLimits{}), std::invalid_argument);
}
