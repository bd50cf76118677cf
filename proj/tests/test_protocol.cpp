#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ska/protocol.hpp"

using namespace ska;

namespace {

ExtractorTable micro() { return build_prefix_extractor(4, 3, 4, 0.45, 7, 4); }

SpaceSchedule micro_schedule() {
  SpaceSchedule s;
  s.i_max = 4;
  return s;
}

}  // namespace

TEST_CASE("variant A: identical inputs reconcile immediately") {
  Oracle o((SpaceSchedule()));
  BitString x = BitString::parse("110100");
  auto r = run_protocol_A(x, x, o, 0.2, 41);
  CHECK(r.agreed);
  CHECK(r.z_bob.has_value());
  CHECK(*r.z_bob == r.z_alice);
  // x sits in B_j no later than the copy cost
  CHECK(r.rounds_used <= c_copy);
  CHECK(r.transcript.bob_control_string().size() == size_t(r.rounds_used) + 1);
  CHECK(r.transcript.bob_control_string()[size_t(r.rounds_used)] == 1);
}

TEST_CASE("variant A: correlated inputs agree and reconstruct the same key") {
  Oracle o((SpaceSchedule()));
  BitString x = BitString::parse("110100");
  BitString y = BitString::parse("010101");  // two flips
  auto r = run_protocol_A(x, y, o, 0.2, 42);
  CHECK(r.agreed);
  CHECK(*r.z_bob == r.z_alice);
  // neither string helps the other on this machine, so Bob stops at C(x|y,H)
  CHECK(r.rounds_used == int(x.size()) + c_literal);
  CHECK(r.params.at("n") == "6");
  // the key reprints x: literal witness
  CHECK(r.z_alice.size() == x.size() + size_t(c_literal));
}

TEST_CASE("variant A: runs are reproducible from the seed") {
  Oracle o1((SpaceSchedule())), o2((SpaceSchedule()));
  BitString x = BitString::parse("110100"), y = BitString::parse("010101");
  auto a = run_protocol_A(x, y, o1, 0.2, 99);
  auto b = run_protocol_A(x, y, o2, 0.2, 99);
  CHECK(a.transcript.content_digest() == b.transcript.content_digest());
  CHECK(a.z_alice == b.z_alice);
  auto c = run_protocol_A(x, y, o1, 0.2, 100);
  CHECK(a.transcript.content_digest() != c.transcript.content_digest());
}

TEST_CASE("variant A: transcript replays and frames every round") {
  Oracle o((SpaceSchedule()));
  BitString x = BitString::parse("1011"), y = BitString::parse("0011");
  auto r = run_protocol_A(x, y, o, 0.25, 5);
  auto msgs = channel_replay(r.transcript);
  CHECK(msgs == r.transcript.messages);
  CHECK(msgs[0].sender == Sender::Alice);
  CHECK(msgs[0].round == 0);
  // alternating Alice/Bob per round after round 0
  CHECK(msgs.size() == 2 * size_t(r.rounds_used) + 2);
  // round 0 carries n, the matrix, and the first fingerprint block
  auto parts = decode_condition(msgs[0].payload);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == BitString::from_index(x.size()));
  CHECK(parts[2].size() == 1 + std::stoul(r.params.at("qbits")));
  CHECK(r.p.size() == size_t(r.rounds_used) + 1 + std::stoul(r.params.at("qbits")));
}

TEST_CASE("variant A rejects bad arguments") {
  Oracle o((SpaceSchedule()));
  CHECK_THROWS_AS(run_protocol_A(BitString(), BitString(), o, 0.2, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_protocol_A(BitString::parse("10"), BitString::parse("10"), o, 0.0, 1),
                  std::invalid_argument);
}

TEST_CASE("variant B: identical inputs stop at round 0") {
  Oracle o(micro_schedule());
  ExtractorTable E = micro();
  BitString x = BitString::parse("1011");
  auto r = run_protocol_B(x, x, o, 0.2, E, 3, 17);
  CHECK(r.agreed);
  CHECK(r.rounds_used == 0);
  CHECK(*r.z_bob == r.z_alice);
  // p is exactly the round-0 payload: no prefix bits were needed
  CHECK(r.p == r.transcript.messages[0].payload);
}

TEST_CASE("variant B: uninformative y costs the full certified prefix") {
  Oracle o(micro_schedule());
  ExtractorTable E = micro();
  BitString x = BitString::parse("1011"), y = BitString::parse("0011");
  auto r = run_protocol_B(x, y, o, 0.2, E, 3, 18);
  CHECK(r.agreed);
  CHECK(r.rounds_used == o.k_star(x, y, 3));
  CHECK(r.p.size() == r.transcript.messages[0].payload.size() + size_t(r.rounds_used));
  auto parts = decode_condition(r.transcript.messages[0].payload);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == BitString::from_index(x.size()));
}

TEST_CASE("variant B: reproducible from the seed") {
  ExtractorTable E = micro();
  Oracle o1(micro_schedule()), o2(micro_schedule());
  BitString x = BitString::parse("1001"), y = BitString::parse("1000");
  auto a = run_protocol_B(x, y, o1, 0.2, E, 3, 4);
  auto b = run_protocol_B(x, y, o2, 0.2, E, 3, 4);
  CHECK(a.transcript.content_digest() == b.transcript.content_digest());
  CHECK(a.z_alice == b.z_alice);
}

TEST_CASE("variant B refuses rounds past the certification") {
  ExtractorTable E = micro();
  E.prefix_certified_upto = 2;  // pretend only 2 prefixes were certified
  Oracle o(micro_schedule());
  BitString x = BitString::parse("1011"), y = BitString::parse("0011");
  CHECK_THROWS_AS(run_protocol_B(x, y, o, 0.2, E, 3, 18), prefix_not_certified);
}

TEST_CASE("variant B validates its inputs") {
  ExtractorTable E = micro();
  Oracle o(micro_schedule());
  CHECK_THROWS_AS(run_protocol_B(BitString::parse("10110"), BitString::parse("10110"), o, 0.2,
                                 E, 3, 1),
                  std::invalid_argument);
  Oracle shallow((SpaceSchedule{.i_max = 2}));
  CHECK_THROWS_AS(run_protocol_B(BitString::parse("1011"), BitString::parse("1011"), shallow,
                                 0.2, E, 3, 1),
                  std::invalid_argument);
}

TEST_CASE("k_star bounds the agreed prefix across seeds") {
  ExtractorTable E = micro();
  Oracle o(micro_schedule());
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(31, Stream::Input, seed));
    BitString x = rng.bits(4);
    BitString y = x;
    auto r = run_protocol_B(x, y, o, 0.2, E, 3, derive_seed(31, Stream::Run, seed));
    if (r.agreed) CHECK(r.rounds_used <= o.k_star(x, y, 3));
  }
}
