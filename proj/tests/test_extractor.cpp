#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ska/extractor.hpp"

using namespace ska;

namespace {

// frozen certificate of the pinned micro extractor (n=4, d=3, m=4, eps=0.45,
// search seed 7, prefixes certified to 4)
constexpr uint64_t kMicroSeed = 7;
const char* kMicroDigest =
    "fd8740215feb0173204e5094198540064fb167afb4e80413e289ffbacb819118";
constexpr double kMicroWorst[4] = {0.25, 0.28125, 0.234375, 0.1640625};

ExtractorTable micro() { return build_prefix_extractor(4, 3, 4, 0.45, kMicroSeed, 4); }

ExtractorTable identity_table() {
  // E(x, w) = x for every seed: a perfect (n, eps) extractor at k = n
  ExtractorTable E;
  E.n = 4;
  E.d = 2;
  E.m = 4;
  E.table.resize(1u << 6);
  for (uint32_t x = 0; x < 16; ++x)
    for (uint32_t w = 0; w < 4; ++w) E.table[(size_t(x) << 2) | w] = uint16_t(x);
  return E;
}

}  // namespace

TEST_CASE("identity map extracts the full source perfectly") {
  ExtractorTable E = identity_table();
  auto r = verify_extractor(E, 4, 0.1);
  CHECK(r.pass);
  CHECK(r.worst_deviation == 0.0);
  CHECK(r.sources_checked == 1);
}

TEST_CASE("constant map fails verification maximally") {
  ExtractorTable E = identity_table();
  for (auto& v : E.table) v = 0;
  auto r = verify_extractor(E, 1, 0.9);
  CHECK_FALSE(r.pass);
  // all mass on one of 16 outputs: TV = 15/16
  CHECK(r.worst_deviation == doctest::Approx(15.0 / 16.0));
}

TEST_CASE("sampled verification never issues a pass certificate") {
  ExtractorTable E = identity_table();
  auto r = verify_extractor(E, 2, 0.99, VerifyResult::Mode::Sampled, 5, 50);
  CHECK_FALSE(r.pass);
  CHECK(r.mode == VerifyResult::Mode::Sampled);
  CHECK(r.sources_checked == 50);
}

TEST_CASE("exhaustive verification refuses absurd work instead of truncating") {
  Rng rng(1);
  ExtractorTable E = sample_extractor_table(12, 3, 4, rng);
  CHECK_THROWS_AS(verify_extractor(E, 10, 0.2), budget_exceeded);
}

TEST_CASE("heavy right nodes are provably at most an eps fraction") {
  // counting argument: every heavy node absorbs > avg/eps of the |B|*D edge
  // endpoints, so there are fewer than eps*M of them
  for (uint64_t g = 0; g < 1000; ++g) {
    Rng rng(derive_seed(11, Stream::Verify, g));
    ExtractorTable E = sample_extractor_table(4, 3, 4, rng);
    std::vector<uint32_t> B;
    for (uint32_t u = 0; u < 16; ++u)
      if (rng.bit()) B.push_back(u);
    if (B.empty()) B.push_back(uint32_t(rng.below(16)));
    const double eps = 0.25;
    auto heavy = heavy_right_nodes(E, B, eps);
    CHECK(double(heavy.size()) <= eps * E.right_count());
  }
}

TEST_CASE("poor left nodes really exceed the heavy-neighbor threshold") {
  Rng rng(derive_seed(12, Stream::Verify, 0));
  ExtractorTable E = sample_extractor_table(4, 3, 4, rng);
  std::vector<uint32_t> B = {0, 1, 2, 3};
  const double eps = 0.3;
  auto heavy = heavy_right_nodes(E, B, eps);
  std::vector<uint8_t> is_heavy(E.right_count(), 0);
  for (uint32_t v : heavy) is_heavy[v] = 1;
  auto poor = poor_left_nodes(E, B, eps);
  std::vector<uint8_t> is_poor(E.left_count(), 0);
  for (uint32_t u : poor) is_poor[u] = 1;
  for (uint32_t u = 0; u < E.left_count(); ++u) {
    uint32_t hits = 0;
    for (uint32_t w = 0; w < E.seed_count(); ++w) hits += is_heavy[E.output(u, w)];
    CHECK(is_poor[u] == (double(hits) > 2.0 * eps * E.seed_count() ? 1 : 0));
  }
}

TEST_CASE("the pinned micro extractor rebuilds bit-identically") {
  ExtractorTable E = micro();
  CHECK(E.content_digest() == kMicroDigest);
  CHECK(E.prefix_certified_upto == 4);
  for (uint32_t k = 1; k <= 4; ++k) {
    ExtractorTable P = prefix_table(E, k);
    auto r = verify_extractor(P, k, 0.45);
    CHECK(r.pass);
    CHECK(r.worst_deviation == doctest::Approx(kMicroWorst[k - 1]).epsilon(1e-12));
  }
}

TEST_CASE("prefix tables truncate outputs consistently") {
  ExtractorTable E = micro();
  ExtractorTable P = prefix_table(E, 2);
  CHECK(P.m == 2);
  for (uint32_t x = 0; x < E.left_count(); ++x)
    for (uint32_t w = 0; w < E.seed_count(); ++w)
      CHECK(P.output(x, w) == E.prefix_output(x, w, 2));
  CHECK_THROWS_AS(prefix_table(E, 0), std::invalid_argument);
  CHECK_THROWS_AS(prefix_table(E, 5), std::invalid_argument);
}

TEST_CASE("extractor files round-trip through save/load") {
  ExtractorTable E = micro();
  std::stringstream ss;
  E.save(ss);
  ExtractorTable back = ExtractorTable::load(ss);
  CHECK(back.n == E.n);
  CHECK(back.d == E.d);
  CHECK(back.m == E.m);
  CHECK(back.epsilon == E.epsilon);
  CHECK(back.prefix_certified_upto == E.prefix_certified_upto);
  CHECK(back.seed == E.seed);
  CHECK(back.table == E.table);
  CHECK(back.content_digest() == E.content_digest());

  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(ExtractorTable::load(bad), malformed_encoding);
}

TEST_CASE("the search reports failure rather than a weak table") {
  // impossible target: 1-bit outputs from a single left node pair can't be
  // balanced for every source at tiny eps
  CHECK_THROWS_AS(build_prefix_extractor(2, 1, 1, 0.01, 1, 1, 3), search_exhausted);
}
