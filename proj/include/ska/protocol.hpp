#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ska/complexity.hpp"
#include "ska/extractor.hpp"
#include "ska/gf2.hpp"
#include "ska/primes.hpp"
#include "ska/rng.hpp"
#include "ska/transcript.hpp"

namespace ska {

class reconciliation_exhausted : public std::runtime_error {
public:
  reconciliation_exhausted()
      : std::runtime_error("protocol: Bob never accepted a candidate within the round budget") {}
};

class prefix_not_certified : public std::runtime_error {
public:
  prefix_not_certified()
      : std::runtime_error("protocol B: round exceeds the extractor's certified prefix length") {}
};

struct ProtocolResult {
  char variant = 'A';
  BitString z_alice;
  std::optional<BitString> z_bob;
  bool agreed = false;
  Transcript transcript;
  BitString p;  // Alice's reconciliation payload (the key-derivation condition)
  int rounds_used = 0;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::map<std::string, std::string> params;  // parameter echo
};

namespace detail {

inline int ceil_log2_ratio(double x) {
  // smallest q >= 0 with 2^q >= x
  int q = 0;
  while (std::ldexp(1.0, q) < x) ++q;
  return q;
}

}  // namespace detail

// Theorem-1-style reconciliation: Alice streams bits of a random GF(2) linear
// fingerprint; Bob stops at the first round where some candidate of matching
// complexity has a matching fingerprint prefix. Both sides then take the key
// to be the canonically first minimal program of x given the sent prefix and
// the matrix.
//
// The matrix has L_max + 1 + ceil(log2(1/delta)) rows (delta = eps/2n) so the
// stream can reach every finite complexity level of the pinned machine; the
// round-j prefix has (j+1) + ceil(log2(1/delta)) bits.
inline ProtocolResult run_protocol_A(const BitString& x, const BitString& y, Oracle& oracle,
                                     double epsilon, uint64_t rng_seed) {
  const int n = int(x.size());
  if (n < 1) throw std::invalid_argument("run_protocol_A: |x| must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("run_protocol_A: epsilon must be in (0,1)");

  const double delta = epsilon / (2.0 * n);
  const int qbits = detail::ceil_log2_ratio(1.0 / delta);
  const int l_max = Oracle::default_l_max(size_t(n));
  const uint32_t rows = uint32_t(l_max + 1 + qbits);

  Rng mrng(derive_seed(rng_seed, Stream::Matrix, 0));
  Gf2Matrix H = sample_gf2_matrix(rows, uint32_t(n), mrng);
  BitString Hser = H.serialize();
  BitString fp = gf2_hash(H, x);

  ProtocolResult res;
  res.variant = 'A';
  res.epsilon = epsilon;
  res.seed = rng_seed;
  res.params["n"] = std::to_string(n);
  res.params["rows"] = std::to_string(rows);
  res.params["qbits"] = std::to_string(qbits);
  res.params["H"] = digest(Hser);

  size_t sent = size_t(1 + qbits);
  {
    BitString round0 = encode_condition(
        {BitString::from_index(uint64_t(n)), Hser, fp.prefix(sent)});
    res.transcript.messages.push_back({0, Sender::Alice, round0});
  }

  std::optional<BitString> u_bob;
  int j = 0;
  for (;;) {
    // Bob: candidates at complexity level j, conditioned on y and H
    auto Bj = oracle.candidate_set(j, {y, Hser}, 0, n);
    for (const auto& u : Bj) {
      if (gf2_hash(H, u).prefix(sent) == fp.prefix(sent)) {
        u_bob = u;
        break;
      }
    }
    res.transcript.messages.push_back(
        {uint32_t(j), Sender::Bob, BitString::parse(u_bob ? "1" : "0")});
    if (u_bob) break;
    if (j == l_max) throw reconciliation_exhausted();
    ++j;
    ++sent;
    res.transcript.messages.push_back(
        {uint32_t(j), Sender::Alice,
         BitString(std::vector<uint8_t>{fp[sent - 1]})});
  }

  res.rounds_used = j;
  res.p = fp.prefix(sent);
  res.z_alice = oracle.min_program(x, {res.p, Hser}, 0).code;
  res.z_bob = oracle.min_program(*u_bob, {res.p, Hser}, 0).code;
  res.agreed = (*u_bob == x);
  return res;
}

// Theorem-2-style reconciliation: Round 0 carries n and the prime-residue
// fingerprint; Alice then streams a prefix of E(x, w). At round k Bob keeps
// the first s candidates of complexity <= k+c at level n-k that are neighbors
// of the received prefix in the k-prefix graph, and stops when one matches the
// fingerprint. Key as in variant A with p = Round 0 payload + sent prefix.
inline ProtocolResult run_protocol_B(const BitString& x, const BitString& y, Oracle& oracle,
                                     double epsilon, const ExtractorTable& E, int c,
                                     uint64_t rng_seed) {
  const int n = int(x.size());
  if (uint32_t(n) != E.n) throw std::invalid_argument("run_protocol_B: |x| != extractor n");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("run_protocol_B: epsilon must be in (0,1)");
  if (oracle.schedule().i_max < n)
    throw std::invalid_argument("run_protocol_B: schedule must cover level n");

  const uint64_t D = E.seed_count();
  const uint64_t s = uint64_t(std::ceil((1.0 / epsilon) * std::ldexp(1.0, c + 1) * double(D)));
  const uint64_t t = uint64_t(std::ceil((1.0 / epsilon) * double(s) * double(n) * double(n)));

  Rng wrng(derive_seed(rng_seed, Stream::Seed, 0));
  const uint32_t w = uint32_t(wrng.below(D));
  Rng prng(derive_seed(rng_seed, Stream::Prime, 0));
  const PrimeHash ph = prime_hash(x, t, prng);

  // left node = value of the n bits, MSB first
  auto left_of = [&](const BitString& u) {
    uint32_t v = 0;
    for (size_t i = 0; i < u.size(); ++i) v = (v << 1) | u[i];
    return v;
  };
  const BitString pprime = E.output_bits(left_of(x), w);

  ProtocolResult res;
  res.variant = 'B';
  res.epsilon = epsilon;
  res.seed = rng_seed;
  res.params["n"] = std::to_string(n);
  res.params["s"] = std::to_string(s);
  res.params["t"] = std::to_string(t);
  res.params["q"] = std::to_string(ph.modulus);
  res.params["residue"] = std::to_string(ph.residue);
  res.params["w"] = std::to_string(w);
  res.params["extractor"] = E.content_digest();

  BitString round0 = encode_condition({BitString::from_index(uint64_t(n)),
                                       BitString::from_index(ph.modulus),
                                       BitString::from_index(ph.residue)});
  res.transcript.messages.push_back({0, Sender::Alice, round0});

  const int kmax = std::min(n, int(E.m));
  std::optional<BitString> x_bob;
  int k = 0;
  for (;;) {
    if (k >= 1 && k > E.prefix_certified_upto) throw prefix_not_certified();
    auto B = oracle.candidate_set(k + c,
                                  {y, BitString::from_index(uint64_t(n)),
                                   BitString::from_index(uint64_t(k + c))},
                                  n - k, n);
    uint16_t pk = 0;
    for (int i = 0; i < k; ++i) pk = uint16_t((pk << 1) | pprime[size_t(i)]);
    uint64_t kept = 0;
    for (const auto& u : B) {
      if (kept >= s) break;
      bool neighbor = (k == 0);
      for (uint32_t ww = 0; !neighbor && ww < D; ++ww)
        neighbor = E.prefix_output(left_of(u), ww, uint32_t(k)) == pk;
      if (!neighbor) continue;
      ++kept;
      if (u.index() % ph.modulus == ph.residue) {
        x_bob = u;
        break;
      }
    }
    res.transcript.messages.push_back(
        {uint32_t(k), Sender::Bob, BitString::parse(x_bob ? "1" : "0")});
    if (x_bob) break;
    if (k == kmax) throw reconciliation_exhausted();
    ++k;
    res.transcript.messages.push_back(
        {uint32_t(k), Sender::Alice,
         BitString(std::vector<uint8_t>{pprime[size_t(k - 1)]})});
  }

  res.rounds_used = k;
  res.p = round0;
  res.p.append(pprime.prefix(size_t(k)));
  res.z_alice = oracle.min_program(x, {res.p}, 0).code;
  res.z_bob = oracle.min_program(*x_bob, {res.p}, 0).code;
  res.agreed = (*x_bob == x);
  return res;
}

}  // namespace ska
