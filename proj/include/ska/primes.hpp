#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ska/bitstring.hpp"
#include "ska/rng.hpp"

namespace ska {

// The first t primes, ascending (simple sieve; t is desk-scale).
inline std::vector<uint64_t> first_primes(uint64_t t) {
  if (t < 1) throw std::invalid_argument("first_primes: t must be >= 1");
  // p_t < t (ln t + ln ln t) for t >= 6
  double td = double(t);
  uint64_t limit = t < 6 ? 16 : uint64_t(td * (std::log(td) + std::log(std::log(td)))) + 2;
  for (;;) {
    std::vector<uint8_t> comp(limit + 1, 0);
    std::vector<uint64_t> primes;
    for (uint64_t i = 2; i <= limit && primes.size() < t; ++i) {
      if (comp[i]) continue;
      primes.push_back(i);
      for (uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
    }
    if (primes.size() == t) return primes;
    limit *= 2;
  }
}

// Fingerprint (x mod q, q) with q drawn from the first t primes. Strings enter
// as integers through the canonical length-then-lex index, so n-bit strings
// map below 2^(n+1).
struct PrimeHash {
  uint64_t residue = 0;
  uint64_t modulus = 0;
  uint64_t prime_index_bound = 0;

  bool operator==(const PrimeHash&) const = default;
};

inline PrimeHash prime_hash_with(const BitString& x, uint64_t q, uint64_t t) {
  return PrimeHash{x.index() % q, q, t};
}

inline PrimeHash prime_hash(const BitString& x, uint64_t t, Rng& rng) {
  auto primes = first_primes(t);
  uint64_t q = primes[size_t(rng.below(t))];
  return prime_hash_with(x, q, t);
}

inline PrimeHash prime_hash(const BitString& x, uint64_t t, uint64_t rng_seed) {
  Rng rng(rng_seed);
  return prime_hash(x, t, rng);
}

}  // namespace ska
