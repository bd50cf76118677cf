#pragma once

#include <cstdint>
#include <random>

#include "ska/bitstring.hpp"

namespace ska {

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Named randomness streams. Every random choice in the project flows from one
// master seed through derive_seed(master, stream, index); runs are therefore
// reproducible regardless of sweep order or worker count.
enum class Stream : uint64_t {
  Run = 1,        // per-trial protocol randomness
  Matrix = 2,     // GF(2) matrix sampling
  Prime = 3,      // prime choice of the modular hash
  Seed = 4,       // extractor seed w
  Input = 5,      // x/y generation in sweeps
  Extractor = 6,  // extractor table search
  Verify = 7,     // sampled extractor verification
};

inline uint64_t derive_seed(uint64_t master, Stream stream, uint64_t index) {
  uint64_t s = master;
  (void)detail::splitmix64(s);
  s ^= uint64_t(stream) * 0xd1342543de82ef95ull;
  (void)detail::splitmix64(s);
  s ^= index * 0xaf251af3b0f025b5ull;
  return detail::splitmix64(s);
}

// Seeded generator with portable draws (mt19937_64 is fully specified by the
// standard; bounded draws use rejection sampling, not uniform_int_distribution).
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  uint8_t bit() { return uint8_t(gen_() & 1); }

  // uniform in [0, bound)
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    uint64_t mask = ~uint64_t(0);
    if (bound & (bound - 1)) {
      uint64_t limit = bound * ((~uint64_t(0)) / bound);
      uint64_t v;
      do {
        v = gen_();
      } while (v >= limit);
      return v % bound;
    }
    (void)mask;
    return gen_() & (bound - 1);
  }

  BitString bits(size_t n) {
    BitString r;
    for (size_t i = 0; i < n; ++i) r.push_back(bit());
    return r;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace ska
