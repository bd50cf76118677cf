#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ska/bitstring.hpp"
#include "ska/rng.hpp"

namespace ska {

class dimension_mismatch : public std::invalid_argument {
public:
  dimension_mismatch() : std::invalid_argument("gf2_hash: vector length != matrix columns") {}
};

// Dense binary matrix; defines the linear hash h(v) = H * v over GF(2).
struct Gf2Matrix {
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint8_t> entries;  // row-major bits

  uint8_t at(uint32_t r, uint32_t c) const { return entries[size_t(r) * cols + c]; }

  // Canonical bit serialization: gamma(rows+1), gamma(cols+1), row-major entries.
  BitString serialize() const {
    std::vector<uint8_t> out;
    detail::gamma_append(out, uint64_t(rows) + 1);
    detail::gamma_append(out, uint64_t(cols) + 1);
    out.insert(out.end(), entries.begin(), entries.end());
    return BitString(std::move(out));
  }
};

inline BitString gf2_hash(const Gf2Matrix& H, const BitString& v) {
  if (v.size() != H.cols) throw dimension_mismatch();
  BitString out;
  for (uint32_t r = 0; r < H.rows; ++r) {
    uint8_t acc = 0;
    const uint8_t* row = H.entries.data() + size_t(r) * H.cols;
    for (uint32_t c = 0; c < H.cols; ++c) acc ^= row[c] & v[c];
    out.push_back(acc);
  }
  return out;
}

inline Gf2Matrix sample_gf2_matrix(uint32_t rows, uint32_t cols, Rng& rng) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("sample_gf2_matrix: dimensions must be positive");
  Gf2Matrix H;
  H.rows = rows;
  H.cols = cols;
  H.entries.resize(size_t(rows) * cols);
  for (auto& e : H.entries) e = rng.bit();
  return H;
}

inline Gf2Matrix sample_gf2_matrix(uint32_t rows, uint32_t cols, uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_gf2_matrix(rows, cols, rng);
}

}  // namespace ska
