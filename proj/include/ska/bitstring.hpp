#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace ska {

class malformed_encoding : public std::runtime_error {
public:
  explicit malformed_encoding(const std::string& what) : std::runtime_error(what) {}
};

// A bounded search (oracle enumeration, exhaustive verification) ran out of
// its work quota before completing. Distinct from a negative answer.
class budget_exceeded : public std::runtime_error {
public:
  budget_exceeded() : std::runtime_error("enumeration budget exhausted") {}
};

// A finite binary string. Stored one bit per byte; fine at desk scale.
// Canonical total order: first by length, then lexicographically.
class BitString {
public:
  BitString() = default;
  explicit BitString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
    for (uint8_t b : bits_)
      if (b > 1) throw std::invalid_argument("BitString: bit out of range");
  }

  static BitString parse(const std::string& s) {
    BitString r;
    r.bits_.reserve(s.size());
    for (char c : s) {
      if (c == '0') r.bits_.push_back(0);
      else if (c == '1') r.bits_.push_back(1);
      else throw std::invalid_argument("BitString::parse: expected only '0'/'1', got '" + std::string(1, c) + "'");
    }
    return r;
  }

  // The v-th string in canonical order: 0 -> "", 1 -> "0", 2 -> "1", 3 -> "00", ...
  static BitString from_index(uint64_t v) {
    // strings of length L occupy indices [2^L - 1, 2^(L+1) - 2]
    int len = 0;
    uint64_t base = 0;  // 2^len - 1
    while (v >= base + (uint64_t(1) << len)) {
      base += uint64_t(1) << len;
      ++len;
      if (len > 62) throw std::overflow_error("BitString::from_index: index too large");
    }
    uint64_t offset = v - base;
    BitString r;
    r.bits_.resize(len);
    for (int i = 0; i < len; ++i)
      r.bits_[i] = uint8_t((offset >> (len - 1 - i)) & 1);
    return r;
  }

  // Index of this string in canonical order; the canonical string->integer map.
  // Injective and order preserving; values of n-bit strings are < 2^(n+1).
  uint64_t index() const {
    if (bits_.size() > 62) throw std::overflow_error("BitString::index: string too long");
    uint64_t base = (uint64_t(1) << bits_.size()) - 1;
    uint64_t offset = 0;
    for (uint8_t b : bits_) offset = (offset << 1) | b;
    return base + offset;
  }

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  uint8_t operator[](size_t i) const { return bits_[i]; }
  const std::vector<uint8_t>& bits() const { return bits_; }

  void push_back(uint8_t b) {
    if (b > 1) throw std::invalid_argument("BitString::push_back: bit out of range");
    bits_.push_back(b);
  }
  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  BitString prefix(size_t k) const {
    if (k > bits_.size()) throw std::out_of_range("BitString::prefix");
    return BitString(std::vector<uint8_t>(bits_.begin(), bits_.begin() + k));
  }

  BitString operator^(const BitString& o) const {
    if (o.size() != size()) throw std::invalid_argument("BitString::operator^: length mismatch");
    BitString r = *this;
    for (size_t i = 0; i < r.bits_.size(); ++i) r.bits_[i] ^= o.bits_[i];
    return r;
  }

  bool operator==(const BitString& o) const { return bits_ == o.bits_; }
  bool operator!=(const BitString& o) const { return bits_ != o.bits_; }

  std::string str() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

private:
  std::vector<uint8_t> bits_;
};

// length-then-lex
inline bool canonical_less(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.bits() < b.bits();
}

namespace detail {

// Elias gamma code of v >= 1: floor(log2 v) zeros followed by v in binary.
inline void gamma_append(std::vector<uint8_t>& out, uint64_t v) {
  if (v == 0) throw std::invalid_argument("gamma_append: v must be >= 1");
  int n = 63;
  while (!((v >> n) & 1)) --n;
  for (int i = 0; i < n; ++i) out.push_back(0);
  for (int i = n; i >= 0; --i) out.push_back(uint8_t((v >> i) & 1));
}

inline size_t gamma_length(uint64_t v) {
  if (v == 0) throw std::invalid_argument("gamma_length: v must be >= 1");
  int n = 63;
  while (!((v >> n) & 1)) --n;
  return size_t(2 * n + 1);
}

// Decodes a gamma code starting at bit position pos; advances pos.
// Returns false on malformed input (truncated, or value over 2^32).
inline bool gamma_decode(const uint8_t* bits, size_t len, size_t& pos, uint64_t& v) {
  size_t zeros = 0;
  while (pos < len && bits[pos] == 0) { ++pos; ++zeros; }
  if (pos >= len || zeros > 32) return false;
  if (pos + zeros + 1 > len) return false;
  uint64_t r = 0;
  for (size_t i = 0; i <= zeros; ++i) r = (r << 1) | bits[pos + i];
  pos += zeros + 1;
  v = r;
  return true;
}

}  // namespace detail

// Self-delimiting tuple encoding: each part is gamma(len+1) followed by the
// payload bits. Injective and decodable left to right; the empty tuple maps
// to the empty string. This is also the record format the VM's CPART opcode
// understands.
inline BitString encode_condition(const std::vector<BitString>& parts) {
  std::vector<uint8_t> out;
  for (const auto& p : parts) {
    detail::gamma_append(out, p.size() + 1);
    out.insert(out.end(), p.bits().begin(), p.bits().end());
  }
  return BitString(std::move(out));
}

inline std::vector<BitString> decode_condition(const BitString& s) {
  std::vector<BitString> parts;
  const auto& b = s.bits();
  size_t pos = 0;
  while (pos < b.size()) {
    uint64_t lp;
    if (!detail::gamma_decode(b.data(), b.size(), pos, lp) || lp == 0)
      throw malformed_encoding("decode_condition: bad length prefix");
    size_t len = size_t(lp - 1);
    if (pos + len > b.size()) throw malformed_encoding("decode_condition: truncated payload");
    parts.emplace_back(std::vector<uint8_t>(b.begin() + pos, b.begin() + pos + len));
    pos += len;
  }
  return parts;
}

// Bit offset of part `i`'s payload inside encode_condition(parts).
inline size_t condition_part_offset(const std::vector<BitString>& parts, size_t i) {
  size_t off = 0;
  for (size_t j = 0; j < i; ++j)
    off += detail::gamma_length(parts[j].size() + 1) + parts[j].size();
  return off;
}

namespace detail {

// Compact SHA-256, used for content digests of serialized artifacts.
class Sha256 {
public:
  Sha256() { reset(); }

  void reset() {
    h_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
          0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    total_ = 0;
    buf_len_ = 0;
  }

  void update(const uint8_t* data, size_t len) {
    total_ += len;
    while (len > 0) {
      size_t take = std::min(len, size_t(64) - buf_len_);
      std::memcpy(buf_.data() + buf_len_, data, take);
      buf_len_ += take;
      data += take;
      len -= take;
      if (buf_len_ == 64) {
        compress(buf_.data());
        buf_len_ = 0;
      }
    }
  }

  std::array<uint8_t, 32> finish() {
    uint64_t bits = total_ * 8;
    uint8_t pad = 0x80;
    update(&pad, 1);
    uint8_t zero = 0;
    while (buf_len_ != 56) update(&zero, 1);
    uint8_t lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = uint8_t(bits >> (56 - 8 * i));
    update(lenb, 8);
    std::array<uint8_t, 32> out;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j) out[4 * i + j] = uint8_t(h_[i] >> (24 - 8 * j));
    return out;
  }

private:
  static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void compress(const uint8_t* p) {
    static const uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
             (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3];
    uint32_t e = h_[4], f = h_[5], g = h_[6], h = h_[7];
    for (int i = 0; i < 64; ++i) {
      uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      uint32_t ch = (e & f) ^ (~e & g);
      uint32_t t1 = h + s1 + ch + K[i] + w[i];
      uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      uint32_t t2 = s0 + maj;
      h = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    h_[0] += a; h_[1] += b; h_[2] += c; h_[3] += d;
    h_[4] += e; h_[5] += f; h_[6] += g; h_[7] += h;
  }

  std::array<uint32_t, 8> h_;
  std::array<uint8_t, 64> buf_;
  uint64_t total_ = 0;
  size_t buf_len_ = 0;
};

}  // namespace detail

inline std::string sha256_hex(const uint8_t* data, size_t len) {
  detail::Sha256 ctx;
  ctx.update(data, len);
  auto d = ctx.finish();
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (uint8_t b : d) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 15]);
  }
  return s;
}

inline std::string sha256_hex(const std::string& s) {
  return sha256_hex(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

// Digest of a bit string: hash over "<length>:<bits as 0/1 chars>".
inline std::string digest(const BitString& s) {
  std::string payload = std::to_string(s.size()) + ":" + s.str();
  return sha256_hex(payload);
}

}  // namespace ska
