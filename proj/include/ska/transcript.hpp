#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ska/bitstring.hpp"

namespace ska {

class malformed_transcript : public std::runtime_error {
public:
  explicit malformed_transcript(const std::string& what)
      : std::runtime_error("transcript: " + what) {}
};

enum class Sender : uint8_t { Alice = 0, Bob = 1 };

struct Message {
  uint32_t round = 0;
  Sender sender = Sender::Alice;
  BitString payload;

  bool operator==(const Message&) const = default;
};

// The ordered public message log. Its canonical serialization doubles as the
// condition string for adversary-side complexity queries, so it is bit-exact
// and digest-stable: gamma(count+1), then per message gamma(round+1), one
// sender bit, gamma(|payload|+1), payload.
struct Transcript {
  std::vector<Message> messages;

  BitString serialize() const {
    std::vector<uint8_t> out;
    detail::gamma_append(out, messages.size() + 1);
    for (const auto& msg : messages) {
      detail::gamma_append(out, uint64_t(msg.round) + 1);
      out.push_back(uint8_t(msg.sender));
      detail::gamma_append(out, msg.payload.size() + 1);
      out.insert(out.end(), msg.payload.bits().begin(), msg.payload.bits().end());
    }
    return BitString(std::move(out));
  }

  std::string content_digest() const { return digest(serialize()); }

  static Transcript deserialize(const BitString& bits) {
    const auto& b = bits.bits();
    size_t pos = 0;
    uint64_t v;
    if (!detail::gamma_decode(b.data(), b.size(), pos, v) || v == 0)
      throw malformed_transcript("bad message count");
    uint64_t count = v - 1;
    Transcript t;
    for (uint64_t i = 0; i < count; ++i) {
      Message msg;
      if (!detail::gamma_decode(b.data(), b.size(), pos, v) || v == 0)
        throw malformed_transcript("bad round number");
      msg.round = uint32_t(v - 1);
      if (pos >= b.size()) throw malformed_transcript("missing sender bit");
      msg.sender = b[pos++] ? Sender::Bob : Sender::Alice;
      if (!detail::gamma_decode(b.data(), b.size(), pos, v) || v == 0)
        throw malformed_transcript("bad payload length");
      uint64_t len = v - 1;
      if (pos + len > b.size()) throw malformed_transcript("truncated payload");
      msg.payload = BitString(std::vector<uint8_t>(b.begin() + ptrdiff_t(pos),
                                                   b.begin() + ptrdiff_t(pos + len)));
      pos += len;
      t.messages.push_back(std::move(msg));
    }
    if (pos != b.size()) throw malformed_transcript("trailing bits");
    return t;
  }

  // Bob's reply bits, in order; 0*1 on every completed reconciliation.
  BitString bob_control_string() const {
    BitString s;
    for (const auto& msg : messages)
      if (msg.sender == Sender::Bob && msg.payload.size() == 1) s.push_back(msg.payload[0]);
    return s;
  }
};

// Lossless replay of a serialized transcript; a passive observer decoding the
// wire bits sees exactly the live message sequence.
inline std::vector<Message> channel_replay(const Transcript& t) {
  return Transcript::deserialize(t.serialize()).messages;
}

// Transcript file: a small key=value header followed by the canonical bits.
inline void save_transcript(std::ostream& os, const Transcript& t,
                            const std::map<std::string, std::string>& header) {
  os << "ska-transcript v1\n";
  for (const auto& [k, v] : header) os << k << "=" << v << "\n";
  os << "bits=" << t.serialize().str() << "\n";
}

inline Transcript load_transcript(std::istream& is,
                                  std::map<std::string, std::string>* header = nullptr) {
  std::string line;
  std::getline(is, line);
  if (line != "ska-transcript v1") throw malformed_transcript("bad file magic");
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw malformed_transcript("bad header line");
    std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    if (k == "bits") return Transcript::deserialize(BitString::parse(v));
    if (header) (*header)[k] = v;
  }
  throw malformed_transcript("missing bits line");
}

}  // namespace ska
