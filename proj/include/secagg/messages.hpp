#pragma once

#include <cstdint>
#include <vector>

namespace secagg {

// wire format, also the unit of transcript logging:
//   kind byte | sender u32 | receiver u32 | payload byte length u32 |
//   payload as little-endian u64 words
// party 0 is the server.
enum class MsgKind : uint8_t {
  pubkey = 1,
  shares = 2,
  masked = 3,
  sample = 4,
  proof = 5,
  verdict = 6,
  share_request = 7,
  share_response = 8,
  aggregate = 9,
};

struct Message {
  MsgKind kind = MsgKind::pubkey;
  uint32_t sender = 0;
  uint32_t receiver = 0;
  std::vector<uint64_t> payload;

  bool operator==(const Message &o) const = default;
};

void append_message(std::vector<uint8_t> &out, const Message &m);

// parse the message starting at off; returns the offset past it.
// Throws ParseError naming the message ordinal on truncation.
size_t parse_message(const std::vector<uint8_t> &buf, size_t off,
                     size_t ordinal, Message *out);

std::vector<uint8_t> serialize_log(const std::vector<Message> &log);
std::vector<Message> parse_log(const std::vector<uint8_t> &buf);

}  // namespace secagg
