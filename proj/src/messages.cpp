#include "secagg/messages.hpp"

#include <cstring>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
  uint8_t b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

}  // namespace

void append_message(std::vector<uint8_t> &out, const Message &m) {
  out.push_back(static_cast<uint8_t>(m.kind));
  put_u32(out, m.sender);
  put_u32(out, m.receiver);
  put_u32(out, static_cast<uint32_t>(m.payload.size() * 8));
  size_t base = out.size();
  out.resize(base + m.payload.size() * 8);
  for (size_t i = 0; i < m.payload.size(); ++i)
    std::memcpy(out.data() + base + 8 * i, &m.payload[i], 8);
}

size_t parse_message(const std::vector<uint8_t> &buf, size_t off,
                     size_t ordinal, Message *out) {
  auto truncated = [&]() {
    throw ParseError("transcript truncated at message " +
                     std::to_string(ordinal));
  };
  if (buf.size() - off < 13) truncated();
  uint8_t kind = buf[off];
  if (kind < 1 || kind > 9)
    throw ParseError("unknown message kind at message " +
                     std::to_string(ordinal));
  out->kind = static_cast<MsgKind>(kind);
  std::memcpy(&out->sender, buf.data() + off + 1, 4);
  std::memcpy(&out->receiver, buf.data() + off + 5, 4);
  uint32_t plen;
  std::memcpy(&plen, buf.data() + off + 9, 4);
  if (plen % 8 != 0)
    throw ParseError("payload length not word aligned at message " +
                     std::to_string(ordinal));
  if (buf.size() - off - 13 < plen) truncated();
  out->payload.resize(plen / 8);
  for (size_t i = 0; i < out->payload.size(); ++i)
    std::memcpy(&out->payload[i], buf.data() + off + 13 + 8 * i, 8);
  return off + 13 + plen;
}

std::vector<uint8_t> serialize_log(const std::vector<Message> &log) {
  std::vector<uint8_t> out;
  for (const auto &m : log) append_message(out, m);
  return out;
}

std::vector<Message> parse_log(const std::vector<uint8_t> &buf) {
  std::vector<Message> out;
  size_t off = 0;
  while (off < buf.size()) {
    Message m;
    off = parse_message(buf, off, out.size(), &m);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace secagg
