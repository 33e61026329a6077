#pragma once

#include <stdexcept>
#include <string>

namespace secagg {

struct Error : std::runtime_error {
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// real value does not fit the fixed-point range |x * 2^f| < p/2
struct EncodingError : Error {
  using Error::Error;
};

// caller passed parameters outside the documented domain
struct ParamError : Error {
  using Error::Error;
};

// dealer randomness exhausted or session misconfigured
struct SetupError : Error {
  using Error::Error;
};

// peer sent an invalid or identity group element
struct InvalidKeyError : Error {
  using Error::Error;
};

// share list malformed: duplicate indices, zero index, mixed thresholds
struct MalformedSharesError : Error {
  using Error::Error;
};

// protocol cannot complete and has to abort
struct ProtocolError : Error {
  using Error::Error;
};

// fewer live shares than the reconstruction threshold; names the client
struct InsufficientSharesError : ProtocolError {
  InsufficientSharesError(const std::string &msg, uint32_t client)
      : ProtocolError(msg), client_id(client) {}
  uint32_t client_id;
};

// config or dataset file rejected; carries a line number when known
struct ParseError : Error {
  explicit ParseError(const std::string &msg, int line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_no(line) {}
  int line_no;
};

// training produced a non-finite update
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace secagg
