#pragma once

#include <string>

#include "boxtune/oracle.hpp"

namespace boxtune {

/// Raised when a wire document cannot be parsed into a valid request/response.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request document: {"version":1,"prompts":[[real]],"batch":[{"tokens":[int],
/// "mask":int,"label":int}],"id":uint}. Single line, no embedded newlines;
/// reals round-trip exactly.
std::string request_to_wire(const OracleRequest& request);
OracleRequest request_from_wire(const std::string& body);

/// Response document: {"probs":[[real]],"loss":real,"calls":int}.
std::string response_to_wire(const OracleResponse& response);
OracleResponse response_from_wire(const std::string& body);

}  // namespace boxtune
