#pragma once

#include <stdexcept>
#include <string>

namespace classfair {

enum class ErrorCode {
  invalid_argument,  // bad parameter values
  unknown_name,      // unknown generator/algorithm/preset/oracle name
  validation,        // instance or matching invariant violated
  non_edge,          // assignment outside the instance's edge set
  agent_saturated,   // assignment to an already-matched agent
  item_assigned,     // item already fully assigned
  cap_exceeded,      // instance too large for a brute-force oracle
  parse,             // malformed input file
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace classfair
