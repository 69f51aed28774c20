#pragma once

#include <stdexcept>
#include <string>

namespace qmono {

/// Input lies outside the domain of a monopole formula (origin, segment
/// through the origin, origin on a flux surface).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an API contract (mismatched lattices, non-commensurate
/// shift, bad configuration).
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qmono
