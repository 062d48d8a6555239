#pragma once

#include <stdexcept>
#include <string>

namespace zpower {

// Precondition violations: bad parameters, out-of-domain arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its tolerance (quadrature, series,
// root scans).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace zpower
