#pragma once

#include <stdexcept>
#include <string>

namespace momentrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violated a domain invariant (ranges, calendar, empty names).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Network/HTTP failure that survived the retry policy.
class TransportError : public Error {
 public:
  using Error::Error;
};

// On-disk artifact is malformed or from an incompatible writer.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace momentrec
