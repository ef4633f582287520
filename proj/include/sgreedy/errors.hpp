#pragma once

#include <stdexcept>
#include <string>

namespace sgreedy {

/// Input violates an operation's precondition (bad dimension, bad parameter,
/// theorem hypothesis not met).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A bounded resource ran out: subset enumeration cap, generator attempts.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sgreedy
