#pragma once

#include <stdexcept>
#include <string>

namespace pa3c {

// Invalid generation / run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Game-loop misuse, e.g. stepping a level that already terminated.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MalformedFrame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or alignment mismatch at a numeric API boundary.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pa3c
