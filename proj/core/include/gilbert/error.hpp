#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gilbert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatch, negative flow, broken tree, ...
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A dual vector was requested for a (near-)zero vector.
class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

class InvalidTopology : public Error {
 public:
  using Error::Error;
};

class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

// Two terminals would have to be merged.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

// Validation outcome carried as a value. An empty optional means "ok".
struct Rejection {
  std::string reason;
};
using Validation = std::optional<Rejection>;

}  // namespace gilbert
