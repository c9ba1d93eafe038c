#pragma once

#include <stdexcept>
#include <string>

namespace phg {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularArrow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotMetricArrow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotMetricJet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainEscape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse errors carry a character offset into the source text.
struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " (at offset " + std::to_string(at) + ")"), pos(at) {}
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymmetryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phg
