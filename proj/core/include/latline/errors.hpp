#pragma once

#include <stdexcept>
#include <string>

namespace latline {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Vertex index out of range, or an invalid index combination.
class IndexError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// A configuration or parameter invariant does not hold.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Order recovery found no usable anchor vertex (V' or V0 empty).
class EmptyAnchorSetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace latline
