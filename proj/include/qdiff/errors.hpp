#pragma once

#include <stdexcept>
#include <string>

namespace qdiff {

/// A value outside the domain of a probability or profit formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration the model deliberately does not cover (e.g. joint price
/// optimization for a heterogeneous population).
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when no (quality, count) pair yields a positive spam profit.
class NoProfitableSpam : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdiff
