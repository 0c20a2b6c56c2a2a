#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

/// Argument outside the mathematical domain of an operation (q outside (0,1), k > n, ...).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Malformed input data: NaN entries, inconsistent lengths.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A mechanism, model or run configuration that cannot be honoured.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, divergent integrals, degenerate fits.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Output that cannot be written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppm
