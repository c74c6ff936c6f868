#pragma once

#include <stdexcept>
#include <string>

namespace dcf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain where a formula is defined.
class DomainError : public Error
{
public:
  using Error::Error;
};

/// A (modulation, channel) pair that has no BER expression.
class UnsupportedCombination : public Error
{
public:
  using Error::Error;
};

/// A threshold is never crossed inside the search bracket.
class NoCrossingError : public Error
{
public:
  using Error::Error;
};

/// The fixed-point iteration did not converge.
class DivergenceError : public Error
{
public:
  DivergenceError(const std::string &what, double residual)
    : Error(what), m_residual(residual)
  {
  }
  double residual() const noexcept { return m_residual; }

private:
  double m_residual;
};

/// NaN or out-of-range intermediate value.
class NumericalError : public Error
{
public:
  using Error::Error;
};

/// Scenario file or command-line parse failure. line is 1-based, 0 if unknown.
class ParseError : public Error
{
public:
  ParseError(const std::string &what, int line = 0)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      m_line(line)
  {
  }
  int line() const noexcept { return m_line; }

private:
  int m_line;
};

} // namespace dcf
