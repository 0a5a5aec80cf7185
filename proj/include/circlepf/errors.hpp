#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace circlepf {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Case-file text could not be read as the supported MATPOWER subset.
class ParseError : public Error {
  public:
    using Error::Error;
};

// Case parsed but violates a structural invariant (slack count, dangling branch, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// A non-slack bus has no admittance to anything, so neither power curve exists.
class DegenerateDiagonal : public Error {
  public:
    DegenerateDiagonal(std::size_t bus, const std::string& what)
        : Error(what), bus_(bus) {}
    std::size_t bus() const noexcept { return bus_; }

  private:
    std::size_t bus_;
};

class NotACircle : public Error {
  public:
    using Error::Error;
};

class CoincidentCircles : public Error {
  public:
    using Error::Error;
};

class CoincidentCenters : public Error {
  public:
    using Error::Error;
};

class NoSolution : public Error {
  public:
    using Error::Error;
};

// The active and reactive curves of a PQ bus share no point.
class NonIntersecting : public Error {
  public:
    NonIntersecting(std::size_t bus, const std::string& what)
        : Error(what), bus_(bus) {}
    std::size_t bus() const noexcept { return bus_; }

  private:
    std::size_t bus_;
};

}  // namespace circlepf
