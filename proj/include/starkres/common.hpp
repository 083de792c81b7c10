#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace starkres {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Argument outside the domain of a branch-sensitive function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value that cannot be represented as a plain double (use the scaled path).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Matrix that should be inverted is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace starkres
