#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of complex-valued functions on
// compact intervals, and iterated double integrals over rectangles with an
// optional split of the inner integral at the diagonal x = y.

#include <functional>
#include <span>
#include <stdexcept>

#include "starkres/common.hpp"

namespace starkres {

struct QuadratureConfig {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_depth = 30;
  int order = 15;  // Kronrod points of the base rule; only 15 is provided
  int max_intervals = 4000;

  /// Throws DomainError on non-positive tolerances, max_depth < 1 or an
  /// unsupported rule order.
  void validate() const;

  QuadratureConfig scaled(double factor) const {
    QuadratureConfig c = *this;
    c.abs_tol *= factor;
    c.rel_tol *= factor;
    return c;
  }
};

struct QuadratureResult {
  cplx value{};
  double error = 0.0;
  long evaluations = 0;
};

/// Adaptive refinement hit max_depth or max_intervals before reaching the
/// tolerance. best() holds the estimate at that point.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best) : std::runtime_error(what), best_(best) {}
  const QuadratureResult& best() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

/// f(xs, out): out[i] = f(xs[i]). Called with 15 nodes at a time.
using BatchIntegrand = std::function<void(std::span<const double>, std::span<cplx>)>;

/// k(x, ys, out): out[i] = K(x, ys[i]).
using BatchKernel = std::function<void(double, std::span<const double>, std::span<cplx>)>;

QuadratureResult integrate_1d(const BatchIntegrand& f, double a, double b, const QuadratureConfig& cfg = {});

/// Pointwise convenience wrapper.
QuadratureResult integrate_1d(const std::function<cplx(double)>& f, double a, double b,
                              const QuadratureConfig& cfg = {});

struct Interval {
  double lo, hi;
};

/// int_X int_Y K(x, y) dy dx. With split_diagonal the inner integral is split
/// at y = x, and the outer one at the endpoints of Y, so a derivative jump on
/// the diagonal does not spoil the high-order rule.
QuadratureResult integrate_2d_kink(const BatchKernel& k, Interval x, Interval y, bool split_diagonal,
                                   const QuadratureConfig& cfg = {});

}  // namespace starkres
