#include "starkres/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace starkres {

namespace {

// Kronrod 15-point abscissae (descending, last one is the centre) and weights;
// the 7-point Gauss rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  cplx value;
  double error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const BatchIntegrand& f, double lo, double hi, int depth) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  std::array<double, 15> x;
  for (int j = 0; j < 7; ++j) {
    x[2 * j] = c - h * kXgk[j];
    x[2 * j + 1] = c + h * kXgk[j];
  }
  x[14] = c;
  std::array<cplx, 15> fx;
  f(x, fx);

  const cplx fc = fx[14];
  cplx resk = fc * kWgk[7];
  cplx resg = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const cplx s = fx[2 * j] + fx[2 * j + 1];
    resk += s * kWgk[j];
    resabs += (std::abs(fx[2 * j]) + std::abs(fx[2 * j + 1])) * kWgk[j];
    if (j % 2 == 1) resg += s * kWg[j / 2];
  }
  const cplx mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fx[2 * j] - mean) + std::abs(fx[2 * j + 1] - mean));

  const double ah = std::abs(h);
  resk *= h;
  resg *= h;
  resabs *= ah;
  resasc *= ah;
  for (const cplx& v : fx)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("integrand is not finite on the interval");

  // QUADPACK error heuristic applied to the complex difference.
  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {lo, hi, resk, err, depth};
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (max_depth < 1) throw DomainError("quadrature max_depth must be at least 1");
  if (order != 15) throw DomainError("only the 15-point Kronrod rule is provided");
  if (max_intervals < 1) throw DomainError("quadrature max_intervals must be positive");
}

QuadratureResult integrate_1d(const BatchIntegrand& f, double a, double b, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integration limits must be finite");
  if (a == b) return {};

  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b, 0));
  cplx total = heap.top().value;
  double err = heap.top().error;
  long evals = 15;
  // Panels that can no longer be split; kept out of the heap.
  cplx frozen_value = 0.0;
  double frozen_error = 0.0;

  while (true) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    if (err <= tol) break;
    if (heap.empty() || static_cast<int>(heap.size()) >= cfg.max_intervals) {
      throw QuadratureError("quadrature did not converge (max depth or interval budget reached)",
                            {total, err, evals});
    }
    const Panel p = heap.top();
    heap.pop();
    if (p.depth >= cfg.max_depth) {
      frozen_value += p.value;
      frozen_error += p.error;
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    const Panel l = gk15(f, p.lo, mid, p.depth + 1);
    const Panel r = gk15(f, mid, p.hi, p.depth + 1);
    evals += 30;
    heap.push(l);
    heap.push(r);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
  }

  // Final sum over the leaves for a clean value.
  cplx value = frozen_value;
  double error = frozen_error;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, evals};
}

QuadratureResult integrate_1d(const std::function<cplx(double)>& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate_1d(
      [&f](std::span<const double> x, std::span<cplx> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
      },
      a, b, cfg);
}

QuadratureResult integrate_2d_kink(const BatchKernel& k, Interval x, Interval y, bool split_diagonal,
                                   const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(x.hi >= x.lo) || !(y.hi >= y.lo)) throw DomainError("integration rectangle is inverted");
  if (x.lo == x.hi || y.lo == y.hi) return {};

  // Inner integrals carry a tighter tolerance so that their errors do not
  // dominate the outer estimate.
  QuadratureConfig inner = cfg.scaled(0.1);
  inner.abs_tol /= std::max(1.0, x.hi - x.lo);
  long inner_evals = 0;
  double inner_err_max = 0.0;

  auto inner_integral = [&](double xv) -> cplx {
    std::vector<double> cuts{y.lo};
    if (split_diagonal && xv > y.lo && xv < y.hi) cuts.push_back(xv);
    cuts.push_back(y.hi);
    cplx sum = 0.0;
    double err = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const QuadratureResult r = integrate_1d(
          [&](std::span<const double> ys, std::span<cplx> out) { k(xv, ys, out); }, cuts[s], cuts[s + 1], inner);
      sum += r.value;
      err += r.error;
      inner_evals += r.evaluations;
    }
    inner_err_max = std::max(inner_err_max, err);
    return sum;
  };

  std::vector<double> cuts{x.lo};
  if (split_diagonal) {
    for (double e : {y.lo, y.hi})
      if (e > x.lo && e < x.hi) cuts.push_back(e);
    std::sort(cuts.begin() + 1, cuts.end());
  }
  cuts.push_back(x.hi);

  QuadratureResult total;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const QuadratureResult r = integrate_1d(
        [&](std::span<const double> xs, std::span<cplx> out) {
          for (std::size_t i = 0; i < xs.size(); ++i) out[i] = inner_integral(xs[i]);
        },
        cuts[s], cuts[s + 1], cfg);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
  }
  total.error += inner_err_max * (x.hi - x.lo);
  total.evaluations += inner_evals;
  return total;
}

}  // namespace starkres
