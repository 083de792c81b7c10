#include "starkres/resonances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "starkres/branches.hpp"

namespace starkres {

void ComplexBox::validate() const {
  if (!(re_min < re_max) || !(im_min < im_max)) throw DomainError("box needs re_min < re_max and im_min < im_max");
  if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) || !std::isfinite(im_max))
    throw DomainError("box bounds must be finite");
}

bool ComplexBox::contains(cplx z) const noexcept {
  return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
}

double ComplexBox::diagonal() const noexcept { return std::hypot(re_max - re_min, im_max - im_min); }

bool ComplexBox::inside_sector(double margin) const noexcept {
  for (cplx c : {cplx{re_min, im_min}, cplx{re_max, im_min}, cplx{re_max, im_max}, cplx{re_min, im_max}})
    if (!in_lower_sector(c, margin)) return false;
  return true;
}

namespace {

void check_value(cplx z, cplx v, const WindingConfig& cfg) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RangeError("function is not finite on the contour");
  if (std::abs(v) <= cfg.boundary_threshold) throw BoundaryZeroError("zero on or near the contour", z);
}

// Phase change of d from a to b. A step is accepted only when both halves
// turn by less than pi/4, which also catches most aliasing of fast phases.
double segment_phase(const AnalyticFunction& d, cplx a, cplx fa, cplx b, cplx fb, int depth, const WindingConfig& cfg) {
  const cplx m = 0.5 * (a + b);
  const cplx fm = d(m);
  check_value(m, fm, cfg);
  const double p1 = std::arg(fm / fa), p2 = std::arg(fb / fm);
  if (std::abs(p1) < 0.25 * pi && std::abs(p2) < 0.25 * pi) return p1 + p2;
  if (depth >= cfg.max_bisections) throw RangeError("winding number refinement did not settle");
  return segment_phase(d, a, fa, m, fm, depth + 1, cfg) + segment_phase(d, m, fm, b, fb, depth + 1, cfg);
}

}  // namespace

double indicator_step_hint(double epsilon, cplx zeta) {
  if (!(epsilon > 0.0) || !(zeta.imag() < 0.0)) return INFINITY;
  const cplx kappa = 4.0 * rho_three_halves_lower(zeta) / (3.0 * epsilon);
  if (kappa.real() < -40.0) return INFINITY;
  return 0.25 * pi * epsilon / (2.0 * std::sqrt(std::abs(zeta)));
}

int winding_number(const AnalyticFunction& d, const ComplexBox& box, const WindingConfig& cfg) {
  box.validate();
  if (cfg.points_per_side < 1) throw DomainError("points_per_side must be positive");
  const std::array<cplx, 5> corners{cplx{box.re_min, box.im_min}, cplx{box.re_max, box.im_min},
                                    cplx{box.re_max, box.im_max}, cplx{box.re_min, box.im_max},
                                    cplx{box.re_min, box.im_min}};
  double total = 0.0;
  cplx prev = corners[0];
  cplx fprev = d(prev);
  check_value(prev, fprev, cfg);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e], b = corners[e + 1];
    const double len = std::abs(b - a);
    const double uniform = len / cfg.points_per_side;
    double t = 0.0;
    while (t < len) {
      double h = uniform;
      if (cfg.step_hint) h = std::min(h, std::max(cfg.step_hint(prev), 1e-9 * len));
      t += h;
      // Snap to the corner so that adjacent boxes share it exactly.
      const bool last = t >= len * (1.0 - 1e-12);
      const cplx z = last ? b : a + (b - a) * (t / len);
      if (last) t = len;
      const cplx fz = d(z);
      check_value(z, fz, cfg);
      total += segment_phase(d, prev, fprev, z, fz, 0, cfg);
      prev = z;
      fprev = fz;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

MullerResult muller(const AnalyticFunction& d, cplx z0, cplx z1, cplx z2, double ftol, int max_iter) {
  MullerResult r;
  cplx f0, f1, f2;
  try {
    f0 = d(z0);
    f1 = d(z1);
    f2 = d(z2);
  } catch (const std::exception&) {
    r.zeta = z2;
    return r;
  }
  r.zeta = z2;
  r.value = f2;
  for (int it = 0; it < max_iter; ++it) {
    r.iterations = it + 1;
    if (std::abs(f2) <= ftol) {
      r.converged = true;
      break;
    }
    const cplx h1 = z1 - z0, h2 = z2 - z1;
    const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cplx a = (d2 - d1) / (h2 + h1);
    const cplx b = a * h2 + d2;
    r.derivative = std::abs(b);
    const cplx disc = std::sqrt(b * b - 4.0 * a * f2);
    const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    const cplx dz = den == cplx{} ? cplx{1e-3 * (1.0 + std::abs(z2)), 0.0} : -2.0 * f2 / den;
    if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) break;
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = f2;
    z2 = z2 + dz;
    try {
      f2 = d(z2);
    } catch (const std::exception&) {
      r.zeta = z2;
      r.converged = false;
      return r;
    }
    r.zeta = z2;
    r.value = f2;
    if (std::abs(dz) <= 1e-14 * std::max(1.0, std::abs(z2))) {
      r.converged = true;
      break;
    }
  }
  if (std::abs(r.value) <= ftol) r.converged = true;
  return r;
}

namespace {

struct BudgetExhausted {};

// Memoised D with an evaluation budget.
class CountedFunction {
 public:
  CountedFunction(const AnalyticFunction& d, long budget) : d_(d), budget_(budget) {}

  cplx operator()(cplx z) {
    const auto key = std::make_pair(z.real(), z.imag());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (count_ >= budget_) throw BudgetExhausted{};
    ++count_;
    const cplx v = d_(z);
    cache_.emplace(key, v);
    return v;
  }

  long count() const noexcept { return count_; }

 private:
  const AnalyticFunction& d_;
  long budget_;
  long count_ = 0;
  std::map<std::pair<double, double>, cplx> cache_;
};

// Four children of a box split at fractions (fx, fy).
std::array<ComplexBox, 4> quadrants(const ComplexBox& b, double fx, double fy) {
  const double xm = b.re_min + fx * (b.re_max - b.re_min);
  const double ym = b.im_min + fy * (b.im_max - b.im_min);
  return {ComplexBox{b.re_min, xm, b.im_min, ym}, ComplexBox{xm, b.re_max, b.im_min, ym},
          ComplexBox{b.re_min, xm, ym, b.im_max}, ComplexBox{xm, b.re_max, ym, b.im_max}};
}

ComplexBox enlarged(const ComplexBox& b, double f) {
  const double dx = f * (b.re_max - b.re_min), dy = f * (b.im_max - b.im_min);
  return {b.re_min - dx, b.re_max + dx, b.im_min - dy, b.im_max + dy};
}

}  // namespace

FindResult find_zeros(const AnalyticFunction& d, const ComplexBox& box, const FindConfig& cfg, double epsilon) {
  box.validate();
  if (!(cfg.tol > 0.0)) throw DomainError("find tolerance must be positive");
  FindResult out;
  CountedFunction f(d, cfg.max_evaluations);
  const AnalyticFunction fd = [&f](cplx z) { return f(z); };

  std::vector<std::pair<ComplexBox, int>> work;
  try {
    out.total_winding = winding_number(fd, box, cfg.winding);
    if (out.total_winding > 0) work.emplace_back(box, out.total_winding);
    constexpr std::array<double, 4> kShifts{0.5, 0.5731, 0.4387, 0.6379};
    while (!work.empty()) {
      const auto [b, n] = work.back();
      work.pop_back();
      const double diam = b.diagonal();

      if (n == 1 && diam <= cfg.coarse_diameter) {
        const cplx c = b.centre();
        const double w = 0.1 * (b.re_max - b.re_min), h = 0.1 * (b.im_max - b.im_min);
        const MullerResult m = muller(fd, c - w, c + cplx{0.0, h}, c, cfg.tol);
        if (m.converged && enlarged(b, 0.05).contains(m.zeta)) {
          out.zeros.push_back({epsilon, m.zeta, std::abs(m.value), 1, m.derivative});
          out.isolating.push_back(b);
          continue;
        }
      }
      // Cluster or multiple zero that the box can no longer separate.
      const auto accept_cluster = [&] {
        const MullerResult m = muller(fd, b.centre() - 0.1 * diam, b.centre() + cplx{0.0, 0.1 * diam}, b.centre(),
                                      cfg.tol);
        const cplx z = b.contains(m.zeta) ? m.zeta : b.centre();
        out.zeros.push_back({epsilon, z, std::abs(fd(z)), n, m.derivative});
        out.isolating.push_back(b);
      };
      if (diam <= cfg.min_diameter) {
        accept_cluster();
        continue;
      }

      bool split = false, only_boundary = true;
      for (double s : kShifts) {
        const auto kids = quadrants(b, s, 1.0 - s);
        std::array<int, 4> wn{};
        int sum = 0;
        try {
          for (int k = 0; k < 4; ++k) sum += (wn[k] = winding_number(fd, kids[k], cfg.winding));
        } catch (const BoundaryZeroError&) {
          continue;
        }
        only_boundary = false;
        if (sum != n) continue;
        for (int k = 0; k < 4; ++k)
          if (wn[k] > 0) work.emplace_back(kids[k], wn[k]);
        split = true;
        break;
      }
      if (!split && only_boundary && n > 1 && diam <= cfg.coarse_diameter) {
        // |D| is below the boundary threshold on every cut: a multiple zero
        // flattens D faster than the boxes shrink.
        accept_cluster();
        continue;
      }
      if (!split) throw RangeError("could not split a search box without cutting through a zero");
    }
  } catch (const BudgetExhausted&) {
    out.budget_exhausted = true;
  }
  out.evaluations = f.count();

  // Merge duplicates, keeping the smaller residual.
  std::vector<std::size_t> order(out.zeros.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const cplx za = out.zeros[a].zeta, zb = out.zeros[b].zeta;
    return za.real() != zb.real() ? za.real() < zb.real() : za.imag() < zb.imag();
  });
  std::vector<Resonance> zeros;
  std::vector<ComplexBox> boxes;
  for (std::size_t i : order) {
    bool dup = false;
    for (std::size_t j = 0; j < zeros.size(); ++j) {
      if (std::abs(zeros[j].zeta - out.zeros[i].zeta) <= 10.0 * cfg.tol) {
        if (out.zeros[i].residual < zeros[j].residual) zeros[j] = out.zeros[i];
        dup = true;
      }
    }
    if (!dup) {
      zeros.push_back(out.zeros[i]);
      boxes.push_back(out.isolating[i]);
    }
  }
  out.zeros = std::move(zeros);
  out.isolating = std::move(boxes);
  return out;
}

FindResult find_resonances(double epsilon, const PerturbationSpec& spec, const ComplexBox& box, const FindConfig& cfg,
                           const QuadratureConfig& qcfg) {
  box.validate();
  if (epsilon < 0.0) throw DomainError("field strength must be non-negative");
  if (epsilon == 0.0 && !(box.im_max < 0.0)) throw DomainError("search box must lie in the lower half-plane");
  if (epsilon > 0.0 && !box.inside_sector()) throw DomainError("search box must lie inside the sector -pi/3 < arg < 0");
  FindConfig c = cfg;
  if (epsilon > 0.0 && !c.winding.step_hint) c.winding.step_hint = [epsilon](cplx z) { return indicator_step_hint(epsilon, z); };
  return find_zeros([&](cplx z) { return resonance_indicator(epsilon, z, spec, qcfg); }, box, c, epsilon);
}

const char* status_name(TrajectoryStatus s) noexcept {
  switch (s) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::EscapedBox: return "escaped-box";
    case TrajectoryStatus::ApproachedRealAxis: return "approached-real-axis";
    case TrajectoryStatus::StepFailure: return "step-failure";
  }
  return "unknown";
}

namespace {

// Exactly one zero of D(eps, .) within a box of half-width r around z.
bool unique_zero_near(const AnalyticFunction& d, cplx z, double r, const WindingConfig& cfg) {
  const double top = -0.5 * std::abs(z.imag());
  for (int attempt = 0; attempt < 3; ++attempt) {
    const ComplexBox b{z.real() - r, z.real() + r, z.imag() - r, std::min(z.imag() + r, top)};
    try {
      return winding_number(d, b, cfg) == 1;
    } catch (const BoundaryZeroError&) {
      r *= 1.13;
    } catch (const std::exception&) {
      return false;
    }
  }
  return false;
}

// d zeta / d eps along the zero set, -D_eps / D_zeta by central differences.
cplx zero_tangent(const IndicatorFamily& family, double eps, cplx z) {
  const double he = 1e-5 * eps;
  const double hz = 1e-6 * std::max(1.0, std::abs(z));
  const cplx d_eps = (family(eps + he, z) - family(eps - he, z)) / (2.0 * he);
  const cplx d_z = (family(eps, z + hz) - family(eps, z - hz)) / (2.0 * hz);
  if (d_z == cplx{}) return {};
  return -d_eps / d_z;
}

}  // namespace

Trajectory track_trajectory(const IndicatorFamily& family, const Resonance& seed, const ComplexBox& box,
                            const TrackConfig& cfg) {
  box.validate();
  if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0)) throw DomainError("schedule ratio must lie in (0, 1)");
  if (!(cfg.eps_end > 0.0) || !(seed.epsilon > cfg.eps_end)) throw DomainError("need eps_start > eps_end > 0");
  const double seed_residual = std::abs(family(seed.epsilon, seed.zeta));
  if (!(seed_residual <= std::max(1e3 * cfg.ftol, 1e-8)))
    throw DomainError("seed is not a zero of the indicator at eps_start");
  const double step_cap = cfg.step_cap > 0.0 ? cfg.step_cap : 0.2 * box.diagonal();

  Trajectory t;
  t.points.push_back({seed.epsilon, seed.zeta, seed_residual});
  double eps = seed.epsilon;
  double grid = seed.epsilon;  // last scheduled value reached
  double ratio = cfg.ratio;
  int retries = 0;

  while (eps > cfg.eps_end * (1.0 + 1e-12)) {
    const double target = std::max(grid * cfg.ratio, cfg.eps_end);
    const double trial = std::max(target, eps * ratio);
    const cplx z = t.points.back().zeta;
    const double de = trial - eps;
    cplx pred = z;
    try {
      pred = z + zero_tangent(family, eps, z) * de;
    } catch (const std::exception&) {
    }
    const AnalyticFunction d = [&](cplx w) { return family(trial, w); };
    const double delta = 1e-4 * std::max(1.0, std::abs(pred));
    const MullerResult m = muller(d, pred + delta, pred - cplx{0.0, delta}, pred, cfg.ftol);

    // The corrector must stay close to the tangent prediction, and no other
    // zero may lie within twice the correction of the new point.
    WindingConfig wc = cfg.winding;
    if (cfg.step_hint) wc.step_hint = [&cfg, trial](cplx w) { return cfg.step_hint(trial, w); };
    const double scale = std::max(1.0, std::abs(z));
    const double corr = std::abs(m.zeta - pred);
    const bool ok = m.converged && m.zeta.imag() < 0.0 && std::abs(m.zeta - z) <= step_cap &&
                    corr <= 0.25 * std::abs(pred - z) + 1e-4 * scale * (-de / eps) &&
                    unique_zero_near(d, m.zeta, std::max(2.0 * corr, 1e-4 * scale), wc);
    if (!ok) {
      ratio = std::sqrt(ratio);
      if (++retries > cfg.max_retries) {
        t.status = TrajectoryStatus::StepFailure;
        t.message = "continuation step rejected after " + std::to_string(cfg.max_retries) + " ratio reductions";
        return t;
      }
      continue;
    }

    t.points.push_back({trial, m.zeta, std::abs(m.value)});
    eps = trial;
    retries = 0;
    if (trial == target) {
      grid = target;
      ratio = cfg.ratio;
    }
    if (m.zeta.imag() > -cfg.real_axis_tol) {
      t.status = TrajectoryStatus::ApproachedRealAxis;
      char buf[64];
      std::snprintf(buf, sizeof buf, "imaginary part above -%g", cfg.real_axis_tol);
      t.message = buf;
      return t;
    }
    if (!box.contains(m.zeta)) {
      t.status = TrajectoryStatus::EscapedBox;
      t.message = "left the tracking box";
      return t;
    }
  }
  t.status = TrajectoryStatus::Completed;
  return t;
}

Trajectory track_trajectory(const PerturbationSpec& spec, const Resonance& seed, const ComplexBox& box,
                            const TrackConfig& cfg, const QuadratureConfig& qcfg) {
  if (spec.empty()) throw DomainError("an empty perturbation has no resonances to track");
  TrackConfig c = cfg;
  if (!c.step_hint) c.step_hint = indicator_step_hint;
  return track_trajectory([&](double eps, cplx z) { return resonance_indicator(eps, z, spec, qcfg); }, seed, box, c);
}

Verdict classify_limit(cplx zeta0, double extrapolation_error, const PerturbationSpec& spec, const LimitConfig& cfg,
                       const QuadratureConfig& qcfg) {
  Verdict v;
  v.status = "converged-interior";
  v.converged = true;
  v.zeta0 = zeta0;
  v.extrapolation_error = extrapolation_error;
  const cplx k = principal_sqrt(zeta0);
  v.hats_small = true;
  for (const auto& e : spec.entries()) {
    v.hats.push_back(std::abs(e.profile.fourier_hat(k)));
    v.hats_small = v.hats_small && v.hats.back() <= cfg.hat_tol;
  }
  v.det_gtilde0 = det_gtilde_plus(0.0, zeta0, spec, qcfg);
  v.zeta0_not_resonance = std::abs(*v.det_gtilde0) >= cfg.res_margin;
  try {
    const CMatrix s = s_inverse(0.0, zeta0, spec, qcfg).entries();
    // Unit diagonal and vanishing upper corner, to the accuracy the hats allow.
    const double diag_tol = std::sqrt(cfg.hat_tol);
    v.s0inv_triangular = std::abs(s(0, 1)) <= cfg.hat_tol && std::abs(s(0, 0) - 1.0) <= diag_tol &&
                         std::abs(s(1, 1) - 1.0) <= diag_tol;
  } catch (const SingularMatrixError&) {
    v.s0inv_triangular = false;
  }
  v.consistent_with_theorem = v.hats_small && v.zeta0_not_resonance;
  if (v.consistent_with_theorem)
    v.message = "interior limit with vanishing transforms; not a field-free resonance";
  else if (!v.zeta0_not_resonance)
    v.message = "theorem-violating: the limit is a resonance of the field-free operator";
  else
    v.message = "interior limit that is not a field-free resonance, but transforms do not vanish there";
  return v;
}

Verdict limit_analysis(const Trajectory& t, const PerturbationSpec& spec, const LimitConfig& cfg,
                       const QuadratureConfig& qcfg) {
  if (t.points.empty()) throw DomainError("limit analysis needs a non-empty trajectory");
  Verdict v;
  if (t.status != TrajectoryStatus::Completed) {
    v.status = status_name(t.status);
    v.message = "no interior limit; theorem vacuously satisfied";
    return v;
  }
  if (t.points.size() < 3) throw DomainError("limit analysis of a completed trajectory needs at least three points");
  v.status = "inconclusive";
  const auto& p = t.points;
  const std::size_t n = p.size();
  const std::size_t need = static_cast<std::size_t>(cfg.min_tail_steps) + 2;
  if (n < need) {
    v.message = "too few points for a tail analysis";
    return v;
  }
  // Per-halving contraction factors of consecutive increments over the tail.
  double worst = 0.0;
  bool cauchy = true;
  for (std::size_t j = n - need; j + 2 < n; ++j) {
    const double d0 = std::abs(p[j + 1].zeta - p[j].zeta);
    const double d1 = std::abs(p[j + 2].zeta - p[j + 1].zeta);
    if (d1 <= cfg.converged_increment) continue;
    const double halvings = std::log2(p[j + 1].epsilon / p[j + 2].epsilon);
    const double q = d0 > 0.0 ? std::pow(d1 / d0, 1.0 / halvings) : INFINITY;
    worst = std::max(worst, q);
    if (!(q <= cfg.cauchy_factor)) cauchy = false;
  }
  if (!cauchy) {
    v.message = "tail increments are not Cauchy-decreasing; no limit identified";
    return v;
  }
  const cplx last = p[n - 1].zeta, prev = p[n - 2].zeta;
  const double dlast = std::abs(last - prev);
  const double s = std::pow(worst, std::log2(p[n - 2].epsilon / p[n - 1].epsilon));
  const cplx zeta0 = s > 0.0 ? last + (last - prev) * (s / (1.0 - s)) : last;
  const double err = s > 0.0 ? dlast * s / (1.0 - s) : dlast;
  v.zeta0 = zeta0;
  v.extrapolation_error = err;
  if (err > cfg.max_extrapolation_error) {
    v.message = "extrapolation error above threshold";
    return v;
  }
  if (!in_lower_sector(zeta0, cfg.sector_margin)) {
    v.message = "limit candidate within the margin of the sector boundary";
    return v;
  }
  return classify_limit(zeta0, err, spec, cfg, qcfg);
}

NullVector null_vector(const CMatrix& g) {
  const Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeFullV);
  const CVector u = svd.matrixV().col(g.cols() - 1);
  return {u, (g * u).norm() / u.norm()};
}

}  // namespace starkres
