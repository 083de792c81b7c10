#include "starkres/airy.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <vector>

#include "airy/kernels.hpp"
#include "starkres/branches.hpp"

namespace starkres::airy {

namespace {

const cplx kRotPlus = std::polar(1.0, 2.0 * pi / 3.0);    // e^{2 pi i/3}
const cplx kRotMinus = std::polar(1.0, -2.0 * pi / 3.0);  // e^{-2 pi i/3}
const double kInvTwoSqrtPi = 0.5 / std::sqrt(pi);

std::atomic<std::size_t> g_overlap_warnings{0};
std::mutex g_handler_mutex;
std::function<void(cplx, double)> g_overlap_handler;

void report_overlap(cplx z, double rel) {
  g_overlap_warnings.fetch_add(1, std::memory_order_relaxed);
  std::lock_guard<std::mutex> lock(g_handler_mutex);
  if (g_overlap_handler) g_overlap_handler(z, rel);
}

// Large-argument evaluation request for a point with |arg z| <= 2pi/3.
struct AsymptoticJob {
  cplx z;
  cplx xi;
  cplx z14;  // z^{1/4}
};

AsymptoticJob make_job(cplx z) {
  const cplx s = std::sqrt(z);
  return {z, (2.0 / 3.0) * z * s, std::sqrt(s)};
}

AiryPair finish_job(const AsymptoticJob& j, cplx su, cplx sv) {
  const cplx minus_xi = -j.xi;
  return {Scaled::from_exp(minus_xi, kInvTwoSqrtPi * su / j.z14),
          Scaled::from_exp(minus_xi, -kInvTwoSqrtPi * j.z14 * sv)};
}

// Scratch buffers reused across calls on the same thread.
struct Scratch {
  std::vector<double> in_r, in_i, o0, o1, o2, o3;
  std::vector<std::size_t> series_idx;
  std::vector<AsymptoticJob> jobs;
  std::vector<std::size_t> job_owner;
  std::vector<int> job_slot;  // 0 direct, 1 rotated by e^{-2pi i/3}, 2 by e^{2pi i/3}

  void resize_io(std::size_t n) {
    in_r.resize(n);
    in_i.resize(n);
    o0.resize(n);
    o1.resize(n);
    o2.resize(n);
    o3.resize(n);
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

double u_coefficient(int k) {
  if (k < 0 || k > kernels::kMaxAsymptoticTerms) throw DomainError("u_coefficient: index out of range");
  return kernels::asymptotic_table().u[k];
}

int max_asymptotic_terms() { return kernels::kMaxAsymptoticTerms; }

void ai_batch(std::span<const cplx> z, std::span<AiryPair> out) {
  if (out.size() < z.size()) throw DomainError("ai_batch: output span too short");
  const auto& kern = kernels::active();
  Scratch& s = scratch();
  const std::size_t n = z.size();

  s.series_idx.clear();
  s.jobs.clear();
  s.job_owner.clear();
  s.job_slot.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(z[i]);
    if (!std::isfinite(r)) throw DomainError("ai_batch: non-finite argument");
    if (r <= kOverlapRadius) s.series_idx.push_back(i);
    if (r > kSeriesRadius) {
      if (std::abs(std::arg(z[i])) <= 2.0 * pi / 3.0) {
        s.jobs.push_back(make_job(z[i]));
        s.job_owner.push_back(i);
        s.job_slot.push_back(0);
      } else {
        s.jobs.push_back(make_job(z[i] * kRotMinus));
        s.job_owner.push_back(i);
        s.job_slot.push_back(1);
        s.jobs.push_back(make_job(z[i] * kRotPlus));
        s.job_owner.push_back(i);
        s.job_slot.push_back(2);
      }
    }
  }

  // Series points.
  const std::size_t ns = s.series_idx.size();
  s.resize_io(std::max(ns, s.jobs.size()));
  for (std::size_t j = 0; j < ns; ++j) {
    s.in_r[j] = z[s.series_idx[j]].real();
    s.in_i[j] = z[s.series_idx[j]].imag();
  }
  if (ns > 0) kern.maclaurin(s.in_r.data(), s.in_i.data(), ns, s.o0.data(), s.o1.data(), s.o2.data(), s.o3.data());
  for (std::size_t j = 0; j < ns; ++j) {
    const std::size_t i = s.series_idx[j];
    out[i] = {Scaled{{s.o0[j], s.o1[j]}}, Scaled{{s.o2[j], s.o3[j]}}};
  }
  // Remember the series values of overlap points before they are overwritten.
  std::vector<std::pair<std::size_t, cplx>> overlap;
  for (std::size_t j = 0; j < ns; ++j) {
    const std::size_t i = s.series_idx[j];
    if (std::abs(z[i]) > kSeriesRadius) overlap.emplace_back(i, cplx{s.o0[j], s.o1[j]});
  }

  // Asymptotic points.
  const std::size_t na = s.jobs.size();
  for (std::size_t j = 0; j < na; ++j) {
    const cplx t = -1.0 / s.jobs[j].xi;
    s.in_r[j] = t.real();
    s.in_i[j] = t.imag();
  }
  if (na > 0) kern.asymptotic(s.in_r.data(), s.in_i.data(), na, s.o0.data(), s.o1.data(), s.o2.data(), s.o3.data());

  std::vector<double> envelope;
  if (!overlap.empty()) envelope.assign(n, 0.0);
  for (std::size_t j = 0; j < na; ++j) {
    const std::size_t i = s.job_owner[j];
    AiryPair p = finish_job(s.jobs[j], {s.o0[j], s.o1[j]}, {s.o2[j], s.o3[j]});
    switch (s.job_slot[j]) {
      case 0:
        out[i] = p;
        break;
      case 1:  // first half of the connection formula
        out[i] = {p.ai * (-kRotMinus), p.dai * (-kRotMinus * kRotMinus)};
        break;
      case 2:
        out[i] = {out[i].ai + p.ai * (-kRotPlus), out[i].dai + p.dai * (-kRotPlus * kRotPlus)};
        break;
    }
    if (!envelope.empty()) envelope[i] += std::exp(p.ai.log_abs());
  }

  for (const auto& [i, series_ai] : overlap) {
    const double env = envelope[i];
    const double rel = std::abs(out[i].ai.value() - series_ai) / env;
    if (!(rel <= kOverlapTolerance)) report_overlap(z[i], rel);
  }
}

AiryPair ai_pair(cplx z) {
  AiryPair p;
  ai_batch(std::span<const cplx>(&z, 1), std::span<AiryPair>(&p, 1));
  return p;
}

namespace {

cplx checked(const Scaled& s, const char* what) {
  const cplx v = s.value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RangeError(what);
  return v;
}

// Ai at the two rotated points z e^{-2pi i/3} (index 0) and z e^{2pi i/3} (index 1).
std::array<AiryPair, 2> rotated_pairs(cplx z) {
  const std::array<cplx, 2> zz{z * kRotMinus, z * kRotPlus};
  std::array<AiryPair, 2> p;
  ai_batch(zz, p);
  return p;
}

}  // namespace

Scaled ai_scaled(cplx z) { return ai_pair(z).ai; }

cplx ai(cplx z) { return checked(ai_pair(z).ai, "ai: value out of range"); }
cplx ai_deriv(cplx z) { return checked(ai_pair(z).dai, "ai_deriv: value out of range"); }

Scaled bi_scaled(cplx z) {
  // Bi(z) = e^{i pi/6} Ai(z e^{2pi i/3}) + e^{-i pi/6} Ai(z e^{-2pi i/3})
  const auto p = rotated_pairs(z);
  return p[1].ai * std::polar(1.0, pi / 6.0) + p[0].ai * std::polar(1.0, -pi / 6.0);
}

cplx bi(cplx z) { return checked(bi_scaled(z), "bi: value out of range"); }

cplx bi_deriv(cplx z) {
  const auto p = rotated_pairs(z);
  const Scaled d = p[1].dai * std::polar(1.0, 5.0 * pi / 6.0) + p[0].dai * std::polar(1.0, -5.0 * pi / 6.0);
  return checked(d, "bi_deriv: value out of range");
}

Scaled bi_pm_iai(cplx z, int sign) {
  if (sign >= 0) return ai_scaled(z * kRotPlus) * (2.0 * std::polar(1.0, pi / 6.0));
  return ai_scaled(z * kRotMinus) * (2.0 * std::polar(1.0, -pi / 6.0));
}

cplx wronskian(cplx z) {
  const auto r = rotated_pairs(z);  // r[1] at z e^{2pi i/3}, r[0] at z e^{-2pi i/3}
  const AiryPair a = ai_pair(z);
  const cplx c_plus = 2.0 * std::polar(1.0, pi / 6.0);
  const cplx c_minus = 2.0 * std::polar(1.0, -pi / 6.0);
  const Scaled f_plus = r[1].ai * c_plus, df_plus = r[1].dai * (c_plus * kRotPlus);
  const Scaled f_minus = r[0].ai * c_minus, df_minus = r[0].dai * (c_minus * kRotMinus);
  const bool plus = f_plus.log_abs() <= f_minus.log_abs();
  const Scaled& f = plus ? f_plus : f_minus;
  const Scaled& df = plus ? df_plus : df_minus;
  return (a.ai * df - a.dai * f).value();
}

std::size_t overlap_warning_count() { return g_overlap_warnings.load(std::memory_order_relaxed); }

void set_overlap_handler(std::function<void(cplx, double)> handler) {
  std::lock_guard<std::mutex> lock(g_handler_mutex);
  g_overlap_handler = std::move(handler);
}

cplx stark_argument(double epsilon, cplx zeta, double x) {
  if (!(epsilon > 0.0)) throw DomainError("field strength must be positive");
  const double e13 = std::cbrt(epsilon);
  return e13 * x - zeta / (e13 * e13);
}

AiryArgument AiryArgument::make(double epsilon, cplx zeta, double x) {
  const cplx w = stark_argument(epsilon, zeta, x);
  return {w, (2.0 / 3.0) * w * std::sqrt(w), -zeta};
}

Scaled g_kernel_scaled(double epsilon, cplx zeta, double x) {
  const cplx w = stark_argument(epsilon, zeta, x);
  return ai_scaled(w) * std::pow(epsilon, -1.0 / 6.0);
}

cplx g_kernel(double epsilon, cplx zeta, double x) {
  return checked(g_kernel_scaled(epsilon, zeta, x), "g_kernel: value out of range, use g_kernel_scaled");
}

void g_kernel_batch(double epsilon, cplx zeta, std::span<const double> x, std::span<Scaled> out) {
  if (out.size() < x.size()) throw DomainError("g_kernel_batch: output span too short");
  thread_local std::vector<cplx> w;
  thread_local std::vector<AiryPair> p;
  w.resize(x.size());
  p.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = stark_argument(epsilon, zeta, x[i]);
  ai_batch(w, p);
  const double f = std::pow(epsilon, -1.0 / 6.0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = p[i].ai * f;
}

namespace {

// Powers of rho = -zeta for zeta in the closed lower sector, written through
// zeta so that a real positive zeta (rho on the cut) takes the limit from
// Im rho > 0.
struct RhoPowers {
  cplx rho, half, quarter;
};

RhoPowers rho_powers(cplx zeta) {
  const double a = std::arg(zeta);
  if (zeta == cplx{} || a > 0.0 || a < -pi / 3.0) throw DomainError("zeta outside the closed sector -pi/3 <= arg <= 0");
  const cplx sq = std::sqrt(zeta);
  return {-zeta, I * sq, std::polar(1.0, pi / 4.0) * std::sqrt(sq)};
}

}  // namespace

cplx g_asymptotic_target(cplx zeta, double x) {
  const RhoPowers r = rho_powers(zeta);
  return kInvTwoSqrtPi * std::exp(-x * r.half) / r.quarter;
}

cplx g_first_order_coeff(cplx zeta, double x) {
  const RhoPowers r = rho_powers(zeta);
  const double six_u1 = 6.0 * u_coefficient(1);
  return -0.25 * (x * x / r.half + x / r.rho + six_u1 / (r.rho * r.half));
}

}  // namespace starkres::airy
