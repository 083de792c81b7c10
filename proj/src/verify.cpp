#include "starkres/verify.hpp"

#include <algorithm>
#include <cmath>

#include "starkres/airy.hpp"
#include "starkres/branches.hpp"
#include "starkres/scaled.hpp"
#include "starkres/scattering.hpp"

namespace starkres::verify {

namespace {

Check residual(std::string name, double measured, double bound, const Options& o) {
  const double b = o.tol ? *o.tol : bound;
  return {std::move(name), measured, b, measured <= b};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const ProfileFunction kInd = ProfileFunction::indicator(0.0, 1.0);
const ProfileFunction kBump = ProfileFunction::polybump(0.0, 1.5, 2, {1.0, 0.0, 0.5});

}  // namespace

std::vector<Check> airy_suite(const Options& o) {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double th = -pi + (k + 0.25) * 2.0 * pi / 20.0;
    for (int j = 1; j <= 10; ++j) worst = std::max(worst, std::abs(airy::wronskian(std::polar(1.0 * j, th)) - 1.0 / pi));
  }
  const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  return {residual("wronskian", worst, 1e-10, o), residual("ai_at_zero", std::abs(airy::ai(0.0) - ai0), 1e-12, o)};
}

std::vector<Check> kernels_suite(const Options& o) {
  double conj_worst = 0.0, ode_worst = 0.0;
  const double h = 1e-3;
  for (double eps : {0.1, 0.5, 1.0}) {
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        const cplx zeta = std::polar(0.5 + 0.6 * a, -pi / 3.0 * (b + 0.5) / 5.0);
        for (int ix = 0; ix <= 8; ++ix) {
          const double x = -2.0 + 0.5 * ix;
          auto g = [&](double t) { return airy::g_kernel(eps, zeta, t); };
          const cplx gx = g(x);
          conj_worst = std::max(conj_worst, std::abs(std::conj(airy::g_kernel(eps, std::conj(zeta), x)) - gx) /
                                                std::max(1.0, std::abs(gx)));
          const cplx d2 = (-g(x + 2 * h) + 16.0 * g(x + h) - 30.0 * gx + 16.0 * g(x - h) - g(x - 2 * h)) / (12 * h * h);
          const cplx pot = (eps * x - zeta) * gx;
          ode_worst = std::max(ode_worst, std::abs(-d2 + pot) / (std::abs(d2) + std::abs(pot)));
        }
      }
    }
  }
  return {residual("conjugation_symmetry", conj_worst, 1e-12, o), residual("stark_ode_residual", ode_worst, 1e-6, o)};
}

std::vector<Check> jump_suite(const Options& o) {
  std::vector<std::pair<std::string, PerturbationSpec>> specs{
      {"rank1", PerturbationSpec({{-2.0, kInd}})}, {"rank2", PerturbationSpec({{-2.0, kInd}, {1.5, kBump}})}};
  if (o.spec && !o.spec->empty()) specs.emplace_back("config", *o.spec);
  std::vector<Check> out;
  for (const auto& [label, spec] : specs) {
    for (double eps : {0.0, 0.5}) {
      double worst = 0.0;
      for (cplx zeta : {cplx{1.5, 0.2}, cplx{0.9, -0.1}, cplx{2.0, -0.4}}) {
        const CMatrix qp = q_matrix(eps, zeta, Side::Plus, spec).entries;
        const CMatrix qm = q_matrix(eps, zeta, Side::Minus, spec).entries;
        const CMatrix ta = trace_matrix(eps, zeta, Factor::A, spec).value();
        const CMatrix tb = trace_adjoint_at_conj(eps, zeta, Factor::B, spec).value();
        worst = std::max(worst, (qp - qm - 2.0 * pi * I * tb * ta).norm());
      }
      out.push_back(residual("jump_identity_" + label + "_eps" + (eps == 0.0 ? "0" : "0.5"), worst, 1e-8, o));
    }
  }
  return out;
}

std::vector<Check> asymptotics_suite(const Options&) {
  const cplx zeta = std::polar(1.0, -pi / 6.0);
  const cplx r32 = rho_three_halves(zeta);
  std::vector<Check> out;
  for (double x : {-1.0, 0.0, 1.0}) {
    auto err = [&](double eps) {
      const Scaled g = airy::g_kernel_scaled(eps, zeta, x) * Scaled::from_exp(2.0 * r32 / (3.0 * eps));
      return g.value() / airy::g_asymptotic_target(zeta, x) - 1.0;
    };
    std::vector<double> le, lr;
    for (double eps : {1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3}) {
      le.push_back(std::log(eps));
      lr.push_back(std::log(std::abs(err(eps))));
    }
    const double slope = fit_slope(le, lr);
    const std::string tag = "_x" + std::to_string(static_cast<int>(x));
    out.push_back({"error_slope" + tag, slope, 0.1, std::abs(slope - 1.0) <= 0.1});
    // Richardson on (ratio - 1) / eps = c1 + c2 eps + ...
    const double e = 2e-3;
    const cplx est = 2.0 * err(0.5 * e) / (0.5 * e) - err(e) / e;
    const cplx c1 = airy::g_first_order_coeff(zeta, x);
    const double relerr = std::abs(est - c1) / std::abs(c1);
    out.push_back({"first_order_coeff" + tag, relerr, 0.05, relerr <= 0.05});
  }
  return out;
}

std::vector<Check> convergence_suite(const Options& o) {
  const PerturbationSpec spec({{-2.0, kInd}});
  const cplx zeta{1.5, -0.5};
  const CMatrix q0 = q_matrix(0.0, zeta, Side::Minus, spec).entries;
  std::vector<double> d;
  for (double eps : {1e-1, 1e-2, 1e-3}) d.push_back((q_matrix(eps, zeta, Side::Minus, spec).entries - q0).norm());
  const bool decreasing = d[1] < d[0] && d[2] < d[1];
  const double rel = d[2] / q0.norm();
  return {{"strictly_decreasing", decreasing ? 0.0 : 1.0, 0.0, decreasing},
          residual("final_relative_distance", rel, 1e-2, o)};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"airy", "kernels", "jump", "asymptotics", "convergence"};
  return names;
}

std::vector<Check> run_suite(const std::string& name, const Options& o) {
  if (name == "all") {
    std::vector<Check> all;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, o);
      for (auto& c : part) c.name = n + "." + c.name;
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (name == "airy") return airy_suite(o);
  if (name == "kernels") return kernels_suite(o);
  if (name == "jump") return jump_suite(o);
  if (name == "asymptotics") return asymptotics_suite(o);
  if (name == "convergence") return convergence_suite(o);
  throw DomainError("unknown verification suite: " + name);
}

}  // namespace starkres::verify
