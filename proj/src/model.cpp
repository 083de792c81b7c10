#include "starkres/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace starkres {

namespace {

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_pow(const Poly& a, int m) {
  Poly r{1.0};
  for (int i = 0; i < m; ++i) r = poly_mul(r, a);
  return r;
}

// q(t) = p(c + a t)
Poly poly_affine(const Poly& p, double c, double a) {
  Poly r{0.0};
  Poly power{1.0};  // (c + a t)^n
  for (double coef : p) {
    if (r.size() < power.size()) r.resize(power.size(), 0.0);
    for (std::size_t i = 0; i < power.size(); ++i) r[i] += coef * power[i];
    power = poly_mul(power, {c, a});
  }
  return r;
}

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

double poly_integral(const Poly& p, double lo, double hi) {
  Poly anti(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) anti[i + 1] = p[i] / static_cast<double>(i + 1);
  return poly_eval(anti, hi) - poly_eval(anti, lo);
}

// M_n(k) = int_{-1}^{1} t^n e^{-ikt} dt for n = 0..deg.
std::vector<cplx> moments(cplx k, std::size_t deg) {
  std::vector<cplx> m(deg + 1);
  const double ak = std::abs(k);
  if (ak <= std::max(4.0, 0.5 * static_cast<double>(deg))) {
    // Power series in k; even moments of t^j are 2/(j+1).
    const cplx mik = -I * k;
    for (std::size_t n = 0; n <= deg; ++n) {
      cplx sum = 0.0, term = 1.0;  // (-ik)^j / j!
      for (int j = 0; j < 400; ++j) {
        const std::size_t e = n + j;
        if (e % 2 == 0) {
          const cplx add = term * (2.0 / static_cast<double>(e + 1));
          sum += add;
          if (j > ak && std::abs(add) <= 1e-18 * std::abs(sum)) break;
        }
        term *= mik / static_cast<double>(j + 1);
        if (term == cplx{}) break;
      }
      m[n] = sum;
    }
    return m;
  }
  // Integration by parts, stable for |k| above the degree scale.
  const cplx ep = std::exp(-I * k), em = std::exp(I * k);
  const cplx inv = 1.0 / (-I * k);
  m[0] = (ep - em) * inv;
  for (std::size_t n = 1; n <= deg; ++n) {
    const cplx boundary = (n % 2 == 0) ? ep - em : ep + em;
    m[n] = boundary * inv - static_cast<double>(n) * inv * m[n - 1];
  }
  return m;
}

void check_geometry(double center, double halfwidth) {
  if (!std::isfinite(center)) throw ValidationError("profile center must be finite");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) throw ValidationError("profile halfwidth must be positive");
}

}  // namespace

ProfileFunction ProfileFunction::indicator(double center, double halfwidth) {
  check_geometry(center, halfwidth);
  ProfileFunction f;
  f.kind_ = ProfileKind::Indicator;
  f.center_ = center;
  f.halfwidth_ = halfwidth;
  f.coeffs_ = {1.0};
  f.build();
  return f;
}

ProfileFunction ProfileFunction::polybump(double center, double halfwidth, int power, std::vector<double> coeffs) {
  check_geometry(center, halfwidth);
  if (power < 1) throw ValidationError("polybump power must be a positive integer");
  if (coeffs.empty()) throw ValidationError("polybump needs at least one polynomial coefficient");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ValidationError("polybump coefficients must be finite");
  ProfileFunction f;
  f.kind_ = ProfileKind::Polybump;
  f.center_ = center;
  f.halfwidth_ = halfwidth;
  f.power_ = power;
  f.coeffs_ = std::move(coeffs);
  f.build();
  return f;
}

void ProfileFunction::build() {
  const double c = center_, a = halfwidth_;
  // (1 - t^2)^m in t, and (1 - ((x - c)/a)^2)^m in x.
  const Poly bump_t = poly_pow({1.0, 0.0, -1.0}, power_);
  const Poly bump_x = poly_pow({1.0 - c * c / (a * a), 2.0 * c / (a * a), -1.0 / (a * a)}, power_);
  local_ = poly_mul(poly_affine(coeffs_, c, a), bump_t);
  mono_ = poly_mul(coeffs_, bump_x);
}

bool ProfileFunction::is_even() const noexcept {
  if (center_ != 0.0) return false;
  for (std::size_t n = 1; n < coeffs_.size(); n += 2)
    if (coeffs_[n] != 0.0) return false;
  return true;
}

double ProfileFunction::eval(double x) const noexcept {
  if (x < support_lo() || x > support_hi()) return 0.0;
  if (kind_ == ProfileKind::Indicator) return 1.0;
  const double t = (x - center_) / halfwidth_;
  return poly_eval(coeffs_, x) * std::pow(1.0 - t * t, power_);
}

cplx ProfileFunction::fourier_hat(cplx p) const {
  const double a = halfwidth_;
  const std::vector<cplx> m = moments(p * a, local_.size() - 1);
  cplx sum = 0.0;
  for (std::size_t n = 0; n < local_.size(); ++n) sum += local_[n] * m[n];
  return a / std::sqrt(2.0 * pi) * std::exp(-I * p * center_) * sum;
}

PerturbationSpec::PerturbationSpec(std::vector<PerturbationEntry> entries) : entries_(std::move(entries)) {}

std::vector<std::vector<double>> PerturbationSpec::gram() const {
  const std::size_t n = rank();
  std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const auto& pk = profile(k);
      const auto& pl = profile(l);
      const double lo = std::max(pk.support_lo(), pl.support_lo());
      const double hi = std::min(pk.support_hi(), pl.support_hi());
      const double v = hi > lo ? poly_integral(poly_mul(pk.monomials(), pl.monomials()), lo, hi) : 0.0;
      g[k][l] = g[l][k] = v;
    }
  }
  return g;
}

bool PerturbationSpec::all_even() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.profile.is_even(); });
}

ValidationReport PerturbationSpec::validate() const {
  ValidationReport r;
  r.rank = rank();
  for (const auto& e : entries_) r.even.push_back(e.profile.is_even());
  for (std::size_t k = 0; k < rank(); ++k) {
    if (coupling(k) == 0.0 || !std::isfinite(coupling(k))) {
      r.valid = false;
      r.reason = "coupling " + std::to_string(k) + " must be a nonzero finite real";
      return r;
    }
  }
  if (rank() > 0) {
    const auto g = gram();
    Eigen::MatrixXd m(rank(), rank());
    for (std::size_t k = 0; k < rank(); ++k)
      for (std::size_t l = 0; l < rank(); ++l) m(k, l) = g[k][l];
    r.gram_determinant = m.determinant();
    if (!(r.gram_determinant > kGramThreshold)) {
      r.valid = false;
      r.reason = "profiles are numerically linearly dependent (Gram determinant " +
                 std::to_string(r.gram_determinant) + ")";
      return r;
    }
  }
  r.qualifies_rank_one = rank() == 1;
  r.qualifies_rank_n = rank() >= 1 && all_even();
  return r;
}

void PerturbationSpec::require_valid() const {
  const ValidationReport r = validate();
  if (!r.valid) throw ValidationError(r.reason);
}

namespace {

ProfileFunction profile_from_json(const nlohmann::json& j, std::size_t k) {
  const std::string where = "profiles[" + std::to_string(k) + "]";
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError(where + ".kind must be a string");
  auto number = [&](const char* key, double fallback, bool required) {
    if (!j.contains(key)) {
      if (required) throw ValidationError(where + "." + key + " is required");
      return fallback;
    }
    if (!j[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
    return j[key].get<double>();
  };
  const std::string kind = j["kind"];
  const double center = number("center", 0.0, false);
  const double halfwidth = number("halfwidth", 1.0, true);
  if (kind == "indicator") return ProfileFunction::indicator(center, halfwidth);
  if (kind == "polybump") {
    if (!j.contains("power") || !j["power"].is_number_integer())
      throw ValidationError(where + ".power must be a positive integer");
    std::vector<double> coeffs{1.0};
    if (j.contains("coeffs")) {
      if (!j["coeffs"].is_array()) throw ValidationError(where + ".coeffs must be an array");
      coeffs.clear();
      for (const auto& c : j["coeffs"]) {
        if (!c.is_number()) throw ValidationError(where + ".coeffs must contain numbers");
        coeffs.push_back(c.get<double>());
      }
    }
    return ProfileFunction::polybump(center, halfwidth, j["power"].get<int>(), std::move(coeffs));
  }
  throw ValidationError(where + ".kind must be \"indicator\" or \"polybump\"");
}

}  // namespace

PerturbationSpec PerturbationSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("perturbation must be a JSON object");
  const nlohmann::json empty = nlohmann::json::array();
  const auto& cs = j.contains("couplings") ? j["couplings"] : empty;
  const auto& ps = j.contains("profiles") ? j["profiles"] : empty;
  if (!cs.is_array() || !ps.is_array()) throw ValidationError("couplings and profiles must be arrays");
  if (cs.size() != ps.size()) throw ValidationError("couplings and profiles must have the same length");
  std::vector<PerturbationEntry> entries;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (!cs[k].is_number()) throw ValidationError("couplings[" + std::to_string(k) + "] must be a number");
    entries.push_back({cs[k].get<double>(), profile_from_json(ps[k], k)});
  }
  PerturbationSpec spec(std::move(entries));
  spec.require_valid();
  return spec;
}

PerturbationSpec PerturbationSpec::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

}  // namespace starkres
