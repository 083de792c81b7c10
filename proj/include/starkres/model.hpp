#pragma once

// Rank-N separable perturbation V = sum_k c_k |psi_k><psi_k| with compactly
// supported real profiles whose Fourier transforms are entire and known in
// closed form.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "starkres/common.hpp"

namespace starkres {

/// Invalid perturbation or malformed configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ProfileKind { Indicator, Polybump };

/// psi(x) on [center - halfwidth, center + halfwidth], zero outside.
///   indicator: psi = 1
///   polybump:  psi = P(x) (1 - ((x - center)/halfwidth)^2)^power,
///              P(x) = sum_n coeffs[n] x^n
class ProfileFunction {
 public:
  static ProfileFunction indicator(double center, double halfwidth);
  static ProfileFunction polybump(double center, double halfwidth, int power, std::vector<double> coeffs);

  ProfileKind kind() const noexcept { return kind_; }
  double center() const noexcept { return center_; }
  double halfwidth() const noexcept { return halfwidth_; }
  int power() const noexcept { return power_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double support_lo() const noexcept { return center_ - halfwidth_; }
  double support_hi() const noexcept { return center_ + halfwidth_; }

  /// Even about x = 0: centered at the origin with an even polynomial factor.
  bool is_even() const noexcept;

  double eval(double x) const noexcept;

  /// (2 pi)^{-1/2} int e^{-ipx} psi(x) dx, entire in p.
  cplx fourier_hat(cplx p) const;

  /// Monomial coefficients of psi in x on its support (for exact products).
  const std::vector<double>& monomials() const noexcept { return mono_; }

 private:
  ProfileFunction() = default;
  void build();

  ProfileKind kind_ = ProfileKind::Indicator;
  double center_ = 0.0;
  double halfwidth_ = 1.0;
  int power_ = 0;
  std::vector<double> coeffs_;  // P(x); {1} for the indicator
  std::vector<double> local_;   // psi(center + halfwidth t) as a polynomial in t
  std::vector<double> mono_;    // psi(x) as a polynomial in x
};

struct PerturbationEntry {
  double coupling;
  ProfileFunction profile;
};

struct ValidationReport {
  std::size_t rank = 0;
  double gram_determinant = 1.0;
  std::vector<bool> even;
  bool qualifies_rank_one = false;  // single real compactly supported profile
  bool qualifies_rank_n = false;    // additionally every profile even
  bool valid = true;
  std::string reason;
};

inline constexpr double kGramThreshold = 1e-12;

class PerturbationSpec {
 public:
  PerturbationSpec() = default;
  explicit PerturbationSpec(std::vector<PerturbationEntry> entries);

  /// Build from {"couplings": [...], "profiles": [...]} and validate.
  /// Throws ValidationError with a reason.
  static PerturbationSpec from_json(const nlohmann::json& j);
  static PerturbationSpec from_json_text(std::string_view text);

  std::size_t rank() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double coupling(std::size_t k) const { return entries_.at(k).coupling; }
  const ProfileFunction& profile(std::size_t k) const { return entries_.at(k).profile; }
  const std::vector<PerturbationEntry>& entries() const noexcept { return entries_; }

  /// Gram matrix int psi_k psi_l dx (exact polynomial integration).
  std::vector<std::vector<double>> gram() const;

  ValidationReport validate() const;

  /// Throws ValidationError when validate() rejects.
  void require_valid() const;

  bool all_even() const;

 private:
  std::vector<PerturbationEntry> entries_;
};

}  // namespace starkres
