#pragma once

// Invariant suites behind `starkres verify`. Each check records the measured
// quantity, the bound it is held to and whether it passed.

#include <optional>
#include <string>
#include <vector>

#include "starkres/model.hpp"

namespace starkres::verify {

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Options {
  /// Replaces the bound of every residual-type check (not slopes or ratios).
  std::optional<double> tol;
  /// Extra perturbation for the jump suite, in addition to the built-in
  /// rank-one and rank-two specs.
  std::optional<PerturbationSpec> spec;
};

/// Wronskian on 200 points with |z| <= 10 and Ai(0) against its closed form.
std::vector<Check> airy_suite(const Options& o = {});
/// Conjugation symmetry and the Stark ODE residual of the kernel G.
std::vector<Check> kernels_suite(const Options& o = {});
/// Jump identity Q_+ - Q_- = 2 pi i T(conj zeta; B)* T(zeta; A) at eps = 0 and 0.5.
std::vector<Check> jump_suite(const Options& o = {});
/// O(eps) approach of the scaled kernel to its limit and the first-order coefficient.
std::vector<Check> asymptotics_suite(const Options& o = {});
/// Q^eps_-(zeta) -> Q^0_-(zeta) as eps decreases.
std::vector<Check> convergence_suite(const Options& o = {});

const std::vector<std::string>& suite_names();  // airy, kernels, jump, asymptotics, convergence

/// Runs a named suite ("all" runs every suite). Throws DomainError for an unknown name.
std::vector<Check> run_suite(const std::string& name, const Options& o = {});

}  // namespace starkres::verify
