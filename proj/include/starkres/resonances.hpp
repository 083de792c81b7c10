#pragma once

// Zeros of the resonance indicator: argument-principle counting on boxes,
// quadrisection plus Muller refinement, continuation of zeros in the field
// strength, and classification of the small-field limit.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starkres/scattering.hpp"

namespace starkres {

struct ComplexBox {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

  /// Throws DomainError unless re_min < re_max and im_min < im_max.
  void validate() const;
  bool contains(cplx z) const noexcept;
  cplx centre() const noexcept { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  double diagonal() const noexcept;
  /// All four corners in -pi/3 + margin < arg < -margin (the sector is convex).
  bool inside_sector(double margin = 0.0) const noexcept;
  /// Box of half-width r around z.
  static ComplexBox around(cplx z, double r) { return {z.real() - r, z.real() + r, z.imag() - r, z.imag() + r}; }
};

using AnalyticFunction = std::function<cplx(cplx)>;

/// |D| on the contour fell below the boundary threshold.
class BoundaryZeroError : public std::runtime_error {
 public:
  BoundaryZeroError(const std::string& what, cplx where) : std::runtime_error(what), where_(where) {}
  cplx where() const noexcept { return where_; }

 private:
  cplx where_;
};

struct WindingConfig {
  int points_per_side = 16;      // initial uniform samples per edge
  int max_bisections = 24;       // refinement depth for one initial segment
  double boundary_threshold = 1e-12;
  /// Optional largest safe sample spacing at a point, for functions with a
  /// known fast phase (empty: uniform initial sampling only).
  std::function<double(cplx)> step_hint;
};

/// Step hint for resonance_indicator at eps > 0: a quarter turn of the phase
/// of exp(4 rho^{3/2}/(3 eps)), i.e. (pi/4) eps / (2 |zeta|^{1/2}), wherever
/// that factor is not negligible; infinity elsewhere and at eps = 0.
double indicator_step_hint(double epsilon, cplx zeta);

/// Zeros of d inside the box, counted with multiplicity. Every edge is sampled
/// until consecutive phase increments are below pi/2, checked at twice the
/// resolution (each accepted step is split once, halves below pi/4). Throws
/// BoundaryZeroError, or RangeError when refinement does not settle.
int winding_number(const AnalyticFunction& d, const ComplexBox& box, const WindingConfig& cfg = {});

struct Resonance {
  double epsilon = 0.0;
  cplx zeta;
  double residual = 0.0;  // |D(zeta)|
  int multiplicity = 1;
  double condition = 0.0;  // |D'(zeta)| estimate
};

struct FindConfig {
  double tol = 1e-10;             // |D| target; zeros closer than 10 tol are merged
  double coarse_diameter = 0.5;   // isolate to this diagonal before refining
  double min_diameter = 1e-7;     // below this a multiple zero is accepted
  long max_evaluations = 200000;  // budget on D calls
  WindingConfig winding;
};

struct FindResult {
  std::vector<Resonance> zeros;      // sorted by real part
  std::vector<ComplexBox> isolating;  // box that isolated each zero
  int total_winding = 0;              // winding of the search box
  long evaluations = 0;
  bool budget_exhausted = false;      // zeros is then partial
};

/// Muller's method from three starting points. Returns the last iterate and
/// sets converged when |D| <= ftol or the step is below 1e-14 |z|.
struct MullerResult {
  cplx zeta;
  cplx value;
  double derivative = 0.0;
  bool converged = false;
  int iterations = 0;
};
MullerResult muller(const AnalyticFunction& d, cplx z0, cplx z1, cplx z2, double ftol, int max_iter = 60);

FindResult find_zeros(const AnalyticFunction& d, const ComplexBox& box, const FindConfig& cfg = {},
                      double epsilon = 0.0);

/// Zeros of resonance_indicator(eps, ., spec) in a box inside the lower sector
/// (any lower half-plane box for eps = 0).
FindResult find_resonances(double epsilon, const PerturbationSpec& spec, const ComplexBox& box,
                           const FindConfig& cfg = {}, const QuadratureConfig& qcfg = {});

enum class TrajectoryStatus { Completed, EscapedBox, ApproachedRealAxis, StepFailure };
const char* status_name(TrajectoryStatus s) noexcept;

struct TrajectoryPoint {
  double epsilon;
  cplx zeta;
  double residual;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // epsilon strictly decreasing
  TrajectoryStatus status = TrajectoryStatus::Completed;
  std::string message;
};

struct TrackConfig {
  double eps_end = 1e-3;
  double ratio = 0.8;            // geometric schedule eps_{j+1} = ratio eps_j
  double step_cap = 0.0;         // 0 means 0.2 * box diagonal
  int max_retries = 10;          // ratio -> sqrt(ratio) per rejection
  double real_axis_tol = 1e-3;   // |Im zeta| below this ends the trajectory
  double ftol = 1e-10;
  WindingConfig winding{8, 24, 1e-13, {}};
  /// Optional step hint at a given eps for the uniqueness windings (the PerturbationSpec
  /// overload installs indicator_step_hint).
  std::function<double(double, cplx)> step_hint;
};

/// Family D(eps, zeta) whose zeros are tracked.
using IndicatorFamily = std::function<cplx(double, cplx)>;

/// Follows one zero along a geometric eps schedule. Each step predicts with
/// the tangent -D_eps / D_zeta, corrects with Muller, and is accepted when the
/// correction is at most a quarter of the predicted move (plus a small floor),
/// the move is within step_cap, and the zero is the only one within twice the
/// correction. A rejected step retries with ratio -> sqrt(ratio).
Trajectory track_trajectory(const IndicatorFamily& d, const Resonance& seed, const ComplexBox& box,
                            const TrackConfig& cfg = {});

/// Tracks zeros of resonance_indicator. Rejects an empty spec (no seed can exist).
Trajectory track_trajectory(const PerturbationSpec& spec, const Resonance& seed, const ComplexBox& box,
                            const TrackConfig& cfg = {}, const QuadratureConfig& qcfg = {});

struct LimitConfig {
  double cauchy_factor = 0.7;   // per halving of eps
  int min_tail_steps = 4;
  double sector_margin = 0.02;  // radians
  double hat_tol = 1e-3;
  double res_margin = 1e-3;
  double max_extrapolation_error = 1e-3;
  double converged_increment = 1e-9;  // increments below this count as settled
};

struct Verdict {
  std::string status;  // converged-interior, escaped-box, approached-real-axis, step-failure, inconclusive
  bool converged = false;
  std::optional<cplx> zeta0;
  double extrapolation_error = 0.0;
  std::vector<double> hats;  // |psi_k^(sqrt zeta0)|
  bool hats_small = false;
  bool s0inv_triangular = false;
  bool zeta0_not_resonance = false;
  std::optional<cplx> det_gtilde0;
  bool consistent_with_theorem = true;
  std::string message;
};

/// Classifies the small-field end of a trajectory. Trajectories that stopped
/// early need one point, completed ones at least three.
Verdict limit_analysis(const Trajectory& t, const PerturbationSpec& spec, const LimitConfig& cfg = {},
                       const QuadratureConfig& qcfg = {});

/// Decision logic of limit_analysis for a given limit point, exposed so it can
/// be exercised on synthetic data.
Verdict classify_limit(cplx zeta0, double extrapolation_error, const PerturbationSpec& spec, const LimitConfig& cfg = {},
                       const QuadratureConfig& qcfg = {});

/// Right singular vector for the smallest singular value of G~_+ and the
/// relative residual |G u| / |u|.
struct NullVector {
  CVector vector;
  double residual = 0.0;
};
NullVector null_vector(const CMatrix& g);

}  // namespace starkres
