// starkres: verification suites, resonance search, continuation in the field
// strength, and scattering matrices from a JSON configuration.
//
// Exit codes: 0 success, 1 a check failed or the computation could not
// complete, 2 usage or configuration error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "starkres/branches.hpp"
#include "starkres/resonances.hpp"
#include "starkres/simd.hpp"
#include "starkres/verify.hpp"

namespace {

using namespace starkres;
using cli::complex_json;
using cli::dump17;
using cli::fmt17;
using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<double> tol;
  int threads = 1;
  std::string simd = "auto";
};

struct Loaded {
  json config = json::object();
  PerturbationSpec spec;
};

Loaded load_config(const std::string& path) {
  Loaded l;
  if (path.empty()) return l;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    l.config = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!l.config.is_object()) throw UsageError("config " + path + ": top level must be an object");
  try {
    l.spec = PerturbationSpec::from_json(l.config);
  } catch (const ValidationError& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return l;
}

// Command-line value if given, else config block value, else the fallback.
template <class T>
T pick(const std::optional<T>& flag, const json& block, const char* key, const T& fallback) {
  if (flag) return *flag;
  if (block.is_object() && block.contains(key)) {
    try {
      return block.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config field ") + key + ": " + e.what());
    }
  }
  return fallback;
}

ComplexBox to_box(const std::vector<double>& v, const char* what) {
  if (v.size() != 4) throw UsageError(std::string(what) + " needs four numbers: re_min re_max im_min im_max");
  ComplexBox b{v[0], v[1], v[2], v[3]};
  try {
    b.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
  return b;
}

json block_of(const json& config, const char* name) {
  return config.contains(name) ? config.at(name) : json::object();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void apply_common(const Common& c) {
  if (c.threads < 1) throw UsageError("--threads must be at least 1");
  if (c.tol && !(*c.tol > 0.0)) throw UsageError("--tol must be positive");
  if (c.simd != "auto") {
    const auto b = simd::parse(c.simd);
    if (!b) throw UsageError("--simd must be auto, scalar or avx2");
    if (!simd::set_active(*b)) throw UsageError("SIMD backend " + c.simd + " is not available on this CPU");
  }
}

// Runs f(0..n-1) on up to k threads; results are written by index, so the
// output order does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int k, F f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Common& c, const std::string& suite) {
  const auto& names = verify::suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw UsageError("unknown suite '" + suite + "' (airy, kernels, jump, asymptotics, convergence, all)");
  const Loaded l = load_config(c.config_path);
  verify::Options o;
  o.tol = c.tol;
  if (!l.spec.empty()) o.spec = l.spec;

  const std::vector<std::string> run = suite == "all" ? names : std::vector<std::string>{suite};
  std::vector<std::vector<verify::Check>> parts(run.size());
  parallel_for(run.size(), c.threads, [&](std::size_t i) { parts[i] = verify::run_suite(run[i], o); });

  json checks = json::array();
  std::optional<std::string> first_failure;
  for (std::size_t i = 0; i < run.size(); ++i)
    for (const auto& ch : parts[i]) {
      const std::string name = suite == "all" ? run[i] + "." + ch.name : ch.name;
      checks.push_back({{"name", name}, {"measured", ch.measured}, {"bound", ch.bound}, {"pass", ch.pass}});
      if (!ch.pass && !first_failure) first_failure = name;
    }
  const json report{{"suite", suite}, {"checks", checks}, {"pass", !first_failure.has_value()}};
  Output out(c.out_path);
  out.stream() << dump17(report) << "\n";
  if (first_failure) {
    std::cerr << "starkres verify: check failed: " << *first_failure << "\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------ resonances

struct ResonanceArgs {
  std::optional<double> epsilon;
  std::vector<double> box;
  std::optional<long> max_evals;
};

int cmd_resonances(const Common& c, const ResonanceArgs& a) {
  const Loaded l = load_config(c.config_path);
  const json block = block_of(l.config, "resonances");
  const double eps = pick(a.epsilon, block, "epsilon", 0.0);
  const ComplexBox box =
      to_box(a.box.empty() ? pick<std::vector<double>>(std::nullopt, block, "box", {}) : a.box, "box");
  FindConfig fc;
  if (c.tol) fc.tol = *c.tol;
  fc.max_evaluations = pick(a.max_evals, block, "max_evaluations", fc.max_evaluations);
  FindResult r;
  try {
    r = find_resonances(eps, l.spec, box, fc);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Output out(c.out_path);
  std::ostream& os = out.stream();
  os << "epsilon,re_zeta,im_zeta,residual,multiplicity" << (r.budget_exhausted ? ",partial" : "") << "\n";
  for (const auto& z : r.zeros) {
    os << fmt17(eps) << "," << fmt17(z.zeta.real()) << "," << fmt17(z.zeta.imag()) << "," << fmt17(z.residual) << ","
       << z.multiplicity << (r.budget_exhausted ? ",1" : "") << "\n";
  }
  if (r.budget_exhausted)
    std::cerr << "starkres resonances: evaluation budget exhausted after " << r.evaluations
              << " calls; the list may be incomplete\n";
  return 0;
}

// ------------------------------------------------------------ trajectory

struct TrajectoryArgs {
  std::optional<double> eps_start, eps_end, ratio;
  std::vector<double> seed_box, box;
  std::string verdict_path;
};

json verdict_json(const Verdict& v) {
  json hats = json::array();
  for (double h : v.hats) hats.push_back(h);
  return {{"status", v.status},
          {"converged", v.converged},
          {"zeta0", v.zeta0 ? complex_json(*v.zeta0) : json(nullptr)},
          {"extrapolation_error", v.extrapolation_error},
          {"hats", hats},
          {"hats_small", v.hats_small},
          {"s0inv_triangular", v.s0inv_triangular},
          {"zeta0_not_resonance", v.zeta0_not_resonance},
          {"det_gtilde0_at_zeta0", v.det_gtilde0 ? complex_json(*v.det_gtilde0) : json(nullptr)},
          {"consistent_with_theorem", v.consistent_with_theorem},
          {"message", v.message}};
}

// Smallest |D| on a grid over the box, for the no-seed error.
std::string nearest_minima(double eps, const PerturbationSpec& spec, const ComplexBox& box) {
  std::vector<std::pair<double, cplx>> v;
  const int n = 24;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const cplx z{box.re_min + (box.re_max - box.re_min) * i / n, box.im_min + (box.im_max - box.im_min) * j / n};
      try {
        v.emplace_back(std::abs(resonance_indicator(eps, z, spec)), z);
      } catch (const std::exception&) {
      }
    }
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string s;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, v.size()); ++k)
    s += "\n  |D| = " + fmt17(v[k].first) + " at " + fmt17(v[k].second.real()) + (v[k].second.imag() < 0 ? "" : "+") +
         fmt17(v[k].second.imag()) + "i";
  return s;
}

int cmd_trajectory(const Common& c, const TrajectoryArgs& a) {
  const Loaded l = load_config(c.config_path);
  const json block = block_of(l.config, "trajectory");
  TrackConfig tc;
  const double eps_start = pick(a.eps_start, block, "eps_start", 0.1);
  tc.eps_end = pick(a.eps_end, block, "eps_end", tc.eps_end);
  tc.ratio = pick(a.ratio, block, "ratio", tc.ratio);
  if (!(tc.ratio > 0.0 && tc.ratio < 1.0)) throw UsageError("ratio must lie in (0, 1)");
  if (!(tc.eps_end > 0.0 && eps_start > tc.eps_end)) throw UsageError("need eps_start > eps_end > 0");
  if (c.tol) tc.ftol = *c.tol;
  const ComplexBox seed_box =
      to_box(a.seed_box.empty() ? pick<std::vector<double>>(std::nullopt, block, "seed_box", {}) : a.seed_box,
             "seed_box");
  const std::vector<double> tb = a.box.empty() ? pick<std::vector<double>>(std::nullopt, block, "box", {}) : a.box;
  const ComplexBox box = tb.empty() ? seed_box : to_box(tb, "box");
  if (l.spec.empty()) throw UsageError("trajectory needs a non-empty perturbation in --config");
  if (!seed_box.inside_sector() || !box.inside_sector())
    throw UsageError("seed_box and box must lie inside the sector -pi/3 < arg zeta < 0");

  FindConfig fc;
  const FindResult seeds = find_resonances(eps_start, l.spec, seed_box, fc);
  if (seeds.zeros.empty()) {
    std::cerr << "starkres trajectory: no resonance in the seed box at eps = " << fmt17(eps_start)
              << "; smallest |D| on a 25x25 grid:" << nearest_minima(eps_start, l.spec, seed_box) << "\n";
    return 1;
  }

  std::vector<Trajectory> traj(seeds.zeros.size());
  std::vector<Verdict> verdicts(seeds.zeros.size());
  parallel_for(traj.size(), c.threads, [&](std::size_t i) {
    traj[i] = track_trajectory(l.spec, seeds.zeros[i], box, tc);
    verdicts[i] = limit_analysis(traj[i], l.spec);
  });

  Output out(c.out_path);
  std::ostream& os = out.stream();
  os << "epsilon,re_zeta,im_zeta,residual,abs_scaling_factor,trajectory\n";
  json all = json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (const auto& p : traj[i].points) {
      const double scale = std::exp((4.0 * rho_three_halves_lower(p.zeta) / (3.0 * p.epsilon)).real());
      os << fmt17(p.epsilon) << "," << fmt17(p.zeta.real()) << "," << fmt17(p.zeta.imag()) << "," << fmt17(p.residual)
         << "," << fmt17(scale) << "," << i << "\n";
    }
    json v = verdict_json(verdicts[i]);
    v["trajectory"] = i;
    v["seed"] = complex_json(traj[i].points.front().zeta);
    v["end"] = complex_json(traj[i].points.back().zeta);
    v["eps_reached"] = traj[i].points.back().epsilon;
    v["tracker_message"] = traj[i].message;
    all.push_back(v);
  }
  std::string vpath = a.verdict_path;
  if (vpath.empty() && !c.out_path.empty()) vpath = c.out_path + ".verdict.json";
  if (vpath.empty()) {
    std::cerr << dump17(all) << "\n";
  } else {
    Output vout(vpath);
    vout.stream() << dump17(all) << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- smatrix

struct SMatrixArgs {
  std::optional<double> epsilon;
  std::optional<std::string> zeta;
};

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

int cmd_smatrix(const Common& c, const SMatrixArgs& a) {
  const Loaded l = load_config(c.config_path);
  const json block = block_of(l.config, "smatrix");
  const double eps = pick(a.epsilon, block, "epsilon", 0.0);
  const std::string ztext = pick<std::string>(a.zeta, block, "zeta", "");
  if (ztext.empty()) throw UsageError("smatrix needs --zeta");
  const auto zeta = cli::parse_complex(ztext);
  if (!zeta) throw UsageError("cannot parse zeta '" + ztext + "' (expected a+bi)");
  if (eps == 0.0 && zeta->imag() == 0.0 && zeta->real() <= 0.0)
    throw UsageError("zeta lies on the cut (-inf, 0] of the field-free problem");
  json r;
  try {
    const SMatrixInv sinv = s_inverse(eps, *zeta, l.spec);
    const CMatrix s = s_matrix(eps, *zeta, l.spec);
    r["epsilon"] = eps;
    r["zeta"] = complex_json(*zeta);
    r["S"] = matrix_json(s);
    r["S_inv"] = matrix_json(sinv.entries());
    try {
      r["det_gtilde_plus"] = complex_json(det_gtilde_plus(eps, *zeta, l.spec));
    } catch (const RangeError&) {
      const Scaled d = det_gtilde_plus_scaled(eps, *zeta, l.spec);
      r["det_gtilde_plus"] = nullptr;
      r["log_abs_det_gtilde_plus"] = d.log_abs();
    }
    r["det_gtilde_minus"] = complex_json(g_tilde(eps, *zeta, Side::Minus, l.spec).determinant());
    r["rcond"] = sinv.rcond;
  } catch (const SingularMatrixError& e) {
    std::cerr << "starkres smatrix: " << e.what() << " (reciprocal condition estimate " << fmt17(e.condition())
              << ")\n";
    return 1;
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  Output out(c.out_path);
  out.stream() << dump17(r) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances of Stark Hamiltonians with separable perturbations"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON configuration (perturbation and command blocks)");
  app.add_option("--out", common.out_path, "Write the main output here instead of stdout");
  app.add_option("--tol", common.tol, "Tolerance override");
  app.add_option("--threads", common.threads, "Worker threads for independent tasks");
  app.add_option("--simd", common.simd, "Vector backend: auto, scalar or avx2");
  app.fallthrough();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run invariant suites and print a JSON report");
  verify->add_option("suite", suite, "airy, kernels, jump, asymptotics, convergence or all")->required();

  ResonanceArgs ra;
  auto* res = app.add_subcommand("resonances", "Locate resonances in a box and print CSV");
  res->add_option("--epsilon", ra.epsilon, "Field strength (default 0)");
  res->add_option("--box", ra.box, "re_min re_max im_min im_max")->expected(4);
  res->add_option("--max-evals", ra.max_evals, "Budget of indicator evaluations");

  TrajectoryArgs ta;
  auto* traj = app.add_subcommand("trajectory", "Track resonances as the field is switched off");
  traj->add_option("--eps-start", ta.eps_start, "First field strength (default 0.1)");
  traj->add_option("--eps-end", ta.eps_end, "Last field strength (default 1e-3)");
  traj->add_option("--ratio", ta.ratio, "Schedule ratio in (0, 1) (default 0.8)");
  traj->add_option("--seed-box", ta.seed_box, "Seed search box re_min re_max im_min im_max")->expected(4);
  traj->add_option("--box", ta.box, "Tracking box (default: the seed box)")->expected(4);
  traj->add_option("--verdict", ta.verdict_path, "Verdict JSON path (default <out>.verdict.json, or stderr)");

  SMatrixArgs sa;
  auto* sm = app.add_subcommand("smatrix", "Scattering matrix and determinants at one energy");
  sm->add_option("--epsilon", sa.epsilon, "Field strength (default 0)");
  sm->add_option("--zeta", sa.zeta, "Spectral parameter a+bi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_common(common);
    if (*verify) return cmd_verify(common, suite);
    if (*res) return cmd_resonances(common, ra);
    if (*traj) return cmd_trajectory(common, ta);
    if (*sm) return cmd_smatrix(common, sa);
  } catch (const UsageError& e) {
    std::cerr << "starkres: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "starkres: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
