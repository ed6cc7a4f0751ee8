// kirchhoff: command-line front end.
//
//   kirchhoff check CONFIG
//   kirchhoff solve CONFIG [--seed N] [--out-dir DIR] [--unsafe-skip-admissibility]
//   kirchhoff sweep CONFIG --c 0.5,1,2,4
//   kirchhoff fiber-scan CONFIG [--field result.json] [--t-min T] [--t-max T] [--points N]
//   kirchhoff gn --p 5 [--p 4 ...]
//   kirchhoff verify result.json
//
// Exit codes: 0 success, 1 a check failed, 2 bad input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kirchhoff/config.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/io.hpp"

namespace fs = std::filesystem;
using namespace kirchhoff;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInput = 2;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool unsafe = false;
  std::string gn_cache;
};

// Thrown for bad user input that is not a ConfigError.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load(const Common& o) {
  RunConfig cfg = load_config(o.config_path);
  if (o.seed) cfg.solver.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  cfg.solver.unsafe_skip_admissibility = o.unsafe;
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

std::string fmt(double x, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void print_report(const VerificationReport& rep) {
  for (const auto& c : rep.checks)
    std::cout << "  " << (c.passed ? "ok  " : "FAIL") << "  " << c.name << "  value " << fmt(c.value, 8) << "  bound "
              << fmt(c.bound, 8) << '\n';
}

int cmd_check(const Common& o) {
  const RunConfig cfg = load(o);
  GnCache gn(o.gn_cache);
  const ProblemSpec spec = cfg.problem(gn);
  const Nonlinearity nl = cfg.nonlinearity();

  const GrowthReport growth = check_growth(nl, 2000);
  std::cout << "nonlinearity  alpha " << fmt(nl.alpha()) << "  beta " << fmt(nl.beta()) << '\n';
  std::cout << "growth  g(s)s/G(s) in [" << fmt(growth.min_ratio) << ", " << fmt(growth.max_ratio)
            << "]  min Gtilde'(s)s/Gtilde(s) " << fmt(growth.min_tilde_ratio) << " (needs > 14/3)  "
            << (growth.passed ? "ok" : "FAIL") << '\n';
  if (growth.violating_s) std::cout << "  first violation at s = " << fmt(*growth.violating_s) << '\n';

  const AdmissibilityReport adm = admissibility(cfg.a, nl, spec.pot, *spec.grid);
  const double sig[3] = {adm.sigma.sigma1, adm.sigma.sigma2, adm.sigma.sigma3};
  std::cout << "potential " << spec.pot.name() << '\n';
  for (int k = 0; k < 3; ++k)
    std::cout << "  sigma" << k + 1 << "  " << fmt(sig[k]) << "  limit " << fmt(adm.bounds[k]) << "  margin "
              << fmt(adm.margin[k]) << "  " << (adm.passed[k] ? "ok" : "FAIL") << '\n';

  return growth.passed && adm.all_passed() ? kOk : kFailed;
}

int cmd_solve(const Common& o) {
  const RunConfig cfg = load(o);
  GnCache gn(o.gn_cache);
  const ProblemSpec spec = cfg.problem(gn);
  const SolveResult res = minimize_on_pohozaev(spec, cfg.solver);
  const VerificationReport rep = verify_solution(spec, res, gn);
  const ConfigEntries entries = cfg.entries();

  if (cfg.write_json) {
    const auto path = out_path(cfg, "result.json");
    write_file(path, result_to_json(spec, res, rep, entries));
    std::cout << "wrote " << path << '\n';
  }
  if (cfg.write_csv) {
    const auto path = out_path(cfg, "trace.csv");
    std::ostringstream csv;
    write_trace_csv(csv, res, entries);
    write_file(path, csv.str());
    std::cout << "wrote " << path << '\n';
  }
  if (!o.gn_cache.empty()) gn.save();

  std::cout << "status      " << res.status << " after " << res.iterations << " iterations\n"
            << "energy      " << fmt(res.energy, 12) << '\n'
            << "lambda      " << fmt(res.lambda, 12) << '\n'
            << "|grad u|^2  " << fmt(res.kinetic, 12) << '\n'
            << "P residual  " << fmt(res.pohozaev_residual, 4) << '\n'
            << "tangent     " << fmt(res.tangent_residual, 4) << '\n'
            << "PDE         " << fmt(res.stationarity_residual, 4) << '\n'
            << "verification " << (rep.all_passed() ? "passed" : "FAILED") << '\n';
  print_report(rep);
  return res.converged && rep.all_passed() ? kOk : kFailed;
}

int cmd_sweep(const Common& o, std::vector<double> cs) {
  const RunConfig cfg = load(o);
  if (cs.empty()) throw InputError("--c needs at least one mass");
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!(cs[i] > 0.0) || (i > 0 && !(cs[i] > cs[i - 1]))) throw InputError("--c values must be positive and ascending");

  GnCache gn(o.gn_cache);
  gn.prefetch([&] {
    std::vector<double> ps;
    for (const auto& t : cfg.terms) ps.push_back(t.exponent);
    return ps;
  }());
  const auto rows = mass_sweep([&](double c) { return cfg.problem(gn, c); }, cs, cfg.solver);

  const auto path = out_path(cfg, "sweep.csv");
  std::ostringstream csv;
  write_sweep_csv(csv, rows, cfg.entries());
  write_file(path, csv.str());
  std::cout << "wrote " << path << '\n';
  if (!o.gn_cache.empty()) gn.save();

  const bool no_potential = cfg.potential().is_zero();
  bool ok = true;
  std::cout << "       c            m_tilde                m  lambda\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::cout << fmt(r.c, 6) << "  " << fmt(r.m_tilde, 12) << "  " << fmt(r.m_ref, 12) << "  " << fmt(r.lambda, 6);
    std::vector<std::string> problems;
    if (!r.error.empty()) problems.push_back(r.error);
    if (!r.converged) problems.push_back("not converged");
    if (!(r.m_tilde > 0.0)) problems.push_back("m_tilde <= 0");
    if (!(r.lambda > 0.0)) problems.push_back("lambda <= 0");
    const double tol = 1e-6 * std::max(1.0, std::abs(r.m_ref));
    if (no_potential ? std::abs(r.m_tilde - r.m_ref) > tol : !(r.m_ref - r.m_tilde > 1e-6))
      problems.push_back(no_potential ? "m_tilde != m" : "m_tilde not below m");
    if (i > 0 && !(rows[i - 1].m_ref - r.m_ref > 1e-6)) problems.push_back("m not strictly decreasing");
    for (const auto& p : problems) std::cout << "  [" << p << ']';
    std::cout << '\n';
    ok = ok && problems.empty();
  }
  return ok ? kOk : kFailed;
}

int cmd_fiber(const Common& o, const std::string& field_path, double t_min, double t_max, int points) {
  if (!(t_min > 0.0 && t_max > t_min)) throw InputError("need 0 < t-min < t-max");
  if (points < 2) throw InputError("--points must be at least 2");
  const RunConfig cfg = load(o);
  GnCache gn(o.gn_cache);

  std::optional<StoredResult> stored;
  if (!field_path.empty()) stored = result_from_json(read_file(field_path));
  const ProblemSpec spec = stored ? stored_problem(*stored) : cfg.problem(gn);
  const RadialField u = stored ? stored->result.u : initial_field(spec, cfg.solver);

  const FiberProfile profile = fiber_scan(spec, u, log_grid(t_min, t_max, points));
  const auto path = out_path(cfg, "fiber.csv");
  std::ostringstream csv;
  write_fiber_csv(csv, profile, cfg.entries());
  write_file(path, csv.str());
  std::cout << "wrote " << path << '\n';

  const int changes = profile.sign_changes();
  const FiberMaximizer fm = maximize_fiber(spec, u);
  std::cout << "sign changes of psi'  " << changes << '\n'
            << "t_u                   " << fmt(fm.t_u, 12) << '\n'
            << "psi(t_u)              " << fmt(fm.psi_at_max, 12) << '\n'
            << "psi''(t_u)            " << fmt(fm.psi_second_at_max, 6) << '\n';
  const bool inside = fm.t_u >= t_min && fm.t_u <= t_max;
  if (!inside) std::cout << "t_u lies outside the scanned range\n";
  return changes == 1 && fm.psi_second_at_max < 0.0 && inside ? kOk : kFailed;
}

int cmd_gn(const std::vector<double>& ps, const std::optional<std::string>& out_dir) {
  bool ok = true;
  for (double p : ps) {
    const GNData data = solve_Q(p);
    const double ratio = verify_gn(data.Q, data);
    const bool pass = std::abs(ratio - 1.0) <= 1e-3 && data.residual < 1e-6;
    std::cout << "p " << fmt(p) << "  |Q|_2^2 " << fmt(data.summary.q_mass, 12) << "  C " << fmt(data.summary.constant, 12)
              << "  Q(0) " << fmt(data.summary.amplitude, 10) << "  ratio " << fmt(ratio, 10) << "  residual "
              << fmt(data.residual, 3) << "  " << (pass ? "ok" : "FAIL") << '\n';
    if (out_dir) {
      fs::create_directories(*out_dir);
      const auto path = (fs::path(*out_dir) / ("gn_p" + format_double(p) + ".json")).string();
      write_file(path, to_json(data.summary));
      std::cout << "wrote " << path << '\n';
    }
    ok = ok && pass;
  }
  return ok ? kOk : kFailed;
}

int cmd_verify(const std::string& path, const std::string& gn_cache) {
  const StoredResult stored = result_from_json(read_file(path));
  const ProblemSpec spec = stored_problem(stored);
  GnCache gn(gn_cache);
  const VerificationReport rep = verify_solution(spec, stored.result, gn);

  const bool same = same_report(rep, stored.report);
  print_report(rep);
  std::cout << "stored report " << (same ? "reproduced" : "NOT reproduced") << '\n'
            << "verification " << (rep.all_passed() ? "passed" : "FAILED") << '\n';
  return same && rep.all_passed() ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized ground states of a Kirchhoff equation on the Pohozaev manifold"};
  app.set_version_flag("--version", artifact_version());
  app.require_subcommand(1);

  Common o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", o.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override solver.seed");
    sub->add_option("--out-dir", o.out_dir, "override output.dir");
    sub->add_flag("--unsafe-skip-admissibility", o.unsafe, "solve even when a potential window fails");
  };
  app.add_option("--gn-cache", o.gn_cache, "JSON file caching sharp GN constants");

  auto* check = app.add_subcommand("check", "growth and admissibility report");
  add_common(check);

  auto* solve = app.add_subcommand("solve", "minimize on the Pohozaev set; writes result.json, trace.csv");
  add_common(solve);

  std::vector<double> masses;
  auto* sweep = app.add_subcommand("sweep", "m_tilde(c) and m(c) over a mass list; writes sweep.csv");
  add_common(sweep);
  sweep->add_option("--c", masses, "masses, ascending")->required()->delimiter(',');

  std::string field_path;
  double t_min = 1e-3, t_max = 1e3;
  int points = 400;
  auto* fiber = app.add_subcommand("fiber-scan", "tabulate the fiber profile; writes fiber.csv");
  add_common(fiber);
  fiber->add_option("--field", field_path, "result.json to scan instead of the initial field")
      ->check(CLI::ExistingFile);
  fiber->add_option("--t-min", t_min, "smallest t")->capture_default_str();
  fiber->add_option("--t-max", t_max, "largest t")->capture_default_str();
  fiber->add_option("--points", points, "log-spaced points")->capture_default_str();

  std::vector<double> exponents;
  std::optional<std::string> gn_out;
  auto* gn = app.add_subcommand("gn", "sharp GN constant and optimizer check");
  gn->add_option("--p", exponents, "exponent in (2, 6)")->required();
  gn->add_option("--out-dir", gn_out, "write gn_p<p>.json here");

  std::string result_path;
  auto* verify = app.add_subcommand("verify", "re-verify a stored result.json");
  verify->add_option("result", result_path, "result.json")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  set_warning_sink([](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; });
  try {
    if (*check) return cmd_check(o);
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o, masses);
    if (*fiber) return cmd_fiber(o, field_path, t_min, t_max, points);
    if (*gn) return cmd_gn(exponents, gn_out);
    if (*verify) return cmd_verify(result_path, o.gn_cache);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const AdmissibilityError& e) {
    std::cerr << e.what() << "\n(--unsafe-skip-admissibility overrides)\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kInput;
}
