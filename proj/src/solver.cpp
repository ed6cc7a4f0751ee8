#include "kirchhoff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

void SolveOptions::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(pohozaev_tol > 0.0)) throw std::invalid_argument("pohozaev_tol must be positive");
  if (!(init_width > 0.0)) throw std::invalid_argument("init_width must be positive");
  if (init == InitKind::Given && !initial) throw std::invalid_argument("init = given needs an initial field");
}

std::string to_string(InitKind kind) {
  switch (kind) {
  case InitKind::Gaussian: return "gaussian";
  case InitKind::Random: return "random";
  case InitKind::Given: return "given";
  }
  return "?";
}

std::string to_string(Preconditioner p) {
  switch (p) {
  case Preconditioner::None: return "none";
  case Preconditioner::RadialWeight: return "radial_weight";
  case Preconditioner::Sobolev: return "sobolev";
  }
  return "?";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "gaussian") return InitKind::Gaussian;
  if (text == "random") return InitKind::Random;
  if (text == "given") return InitKind::Given;
  throw std::invalid_argument("unknown init kind '" + text + "' (gaussian, random, given)");
}

Preconditioner parse_preconditioner(const std::string& text) {
  if (text == "none") return Preconditioner::None;
  if (text == "radial_weight") return Preconditioner::RadialWeight;
  if (text == "sobolev") return Preconditioner::Sobolev;
  throw std::invalid_argument("unknown preconditioner '" + text + "' (none, radial_weight, sobolev)");
}

RadialField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, double mass_target, bool positive,
                                double length) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> centre(0.0, 1.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> amp(positive ? 0.2 : -1.0, 1.0);
  struct Bump {
    double c, w, a;
  };
  std::vector<Bump> bumps(static_cast<std::size_t>(count(rng)));
  for (auto& b : bumps) b = {centre(rng) * length, width(rng) * length, amp(rng)};
  // Keep the field away from zero so normalisation is well conditioned.
  if (!positive) bumps.front().a = 1.0;
  auto profile = [&](double scale) {
    return sample(grid, [&](double r) {
      double v = 0.0;
      for (const auto& b : bumps) {
        const double x = (r * scale - b.c) / b.w;
        const double y = (r * scale + b.c) / b.w; // even extension keeps u smooth at 0
        v += b.a * (std::exp(-x * x) + std::exp(-y * y));
      }
      return v;
    });
  };
  // Dilate exactly so that |grad u|^2 / |u|^2 = 1 / length^2.
  const RadialField raw = profile(1.0);
  const RadialField u = profile(length * std::sqrt(kinetic(raw) / mass(raw)));
  return normalize_to(u, mass_target);
}

RadialField initial_field(const ProblemSpec& spec, const SolveOptions& opts) {
  switch (opts.init) {
  case InitKind::Gaussian: {
    const double w = opts.init_width * spec.length_unit;
    return normalize_to(sample(spec.grid, [w](double r) { return std::exp(-r * r / (w * w)); }), spec.c);
  }
  case InitKind::Random: {
    std::mt19937_64 rng(opts.seed);
    return random_smooth_field(spec.grid, rng, spec.c, true, spec.length_unit);
  }
  case InitKind::Given: {
    const RadialField& f = *opts.initial;
    if (f.grid_ptr() != spec.grid && (f.grid().size() != spec.grid->size() ||
                                      f.grid().radius() != spec.grid->radius()))
      throw std::invalid_argument("initial field lives on a different grid");
    RadialField u(spec.grid, std::vector<double>(f.values().begin(), f.values().end()));
    return normalize_to(u, spec.c);
  }
  }
  throw std::logic_error("unhandled init kind");
}

double natural_length(double a, double b, double c, const Nonlinearity& nl, GnCache& gn) {
  ProblemSpec free{a, b, c, nl, Potential::zero(), nullptr};
  return std::sqrt(c) / delta_bar(free, gn, 0.0).root;
}

std::string to_string(GridUnits u) { return u == GridUnits::Natural ? "natural" : "absolute"; }

GridUnits parse_grid_units(const std::string& text) {
  if (text == "natural") return GridUnits::Natural;
  if (text == "absolute") return GridUnits::Absolute;
  throw std::invalid_argument("unknown grid units '" + text + "' (natural, absolute)");
}

ProblemSpec build_problem(double a, double b, double c, const Nonlinearity& nl, const Potential& pot,
                          const GridSetup& setup, GnCache& gn) {
  if (!(setup.radius > 0.0)) throw std::invalid_argument("grid radius must be positive");
  const double unit = setup.units == GridUnits::Natural ? natural_length(a, b, c, nl, gn) : 1.0;
  ProblemSpec spec{a, b, c, nl, pot, make_grid(setup.radius * unit, setup.nodes), unit};
  spec.validate();
  return spec;
}

void require_admissible(const ProblemSpec& spec) {
  const auto rep = admissibility(spec.a, spec.nl, spec.pot, *spec.grid);
  if (rep.all_passed()) return;
  std::ostringstream msg;
  const double sig[3] = {rep.sigma.sigma1, rep.sigma.sigma2, rep.sigma.sigma3};
  msg << "potential " << spec.pot.name() << " is not admissible:";
  const char* sep = " ";
  for (int k = 0; k < 3; ++k) {
    if (!rep.passed[static_cast<std::size_t>(k)]) {
      msg << sep << "sigma" << k + 1 << " = " << sig[k] << " exceeds " << rep.bounds[static_cast<std::size_t>(k)];
      sep = ", ";
    }
  }
  throw AdmissibilityError(msg.str());
}

namespace {

// Relative size of the rounding in energy_J on grids of a few thousand nodes.
constexpr double kEnergyNoise = 1e-12;

double norm(const RadialField& u) { return std::sqrt(mass(u)); }

struct Stationarity {
  RadialField grad;   ///< J'(u)
  RadialField normal; ///< P'(u)
  double lambda = 0.0;
  double scale = 1.0;    ///< a K + b K^2
  double residual = 0.0; ///< |J' + lambda u| |u| / scale
  double tangent = 0.0;  ///< same with the P' component removed as well
};

Stationarity stationarity(const ProblemSpec& spec, const RadialField& u) {
  Stationarity s{gradient_J(spec, u), gradient_P(spec, u), 0.0, 1.0, 0.0, 0.0};
  const double K = kinetic(u);
  s.scale = spec.a * K + spec.b * K * K;
  s.lambda = lambda_estimate(spec, u, s.grad);
  const double nu = norm(u);
  RadialField r = s.grad;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += s.lambda * u[i];
  s.residual = norm(r) * nu / s.scale;

  // Least-squares multipliers for both constraints.
  const double uu = mass(u), uq = inner(u, s.normal), qq = mass(s.normal);
  const double gu = inner(s.grad, u), gq = inner(s.grad, s.normal);
  const double det = uu * qq - uq * uq;
  if (det > 1e-14 * uu * qq) {
    const double l1 = (-gu * qq + gq * uq) / det;
    const double l2 = (-gq * uu + gu * uq) / det;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = s.grad[i] + l1 * u[i] + l2 * s.normal[i];
  }
  s.tangent = norm(r) * nu / s.scale;
  return s;
}

RadialField apply_metric_inverse(const ProblemSpec& spec, const SolveOptions& opts, const RadialField& v,
                                 double lambda, double K) {
  switch (opts.preconditioner) {
  case Preconditioner::None:
    return v;
  case Preconditioner::RadialWeight: {
    RadialField out = v;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double r = v.grid().node(i);
      out[i] /= 1.0 + r * r;
    }
    return out;
  }
  case Preconditioner::Sobolev: {
    const double alpha = spec.a + spec.b * K;
    return solve_shifted_laplacian(v, alpha, std::max(lambda, 1e-2 * alpha * K / spec.c));
  }
  }
  return v;
}

// M^{-1} J' minus its M-orthogonal projection on span{M^{-1} u, M^{-1} P'},
// so the step is tangent to both the mass sphere and the Pohozaev set.
RadialField descent_direction(const ProblemSpec& spec, const SolveOptions& opts, const RadialField& u,
                              const Stationarity& st) {
  const double K = kinetic(u);
  const RadialField z = apply_metric_inverse(spec, opts, st.grad, st.lambda, K);
  const RadialField y1 = apply_metric_inverse(spec, opts, u, st.lambda, K);
  const RadialField y2 = apply_metric_inverse(spec, opts, st.normal, st.lambda, K);
  const double a11 = inner(y1, u), a12 = inner(y2, u), a21 = inner(y1, st.normal), a22 = inner(y2, st.normal);
  const double b1 = inner(z, u), b2 = inner(z, st.normal);
  const double det = a11 * a22 - a12 * a21;
  double c1 = b1 / a11, c2 = 0.0;
  if (std::abs(det) > 1e-14 * std::abs(a11 * a22)) {
    c1 = (b1 * a22 - b2 * a12) / det;
    c2 = (a11 * b2 - a21 * b1) / det;
  }
  RadialField d = z;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c1 * y1[i] + c2 * y2[i];
  return d;
}

} // namespace

SolveResult minimize_on_pohozaev(const ProblemSpec& spec, const SolveOptions& opts) {
  spec.validate();
  opts.validate();
  try {
    require_admissible(spec);
  } catch (const AdmissibilityError& e) {
    if (!opts.unsafe_skip_admissibility) throw;
    warn(std::string(e.what()) + "; solving anyway, results are not certified");
  }

  // Projections run an order of magnitude tighter than the acceptance test.
  const double proj_tol = 0.1 * opts.pohozaev_tol;
  Projection proj = project_pohozaev_detailed(spec, initial_field(spec, opts), proj_tol);

  SolveResult res;
  RadialField u = std::move(proj.field);
  double J = energy_J(spec, u);
  double t_u = proj.t_total;
  double tau = opts.step;
  const double tau_max = 1e3 * opts.step;
  Stationarity st = stationarity(spec, u);
  res.status = "max_iter reached";

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    TraceRow row{it, J, st.tangent, t_u, 0.0};
    if (st.tangent < opts.grad_tol) {
      res.trace.push_back(row);
      res.converged = true;
      res.status = "converged";
      break;
    }
    const RadialField d = descent_direction(spec, opts, u, st);
    // Keep the first trial within half a field norm; the unpreconditioned
    // gradient carries the units of J and can be many orders too long.
    tau = std::min(tau, 0.5 * norm(u) / norm(d));

    bool accepted = false, reused = false;
    for (int ls = 0; ls < 40; ++ls, tau *= 0.5) {
      RadialField trial = u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= tau * d[i];
      try {
        Projection p = project_pohozaev_detailed(spec, normalize_to(trial, spec.c), proj_tol);
        const double Jt = energy_J(spec, p.field);
        // Near convergence the decrease is of order tangent^2 and drowns in
        // the rounding of J; inside that band the tangent residual decides.
        std::optional<Stationarity> st_trial;
        if (!(Jt <= J)) {
          if (!(Jt - J <= kEnergyNoise * std::abs(J))) continue;
          st_trial = stationarity(spec, p.field);
          if (!(st_trial->tangent < st.tangent)) continue;
        }
        u = std::move(p.field);
        J = Jt;
        t_u = p.t_total;
        row.step = tau;
        accepted = true;
        if (st_trial) {
          st = std::move(*st_trial);
          reused = true;
        }
        break;
      } catch (const ProjectionError&) {
      } catch (const DegenerateFieldError&) {
      } catch (const DomainError&) {
      }
    }
    res.trace.push_back(row);
    if (!accepted) {
      res.status = "line search stalled";
      break;
    }
    tau = std::min(1.25 * tau, tau_max);
    if (!reused) st = stationarity(spec, u);
  }
  if (it == opts.max_iter) {
    res.trace.push_back({it, J, st.tangent, t_u, 0.0});
    if (st.tangent < opts.grad_tol) {
      res.converged = true;
      res.status = "converged";
    }
  }

  const auto m = compute_moments(spec, u);
  res.iterations = it;
  res.lambda = st.lambda;
  res.energy = J;
  res.kinetic = m.kinetic;
  res.pohozaev_residual = std::abs(pohozaev_P(spec, m)) / pohozaev_scale(spec, m);
  res.stationarity_residual = st.residual;
  res.tangent_residual = st.tangent;
  res.psi_second_at_1 = FiberFunction(spec, u)(1.0).psi_second;
  res.u = std::move(u);
  return res;
}

SolveResult reference_m(const ProblemSpec& spec, const SolveOptions& opts) {
  return minimize_on_pohozaev(spec.with_potential(Potential::zero()), opts);
}

namespace {

bool better(const SolveResult& x, const SolveResult& y) {
  if (x.converged != y.converged) return x.converged;
  if (std::abs(x.energy - y.energy) <= 1e-10) return x.kinetic < y.kinetic;
  return x.energy < y.energy;
}

} // namespace

MultiStart multistart(const ProblemSpec& spec, const SolveOptions& opts, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("multistart needs at least one seed");
  std::vector<std::future<SolveResult>> jobs;
  for (auto seed : seeds) {
    SolveOptions o = opts;
    o.seed = seed;
    o.init = InitKind::Random;
    jobs.push_back(std::async(std::launch::async, [spec, o] { return minimize_on_pohozaev(spec, o); }));
  }
  MultiStart out;
  for (auto& j : jobs) out.runs.push_back(j.get());
  for (std::size_t k = 1; k < out.runs.size(); ++k)
    if (better(out.runs[k], out.runs[out.best_index])) out.best_index = k;
  out.best = out.runs[out.best_index];
  return out;
}

DeltaBar delta_bar(const ProblemSpec& spec, GnCache& gn, double sigma2) {
  const double lead = spec.a - sigma2;
  if (!(lead > 0.0)) throw DomainError("delta_bar needs a > sigma2");
  DeltaBar out;
  std::vector<double> e;
  for (const auto& t : spec.nl.terms()) {
    const double C = gn.get(t.exponent).constant;
    out.K.push_back(3.0 * t.coefficient * (t.exponent - 2.0) / (2.0 * t.exponent) * C *
                    std::pow(spec.c, (6.0 - t.exponent) / 4.0));
    e.push_back(1.5 * (t.exponent - 2.0));
  }
  auto rhs = [&](double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) s += out.K[j] * std::pow(x, e[j]);
    return s;
  };
  // Both sides dominate near 0 on the left since every e_j > 4; scan upward
  // for the first sign change, then bisect.
  auto first_root = [&](double bq) {
    auto phi = [&](double x) { return lead * x * x + bq * x * x * x * x - rhs(x); };
    double lo = 1e-8, hi = 2e-8;
    while (phi(hi) > 0.0) {
      lo = hi;
      hi *= 1.5;
      if (hi > 1e12) throw std::runtime_error("delta_bar scan found no root");
    }
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
  };
  out.root = first_root(spec.b);
  if (e.size() == 1)
    out.envelope = std::pow(lead / out.K[0], 1.0 / (e[0] - 2.0));
  else
    out.envelope = first_root(0.0);
  return out;
}

DeltaBar delta_bar(const ProblemSpec& spec, GnCache& gn) {
  return delta_bar(spec, gn, sigma_bounds(spec.pot, *spec.grid).sigma2);
}

double multiplier_lower_bound(const ProblemSpec& spec, double sigma2, double K) {
  const double beta = spec.nl.beta();
  const double f = (3.0 - 0.5 * beta) * 2.0 / (3.0 * (beta - 2.0));
  return f * ((spec.a - sigma2) * K + spec.b * K * K) - sigma2 * K;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_solution(const ProblemSpec& spec, const SolveResult& result, GnCache& gn,
                                   const VerifyOptions& opts) {
  VerificationReport rep;
  const RadialField& u = result.u;
  auto add = [&](std::string name, double value, double bound, bool passed) {
    rep.checks.push_back({std::move(name), value, bound, passed});
  };

  const auto m = compute_moments(spec, u);
  const double K = m.kinetic;
  const double scale = pohozaev_scale(spec, m);
  const auto st = stationarity(spec, u);
  const auto sigma = sigma_bounds(spec.pot, *spec.grid);

  const double mass_err = std::abs(mass(u) - spec.c) / spec.c;
  add("mass", mass_err, 1e-8, mass_err < 1e-8);
  add("pde_residual", st.residual, opts.pde_tol, st.residual <= opts.pde_tol);
  const double pr = std::abs(pohozaev_P(spec, m)) / scale;
  add("pohozaev", pr, opts.pohozaev_tol, pr <= opts.pohozaev_tol);
  add("lambda_positive", st.lambda, 0.0, st.lambda > 0.0);

  const double psi2 = FiberFunction(spec, u)(1.0).psi_second;
  add("psi_second_negative", psi2, 0.0, psi2 < 0.0);
  const double psi2_bound = (-2.0 * spec.a + sigma.sigma3) * K + 1e-6 * scale;
  add("psi_second_bound", psi2, psi2_bound, psi2 <= psi2_bound);

  // J_A with A^2 = |grad u|^2 against b A^2 |grad u|^2 / 4.
  const double ja = energy_JA(spec, u, K);
  add("energy_JA_floor", ja, 0.25 * spec.b * K * K, ja >= 0.25 * spec.b * K * K);

  std::optional<DeltaBar> db;
  if (spec.a > sigma.sigma2) {
    db = delta_bar(spec, gn, sigma.sigma2);
    add("kinetic_floor", std::sqrt(K), db->root, std::sqrt(K) >= db->root);
    const double chain = multiplier_lower_bound(spec, sigma.sigma2, db->root * db->root) / spec.c;
    const double floor = (1.0 - opts.multiplier_slack) * chain;
    add("multiplier_bound", st.lambda, floor, st.lambda >= floor);
  } else {
    add("kinetic_floor", std::sqrt(K), NAN, false);
    add("multiplier_bound", st.lambda, NAN, false);
  }

  for (const auto& t : spec.nl.terms()) {
    std::ostringstream name;
    name << "gn_ratio_p" << t.exponent;
    const double ratio = verify_gn(u, t.exponent, gn.get(t.exponent));
    add(name.str(), ratio, 1.0 + opts.gn_tol, ratio <= 1.0 + opts.gn_tol);
  }
  return rep;
}

std::vector<SweepRow> mass_sweep(const SpecFactory& make, const std::vector<double>& c_values,
                                 const SolveOptions& opts) {
  for (std::size_t k = 0; k < c_values.size(); ++k) {
    if (!(c_values[k] > 0.0)) throw std::invalid_argument("sweep masses must be positive");
    if (k > 0 && !(c_values[k] > c_values[k - 1])) throw std::invalid_argument("sweep masses must ascend");
  }
  std::vector<std::future<SweepRow>> jobs;
  for (double c : c_values) {
    jobs.push_back(std::async(std::launch::async, [&make, &opts, c] {
      SweepRow row;
      row.c = c;
      try {
        const ProblemSpec s = make(c);
        const SolveResult with = minimize_on_pohozaev(s, opts);
        const SolveResult ref = reference_m(s, opts);
        row.m_tilde = with.energy;
        row.m_ref = ref.energy;
        row.lambda = with.lambda;
        row.kinetic = with.kinetic;
        row.pohozaev_residual = with.pohozaev_residual;
        row.converged = with.converged && ref.converged;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

std::vector<SweepRow> mass_sweep(const ProblemSpec& spec, const std::vector<double>& c_values,
                                 const SolveOptions& opts) {
  return mass_sweep([&spec](double c) { return spec.with_mass(c); }, c_values, opts);
}

} // namespace kirchhoff
