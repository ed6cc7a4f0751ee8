#include "kirchhoff/gn.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

struct Coefficients {
  double p, A, B, rho;
};

Coefficients coefficients(double p) {
  if (!(p > 2.0 && p < 6.0)) {
    std::ostringstream msg;
    msg << "GN exponent p = " << p << " outside (2, 6)";
    throw DomainError(msg.str());
  }
  const double A = (3.0 * p - 6.0) / 4.0;
  const double B = (6.0 - p) / 4.0;
  return {p, A, B, std::sqrt(B / A)};
}

enum class Verdict { TooSmall, TooLarge, Undecided };

struct Shot {
  Verdict verdict = Verdict::Undecided;
  std::size_t depart = 0; // first node where the verdict became known
  std::vector<double> q;
};

// RK4 from node to node on r_i = (i + 1/2) h, starting from the series
// Q(r) = s + q2 r^2 at the first node. Runs up to `steps` nodes.
Shot shoot(const Coefficients& k, double s, double h, std::size_t steps) {
  Shot shot;
  shot.q.reserve(steps);
  auto accel = [&](double r, double q, double dq) {
    return (k.B * q - std::pow(std::abs(q), k.p - 2.0) * q) / k.A - 2.0 * dq / r;
  };
  const double q2 = (k.B * s - std::pow(s, k.p - 1.0)) / (6.0 * k.A);
  double r = 0.5 * h;
  double q = s + q2 * r * r;
  double dq = 2.0 * q2 * r;
  shot.q.push_back(q);
  for (std::size_t i = 1; i < steps; ++i) {
    const double k1q = dq, k1d = accel(r, q, dq);
    const double k2q = dq + 0.5 * h * k1d, k2d = accel(r + 0.5 * h, q + 0.5 * h * k1q, k2q);
    const double k3q = dq + 0.5 * h * k2d, k3d = accel(r + 0.5 * h, q + 0.5 * h * k2q, k3q);
    const double k4q = dq + h * k3d, k4d = accel(r + h, q + h * k3q, k4q);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    dq += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    r += h;
    shot.q.push_back(q);
    if (q <= 0.0) {
      shot.verdict = Verdict::TooLarge;
      shot.depart = i;
      return shot;
    }
    if (dq > 0.0) {
      shot.verdict = Verdict::TooSmall;
      shot.depart = i;
      return shot;
    }
  }
  shot.depart = steps;
  return shot;
}

// Relative residual |-A lap Q + B Q - Q^{p-1}|_2 / |Q|_2 on the grid.
double discrete_residual(const Coefficients& k, const RadialField& Q) {
  const RadialField lap = laplacian_radial(Q);
  const auto& g = Q.grid();
  double num = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = -k.A * lap[i] + k.B * Q[i] - std::pow(std::abs(Q[i]), k.p - 2.0) * Q[i];
    num += g.weight(i) * e * e;
  }
  return std::sqrt(num / mass(Q));
}

// Newton on A S Q + W (B Q - Q^{p-1}) = 0. The Jacobian is symmetric
// tridiagonal; plain Thomas elimination is fine this close to the root.
void newton_polish(const Coefficients& k, RadialField& Q) {
  const auto& g = Q.grid();
  const auto f = g.face_coefficients();
  const std::size_t n = g.size();
  std::vector<double> diag(n), off(n), rhs(n), cp(n), dp(n);
  for (int it = 0; it < 20; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? f[i - 1] : 0.0;
      const double qm = i > 0 ? Q[i - 1] : 0.0;
      const double qp = i + 1 < n ? Q[i + 1] : 0.0;
      const double stiff = (left + f[i]) * Q[i] - left * qm - f[i] * qp;
      const double pw = std::pow(std::abs(Q[i]), k.p - 2.0);
      rhs[i] = -(k.A * stiff + g.weight(i) * (k.B * Q[i] - pw * Q[i]));
      diag[i] = k.A * (left + f[i]) + g.weight(i) * (k.B - (k.p - 1.0) * pw);
      off[i] = -k.A * f[i];
    }
    cp[0] = off[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = diag[i] - off[i - 1] * cp[i - 1];
      cp[i] = off[i] / m;
      dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / m;
    }
    double step = 0.0, size = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const double d = dp[i] - (i + 1 < n ? cp[i] * dp[i + 1] : 0.0);
      dp[i] = d;
      Q[i] += d;
      step = std::max(step, std::abs(d));
      size = std::max(size, std::abs(Q[i]));
    }
    if (!std::isfinite(step)) throw ShootingError("Newton polish of Q diverged");
    if (step <= 1e-15 * size) break;
  }
}

} // namespace

GNData solve_Q(double p, const GnSolveOptions& opts) {
  const auto k = coefficients(p);
  // Q(0) stays within a small factor of 4 across (2, 6), so this tracks the
  // width of the core well enough to size the spacing.
  const double core = std::sqrt(k.A / std::pow(4.0, p - 2.0));
  const double radius = opts.decay_lengths / k.rho;
  const double wanted = std::ceil(radius * opts.nodes_per_core / core);
  auto nodes = static_cast<std::size_t>(std::min(wanted, static_cast<double>(opts.max_nodes)));
  nodes = std::max<std::size_t>(nodes + nodes % 2, 64);
  GNData fine = solve_Q(p, make_grid(radius, nodes), opts.max_bisections);
  if (!opts.extrapolate) return fine;

  const GNData coarse = solve_Q(p, make_grid(radius, nodes / 2), opts.max_bisections);
  fine.summary.q_mass = (4.0 * fine.discrete_q_mass - coarse.discrete_q_mass) / 3.0;
  fine.summary.amplitude = (4.0 * fine.summary.amplitude - coarse.summary.amplitude) / 3.0;
  fine.summary.constant = p / (2.0 * std::pow(fine.summary.q_mass, 0.5 * (p - 2.0)));
  return fine;
}

GNData solve_Q(double p, const GridPtr& grid, int max_bisections) {
  const auto k = coefficients(p);
  const double h = grid->spacing();
  const std::size_t n = grid->size();
  const std::size_t steps = 4 * n;

  // Amplitudes below the constant solution B^{1/(p-2)} turn upward at once.
  const double plateau = std::pow(k.B, 1.0 / (p - 2.0));
  double lo = 0.5 * plateau;
  double hi = 2.0 * plateau;
  Shot lo_shot = shoot(k, lo, h, steps);
  if (lo_shot.verdict != Verdict::TooSmall) throw ShootingError("lower amplitude bracket is not too small");
  Shot hi_shot = shoot(k, hi, h, steps);
  for (int grow = 0; hi_shot.verdict != Verdict::TooLarge; ++grow) {
    if (grow == 60) throw ShootingError("no amplitude crosses zero; cannot bracket Q(0)");
    lo = hi;
    lo_shot = std::move(hi_shot);
    hi *= 2.0;
    hi_shot = shoot(k, hi, h, steps);
  }

  GNData out;
  bool separated = false;
  for (; out.shots < max_bisections; ++out.shots) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      separated = true;
      break;
    }
    Shot s = shoot(k, mid, h, steps);
    if (s.verdict == Verdict::TooLarge) {
      hi = mid;
      hi_shot = std::move(s);
    } else {
      // An undecided shot already decays across the whole range.
      lo = mid;
      lo_shot = std::move(s);
      if (lo_shot.verdict == Verdict::Undecided) {
        separated = true;
        break;
      }
    }
  }
  if (!separated) {
    std::ostringstream msg;
    msg << "amplitude bisection for p = " << p << " did not close in " << max_bisections << " steps";
    throw ShootingError(msg.str());
  }

  // Trust the shot until 10 decay lengths before it departs.
  const std::size_t depart = std::min(lo_shot.depart, hi_shot.depart);
  const double r_trust = grid->node(depart) - 10.0 / k.rho;
  std::size_t splice = 0;
  while (splice + 1 < n && grid->node(splice + 1) <= r_trust) ++splice;
  if (splice + 1 < n && lo_shot.q[splice] > 1e-4 * lo) {
    std::ostringstream msg;
    msg << "shot for p = " << p << " departs while Q is still " << lo_shot.q[splice] / lo << " of Q(0)";
    throw ShootingError(msg.str());
  }

  RadialField Q(grid);
  const double rs = grid->node(splice);
  for (std::size_t i = 0; i < n; ++i) {
    if (i <= splice) {
      Q[i] = lo_shot.q[i];
    } else {
      const double r = grid->node(i);
      Q[i] = lo_shot.q[splice] * (rs / r) * std::exp(-k.rho * (r - rs));
    }
  }
  if (Q[n - 1] > 1e-10 * lo) throw ShootingError("grid too short for Q to decay below 1e-10 of its amplitude");

  out.shoot_residual = discrete_residual(k, Q);
  newton_polish(k, Q);
  out.residual = discrete_residual(k, Q);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(Q[i] > 0.0) || (i > 0 && Q[i] > Q[i - 1]))
      throw ShootingError("polished Q is not positive and decreasing");
  }

  out.summary.p = p;
  out.discrete_q_mass = mass(Q);
  out.summary.q_mass = out.discrete_q_mass;
  out.summary.constant = p / (2.0 * std::pow(out.summary.q_mass, 0.5 * (p - 2.0)));
  out.summary.amplitude = lo;
  out.summary.radius = grid->radius();
  out.summary.nodes = n;
  out.Q = std::move(Q);
  return out;
}

double verify_gn(const RadialField& u, double p, const GnConstant& gn) {
  if (std::abs(p - gn.p) > 1e-12 * p) throw std::invalid_argument("GN data computed for a different exponent");
  const double m = mass(u);
  if (!(m > 0.0)) throw DomainError("GN quotient of a zero field");
  const double K = kinetic(u);
  const double lhs = lp_integral(u, p);
  return lhs / (gn.constant * std::pow(K, (3.0 * p - 6.0) / 4.0) * std::pow(m, (6.0 - p) / 4.0));
}

double verify_gn(const RadialField& u, const GNData& gn) { return verify_gn(u, gn.summary.p, gn.summary); }

namespace {

nlohmann::json gn_json(const GnConstant& gn) {
  return {{"p", gn.p},
          {"q_mass", gn.q_mass},
          {"constant", gn.constant},
          {"amplitude", gn.amplitude},
          {"grid", {{"radius", gn.radius}, {"nodes", gn.nodes}}}};
}

GnConstant gn_parse(const nlohmann::json& j) {
  GnConstant gn;
  gn.p = j.at("p").get<double>();
  gn.q_mass = j.at("q_mass").get<double>();
  gn.constant = j.at("constant").get<double>();
  gn.amplitude = j.value("amplitude", 0.0);
  if (j.contains("grid")) {
    gn.radius = j["grid"].value("radius", 0.0);
    gn.nodes = j["grid"].value("nodes", std::size_t{0});
  }
  return gn;
}

} // namespace

std::string to_json(const GnConstant& gn) { return gn_json(gn).dump(2); }

GnConstant gn_from_json(const std::string& text) { return gn_parse(nlohmann::json::parse(text)); }

GnCache::GnCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("entries")) {
    warn("ignoring unreadable GN cache " + path_);
    return;
  }
  for (const auto& e : j["entries"]) {
    const auto gn = gn_parse(e);
    table_[gn.p] = gn;
  }
}

GnConstant GnCache::get(double p) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = table_.find(p); it != table_.end()) return it->second;
  }
  // Solve outside the lock; a duplicate solve for the same p is harmless.
  const GnConstant gn = solve_Q(p, options).summary;
  std::lock_guard lock(mutex_);
  return table_.emplace(p, gn).first->second;
}

void GnCache::prefetch(const std::vector<double>& exponents) {
  std::vector<std::future<GnConstant>> jobs;
  for (double p : exponents) jobs.push_back(std::async(std::launch::async, [this, p] { return get(p); }));
  for (auto& j : jobs) j.get();
}

void GnCache::save() const {
  if (path_.empty()) return;
  nlohmann::json j;
  j["schema"] = 1;
  j["entries"] = nlohmann::json::array();
  {
    std::lock_guard lock(mutex_);
    for (const auto& [p, gn] : table_) j["entries"].push_back(gn_json(gn));
  }
  std::ofstream out(path_);
  if (!out) throw std::runtime_error("cannot write GN cache " + path_);
  out << j.dump(2) << '\n';
}

} // namespace kirchhoff
