#include "kirchhoff/fiber.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr double kMinT = 1e-6;
constexpr double kMaxT = 1e6;

void require_on_sphere(const ProblemSpec& spec, const RadialField& u) {
  const double m = mass(u);
  if (!(m > 0.0)) throw std::invalid_argument("fiber operations need a nonzero field");
  if (std::abs(m - spec.c) > 1e-8 * spec.c) {
    std::ostringstream msg;
    msg << "field mass " << m << " differs from c = " << spec.c;
    throw std::invalid_argument(msg.str());
  }
}

} // namespace

FiberMaximizer maximize_fiber(const ProblemSpec& spec, const RadialField& u) {
  require_on_sphere(spec, u);
  const FiberFunction fiber(spec, u);
  FiberMaximizer out;

  const FiberValues at_one = fiber(1.0);
  double lo = 1.0, hi = 1.0;
  if (at_one.psi_prime == 0.0) {
    out.psi_at_max = at_one.psi;
    out.psi_second_at_max = at_one.psi_second;
    return out;
  }
  if (at_one.psi_prime > 0.0) {
    hi = 2.0;
    while (fiber.psi_prime(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kMaxT) throw DegenerateFieldError("Psi' stays positive up to t = 1e6; field too spread for the grid");
    }
  } else {
    lo = 0.5;
    while (fiber.psi_prime(lo) < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < kMinT)
        throw DegenerateFieldError("Psi' stays negative down to t = 1e-6; field too concentrated for the grid");
    }
  }

  // Psi' > 0 at lo and < 0 at hi.
  double t = 0.5 * (lo + hi);
  FiberValues v = fiber(t);
  int it = 0;
  for (; it < 400; ++it) {
    t = 0.5 * (lo + hi);
    v = fiber(t);
    if (std::abs(v.psi_prime) < 1e-10 * std::max(1.0, std::abs(v.psi))) break;
    if (v.psi_prime > 0.0)
      lo = t;
    else
      hi = t;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }

  // Newton polish, kept inside the bracket and only while |Psi'| shrinks.
  for (int k = 0; k < 8 && v.psi_prime != 0.0 && v.psi_second < 0.0; ++k) {
    const double next = t - v.psi_prime / v.psi_second;
    if (!(next > lo && next < hi)) break;
    const FiberValues w = fiber(next);
    ++it;
    if (!(std::abs(w.psi_prime) < std::abs(v.psi_prime))) break;
    t = next;
    v = w;
  }

  out.t_u = t;
  out.psi_at_max = v.psi;
  out.psi_prime_at_max = v.psi_prime;
  out.psi_second_at_max = v.psi_second;
  out.t_lo = lo;
  out.t_hi = hi;
  out.iterations = it;
  return out;
}

Projection project_pohozaev_detailed(const ProblemSpec& spec, const RadialField& u, double tolerance) {
  constexpr int kMaxRounds = 60;
  // Root-find in the total dilation T, always resampling the original field
  // so interpolation errors do not compound. The residual is g(T) = log t_u of
  // w(T), which vanishes with P(w(T)). Secant steps in log T, falling back to
  // bisection of the sign bracket.
  Projection proj{u, 1.0, 0, {}};
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  double x = 0.0, g = 0.0, x_prev = 0.0, g_prev = 0.0;
  double residual = 0.0;
  for (int round = 0; round < kMaxRounds; ++round) {
    proj.last = maximize_fiber(spec, proj.field);
    ++proj.rounds;
    if (!(proj.last.psi_second_at_max < 0.0)) {
      std::ostringstream msg;
      msg << "fiber critical point at t = " << proj.last.t_u << " has Psi'' = " << proj.last.psi_second_at_max
          << " >= 0";
      throw ProjectionError(msg.str());
    }
    g = std::log(proj.last.t_u);
    double next = x + g;
    if (round > 0) {
      const auto m = compute_moments(spec, proj.field);
      residual = std::abs(pohozaev_P(spec, m)) / pohozaev_scale(spec, m);
      if (residual <= tolerance && std::abs(proj.last.t_u - 1.0) < 1e-3) return proj;
      (g > 0.0 ? lo : hi) = x;
      if (g != g_prev) next = x - g * (x - x_prev) / (g - g_prev);
    }
    if (!(next > lo && next < hi)) {
      if (std::isinf(lo))
        next = hi - 1.0;
      else if (std::isinf(hi))
        next = lo + 1.0;
      else
        next = 0.5 * (lo + hi);
    }
    if (!std::isfinite(next) || next == x) break;
    x_prev = x;
    g_prev = g;
    x = next;
    proj.t_total = std::exp(x);
    RadialField moved = resample(u, proj.t_total);
    if (!(mass(moved) > 0.0)) {
      std::ostringstream msg;
      msg << "dilation by " << proj.t_total << " leaves nothing the grid can resolve";
      throw ProjectionError(msg.str());
    }
    proj.field = normalize_to(moved, spec.c);
  }
  std::ostringstream msg;
  msg << "projection stalled after " << proj.rounds << " rounds with |P|/scale = " << residual;
  throw ProjectionError(msg.str());
}

RadialField project_pohozaev(const ProblemSpec& spec, const RadialField& u) {
  return project_pohozaev_detailed(spec, u).field;
}

int FiberProfile::sign_changes() const {
  int changes = 0;
  int last = 0;
  for (double d : psi_prime) {
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

void FiberProfile::write_csv(std::ostream& out) const {
  out << "t,psi,psi_prime,psi_second\n";
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < t.size(); ++k)
    out << t[k] << ',' << psi[k] << ',' << psi_prime[k] << ',' << psi_second[k] << '\n';
  out.precision(old);
}

FiberProfile fiber_scan(const ProblemSpec& spec, const RadialField& u, const std::vector<double>& t_grid) {
  const FiberFunction fiber(spec, u);
  FiberProfile profile;
  profile.t.reserve(t_grid.size());
  for (double t : t_grid) {
    const FiberValues v = fiber(t);
    profile.t.push_back(t);
    profile.psi.push_back(v.psi);
    profile.psi_prime.push_back(v.psi_prime);
    profile.psi_second.push_back(v.psi_second);
  }
  return profile;
}

std::vector<double> log_grid(double t_min, double t_max, int count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) throw std::invalid_argument("bad log grid");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(t_min);
  const double b = std::log(t_max);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

} // namespace kirchhoff
