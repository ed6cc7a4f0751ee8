#include "kirchhoff/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

Nonlinearity::Nonlinearity(std::vector<PowerTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("nonlinearity needs at least one power term");
  alpha_ = std::numeric_limits<double>::infinity();
  beta_ = -alpha_;
  for (const auto& term : terms_) {
    if (!(term.coefficient > 0.0) || !std::isfinite(term.coefficient))
      throw std::invalid_argument("power term coefficients must be positive");
    if (!(term.exponent > kSupercriticalExponent && term.exponent < kCriticalSobolevExponent)) {
      std::ostringstream msg;
      msg << "exponent " << term.exponent << " outside the mass-supercritical window (14/3, 6)";
      throw std::invalid_argument(msg.str());
    }
    alpha_ = std::min(alpha_, term.exponent);
    beta_ = std::max(beta_, term.exponent);
  }
}

double Nonlinearity::g(double s) const {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coefficient * std::pow(a, t.exponent - 1.0);
  return s > 0.0 ? sum : -sum;
}

double Nonlinearity::G(double s) const {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coefficient / t.exponent * std::pow(a, t.exponent);
  return sum;
}

double Nonlinearity::Gtilde(double s) const {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  double sum = 0.0;
  for (const auto& t : terms_)
    sum += t.coefficient * (t.exponent - 2.0) / (2.0 * t.exponent) * std::pow(a, t.exponent);
  return sum;
}

double Nonlinearity::Gtilde_prime_times_s(double s) const {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coefficient * (t.exponent - 2.0) / 2.0 * std::pow(a, t.exponent);
  return sum;
}

Nonlinearity Nonlinearity::scaled(double factor) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= factor;
  return Nonlinearity(std::move(terms));
}

GrowthReport check_growth(const Nonlinearity& nl, int samples) {
  if (samples < 1) throw std::invalid_argument("check_growth needs at least one sample");
  GrowthReport report;
  report.min_ratio = report.min_tilde_ratio = report.envelope_lower = std::numeric_limits<double>::infinity();
  report.max_ratio = report.envelope_upper = 0.0;
  const double lo = std::log(1e-6);
  const double hi = std::log(1e6);
  // Exact interval arithmetic is not needed; 64 ulps absorb rounding in the ratios.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon();
  auto visit = [&](double x) {
    for (double sign : {1.0, -1.0}) {
      const double s = sign * std::exp(x);
      const double G = nl.G(s);
      const double ratio = nl.g(s) * s / G;
      const double tilde_ratio = nl.Gtilde_prime_times_s(s) / nl.Gtilde(s);
      const double as = std::abs(s);
      const double pa = std::pow(as, nl.alpha());
      const double pb = std::pow(as, nl.beta());
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      report.min_tilde_ratio = std::min(report.min_tilde_ratio, tilde_ratio);
      report.envelope_lower = std::min(report.envelope_lower, G / std::min(pa, pb));
      report.envelope_upper = std::max(report.envelope_upper, G / std::max(pa, pb));
      const bool ok = G > 0.0 && ratio >= nl.alpha() * (1.0 - slack) && ratio <= nl.beta() * (1.0 + slack) &&
                      tilde_ratio > kSupercriticalExponent;
      if (!ok && !report.violating_s) {
        report.passed = false;
        report.violating_s = s;
      }
    }
  };
  for (int k = 0; k < samples; ++k) visit(samples == 1 ? 0.0 : lo + (hi - lo) * k / (samples - 1));
  // For power sums both envelope constants are attained at |s| = 1.
  visit(0.0);
  return report;
}

Potential Potential::zero() { return {PotentialKind::Zero, 0.0, 1.0}; }

Potential Potential::hardy(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("Hardy strength must be nonnegative");
  return {PotentialKind::Hardy, mu, 1.0};
}

Potential Potential::gaussian_well(double depth, double width) {
  if (!(depth >= 0.0) || !std::isfinite(depth)) throw std::invalid_argument("well depth must be nonnegative");
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("well width must be positive");
  return {PotentialKind::GaussianWell, depth, width};
}

std::string Potential::name() const {
  switch (kind_) {
  case PotentialKind::Zero: return "zero";
  case PotentialKind::Hardy: return "hardy";
  case PotentialKind::GaussianWell: return "gaussian";
  }
  return "unknown";
}

double Potential::V(double r) const {
  switch (kind_) {
  case PotentialKind::Zero: return 0.0;
  case PotentialKind::Hardy: return -strength_ / (r * r);
  case PotentialKind::GaussianWell: {
    const double x = r / width_;
    return -strength_ * std::exp(-x * x);
  }
  }
  return 0.0;
}

double Potential::W(double r) const {
  switch (kind_) {
  case PotentialKind::Zero: return 0.0;
  case PotentialKind::Hardy: return strength_ / (r * r);
  case PotentialKind::GaussianWell: {
    const double x2 = (r / width_) * (r / width_);
    return strength_ * x2 * std::exp(-x2);
  }
  }
  return 0.0;
}

double Potential::r_dW(double r) const {
  switch (kind_) {
  case PotentialKind::Zero: return 0.0;
  case PotentialKind::Hardy: return -2.0 * strength_ / (r * r);
  case PotentialKind::GaussianWell: {
    const double x2 = (r / width_) * (r / width_);
    return strength_ * (2.0 * x2 - 2.0 * x2 * x2) * std::exp(-x2);
  }
  }
  return 0.0;
}

double Potential::Upsilon(double r) const { return 4.0 * W(r) + r_dW(r); }

std::optional<double> Potential::homogeneity() const {
  switch (kind_) {
  case PotentialKind::Zero: return 0.0;
  case PotentialKind::Hardy: return 2.0;
  case PotentialKind::GaussianWell: return std::nullopt;
  }
  return std::nullopt;
}

Potential Potential::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("potential scale factor must be nonnegative");
  return {kind_, strength_ * factor, width_};
}

double rayleigh_max(const RadialGrid& grid, const std::vector<double>& multiplier, int max_iter, double tol) {
  const std::size_t n = grid.size();
  if (multiplier.size() != n) throw std::invalid_argument("multiplier size does not match grid");
  if (std::all_of(multiplier.begin(), multiplier.end(), [](double f) { return f == 0.0; })) return 0.0;

  // x <- S^{-1} D x with D = diag(w f). The dominant eigenvalue of S^{-1} D is
  // the maximal generalized Rayleigh quotient x^T D x / x^T S x.
  auto grid_ptr = std::shared_ptr<const RadialGrid>(&grid, [](const RadialGrid*) {});
  RadialField x(grid_ptr, std::vector<double>(n, 1.0));
  double previous = 0.0;
  int stable = 0;
  for (int it = 0; it < max_iter; ++it) {
    RadialField rhs(grid_ptr);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = multiplier[i] * x[i];
    // solve_shifted_laplacian multiplies the right-hand side by the weights.
    RadialField y = solve_shifted_laplacian(rhs, 1.0, 0.0);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += grid.weight(i) * multiplier[i] * y[i] * y[i];
    const double quotient = num / kinetic(y);
    const double scale = std::sqrt(mass(y));
    x = (1.0 / scale) * std::move(y);
    if (std::abs(quotient - previous) <= tol * std::abs(quotient)) {
      if (++stable >= 3) return quotient;
    } else {
      stable = 0;
    }
    previous = quotient;
  }
  std::ostringstream msg;
  msg << "Rayleigh-quotient power iteration did not converge in " << max_iter << " iterations (last estimate "
      << previous << ")";
  throw EigenIterationError(msg.str());
}

SigmaBounds numeric_sigma(const Potential& pot, const RadialGrid& grid) {
  SigmaBounds s;
  if (pot.is_zero()) return s;
  std::vector<double> v(grid.size()), w(grid.size()), ups(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    v[i] = std::abs(pot.V(r));
    w[i] = std::abs(pot.W(r));
    ups[i] = std::max(pot.Upsilon(r), 0.0);
  }
  s.sigma1 = rayleigh_max(grid, v);
  s.sigma2 = rayleigh_max(grid, w);
  s.sigma3 = rayleigh_max(grid, ups);
  return s;
}

SigmaBounds sigma_bounds(const Potential& pot, const RadialGrid& grid) {
  if (pot.is_zero()) return {};
  if (pot.kind() == PotentialKind::Hardy) {
    // |V| = W = mu / r^2 and Upsilon = 2 mu / r^2 against int u^2/|x|^2 <= 4 |grad u|^2.
    const double mu = pot.mu();
    return {4.0 * mu, 4.0 * mu, 8.0 * mu};
  }
  SigmaBounds s = numeric_sigma(pot, grid);
  s.sigma1 *= 1.05;
  s.sigma2 *= 1.05;
  s.sigma3 *= 1.05;
  return s;
}

AdmissibilityReport admissibility(double a, const Nonlinearity& nl, const SigmaBounds& sigma) {
  if (!(a > 0.0)) throw std::invalid_argument("admissibility needs a > 0");
  AdmissibilityReport report;
  report.sigma = sigma;
  const double k = 3.0 * (nl.alpha() - 2.0);
  const double beta = nl.beta();
  report.bounds[0] = (k - 4.0) / k * a;
  report.bounds[1] = std::min(k * (a - sigma.sigma1) / 4.0 - a, (6.0 - beta) / (2.0 * beta) * a);
  report.bounds[2] = 2.0 * a;
  report.passed[0] = sigma.sigma1 >= 0.0 && sigma.sigma1 < report.bounds[0];
  report.passed[1] = sigma.sigma2 >= 0.0 && sigma.sigma2 <= report.bounds[1];
  report.passed[2] = sigma.sigma3 >= 0.0 && sigma.sigma3 < report.bounds[2];
  report.margin[0] = report.bounds[0] - sigma.sigma1;
  report.margin[1] = report.bounds[1] - sigma.sigma2;
  report.margin[2] = report.bounds[2] - sigma.sigma3;
  return report;
}

AdmissibilityReport admissibility(double a, const Nonlinearity& nl, const Potential& pot, const RadialGrid& grid) {
  return admissibility(a, nl, sigma_bounds(pot, grid));
}

} // namespace kirchhoff
