#include "kirchhoff/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

void ProblemSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
  if (!grid) throw std::invalid_argument("problem has no grid");
}

ProblemSpec ProblemSpec::with_potential(Potential p) const {
  ProblemSpec out = *this;
  out.pot = p;
  return out;
}

ProblemSpec ProblemSpec::with_mass(double m) const {
  ProblemSpec out = *this;
  out.c = m;
  return out;
}

ProblemSpec ProblemSpec::with_grid(GridPtr g) const {
  ProblemSpec out = *this;
  out.grid = std::move(g);
  return out;
}

double FieldMoments::G_integral(const Nonlinearity& nl) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j) {
    const auto& t = nl.terms()[j];
    sum += t.coefficient / t.exponent * powers[j];
  }
  return sum;
}

double FieldMoments::Gtilde_integral(const Nonlinearity& nl) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j) {
    const auto& t = nl.terms()[j];
    sum += t.coefficient * (t.exponent - 2.0) / (2.0 * t.exponent) * powers[j];
  }
  return sum;
}

double FieldMoments::Gtilde_prime_integral(const Nonlinearity& nl) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j) {
    const auto& t = nl.terms()[j];
    sum += t.coefficient * (t.exponent - 2.0) / 2.0 * powers[j];
  }
  return sum;
}

double FieldMoments::gs_integral(const Nonlinearity& nl) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j) sum += nl.terms()[j].coefficient * powers[j];
  return sum;
}

FieldMoments compute_moments(const ProblemSpec& spec, const RadialField& u) {
  FieldMoments m;
  m.kinetic = kinetic(u);
  if (!spec.pot.is_zero()) {
    const auto& g = u.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.node(i);
      const double d = g.weight(i) * u[i] * u[i];
      m.potential += d * spec.pot.V(r);
      m.virial += d * spec.pot.W(r);
      m.virial_slope += d * spec.pot.r_dW(r);
    }
  }
  m.powers.reserve(spec.nl.terms().size());
  for (const auto& t : spec.nl.terms()) m.powers.push_back(lp_integral(u, t.exponent));
  return m;
}

double energy_I(const ProblemSpec& spec, const FieldMoments& m) {
  const double K = m.kinetic;
  return 0.5 * spec.a * K + 0.25 * spec.b * K * K - m.G_integral(spec.nl);
}

double energy_J(const ProblemSpec& spec, const FieldMoments& m) { return energy_I(spec, m) + 0.5 * m.potential; }

double energy_J(const ProblemSpec& spec, const RadialField& u) { return energy_J(spec, compute_moments(spec, u)); }
double energy_I(const ProblemSpec& spec, const RadialField& u) { return energy_I(spec, compute_moments(spec, u)); }

double pohozaev_Pinf(const ProblemSpec& spec, const FieldMoments& m) {
  const double K = m.kinetic;
  return spec.a * K + spec.b * K * K - 3.0 * m.Gtilde_integral(spec.nl);
}

double pohozaev_P(const ProblemSpec& spec, const FieldMoments& m) { return pohozaev_Pinf(spec, m) - m.virial; }

double pohozaev_P(const ProblemSpec& spec, const RadialField& u) { return pohozaev_P(spec, compute_moments(spec, u)); }
double pohozaev_Pinf(const ProblemSpec& spec, const RadialField& u) {
  return pohozaev_Pinf(spec, compute_moments(spec, u));
}

double pohozaev_scale(const ProblemSpec& spec, const FieldMoments& m) {
  return spec.a * m.kinetic + spec.b * m.kinetic * m.kinetic;
}

namespace {

void require_A2(double A2) {
  if (!(A2 >= 0.0)) throw DomainError("A^2 must be nonnegative");
}

} // namespace

double pohozaev_PinfA(const ProblemSpec& spec, const RadialField& u, double A2) {
  require_A2(A2);
  const auto m = compute_moments(spec, u);
  return (spec.a + spec.b * A2) * m.kinetic - 3.0 * m.Gtilde_integral(spec.nl);
}

double pohozaev_PA(const ProblemSpec& spec, const RadialField& u, double A2) {
  require_A2(A2);
  const auto m = compute_moments(spec, u);
  return (spec.a + spec.b * A2) * m.kinetic - m.virial - 3.0 * m.Gtilde_integral(spec.nl);
}

double energy_IA(const ProblemSpec& spec, const RadialField& u, double A2) {
  require_A2(A2);
  const auto m = compute_moments(spec, u);
  return 0.5 * (spec.a + spec.b * A2) * m.kinetic - m.G_integral(spec.nl);
}

double energy_JA(const ProblemSpec& spec, const RadialField& u, double A2) {
  require_A2(A2);
  const auto m = compute_moments(spec, u);
  return 0.5 * (spec.a + spec.b * A2) * m.kinetic + 0.5 * m.potential - m.G_integral(spec.nl);
}

RadialField gradient_J(const ProblemSpec& spec, const RadialField& u) {
  const double coeff = spec.a + spec.b * kinetic(u);
  RadialField out = laplacian_radial(u);
  const auto& g = u.grid();
  const bool with_potential = !spec.pot.is_zero();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = -coeff * out[i] - spec.nl.g(u[i]);
    if (with_potential) v += spec.pot.V(g.node(i)) * u[i];
    out[i] = v;
  }
  return out;
}

RadialField gradient_P(const ProblemSpec& spec, const RadialField& u) {
  const double coeff = 2.0 * (spec.a + 2.0 * spec.b * kinetic(u));
  RadialField out = laplacian_radial(u);
  const auto& g = u.grid();
  const bool with_potential = !spec.pot.is_zero();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = -coeff * out[i];
    for (const auto& t : spec.nl.terms())
      v -= 1.5 * t.coefficient * (t.exponent - 2.0) * std::pow(std::abs(u[i]), t.exponent - 2.0) * u[i];
    if (with_potential) v -= 2.0 * spec.pot.W(g.node(i)) * u[i];
    out[i] = v;
  }
  return out;
}

double lambda_estimate(const ProblemSpec& spec, const RadialField& u, const RadialField& grad) {
  return -inner(grad, u) / spec.c;
}

double lambda_estimate(const ProblemSpec& spec, const RadialField& u) {
  return lambda_estimate(spec, u, gradient_J(spec, u));
}

FiberFunction::FiberFunction(const ProblemSpec& spec, const RadialField& u)
    : spec_(&spec), grid_(u.grid_ptr()), moments_(compute_moments(spec, u)) {
  if (!spec.pot.is_zero() && !spec.pot.homogeneity()) {
    const auto& g = u.grid();
    density_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) density_[i] = g.weight(i) * u[i] * u[i];
  }
}

FiberValues FiberFunction::operator()(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("fiber parameter t must be positive");
  const auto& spec = *spec_;
  const double K = moments_.kinetic;
  FiberValues out;
  out.psi = 0.5 * spec.a * t * t * K + 0.25 * spec.b * t * t * t * t * K * K;
  out.psi_prime = spec.a * t * K + spec.b * t * t * t * K * K;
  out.psi_second = spec.a * K + 3.0 * spec.b * t * t * K * K;

  // int V(x) (t*u)^2 dx = int V(y / t) u(y)^2 dy, and likewise for W.
  if (!spec.pot.is_zero()) {
    double iv = 0.0, iw = 0.0, islope = 0.0;
    if (const auto k = spec.pot.homogeneity()) {
      const double tk = std::pow(t, *k);
      iv = tk * moments_.potential;
      iw = tk * moments_.virial;
      islope = tk * moments_.virial_slope;
    } else {
      const auto& g = grid_;
      for (std::size_t i = 0; i < density_.size(); ++i) {
        const double s = g->node(i) / t;
        iv += density_[i] * spec.pot.V(s);
        iw += density_[i] * spec.pot.W(s);
        islope += density_[i] * spec.pot.r_dW(s);
      }
    }
    out.psi += 0.5 * iv;
    out.psi_prime -= iw / t;
    out.psi_second += (iw + islope) / (t * t);
  }

  // int G(t*u) picks up t^{3p/2 - 3} per power term.
  const auto& terms = spec.nl.terms();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double e = 1.5 * terms[j].exponent - 3.0;
    const double c = terms[j].coefficient / terms[j].exponent * moments_.powers[j];
    const double te2 = std::pow(t, e - 2.0);
    out.psi -= c * te2 * t * t;
    out.psi_prime -= c * e * te2 * t;
    out.psi_second -= c * e * (e - 1.0) * te2;
  }
  return out;
}

double psi(const ProblemSpec& spec, const RadialField& u, double t) { return FiberFunction(spec, u).psi(t); }
double psi_prime(const ProblemSpec& spec, const RadialField& u, double t) {
  return FiberFunction(spec, u).psi_prime(t);
}
double psi_second(const ProblemSpec& spec, const RadialField& u, double t) {
  return FiberFunction(spec, u).psi_second(t);
}

} // namespace kirchhoff
