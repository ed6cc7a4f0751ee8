#pragma once

#include <vector>

#include "kirchhoff/model.hpp"
#include "kirchhoff/radial.hpp"

namespace kirchhoff {

/// One instance of the constrained problem
///   -(a + b |grad u|^2) lap u + V u + lambda u = g(u),  |u|_2^2 = c.
struct ProblemSpec {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  Nonlinearity nl;
  Potential pot;
  GridPtr grid;
  /// Length that configured widths (initial Gaussian, random bumps) are
  /// measured in; the grid is already physical.
  double length_unit = 1.0;

  /// Checks a, b, c > 0 and a grid is attached; does not run admissibility.
  void validate() const;

  ProblemSpec with_potential(Potential p) const;
  ProblemSpec with_mass(double mass) const;
  ProblemSpec with_grid(GridPtr g) const;
};

/// Scalar integrals from which every functional below is assembled.
struct FieldMoments {
  double kinetic = 0.0;         ///< |grad u|_2^2
  double potential = 0.0;       ///< int V u^2
  double virial = 0.0;          ///< int W u^2
  double virial_slope = 0.0;    ///< int <grad W, x> u^2
  std::vector<double> powers;   ///< int |u|^{p_j}, one per power term

  double G_integral(const Nonlinearity& nl) const;
  double Gtilde_integral(const Nonlinearity& nl) const;
  double Gtilde_prime_integral(const Nonlinearity& nl) const;
  double gs_integral(const Nonlinearity& nl) const; ///< int g(u) u
};

FieldMoments compute_moments(const ProblemSpec& spec, const RadialField& u);

double energy_J(const ProblemSpec& spec, const RadialField& u);
double energy_I(const ProblemSpec& spec, const RadialField& u);
double energy_J(const ProblemSpec& spec, const FieldMoments& m);
double energy_I(const ProblemSpec& spec, const FieldMoments& m);

double pohozaev_P(const ProblemSpec& spec, const RadialField& u);
double pohozaev_Pinf(const ProblemSpec& spec, const RadialField& u);
double pohozaev_P(const ProblemSpec& spec, const FieldMoments& m);
double pohozaev_Pinf(const ProblemSpec& spec, const FieldMoments& m);

/// a |grad u|^2 + b |grad u|^4, the natural size of P(u).
double pohozaev_scale(const ProblemSpec& spec, const FieldMoments& m);

// Kirchhoff coefficient frozen at b A^2. A2 must be nonnegative.
double pohozaev_PA(const ProblemSpec& spec, const RadialField& u, double A2);
double pohozaev_PinfA(const ProblemSpec& spec, const RadialField& u, double A2);
double energy_JA(const ProblemSpec& spec, const RadialField& u, double A2);
double energy_IA(const ProblemSpec& spec, const RadialField& u, double A2);

/// L2 functional derivative -(a + b |grad u|^2) lap u + V u - g(u) of J.
RadialField gradient_J(const ProblemSpec& spec, const RadialField& u);

/// L2 derivative of P: 2(a + 2b|grad u|^2)(-lap u) - 2 W u - 3 Gtilde'(u).
RadialField gradient_P(const ProblemSpec& spec, const RadialField& u);

/// -<J'(u), u> / c.
double lambda_estimate(const ProblemSpec& spec, const RadialField& u);
double lambda_estimate(const ProblemSpec& spec, const RadialField& u, const RadialField& grad);

struct FiberValues {
  double psi = 0.0;
  double psi_prime = 0.0;
  double psi_second = 0.0;
};

/// Psi_u(t) = J(t * u) and its t-derivatives, evaluated from the scaling laws
/// of each term rather than by resampling u. Homogeneous potentials cost O(1)
/// per t; others take one quadrature pass per t. Holds a reference to spec.
class FiberFunction {
public:
  FiberFunction(const ProblemSpec& spec, const RadialField& u);

  FiberValues operator()(double t) const;
  double psi(double t) const { return (*this)(t).psi; }
  double psi_prime(double t) const { return (*this)(t).psi_prime; }
  double psi_second(double t) const { return (*this)(t).psi_second; }

  const FieldMoments& moments() const { return moments_; }

private:
  const ProblemSpec* spec_;
  GridPtr grid_;
  FieldMoments moments_;
  std::vector<double> density_; ///< w_i u_i^2, kept for non-homogeneous V
};

double psi(const ProblemSpec& spec, const RadialField& u, double t);
double psi_prime(const ProblemSpec& spec, const RadialField& u, double t);
double psi_second(const ProblemSpec& spec, const RadialField& u, double t);

} // namespace kirchhoff
