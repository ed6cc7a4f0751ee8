#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "kirchhoff/functionals.hpp"
#include "kirchhoff/gn.hpp"
#include "kirchhoff/solver.hpp"

namespace testing {

inline const double kPi = std::acos(-1.0);

inline double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

/// GN constants shared across test cases; solving Q takes a fraction of a second per p.
inline kirchhoff::GnCache& shared_gn() {
  static kirchhoff::GnCache cache;
  return cache;
}

/// a = b = c = 1, |s|^3 s, Hardy(0.02), R = 40 natural lengths, n = 2048.
inline kirchhoff::ProblemSpec baseline_spec(double mu = 0.02, double c = 1.0) {
  using namespace kirchhoff;
  const Potential pot = mu > 0.0 ? Potential::hardy(mu) : Potential::zero();
  return build_problem(1.0, 1.0, c, Nonlinearity({{1.0, 5.0}}), pot, GridSetup{}, shared_gn());
}

/// a = b = 1, p = 5 on an absolute grid where widths of order one are well resolved.
inline kirchhoff::ProblemSpec small_spec(kirchhoff::Potential pot, double c = 1.0, double radius = 20.0,
                                         std::size_t nodes = 2048) {
  kirchhoff::ProblemSpec s{1.0, 1.0, c, kirchhoff::Nonlinearity({{1.0, 5.0}}), pot,
                           kirchhoff::make_grid(radius, nodes)};
  return s;
}

inline kirchhoff::RadialField gaussian(const kirchhoff::GridPtr& g, double width = 1.0, double amplitude = 1.0) {
  return kirchhoff::sample(g, [=](double r) { return amplitude * std::exp(-r * r / (width * width)); });
}

// kappa exp(-(r/ell)^2) with |grad u|^2 = 1 and int G(u) = D for p = 5, on a
// grid of 12 widths. K scales as kappa^2 ell and int G as kappa^5 ell^3.
inline kirchhoff::RadialField scalar_fixture(double D, std::size_t nodes) {
  const double K0 = 3.0 * std::pow(kPi / 2.0, 1.5);
  const double L0 = std::pow(kPi / 5.0, 1.5) / 5.0;
  const double kappa = L0 / (D * K0 * K0 * K0);
  const double ell = 1.0 / (kappa * kappa * K0);
  return kirchhoff::sample(kirchhoff::make_grid(12.0 * ell, nodes),
                           [=](double r) { return kappa * std::exp(-(r / ell) * (r / ell)); });
}

} // namespace testing
