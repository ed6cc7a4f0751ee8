#pragma once

#include <iosfwd>
#include <vector>

#include "kirchhoff/functionals.hpp"

namespace kirchhoff {

/// The unique critical point t_u of Psi_u, a strict maximum.
struct FiberMaximizer {
  double t_u = 1.0;
  double psi_at_max = 0.0;
  double psi_prime_at_max = 0.0;
  double psi_second_at_max = 0.0;
  double t_lo = 1.0;
  double t_hi = 1.0;
  int iterations = 0;
};

/// Brackets the sign change of Psi_u' on a ratio-2 geometric grid from t = 1
/// inside [1e-6, 1e6], bisects, then polishes with safeguarded Newton steps.
/// Requires mass(u) == spec.c to 1e-8 relative.
FiberMaximizer maximize_fiber(const ProblemSpec& spec, const RadialField& u);

struct Projection {
  RadialField field;
  double t_total = 1.0; ///< product of the fiber parameters applied
  int rounds = 0;
  FiberMaximizer last;
};

/// Moves u along its fiber onto the Pohozaev set: w = normalize(T * u) with
/// the total dilation T found by a bracketed root search, starting from t_u.
/// Stops once |P(w)| <= tolerance (a|grad w|^2 + b|grad w|^4) and the fiber
/// maximum of w sits at 1 to 1e-3.
Projection project_pohozaev_detailed(const ProblemSpec& spec, const RadialField& u, double tolerance = 1e-6);
RadialField project_pohozaev(const ProblemSpec& spec, const RadialField& u);

struct FiberProfile {
  std::vector<double> t;
  std::vector<double> psi;
  std::vector<double> psi_prime;
  std::vector<double> psi_second;

  /// Sign changes of Psi' along the table, skipping exact zeros.
  int sign_changes() const;
  /// Columns t, psi, psi_prime, psi_second.
  void write_csv(std::ostream& out) const;
};

FiberProfile fiber_scan(const ProblemSpec& spec, const RadialField& u, const std::vector<double>& t_grid);

/// count points spaced evenly in log t over [t_min, t_max].
std::vector<double> log_grid(double t_min, double t_max, int count);

} // namespace kirchhoff
