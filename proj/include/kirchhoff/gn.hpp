#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "kirchhoff/radial.hpp"

namespace kirchhoff {

/// Scalars of a Gagliardo-Nirenberg optimizer, enough to evaluate the sharp
/// inequality |u|_p^p <= constant |grad u|_2^{(3p-6)/2} |u|_2^{(6-p)/2}.
struct GnConstant {
  double p = 0.0;
  double q_mass = 0.0;   ///< |Q|_2^2
  double constant = 0.0; ///< p / (2 |Q|_2^{p-2})
  double amplitude = 0.0;
  double radius = 0.0;   ///< grid the optimizer was computed on
  std::size_t nodes = 0;
};

/// Positive radial solution of -((3p-6)/4) lap Q + ((6-p)/4) Q = Q^{p-1}.
struct GNData {
  GnConstant summary;
  double discrete_q_mass = 0.0; ///< mass(Q) on this grid, before extrapolation
  RadialField Q;
  int shots = 0;           ///< bisection steps on the amplitude
  double shoot_residual = 0.0;
  double residual = 0.0;   ///< relative discrete residual after polishing
};

struct GnSolveOptions {
  /// Decay lengths 1/rho covered by the grid.
  double decay_lengths = 32.0;
  /// Nodes per core width sqrt(A / 4^{p-2}); sets the spacing.
  double nodes_per_core = 120.0;
  std::size_t max_nodes = std::size_t{1} << 20;
  int max_bisections = 200;
  /// Also solve on half the nodes and Richardson-extrapolate |Q|_2^2, whose
  /// discretisation error is a clean multiple of dr^2.
  bool extrapolate = true;
};

/// Shoots Q(0) = s, Q'(0) = 0 with fixed-step RK4 from node to node, bisecting
/// s between "crosses zero" (too large) and "turns upward" (too small). The
/// shot is trusted until about 10/rho before it departs, then replaced by the
/// linear tail C exp(-rho r)/r, and finally Newton-polished on the grid so the
/// discrete equation holds to rounding. Throws DomainError unless 2 < p < 6 and
/// ShootingError when the amplitude cannot be bracketed.
GNData solve_Q(double p, const GnSolveOptions& opts = {});

/// Same, on a caller-supplied grid. The grid must reach far enough for Q to
/// decay below 1e-10 of its amplitude.
GNData solve_Q(double p, const GridPtr& grid, int max_bisections = 200);

/// |u|_p^p / (constant |grad u|^{(3p-6)/2} |u|_2^{(6-p)/2}); <= 1 up to
/// discretisation error, == 1 at Q. Throws DomainError for a zero field.
double verify_gn(const RadialField& u, double p, const GnConstant& gn);
double verify_gn(const RadialField& u, const GNData& gn);

std::string to_json(const GnConstant& gn);
GnConstant gn_from_json(const std::string& text);

/// Thread-safe lazy table p -> GnConstant. Optionally backed by a JSON file
/// that is read on construction and rewritten by save().
class GnCache {
public:
  GnCache() = default;
  explicit GnCache(std::string path);

  GnConstant get(double p);
  /// Solves every missing exponent concurrently.
  void prefetch(const std::vector<double>& exponents);
  void save() const;

  GnSolveOptions options;

private:
  mutable std::mutex mutex_;
  std::map<double, GnConstant> table_;
  std::string path_;
};

} // namespace kirchhoff
