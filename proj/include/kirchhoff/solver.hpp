#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kirchhoff/fiber.hpp"
#include "kirchhoff/gn.hpp"

namespace kirchhoff {

enum class InitKind { Gaussian, Random, Given };

/// Metric used to turn J' into a descent direction.
///  None          plain L2 gradient; needs step ~ dr^2
///  RadialWeight  diagonal scaling by 1 / (1 + r^2)
///  Sobolev       (a + b|grad u|^2)(-lap) + kappa, kappa ~ lambda
enum class Preconditioner { None, RadialWeight, Sobolev };

struct SolveOptions {
  double step = 1.0;
  int max_iter = 500;
  /// Tangent residual (see SolveResult) at which the run counts as converged.
  double grad_tol = 1e-7;
  double pohozaev_tol = 1e-6;
  std::uint64_t seed = 1;
  InitKind init = InitKind::Gaussian;
  double init_width = 1.0;
  std::optional<RadialField> initial; ///< used when init == Given
  Preconditioner preconditioner = Preconditioner::Sobolev;
  bool unsafe_skip_admissibility = false;

  void validate() const;
};

std::string to_string(InitKind kind);
std::string to_string(Preconditioner p);
InitKind parse_init_kind(const std::string& text);
Preconditioner parse_preconditioner(const std::string& text);

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0; ///< tangent residual before the step
  double t_u = 1.0;      ///< fiber parameter of the projection that produced u
  double step = 0.0;     ///< step accepted after this row, 0 if none
};

struct SolveResult {
  RadialField u;
  double lambda = 0.0;
  double energy = 0.0;
  double pohozaev_residual = 0.0; ///< |P(u)| / (a K + b K^2)
  /// |J'(u) + lambda u|_2 |u|_2 / (a K + b K^2), the PDE residual.
  double stationarity_residual = 0.0;
  /// Same with the component along P'(u) also removed; convergence test.
  double tangent_residual = 0.0;
  double psi_second_at_1 = 0.0;
  double kinetic = 0.0;
  int iterations = 0;
  std::vector<TraceRow> trace;
  bool converged = false;
  std::string status;
};

/// Positive sum of one to four Gaussian bumps with seeded centres, widths and
/// amplitudes, normalised to the given mass. Signed bumps when positive is false.
/// The shape is dilated so that |grad u|_2 / |u|_2 = 1 / length; the fiber
/// maximiser scales inversely with any dilation, so this only fixes where on
/// its fiber the field starts.
RadialField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, double mass, bool positive = true,
                                double length = 1.0);

/// sqrt(c) / delta_bar of the same problem without potential. The V = 0
/// ground state has |grad u|_2 / |u|_2 close to 1 / natural_length, so a grid
/// measured in this unit resolves the solution alike for every (a, b, c, g).
double natural_length(double a, double b, double c, const Nonlinearity& nl, GnCache& gn);

enum class GridUnits { Natural, Absolute };
std::string to_string(GridUnits u);
GridUnits parse_grid_units(const std::string& text);

struct GridSetup {
  double radius = 40.0;
  std::size_t nodes = 2048;
  GridUnits units = GridUnits::Natural;
};

/// Assembles a problem whose grid radius is setup.radius in the chosen unit.
ProblemSpec build_problem(double a, double b, double c, const Nonlinearity& nl, const Potential& pot,
                          const GridSetup& setup, GnCache& gn);

/// Initial field for opts, already on the mass sphere but not projected.
RadialField initial_field(const ProblemSpec& spec, const SolveOptions& opts);

/// Throws AdmissibilityError if the potential fails any window.
void require_admissible(const ProblemSpec& spec);

/// Preconditioned tangent descent on the mass sphere with a fiber projection
/// after every step and backtracking on J. Energies in the trace never
/// increase by more than 1e-12 relative; within that band a step is taken
/// only if it lowers the tangent residual. Failure to converge is reported in
/// the result, not thrown.
SolveResult minimize_on_pohozaev(const ProblemSpec& spec, const SolveOptions& opts);

/// The same solve with V replaced by zero.
SolveResult reference_m(const ProblemSpec& spec, const SolveOptions& opts);

struct MultiStart {
  SolveResult best;
  std::vector<SolveResult> runs; ///< in seed order
  std::size_t best_index = 0;
};

/// Runs one random start per seed concurrently. Lowest energy among converged
/// runs wins; energies within 1e-10 go to the smaller kinetic energy.
MultiStart multistart(const ProblemSpec& spec, const SolveOptions& opts, const std::vector<std::uint64_t>& seeds);

struct DeltaBar {
  double root = 0.0;     ///< smallest positive x with (a - s2) x^2 + b x^4 = sum K_j x^{e_j}
  double envelope = 0.0; ///< same root with the b term dropped, <= root
  std::vector<double> K; ///< per-term constants K_j
};

/// Explicit lower bound on |grad u|_2 over the Pohozaev set, from the sharp GN
/// constants. Requires a > sigma2.
DeltaBar delta_bar(const ProblemSpec& spec, GnCache& gn, double sigma2);
DeltaBar delta_bar(const ProblemSpec& spec, GnCache& gn);

/// Lower bound on c * lambda for a solution with kinetic energy K:
/// (3 - beta/2) 2/(3(beta-2)) ((a - s2) K + b K^2) - s2 K.
double multiplier_lower_bound(const ProblemSpec& spec, double sigma2, double K);

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool all_passed() const;
  const Check* find(const std::string& name) const;
};

struct VerifyOptions {
  /// The PDE residual of an exact minimiser on P_c is O(dr^2), about 5e-4 at
  /// 2048 nodes over 40 natural lengths.
  double pde_tol = 2e-3;
  double pohozaev_tol = 1e-6;
  double gn_tol = 1e-3;
  double multiplier_slack = 0.05;
};

VerificationReport verify_solution(const ProblemSpec& spec, const SolveResult& result, GnCache& gn,
                                   const VerifyOptions& opts = {});

struct SweepRow {
  double c = 0.0;
  double m_tilde = 0.0;
  double m_ref = 0.0;
  double lambda = 0.0;
  double kinetic = 0.0;
  double pohozaev_residual = 0.0;
  bool converged = false;
  std::string error; ///< empty unless the row threw
};

using SpecFactory = std::function<ProblemSpec(double c)>;

/// One solve with V and one reference solve per mass, all rows concurrently.
/// The factory builds each row's problem, so grids may follow c.
std::vector<SweepRow> mass_sweep(const SpecFactory& make, const std::vector<double>& c_values,
                                 const SolveOptions& opts);
std::vector<SweepRow> mass_sweep(const ProblemSpec& spec, const std::vector<double>& c_values,
                                 const SolveOptions& opts);

} // namespace kirchhoff
