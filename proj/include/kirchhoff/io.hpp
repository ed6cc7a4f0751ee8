#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kirchhoff/config.hpp"
#include "kirchhoff/fiber.hpp"
#include "kirchhoff/solver.hpp"

namespace kirchhoff {

inline constexpr int kResultSchema = 1;

std::string artifact_version();

/// "# kirchhoff <version>" followed by one "# key = value" line per entry.
void write_header(std::ostream& out, const ConfigEntries& config);

/// iteration, energy, residual, t_u, step
void write_trace_csv(std::ostream& out, const SolveResult& result, const ConfigEntries& config);
/// c, m_tilde, m_ref, lambda, kinetic, pohozaev_residual, converged
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const ConfigEntries& config);
/// t, psi, psi_prime, psi_second
void write_fiber_csv(std::ostream& out, const FiberProfile& profile, const ConfigEntries& config);

/// result.json: schema, version, resolved config, grid, every scalar of the
/// result, the field samples and the verification report. No timestamps, so
/// equal runs give equal bytes.
std::string result_to_json(const ProblemSpec& spec, const SolveResult& result, const VerificationReport& report,
                           const ConfigEntries& config);

struct StoredResult {
  ConfigEntries config;
  double radius = 0.0; ///< physical grid radius
  std::size_t nodes = 0;
  double length_unit = 1.0;
  SolveResult result; ///< trace is not stored and comes back empty
  VerificationReport report;
};

/// Parses result.json. Throws std::runtime_error on a schema mismatch or a
/// malformed document.
StoredResult result_from_json(const std::string& text);

/// Same checks in the same order with equal verdicts, values and bounds
/// within rel_tol (NaN matches NaN).
bool same_report(const VerificationReport& a, const VerificationReport& b, double rel_tol = 1e-9);

/// Rebuilds the problem of a stored result on its stored grid.
ProblemSpec stored_problem(const StoredResult& stored);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace kirchhoff
