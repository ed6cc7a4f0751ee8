#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kirchhoff/solver.hpp"

namespace kirchhoff {

/// Bad configuration. line is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& source, int line, std::string key, const std::string& what);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

private:
  int line_;
  std::string key_;
};

/// Ordered "section.key" -> value pairs, the resolved configuration as
/// written into every artifact header.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// INI-style run configuration:
///
///   [problem]   a, b, c, terms = mu:p, mu:p, ...
///   [potential] kind = zero | hardy | gaussian, mu, depth, width
///   [grid]      R, n, units = natural | absolute
///   [solver]    step, max_iter, grad_tol, pohozaev_tol, seed, init,
///               init_width, preconditioner
///   [output]    dir, formats = json, csv
///
/// '#' and ';' start comments. Unknown sections and keys are errors.
struct RunConfig {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::vector<PowerTerm> terms{{1.0, 5.0}};

  PotentialKind potential_kind = PotentialKind::Hardy;
  double mu = 0.02;
  double depth = 0.0;
  double width = 1.0;

  GridSetup grid;
  SolveOptions solver;

  std::string out_dir = ".";
  bool write_json = true;
  bool write_csv = true;

  Nonlinearity nonlinearity() const;
  Potential potential() const;
  ProblemSpec problem(GnCache& gn) const;
  ProblemSpec problem(GnCache& gn, double mass) const;

  ConfigEntries entries() const;
  /// INI text that parses back to this configuration.
  std::string to_ini() const;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

} // namespace kirchhoff
