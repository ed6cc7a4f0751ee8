#include "kirchhoff/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace kirchhoff {

namespace {

std::string describe(const std::string& source, int line, const std::string& key, const std::string& what) {
  std::ostringstream msg;
  msg << source;
  if (line > 0) msg << ':' << line;
  if (!key.empty()) msg << ": " << key;
  msg << ": " << what;
  return msg.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) throw std::invalid_argument("expected a number, got '" + text + "'");
  return x;
}

long long to_integer(const std::string& text) {
  long long x = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer, got '" + text + "'");
  return x;
}

std::vector<PowerTerm> parse_terms(const std::string& text) {
  std::vector<PowerTerm> terms;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("term '" + item + "' is not coefficient:exponent");
    terms.push_back({to_double(trim(item.substr(0, colon))), to_double(trim(item.substr(colon + 1)))});
  }
  if (terms.empty()) throw std::invalid_argument("no power terms");
  return terms;
}

PotentialKind parse_kind(const std::string& text) {
  if (text == "zero") return PotentialKind::Zero;
  if (text == "hardy") return PotentialKind::Hardy;
  if (text == "gaussian") return PotentialKind::GaussianWell;
  throw std::invalid_argument("unknown potential kind '" + text + "' (zero, hardy, gaussian)");
}

std::string kind_name(PotentialKind k) {
  switch (k) {
  case PotentialKind::Zero: return "zero";
  case PotentialKind::Hardy: return "hardy";
  case PotentialKind::GaussianWell: return "gaussian";
  }
  return "?";
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.a", [](RunConfig& c, const std::string& v) { c.a = to_double(v); }},
      {"problem.b", [](RunConfig& c, const std::string& v) { c.b = to_double(v); }},
      {"problem.c", [](RunConfig& c, const std::string& v) { c.c = to_double(v); }},
      {"problem.terms", [](RunConfig& c, const std::string& v) { c.terms = parse_terms(v); }},
      {"potential.kind", [](RunConfig& c, const std::string& v) { c.potential_kind = parse_kind(v); }},
      {"potential.mu", [](RunConfig& c, const std::string& v) { c.mu = to_double(v); }},
      {"potential.depth", [](RunConfig& c, const std::string& v) { c.depth = to_double(v); }},
      {"potential.width", [](RunConfig& c, const std::string& v) { c.width = to_double(v); }},
      {"grid.R", [](RunConfig& c, const std::string& v) { c.grid.radius = to_double(v); }},
      {"grid.n",
       [](RunConfig& c, const std::string& v) {
         const long long n = to_integer(v);
         if (n < 4) throw std::invalid_argument("n must be at least 4");
         c.grid.nodes = static_cast<std::size_t>(n);
       }},
      {"grid.units", [](RunConfig& c, const std::string& v) { c.grid.units = parse_grid_units(v); }},
      {"solver.step", [](RunConfig& c, const std::string& v) { c.solver.step = to_double(v); }},
      {"solver.max_iter",
       [](RunConfig& c, const std::string& v) { c.solver.max_iter = static_cast<int>(to_integer(v)); }},
      {"solver.grad_tol", [](RunConfig& c, const std::string& v) { c.solver.grad_tol = to_double(v); }},
      {"solver.pohozaev_tol", [](RunConfig& c, const std::string& v) { c.solver.pohozaev_tol = to_double(v); }},
      {"solver.seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw std::invalid_argument("seed must be nonnegative");
         c.solver.seed = static_cast<std::uint64_t>(s);
       }},
      {"solver.init",
       [](RunConfig& c, const std::string& v) {
         c.solver.init = parse_init_kind(v);
         if (c.solver.init == InitKind::Given) throw std::invalid_argument("init = given is only available from code");
       }},
      {"solver.init_width", [](RunConfig& c, const std::string& v) { c.solver.init_width = to_double(v); }},
      {"solver.preconditioner",
       [](RunConfig& c, const std::string& v) { c.solver.preconditioner = parse_preconditioner(v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"output.formats",
       [](RunConfig& c, const std::string& v) {
         c.write_json = c.write_csv = false;
         for (const auto& f : split(v, ',')) {
           if (f == "json")
             c.write_json = true;
           else if (f == "csv")
             c.write_csv = true;
           else
             throw std::invalid_argument("unknown format '" + f + "' (json, csv)");
         }
       }},
  };
  return table;
}

} // namespace

ConfigError::ConfigError(const std::string& source, int line, std::string key, const std::string& what)
    : std::runtime_error(describe(source, line, key, what)), line_(line), key_(std::move(key)) {}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

Nonlinearity RunConfig::nonlinearity() const { return Nonlinearity(terms); }

Potential RunConfig::potential() const {
  switch (potential_kind) {
  case PotentialKind::Zero: return Potential::zero();
  case PotentialKind::Hardy: return Potential::hardy(mu);
  case PotentialKind::GaussianWell: return Potential::gaussian_well(depth, width);
  }
  return Potential::zero();
}

ProblemSpec RunConfig::problem(GnCache& gn) const { return problem(gn, c); }

ProblemSpec RunConfig::problem(GnCache& gn, double mass) const {
  return build_problem(a, b, mass, nonlinearity(), potential(), grid, gn);
}

ConfigEntries RunConfig::entries() const {
  ConfigEntries e;
  e.emplace_back("problem.a", format_double(a));
  e.emplace_back("problem.b", format_double(b));
  e.emplace_back("problem.c", format_double(c));
  std::string t;
  for (const auto& term : terms) {
    if (!t.empty()) t += ", ";
    t += format_double(term.coefficient) + ":" + format_double(term.exponent);
  }
  e.emplace_back("problem.terms", t);
  e.emplace_back("potential.kind", kind_name(potential_kind));
  if (potential_kind == PotentialKind::Hardy) e.emplace_back("potential.mu", format_double(mu));
  if (potential_kind == PotentialKind::GaussianWell) {
    e.emplace_back("potential.depth", format_double(depth));
    e.emplace_back("potential.width", format_double(width));
  }
  e.emplace_back("grid.R", format_double(grid.radius));
  e.emplace_back("grid.n", std::to_string(grid.nodes));
  e.emplace_back("grid.units", to_string(grid.units));
  e.emplace_back("solver.step", format_double(solver.step));
  e.emplace_back("solver.max_iter", std::to_string(solver.max_iter));
  e.emplace_back("solver.grad_tol", format_double(solver.grad_tol));
  e.emplace_back("solver.pohozaev_tol", format_double(solver.pohozaev_tol));
  e.emplace_back("solver.seed", std::to_string(solver.seed));
  e.emplace_back("solver.init", to_string(solver.init));
  e.emplace_back("solver.init_width", format_double(solver.init_width));
  e.emplace_back("solver.preconditioner", to_string(solver.preconditioner));
  e.emplace_back("output.dir", out_dir);
  std::string formats;
  if (write_json) formats = "json";
  if (write_csv) formats += formats.empty() ? "csv" : ", csv";
  e.emplace_back("output.formats", formats);
  return e;
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, value] : entries()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  static const std::set<std::string> sections = {"problem", "potential", "grid", "solver", "output"};
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(source, line, "", "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!sections.count(section)) throw ConfigError(source, line, section, "unknown section");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty()) throw ConfigError(source, line, key, "key outside any section");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError(source, line, full, "unknown key");
    if (!seen.insert(full).second) throw ConfigError(source, line, full, "duplicate key");
    if (value.empty()) throw ConfigError(source, line, full, "missing value");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(source, line, full, e.what());
    }
  }

  // Whole-config checks that are not tied to one line.
  try {
    if (!(cfg.a > 0.0)) throw std::invalid_argument("problem.a must be positive");
    if (!(cfg.b > 0.0)) throw std::invalid_argument("problem.b must be positive");
    if (!(cfg.c > 0.0)) throw std::invalid_argument("problem.c must be positive");
    if (!(cfg.grid.radius > 0.0)) throw std::invalid_argument("grid.R must be positive");
    (void)cfg.nonlinearity();
    (void)cfg.potential();
    cfg.solver.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source, 0, "", e.what());
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_config(in, source);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  return parse_config(in, path);
}

} // namespace kirchhoff
