#include "kirchhoff/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace kirchhoff {

using nlohmann::ordered_json;

std::string artifact_version() { return KIRCHHOFF_VERSION; }

void write_header(std::ostream& out, const ConfigEntries& config) {
  out << "# kirchhoff " << artifact_version() << '\n';
  for (const auto& [key, value] : config) out << "# " << key << " = " << value << '\n';
}

void write_trace_csv(std::ostream& out, const SolveResult& result, const ConfigEntries& config) {
  write_header(out, config);
  out << "iteration,energy,residual,t_u,step\n";
  for (const auto& row : result.trace)
    out << row.iteration << ',' << format_double(row.energy) << ',' << format_double(row.residual) << ','
        << format_double(row.t_u) << ',' << format_double(row.step) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const ConfigEntries& config) {
  write_header(out, config);
  out << "c,m_tilde,m_ref,lambda,kinetic,pohozaev_residual,converged\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) out << "# row c = " << format_double(r.c) << " failed: " << r.error << '\n';
    out << format_double(r.c) << ',' << format_double(r.m_tilde) << ',' << format_double(r.m_ref) << ','
        << format_double(r.lambda) << ',' << format_double(r.kinetic) << ',' << format_double(r.pohozaev_residual)
        << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_fiber_csv(std::ostream& out, const FiberProfile& profile, const ConfigEntries& config) {
  write_header(out, config);
  profile.write_csv(out);
}

namespace {

// JSON has no NaN; unavailable bounds are stored as null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

double number(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace

std::string result_to_json(const ProblemSpec& spec, const SolveResult& result, const VerificationReport& report,
                           const ConfigEntries& config) {
  ordered_json j;
  j["schema"] = kResultSchema;
  j["version"] = artifact_version();
  ordered_json cfg = ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = cfg;
  j["grid"] = {{"radius", spec.grid->radius()}, {"nodes", spec.grid->size()}, {"length_unit", spec.length_unit}};
  j["converged"] = result.converged;
  j["status"] = result.status;
  j["iterations"] = result.iterations;
  j["energy"] = result.energy;
  j["lambda"] = result.lambda;
  j["kinetic"] = result.kinetic;
  j["pohozaev_residual"] = result.pohozaev_residual;
  j["stationarity_residual"] = result.stationarity_residual;
  j["tangent_residual"] = result.tangent_residual;
  j["psi_second_at_1"] = result.psi_second_at_1;

  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"value", number(c.value)}, {"bound", number(c.bound)}, {"passed", c.passed}});
  j["verification"] = {{"all_passed", report.all_passed()}, {"checks", checks}};

  const auto r = spec.grid->nodes();
  const auto u = result.u.values();
  j["field"] = {{"r", std::vector<double>(r.begin(), r.end())}, {"u", std::vector<double>(u.begin(), u.end())}};
  return j.dump(1) + "\n";
}

StoredResult result_from_json(const std::string& text) {
  StoredResult s;
  try {
    const auto j = ordered_json::parse(text);
    const int schema = j.at("schema").get<int>();
    if (schema != kResultSchema) throw std::runtime_error("unsupported result schema " + std::to_string(schema));
    for (const auto& [key, value] : j.at("config").items()) s.config.emplace_back(key, value.get<std::string>());
    s.radius = j.at("grid").at("radius").get<double>();
    s.nodes = j.at("grid").at("nodes").get<std::size_t>();
    s.length_unit = j.at("grid").at("length_unit").get<double>();

    auto& r = s.result;
    r.converged = j.at("converged").get<bool>();
    r.status = j.at("status").get<std::string>();
    r.iterations = j.at("iterations").get<int>();
    r.energy = j.at("energy").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.kinetic = j.at("kinetic").get<double>();
    r.pohozaev_residual = j.at("pohozaev_residual").get<double>();
    r.stationarity_residual = j.at("stationarity_residual").get<double>();
    r.tangent_residual = j.at("tangent_residual").get<double>();
    r.psi_second_at_1 = j.at("psi_second_at_1").get<double>();

    for (const auto& c : j.at("verification").at("checks"))
      s.report.checks.push_back(
          {c.at("name").get<std::string>(), number(c.at("value")), number(c.at("bound")), c.at("passed").get<bool>()});

    auto u = j.at("field").at("u").get<std::vector<double>>();
    if (u.size() != s.nodes) throw std::runtime_error("field length does not match grid.nodes");
    r.u = RadialField(make_grid(s.radius, s.nodes), std::move(u));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed result.json: ") + e.what());
  }
  return s;
}

bool same_report(const VerificationReport& a, const VerificationReport& b, double rel_tol) {
  if (a.checks.size() != b.checks.size()) return false;
  auto close = [&](double x, double y) {
    if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
    return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
  };
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    const auto& x = a.checks[i];
    const auto& y = b.checks[i];
    if (x.name != y.name || x.passed != y.passed || !close(x.value, y.value) || !close(x.bound, y.bound)) return false;
  }
  return true;
}

ProblemSpec stored_problem(const StoredResult& stored) {
  std::ostringstream ini;
  std::string section;
  for (const auto& [key, value] : stored.config) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      ini << '[' << s << "]\n";
      section = s;
    }
    ini << key.substr(dot + 1) << " = " << value << '\n';
  }
  const RunConfig cfg = parse_config_text(ini.str(), "result.json config");
  ProblemSpec spec{cfg.a, cfg.b, cfg.c, cfg.nonlinearity(), cfg.potential(), stored.result.u.grid_ptr(),
                   stored.length_unit};
  spec.validate();
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace kirchhoff
