#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "kirchhoff/config.hpp"
#include "kirchhoff/io.hpp"

using namespace kirchhoff;

namespace {

const char* kBaseline = R"(# comment
[problem]
a = 1
b = 1
c = 1
terms = 1:5

[potential]
kind = hardy   ; trailing comment
mu = 0.02

[grid]
R = 40
n = 2048

[solver]
seed = 3
)";

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

} // namespace

TEST_CASE("baseline config parses") {
  const auto cfg = parse_config_text(kBaseline);
  CHECK(cfg.a == 1.0);
  CHECK(cfg.terms.size() == 1);
  CHECK(cfg.terms[0].exponent == 5.0);
  CHECK(cfg.potential_kind == PotentialKind::Hardy);
  CHECK(cfg.mu == 0.02);
  CHECK(cfg.grid.nodes == 2048);
  CHECK(cfg.grid.units == GridUnits::Natural);
  CHECK(cfg.solver.seed == 3);
  CHECK(cfg.write_json);
  CHECK(cfg.write_csv);
}

TEST_CASE("config errors carry line and key") {
  CHECK(error_line("[problem]\na = 1\nfoo = 2\n") == 3);
  CHECK(error_line("[problem]\na = 1\na = 2\n") == 3);
  CHECK(error_line("[nope]\n") == 1);
  CHECK(error_line("a = 1\n") == 1);
  CHECK(error_line("[problem]\na = one\n") == 2);
  CHECK(error_line("[problem]\nterms = 1:4\n") == 0); // exponent checked with the whole config
  CHECK(error_line("[problem]\nterms = 5\n") == 2);
  CHECK(error_line("[problem]\nb = -1\n") == 0);
  CHECK(error_line("[grid]\nn = 2\n") == 2);
  CHECK(error_line("[grid]\nunits = furlongs\n") == 2);
  CHECK(error_line("[solver]\ninit = given\n") == 2);
  CHECK(error_line("[solver]\nmax_iter = 0\n") == 0);
  CHECK(error_line("[output]\nformats = xml\n") == 2);
  CHECK(error_line("[problem\n") == 1);
  CHECK(error_line("[problem]\na =\n") == 2);
  try {
    parse_config_text("[potential]\nkind = cubic\n", "x.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "potential.kind");
    CHECK(std::string(e.what()).find("x.ini:2") == 0);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("config round trip through INI text") {
  auto cfg = parse_config_text(kBaseline);
  cfg.terms = {{1.0, 5.0}, {0.1, 4.9}};
  cfg.potential_kind = PotentialKind::GaussianWell;
  cfg.depth = 0.3;
  cfg.width = 1.0 / 3.0;
  cfg.solver.grad_tol = 3e-8;
  cfg.write_csv = false;
  const auto back = parse_config_text(cfg.to_ini());
  CHECK(back.entries() == cfg.entries());
  CHECK(back.width == cfg.width);
}

TEST_CASE("format_double reads back exactly") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5})
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("result JSON round trip re-verifies to the stored report") {
  auto& gn = testing::shared_gn();
  const auto cfg = parse_config_text(kBaseline);
  const auto spec = cfg.problem(gn);
  const auto res = minimize_on_pohozaev(spec, cfg.solver);
  const auto rep = verify_solution(spec, res, gn);
  const auto text = result_to_json(spec, res, rep, cfg.entries());

  const auto stored = result_from_json(text);
  CHECK(stored.result.energy == res.energy);
  CHECK(stored.result.lambda == res.lambda);
  CHECK(stored.result.converged == res.converged);
  CHECK(stored.config == cfg.entries());
  for (std::size_t i = 0; i < res.u.size(); ++i) REQUIRE(stored.result.u[i] == res.u[i]);

  const auto spec2 = stored_problem(stored);
  CHECK(spec2.grid->radius() == spec.grid->radius());
  const auto rep2 = verify_solution(spec2, stored.result, gn);
  REQUIRE(rep2.checks.size() == stored.report.checks.size());
  for (std::size_t k = 0; k < rep2.checks.size(); ++k) {
    CHECK(rep2.checks[k].name == stored.report.checks[k].name);
    CHECK(rep2.checks[k].passed == stored.report.checks[k].passed);
    CHECK(rep2.checks[k].value == doctest::Approx(stored.report.checks[k].value).epsilon(1e-12));
  }

  // The same run serialises to the same bytes.
  const auto res2 = minimize_on_pohozaev(cfg.problem(gn), cfg.solver);
  CHECK(result_to_json(spec, res2, verify_solution(spec, res2, gn), cfg.entries()) == text);
}

TEST_CASE("malformed result documents are rejected") {
  CHECK_THROWS_AS(result_from_json("{}"), std::runtime_error);
  CHECK_THROWS_AS(result_from_json("not json"), std::exception);
  CHECK_THROWS_AS(result_from_json(R"({"schema": 99})"), std::runtime_error);
}

TEST_CASE("artifact headers and CSV columns") {
  const auto cfg = parse_config_text(kBaseline);
  std::ostringstream head;
  write_header(head, cfg.entries());
  CHECK(head.str().rfind("# kirchhoff " + artifact_version() + "\n", 0) == 0);
  CHECK(head.str().find("# problem.terms = 1:5\n") != std::string::npos);

  std::ostringstream sweep;
  SweepRow row;
  row.c = 1.0;
  row.error = "boom";
  write_sweep_csv(sweep, {row}, {});
  CHECK(sweep.str().find("c,m_tilde,m_ref,lambda,kinetic,pohozaev_residual,converged\n") != std::string::npos);
  CHECK(sweep.str().find("# row c = 1 failed: boom") != std::string::npos);

  std::ostringstream trace;
  SolveResult r;
  r.trace.push_back({0, 1.5, 0.25, 1.0, 0.5});
  write_trace_csv(trace, r, {});
  CHECK(trace.str().find("iteration,energy,residual,t_u,step\n0,1.5,0.25,1,0.5\n") != std::string::npos);
}
