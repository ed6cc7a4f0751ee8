#include <doctest.h>

#include "helpers.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/solver.hpp"

using namespace kirchhoff;
using testing::rel;

namespace {

const SolveResult& baseline_result() {
  static const SolveResult r = minimize_on_pohozaev(testing::baseline_spec(), SolveOptions{});
  return r;
}

} // namespace

TEST_CASE("baseline converges with the result invariants") {
  const auto spec = testing::baseline_spec();
  const auto& r = baseline_result();
  REQUIRE(r.converged);
  CHECK(rel(mass(r.u), spec.c) < 1e-8);
  CHECK(r.pohozaev_residual <= 1e-6);
  CHECK(r.lambda > 0.0);
  CHECK(r.psi_second_at_1 < 0.0);
  CHECK(r.tangent_residual < 1e-7);
  CHECK(r.kinetic == doctest::Approx(kinetic(r.u)));
  CHECK(r.energy == doctest::Approx(energy_J(spec, r.u)));
  CHECK(r.iterations == static_cast<int>(r.trace.size()) - 1);
}

TEST_CASE("trace energies never increase beyond rounding") {
  const auto& r = baseline_result();
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    CHECK(r.trace[k].energy <= r.trace[k - 1].energy * (1 + 1e-12));
}

TEST_CASE("reported energy is below the projected start") {
  const auto spec = testing::baseline_spec();
  const auto start = project_pohozaev(spec, initial_field(spec, SolveOptions{}));
  CHECK(baseline_result().energy <= energy_J(spec, start));
}

TEST_CASE("identical options reproduce identical runs") {
  const auto spec = testing::baseline_spec();
  SolveOptions o;
  o.init = InitKind::Random;
  o.seed = 42;
  const auto a = minimize_on_pohozaev(spec, o);
  const auto b = minimize_on_pohozaev(spec, o);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].energy == b.trace[k].energy);
    CHECK(a.trace[k].residual == b.trace[k].residual);
  }
  for (std::size_t i = 0; i < a.u.size(); ++i) REQUIRE(a.u[i] == b.u[i]);
}

TEST_CASE("multistart agrees across seeds and picks the lowest energy") {
  const auto spec = testing::baseline_spec();
  const auto ms = multistart(spec, SolveOptions{}, {3, 4, 5});
  REQUIRE(ms.runs.size() == 3);
  for (const auto& r : ms.runs) {
    CHECK(r.converged);
    CHECK(rel(r.energy, ms.best.energy) < 1e-4);
    CHECK(ms.best.energy <= r.energy + 1e-10 * std::abs(r.energy));
  }
  CHECK(ms.best.energy == ms.runs[ms.best_index].energy);
  CHECK_THROWS(multistart(spec, SolveOptions{}, {}));
}

TEST_CASE("Hardy run lies strictly below the free reference") {
  const auto spec = testing::baseline_spec();
  const auto ref = reference_m(spec, SolveOptions{});
  REQUIRE(ref.converged);
  CHECK(ref.energy - baseline_result().energy > 1e-6);

  // Without potential the reference is the same solve.
  const auto free = testing::baseline_spec(0.0);
  const auto direct = minimize_on_pohozaev(free, SolveOptions{});
  const auto via_ref = reference_m(free, SolveOptions{});
  CHECK(direct.energy == via_ref.energy);
  CHECK(std::abs(pohozaev_P(free, direct.u) - pohozaev_Pinf(free, direct.u)) == 0.0);
}

TEST_CASE("delta_bar ordering and monotonicity") {
  auto& gn = testing::shared_gn();
  const auto spec = testing::baseline_spec();
  const auto db = delta_bar(spec, gn);
  CHECK(db.root > 0.0);
  CHECK(db.envelope <= db.root);
  REQUIRE(db.K.size() == 1);

  // Closed form of the envelope for one power.
  const double e = 1.5 * (5.0 - 2.0);
  CHECK(db.envelope == doctest::Approx(std::pow((spec.a - 0.08) / db.K[0], 1.0 / (e - 2.0))));

  ProblemSpec doubled = spec;
  doubled.nl = spec.nl.scaled(2.0);
  CHECK(delta_bar(doubled, gn).root < db.root);

  ProblemSpec bad = spec;
  bad.a = 0.05;
  CHECK_THROWS_AS(delta_bar(bad, gn), DomainError);
}

TEST_CASE("natural length matches the free kinetic floor") {
  auto& gn = testing::shared_gn();
  const Nonlinearity nl({{1.0, 5.0}});
  const double ell = natural_length(1.0, 1.0, 1.0, nl, gn);
  const auto spec = testing::baseline_spec(0.0);
  CHECK(ell == doctest::Approx(1.0 / delta_bar(spec, gn, 0.0).root));
  CHECK(spec.grid->radius() == doctest::Approx(40.0 * ell));
  CHECK(spec.length_unit == ell);
}

TEST_CASE("multiplier bound is attained for the free single power") {
  const auto spec = testing::baseline_spec(0.0);
  const auto r = minimize_on_pohozaev(spec, SolveOptions{});
  REQUIRE(r.converged);
  CHECK(rel(spec.c * r.lambda, multiplier_lower_bound(spec, 0.0, r.kinetic)) < 1e-6);
}

TEST_CASE("verification of the baseline") {
  auto& gn = testing::shared_gn();
  const auto spec = testing::baseline_spec();
  const auto rep = verify_solution(spec, baseline_result(), gn);
  for (const char* name : {"mass", "pde_residual", "pohozaev", "lambda_positive", "psi_second_negative",
                           "psi_second_bound", "energy_JA_floor", "multiplier_bound", "gn_ratio_p5"}) {
    const auto* c = rep.find(name);
    REQUIRE(c != nullptr);
    CHECK_MESSAGE(c->passed, name);
  }
  REQUIRE(rep.find("kinetic_floor") != nullptr);
  CHECK(rep.find("nonexistent") == nullptr);
}

TEST_CASE("an unconverged iterate fails the PDE residual") {
  auto& gn = testing::shared_gn();
  const auto spec = testing::baseline_spec();
  SolveOptions o;
  o.max_iter = 1;
  const auto r = minimize_on_pohozaev(spec, o);
  CHECK(!r.converged);
  CHECK(!r.status.empty());
  const auto rep = verify_solution(spec, r, gn);
  CHECK(!rep.find("pde_residual")->passed);
  CHECK(!rep.all_passed());
}

TEST_CASE("inadmissible potentials are refused unless overridden") {
  const auto spec = testing::baseline_spec(0.05);
  CHECK_THROWS_AS(minimize_on_pohozaev(spec, SolveOptions{}), AdmissibilityError);
  SolveOptions o;
  o.unsafe_skip_admissibility = true;
  o.max_iter = 5;
  CHECK_NOTHROW(minimize_on_pohozaev(spec, o));
}

TEST_CASE("other preconditioners descend") {
  const auto spec = testing::baseline_spec();
  for (auto pc : {Preconditioner::None, Preconditioner::RadialWeight}) {
    SolveOptions o;
    o.preconditioner = pc;
    o.max_iter = 20;
    const auto r = minimize_on_pohozaev(spec, o);
    REQUIRE(r.trace.size() >= 2);
    CHECK(r.trace.back().energy <= r.trace.front().energy);
  }
}

TEST_CASE("options validation and names") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.grad_tol = 0.0;
  CHECK_THROWS(o.validate());
  o = SolveOptions{};
  o.max_iter = 0;
  CHECK_THROWS(o.validate());
  o = SolveOptions{};
  o.init = InitKind::Given;
  CHECK_THROWS(o.validate());

  for (auto k : {InitKind::Gaussian, InitKind::Random, InitKind::Given}) CHECK(parse_init_kind(to_string(k)) == k);
  for (auto p : {Preconditioner::None, Preconditioner::RadialWeight, Preconditioner::Sobolev})
    CHECK(parse_preconditioner(to_string(p)) == p);
  CHECK_THROWS(parse_preconditioner("newton"));
}

TEST_CASE("given initial field") {
  const auto spec = testing::baseline_spec();
  SolveOptions o;
  o.init = InitKind::Given;
  o.initial = 3.0 * baseline_result().u;
  const auto u0 = initial_field(spec, o);
  CHECK(rel(mass(u0), spec.c) < 1e-14);
  o.initial = testing::gaussian(make_grid(1.0, 64));
  CHECK_THROWS(initial_field(spec, o));
}

TEST_CASE("mass sweep") {
  const auto spec = testing::baseline_spec();
  auto& gn = testing::shared_gn();
  const Nonlinearity nl({{1.0, 5.0}});
  const auto rows = mass_sweep(
      [&](double c) { return build_problem(1.0, 1.0, c, nl, Potential::hardy(0.02), GridSetup{}, gn); },
      {0.5, 1.0, 2.0, 4.0}, SolveOptions{});
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].error.empty());
    CHECK(rows[k].converged);
    CHECK(rows[k].m_tilde > 0.0);
    CHECK(rows[k].m_tilde < rows[k].m_ref);
    CHECK(rows[k].lambda > 0.0);
    if (k > 0) CHECK(rows[k - 1].m_ref - rows[k].m_ref > 1e-6);
  }
  CHECK_THROWS(mass_sweep(spec, {1.0, 0.5}, SolveOptions{}));
  CHECK_THROWS(mass_sweep(spec, {-1.0}, SolveOptions{}));
}
