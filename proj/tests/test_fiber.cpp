#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/fiber.hpp"

using namespace kirchhoff;
using testing::rel;

namespace {

// Root of K t + K^2 t^3 - 4.5 D t^{7/2} on (lo, hi) by plain bisection.
double scalar_root(double K, double D, double lo, double hi) {
  auto f = [&](double t) { return K * t + K * K * t * t * t - 4.5 * D * std::pow(t, 3.5); };
  REQUIRE(f(lo) > 0.0);
  REQUIRE(f(hi) < 0.0);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("scalar fixture: the fiber maximiser is the unique root") {
  // D = 0.2 gives Psi'(t) = t + t^3 - 0.9 t^{7/2}: positive at 1, negative at 2.
  double prev_t = 0.0;
  for (double D : {0.15, 0.2, 0.3}) {
    const auto u = testing::scalar_fixture(D, 4096);
    const auto spec = testing::small_spec(Potential::zero()).with_grid(u.grid_ptr()).with_mass(mass(u));
    const auto m = compute_moments(spec, u);
    const double Dq = m.G_integral(spec.nl);
    const double oracle = scalar_root(m.kinetic, Dq, 0.5, 4.0);
    const auto fm = maximize_fiber(spec, u);
    CHECK(rel(fm.t_u, oracle) < 1e-9);
    CHECK(fm.psi_second_at_max < 0.0);
    if (D == 0.2) {
      CHECK(fm.t_u > 1.0);
      CHECK(fm.t_u < 2.0);
    }
    // More nonlinear weight at fixed kinetic energy pulls the maximiser in.
    if (prev_t > 0.0) CHECK(fm.t_u < prev_t);
    prev_t = fm.t_u;
  }
}

TEST_CASE("maximiser of a field already on the Pohozaev set is t = 1") {
  const auto spec = testing::baseline_spec();
  const auto w = project_pohozaev(spec, initial_field(spec, SolveOptions{}));
  const auto fm = maximize_fiber(spec, w);
  CHECK(std::abs(fm.t_u - 1.0) < 1e-6);
  CHECK(std::abs(fm.psi_prime_at_max) <= 1e-10 * std::max(1.0, std::abs(fm.psi_at_max)));
  CHECK(fm.t_lo <= fm.t_u);
  CHECK(fm.t_hi >= fm.t_u);
}

TEST_CASE("projection lands on the Pohozaev set with the mass kept") {
  const auto spec = testing::baseline_spec();
  SolveOptions o;
  o.init = InitKind::Random;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    o.seed = seed;
    const auto u = initial_field(spec, o);
    const auto pr = project_pohozaev_detailed(spec, u);
    const auto m = compute_moments(spec, pr.field);
    CHECK(std::abs(pohozaev_P(spec, m)) <= 1e-6 * pohozaev_scale(spec, m));
    CHECK(rel(mass(pr.field), spec.c) < 1e-6);
    CHECK(energy_J(spec, pr.field) >= energy_J(spec, u));

    // Idempotent up to interpolation.
    const auto again = project_pohozaev(spec, pr.field);
    double e = 0.0, top = 0.0;
    for (std::size_t i = 0; i < again.size(); ++i) {
      e = std::max(e, std::abs(again[i] - pr.field[i]));
      top = std::max(top, std::abs(pr.field[i]));
    }
    CHECK(e / top < 1e-4);
  }
}

TEST_CASE("projection converges from far along the fiber") {
  const auto spec = testing::baseline_spec();
  const double ell = spec.length_unit;
  // A wide gaussian (t_u about 12) and an off-centre shell (t_u about 100)
  // whose compressed image is only a few cells wide.
  const auto wide = normalize_to(testing::gaussian(spec.grid, 8.0 * ell), spec.c);
  const auto shell = normalize_to(
      sample(spec.grid, [&](double r) { return std::exp(-std::pow((r - ell) / (0.5 * ell), 2)); }), spec.c);
  for (const auto* u : {&wide, &shell}) {
    const auto pr = project_pohozaev_detailed(spec, *u);
    const auto m = compute_moments(spec, pr.field);
    CHECK(std::abs(pohozaev_P(spec, m)) <= 1e-6 * pohozaev_scale(spec, m));
    CHECK(std::abs(maximize_fiber(spec, pr.field).t_u - 1.0) < 1e-3);
  }
  CHECK(rel(project_pohozaev_detailed(spec, wide).t_total, maximize_fiber(spec, wide).t_u) < 0.01);

  // Compressing a thin shell past the first cell leaves nothing to project.
  const auto thin = normalize_to(
      sample(spec.grid, [&](double r) { return std::exp(-std::pow((r - 1.5 * ell) / (0.4 * ell), 2)); }), spec.c);
  CHECK_THROWS_AS(project_pohozaev(spec, thin), ProjectionError);
}

TEST_CASE("projected gaussian clears the kinetic floor") {
  auto& gn = testing::shared_gn();
  const auto spec = testing::baseline_spec();
  const auto w = project_pohozaev(spec, initial_field(spec, SolveOptions{}));
  CHECK(std::sqrt(kinetic(w)) >= delta_bar(spec, gn).root);
}

TEST_CASE("re-projecting a tangential perturbation does not lower J below the fiber maximum") {
  const auto spec = testing::baseline_spec();
  const auto w = project_pohozaev(spec, initial_field(spec, SolveOptions{}));
  std::mt19937_64 rng(5);
  const auto v = random_smooth_field(spec.grid, rng, 1.0, false, spec.length_unit);
  const auto tangent = v - (inner(v, w) / spec.c) * w;
  const auto moved = normalize_to(w + 1e-2 * std::sqrt(spec.c / mass(tangent)) * tangent, spec.c);
  const auto fm = maximize_fiber(spec, moved);
  const auto back = project_pohozaev(spec, moved);
  // The discrete kinetic energy of a dilated field differs from t^2 K by
  // O((h t / width)^2), about 1e-4 here.
  CHECK(energy_J(spec, back) == doctest::Approx(fm.psi_at_max).epsilon(1e-3));
  CHECK(fm.psi_at_max >= energy_J(spec, moved));
}

TEST_CASE("fiber scan shape") {
  const auto spec = testing::baseline_spec();
  const auto u = initial_field(spec, SolveOptions{});
  const auto prof = fiber_scan(spec, u, log_grid(1e-3, 1e3, 400));
  REQUIRE(prof.t.size() == 400);
  CHECK(prof.t.front() == doctest::Approx(1e-3));
  CHECK(prof.t.back() == doctest::Approx(1e3));
  CHECK(prof.sign_changes() == 1);
  CHECK(prof.psi.front() > 0.0);
  CHECK(prof.psi.back() < 0.0);
  const FiberFunction f(spec, u);
  for (std::size_t k = 0; k < prof.t.size(); k += 37) {
    const double t = prof.t[k], e = 1e-5;
    CHECK(prof.psi[k] == doctest::Approx(f.psi(t)).epsilon(1e-14));
    const double fd = (f.psi(t * (1 + e)) - f.psi(t * (1 - e))) / (2 * t * e);
    CHECK(prof.psi_prime[k] == doctest::Approx(fd).epsilon(1e-6).scale(std::abs(prof.psi[k]) / t));
    const double fd2 = (f.psi_prime(t * (1 + e)) - f.psi_prime(t * (1 - e))) / (2 * t * e);
    CHECK(prof.psi_second[k] == doctest::Approx(fd2).epsilon(1e-5).scale(std::abs(prof.psi_prime[k]) / t));
  }

  std::ostringstream csv;
  prof.write_csv(csv);
  CHECK(csv.str().rfind("t,psi,psi_prime,psi_second\n", 0) == 0);
  CHECK_THROWS_AS(log_grid(1.0, 0.5, 10), std::invalid_argument);
}

TEST_CASE("fiber operations check their preconditions") {
  const auto spec = testing::baseline_spec();
  CHECK_THROWS_AS(maximize_fiber(spec, RadialField(spec.grid)), std::invalid_argument);
  const auto u = initial_field(spec, SolveOptions{});
  CHECK_THROWS_AS(maximize_fiber(spec, 2.0 * u), std::invalid_argument);
}

TEST_CASE("maximiser is a strict maximum for random fields") {
  const auto spec = testing::baseline_spec();
  std::mt19937_64 rng(77);
  for (int k = 0; k < 20; ++k) {
    const auto u = random_smooth_field(spec.grid, rng, spec.c, true, spec.length_unit);
    const auto fm = maximize_fiber(spec, u);
    CHECK(fm.psi_second_at_max < 0.0);
    CHECK(fm.psi_at_max >= psi(spec, u, fm.t_u * 1.01));
    CHECK(fm.psi_at_max >= psi(spec, u, fm.t_u / 1.01));
  }
}

TEST_CASE("energy on the Pohozaev set is bounded below by the coercive quadratic") {
  const auto spec = testing::baseline_spec();
  const auto s = sigma_bounds(spec.pot, *spec.grid);
  const double al = spec.nl.alpha();
  const double c1 = (spec.a - s.sigma1) / 2 - 2 * (spec.a + s.sigma2) / (3 * (al - 2));
  const double c2 = spec.b / 4 - 2 * spec.b / (3 * (al - 2));
  REQUIRE(c1 > 0.0);
  REQUIRE(c2 > 0.0);
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const auto w = project_pohozaev(spec, random_smooth_field(spec.grid, rng, spec.c, true, spec.length_unit));
    const double K = kinetic(w);
    // J - kappa P is the exact left side; w only satisfies P = 0 to 1e-6.
    const double kappa = 2 / (3 * (al - 2));
    CHECK(energy_J(spec, w) - kappa * pohozaev_P(spec, w) >= c1 * K + c2 * K * K);
  }
}
