#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/gn.hpp"
#include "kirchhoff/solver.hpp"

using namespace kirchhoff;
using testing::rel;

TEST_CASE("optimizer for p = 4") {
  const auto d = solve_Q(4.0);
  CHECK(d.summary.p == 4.0);
  CHECK(d.summary.constant == doctest::Approx(2.0 / d.summary.q_mass).epsilon(1e-14));
  CHECK(d.residual < 1e-6);
  CHECK(rel(d.discrete_q_mass, d.summary.q_mass) < 1e-3);

  // Positive and decreasing.
  for (std::size_t i = 0; i < d.Q.size(); ++i) {
    CHECK(d.Q[i] > 0.0);
    if (i > 0) CHECK(d.Q[i] <= d.Q[i - 1]);
  }
  CHECK(d.Q[0] == doctest::Approx(d.summary.amplitude).epsilon(1e-3));
}

TEST_CASE("sharp ratio at the optimizer") {
  for (double p : {4.0, 5.0, 5.5}) {
    const auto d = solve_Q(p);
    const double r = verify_gn(d.Q, d);
    CHECK(r >= 0.999);
    CHECK(r <= 1.001);
    CHECK(d.residual < 1e-6);
  }
}

TEST_CASE("the quotient ignores amplitude and dilation") {
  const auto d = solve_Q(5.0);
  const double base = verify_gn(d.Q, d);
  CHECK(rel(verify_gn(3.7 * d.Q, d), base) < 1e-12);

  // A dilated copy sampled on the proportionally shrunk grid has exact moments.
  const double t = 1.6;
  const auto& g = d.Q.grid();
  const auto shrunk = make_grid(g.radius() / t, g.size());
  RadialField qt(shrunk, std::vector<double>(d.Q.values().begin(), d.Q.values().end()));
  qt *= std::pow(t, 1.5);
  CHECK(rel(verify_gn(qt, d), base) < 1e-6);

  // Through interpolation on the same grid the quotient still holds to 1e-3.
  CHECK(rel(verify_gn(resample(d.Q, 1.3), d), base) < 1e-3);
}

TEST_CASE("random fields stay below the sharp constant") {
  auto& gn = testing::shared_gn();
  const auto g = make_grid(30.0, 2048);
  std::mt19937_64 rng(9);
  for (double p : {4.0, 5.0, 5.5}) {
    const auto C = gn.get(p);
    for (int k = 0; k < 100; ++k) {
      const auto u = random_smooth_field(g, rng, 1.0, k % 2 == 0);
      CHECK(verify_gn(u, p, C) <= 1.001);
    }
  }
}

TEST_CASE("amplitude grows with p") {
  double prev = 0.0;
  for (double p : {4.0, 4.5, 5.0, 5.5}) {
    GnSolveOptions o;
    o.extrapolate = false;
    const auto d = solve_Q(p, o);
    CHECK(d.summary.amplitude > prev);
    prev = d.summary.amplitude;
  }
}

TEST_CASE("solve_Q domain and argument errors") {
  CHECK_THROWS_AS(solve_Q(6.0), DomainError);
  CHECK_THROWS_AS(solve_Q(2.0), DomainError);
  const auto d = solve_Q(5.0);
  CHECK_THROWS_AS(verify_gn(RadialField(d.Q.grid_ptr()), d), DomainError);
  CHECK_THROWS_AS(verify_gn(d.Q, 4.0, d.summary), std::invalid_argument);
  // A grid far too short for the decay is refused.
  CHECK_THROWS_AS(solve_Q(5.0, make_grid(2.0, 400)), ShootingError);
}

TEST_CASE("JSON round trip and cache file") {
  const auto d = solve_Q(5.0);
  const auto back = gn_from_json(to_json(d.summary));
  CHECK(back.p == d.summary.p);
  CHECK(back.q_mass == d.summary.q_mass);
  CHECK(back.constant == d.summary.constant);
  CHECK(back.amplitude == d.summary.amplitude);
  CHECK(back.nodes == d.summary.nodes);

  const auto path = (std::filesystem::temp_directory_path() / "kirchhoff_gn_cache_test.json").string();
  std::remove(path.c_str());
  {
    GnCache cache(path);
    cache.prefetch({4.0, 5.0});
    cache.save();
  }
  GnCache reloaded(path);
  CHECK(reloaded.get(5.0).constant == d.summary.constant);
  CHECK(reloaded.get(4.0).q_mass == solve_Q(4.0).summary.q_mass);
  std::remove(path.c_str());
}
