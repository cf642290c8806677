#include <doctest.h>

#include <cmath>

#include "carleman/fixtures.hpp"
#include "carleman/forward.hpp"

using namespace carleman;

namespace {

CoefficientField reference_coeffs(const StripGrid& g, double b = -1.0) {
  const ProfileContext ctx{g.d, g.L, g.T};
  return build_coefficients(make_profile("quadratic", ctx), make_profile("constant", ctx).scaled(b), g);
}

double max_error(const GridFunction& q, const SpaceTimeFixture& exact) {
  const StripGrid& g = q.grid();
  double e = 0.0;
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) e = std::max(e, std::abs(q(k, i, j) - exact.value(g.x1(i), g.x2(j), g.t(k))));
  return e;
}

double discrete_mass(const GridFunction& q, int k) {
  const StripGrid& g = q.grid();
  double m = 0.0;
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) m += std::norm(q(k, i, j));
  return m;
}

}  // namespace

TEST_SUITE("forward") {

TEST_CASE("manufactured solution converges at second order") {
  const SpaceTimeFixture q = make_fixture("shifted-phase", {1, 1, 1});
  double err[3];
  for (int l = 0; l < 3; ++l) {
    const int f = 1 << l;
    const StripGrid g = build_grid(1, 1, 1, 6, 10 * f, 20 * f);
    err[l] = max_error(solve_forward(problem_from_fixture(q, reference_coeffs(g), g)), q);
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("zero data gives the zero solution") {
  const StripGrid g = build_grid(1, 1, 1, 6, 8, 10);
  const ProfileContext ctx{1, 1, 1};
  const CoefficientField c = build_coefficients(make_profile("constant", ctx), make_profile("zero", ctx), g);
  const GridFunction q = solve_forward(problem_from_fixture(make_fixture("zero", ctx), c, g));
  CHECK(max_abs(q) == 0.0);
  CHECK(q.grid() == g.forward_half());
}

TEST_CASE("discrete mass is conserved for constant diffusion and real potential") {
  const StripGrid g = build_grid(2, 1, 1, 24, 12, 40);
  const ProfileContext ctx{1, 2, 1};
  const CoefficientField c = build_coefficients(make_profile("constant", ctx).scaled(2.0), make_profile("linear", ctx).scaled(-1.5), g);
  const GridFunction q = solve_forward(problem_from_fixture(make_fixture("bump", ctx), c, g));
  const double m0 = discrete_mass(q, 0);
  REQUIRE(m0 > 1.0);
  for (int k = 1; k < q.grid().time_levels(); ++k) CHECK(std::abs(discrete_mass(q, k) - m0) <= 1e-10 * m0);
}

TEST_CASE("solution is linear in the data and matches it on the boundary") {
  const StripGrid g = build_grid(1, 1, 1, 8, 8, 12);
  const SpaceTimeFixture q = make_fixture("shifted-phase", {1, 1, 1});
  const CoefficientField c = reference_coeffs(g);
  const GridFunction one = solve_forward(problem_from_fixture(q, c, g));
  const GridFunction two = solve_forward(problem_from_fixture(q.scaled(cplx(2.0, -1.0)), c, g));
  const GridFunction diff = two - cplx(2.0, -1.0) * one;
  CHECK(max_abs(diff) <= 1e-12 * max_abs(one));
  const StripGrid& f = one.grid();
  for (int k = 0; k < f.time_levels(); ++k)
    for (int i = 0; i <= f.n1; ++i)
      for (int j = 0; j <= f.n2; ++j)
        if (f.on_spatial_boundary(i, j)) CHECK(one(k, i, j) == q.value(f.x1(i), f.x2(j), f.t(k)));
}

TEST_CASE("reduced face data reproduce an x1-independent solution") {
  const StripGrid g = build_grid(1, 1, 1, 6, 10, 20);
  const SpaceTimeFixture q = make_fixture("shifted-phase", {1, 1, 1});
  ForwardProblem p = problem_from_fixture(q, reference_coeffs(g), g);
  const GridFunction exact_faces = solve_forward(p);
  p.reduced_x1_faces = true;
  const GridFunction reduced = solve_forward(p);
  // Face data from the x2 problem make the discrete solution exactly x1-independent.
  const auto face = solve_face_problem(p, 0);
  const StripGrid& f = reduced.grid();
  double spread = 0.0;
  for (int k = 0; k < f.time_levels(); ++k)
    for (int i = 0; i <= f.n1; ++i)
      for (int j = 0; j <= f.n2; ++j) spread = std::max(spread, std::abs(reduced(k, i, j) - face[std::size_t(k)][std::size_t(j)]));
  CHECK(spread <= 1e-12);
  CHECK(max_abs(reduced - exact_faces) <= 1e-3);
}

TEST_CASE("symmetric extension") {
  const StripGrid g = build_grid(1, 1, 1, 4, 4, 8);
  const SpaceTimeFixture shifted = make_fixture("shifted-phase", {1, 1, 1});
  const GridFunction ext = extend_symmetric(shifted.sample(g.forward_half()));
  CHECK(ext.grid() == g);
  CHECK(max_abs(ext - shifted.sample(g)) <= 1e-14);
  CHECK(max_abs(restrict_forward(ext) - shifted.sample(g.forward_half())) == 0.0);

  const SpaceTimeFixture even = make_fixture("x2-squared", {1, 1, 1});
  CHECK(max_abs(extend_symmetric(even.sample(g.forward_half())) - even.sample(g)) == 0.0);

  GridFunction bad = shifted.sample(g.forward_half());
  bad(0, 2, 2) += cplx(0.0, 0.1);
  CHECK_THROWS_AS(extend_symmetric(bad), PreconditionError);
}

TEST_CASE("manufactured residual") {
  const StripGrid g = build_grid(1, 1, 1, 4, 10, 10);
  const ProfileContext ctx{1, 1, 1};
  CHECK(manufactured_residual(make_fixture("shifted-phase", ctx), reference_coeffs(g), g) <= 1e-12);
  // b = +1 leaves 2 q~, largest at x2 = 2, t = 0 where |q~| = 10.
  CHECK(manufactured_residual(make_fixture("shifted-phase", ctx), reference_coeffs(g, 1.0), g) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(manufactured_residual(make_fixture("zero", ctx), reference_coeffs(g), g) == 0.0);
}

TEST_CASE("normal derivative traces") {
  const StripGrid g = build_grid(1, 1, 1, 4, 8, 8);
  const ProfileContext ctx{1, 1, 1};
  const BoundaryTrace top = normal_derivative_trace(make_fixture("x2-squared", ctx).sample(g), Side::GammaPlus);
  const BoundaryTrace bottom = normal_derivative_trace(make_fixture("x2-squared", ctx).sample(g), Side::GammaMinus);
  const BoundaryTrace flat = normal_derivative_trace(make_fixture("constant", ctx).sample(g), Side::GammaPlus);
  const BoundaryTrace shifted = normal_derivative_trace(make_fixture("shifted-phase", ctx).sample(g), Side::GammaPlus);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) {
      CHECK(std::abs(top(k, i) - 4.0) <= 1e-12);
      CHECK(std::abs(bottom(k, i) + 2.0) <= 1e-12);
      CHECK(std::abs(flat(k, i)) <= 1e-12);
      CHECK(std::abs(shifted(k, i) - 4.0) <= 1e-11);
    }
  const BoundaryTrace tt = second_time_derivative(shifted);
  for (std::size_t n = 0; n < tt.values().size(); ++n) CHECK(std::abs(tt.values()[n]) <= 1e-9);
}

TEST_CASE("divisor bounds of the reference q tilde") {
  const StripGrid g = build_grid(1, 1, 1, 4, 20, 40);
  const QTildeReport r = check_qtilde_assumptions(make_fixture("shifted-phase", {1, 1, 1}), g);
  CHECK(r.pass);
  CHECK(r.min_abs_lap == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.min_abs_dt_q_over_lap == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.min_abs_q >= 5.0 - 1e-12);
  // |d_t(Lap q~ / q~)| = 2 / |q~|^2, smallest where |q~| = 10.
  CHECK(r.min_abs_dt_lap_over_q == doctest::Approx(0.02).epsilon(1e-12));

  const QTildeReport phase = check_qtilde_assumptions(make_fixture("phase", {1, 1, 1}), g);
  CHECK_FALSE(phase.pass);
  CHECK(phase.min_abs_lap < kDivisorGuard);
}

}  // TEST_SUITE
