#include <doctest.h>

#include <cmath>

#include "carleman/auditor.hpp"
#include "carleman/fixtures.hpp"
#include "carleman/inverse.hpp"
#include "carleman/stencils.hpp"

using namespace carleman;

namespace {

struct Setup {
  StripGrid grid;
  ProfileContext ctx;
  SpaceTimeFixture q_tilde;
  Profile a_tilde, b_tilde;
};

Setup setup(int n1, int n2, int nt, double L = 1.0) {
  Setup s{build_grid(L, 1, 1, n1, n2, nt), {1, L, 1}, {}, {}, {}};
  s.q_tilde = make_fixture("shifted-phase", s.ctx);
  s.a_tilde = make_profile("quadratic", s.ctx);
  s.b_tilde = make_profile("constant", s.ctx).scaled(-1.0);
  return s;
}

TwinRun twin(const Setup& s, double alpha, double gamma) {
  return run_twin(planted_twin(s.grid, s.q_tilde, s.a_tilde, s.b_tilde, make_profile("sin-bump", s.ctx).scaled(alpha),
                               make_profile("cos-bump", s.ctx).scaled(gamma)));
}

double l2(const GridFunction& f) { return std::sqrt(integrate_space_time(f)); }

}  // namespace

TEST_SUITE("inverse") {

TEST_CASE("identical twins give a vanishing difference and vanishing chains") {
  const Setup s = setup(8, 10, 20);
  const TwinRun run = twin(s, 0.0, 0.0);
  CHECK(max_abs(run.u) <= 1e-12);
  const ChainBundle u = build_u_chain(run.u, s.q_tilde, run.base);
  const ChainBundle v = build_v_chain(run.u, s.q_tilde, run.base);
  for (const ChainBundle* b : {&u, &v})
    for (const GridFunction* w : {&b->w1, &b->w2, &b->w3, &b->w4}) CHECK(max_abs(*w) <= 1e-10);
  const Reconstruction ra = reconstruct_alpha(u, run.base);
  CHECK(ra.max_abs_value <= 1e-8);
}

TEST_CASE("zero difference gives zero chains exactly") {
  const Setup s = setup(6, 8, 12);
  const CoefficientField c = build_coefficients(s.a_tilde, s.b_tilde, s.grid);
  const ChainBundle b = build_u_chain(GridFunction(s.grid), s.q_tilde, c);
  CHECK(max_abs(b.w4) == 0.0);
  CHECK(max_abs(chain_gap_pointwise(b, c)) == 0.0);
}

TEST_CASE("planted twin difference") {
  const Setup s = setup(8, 16, 40);
  const TwinRun run = twin(s, 0.05, 0.0);
  const StripGrid& g = s.grid;
  const int k0 = g.zero_level();
  double at_zero = 0.0, on_sides = 0.0;
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) at_zero = std::max(at_zero, std::abs(run.u(k0, i, j)));
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) on_sides = std::max({on_sides, std::abs(run.u(k, i, 0)), std::abs(run.u(k, i, g.n2))});
  CHECK(at_zero == 0.0);
  CHECK(on_sides == 0.0);
  CHECK(max_abs(run.u) > 1e-4);
}

TEST_CASE("difference solves the forced equation with the base coefficients") {
  // H u = alpha Lap q~ + gamma q~; the centred time difference in H and the
  // Crank-Nicolson step agree to second order in dt.
  double rel[2];
  for (int l = 0; l < 2; ++l) {
    const Setup s = setup(8, 16, 160 << l);
    const StripGrid& g = s.grid;
    const Profile alpha = make_profile("sin-bump", s.ctx).scaled(0.05);
    const TwinRun run = twin(s, 0.05, 0.0);
    const GridFunction Hu = apply_H(run.u, run.base);
    GridFunction source(g);
    for (int k = 1; k < g.time_levels() - 1; ++k)
      for (int i = 1; i < g.n1; ++i)
        for (int j = 1; j < g.n2; ++j) source(k, i, j) = alpha.value(g.x1(i), g.x2(j)) * laplacian_at(run.q_tilde, k, i, j);
    rel[l] = std::sqrt(integrate_space_time(Hu - source, Region::Interior) / integrate_space_time(source, Region::Interior));
  }
  CHECK(rel[0] <= 0.06);
  CHECK(rel[0] / rel[1] >= 3.5);
}

TEST_CASE("difference is linear in a small gap") {
  const Setup s = setup(8, 10, 20);
  const double ratio = l2(twin(s, 0.02, 0.0).u) / l2(twin(s, 0.01, 0.0).u);
  CHECK(std::abs(ratio - 2.0) <= 0.2);
}

TEST_CASE("chain coefficients of the reference q tilde") {
  const Setup s = setup(6, 10, 20);
  const CoefficientField c = build_coefficients(s.a_tilde, s.b_tilde, s.grid);
  const GridFunction u = make_fixture("bump", s.ctx).sample(s.grid);
  const ChainBundle uc = build_u_chain(u, s.q_tilde, c);
  const ChainBundle vc = build_v_chain(u, s.q_tilde, c);
  const StripGrid& g = s.grid;
  for (int k = 0; k < g.time_levels(); k += 3)
    for (int j = 0; j <= g.n2; j += 2) {
      const cplx q = s.q_tilde.value(0.0, g.x2(j), g.t(k));
      const cplx phase = std::exp(cplx(0.0, -g.t(k)));
      CHECK(std::abs(uc.coefficients(k, 2, j).p - q) <= 1e-13);
      CHECK(std::abs(std::abs(uc.coefficients(k, 2, j).g) - 2.0 / std::norm(q)) <= 1e-13);
      CHECK(std::abs(vc.coefficients(k, 2, j).p - 2.0) <= 1e-13);
      CHECK(std::abs(vc.coefficients(k, 2, j).g - cplx(0.0, -0.5) * phase) <= 1e-13);
    }
  // The chain variables are the quotients and centred time differences they are defined as.
  for (int k = 1; k < g.time_levels() - 1; k += 3)
    for (int i = 1; i < g.n1; i += 2)
      for (int j = 1; j < g.n2; j += 3) {
        CHECK(std::abs(uc.w1(k, i, j) - u(k, i, j) / uc.coefficients(k, i, j).p) <= 1e-14);
        CHECK(std::abs(uc.w2(k, i, j) - dt_at(uc.w1, k, i, j)) <= 1e-12);
        CHECK(std::abs(uc.w3(k, i, j) - uc.w2(k, i, j) / uc.coefficients(k, i, j).g) <= 1e-10);
        CHECK(std::abs(uc.w4(k, i, j) - dt_at(uc.w3, k, i, j)) <= 1e-9);
        CHECK(std::abs(vc.w1(k, i, j) - u(k, i, j) / 2.0) <= 1e-14);
      }
}

TEST_CASE("chain isolates the source of a manufactured difference") {
  // For any smooth u the w3 equation of the u-chain reads d_t(F / q~) / d_t(Lap q~ / q~)
  // with F = i u_t + a Lap u + b u.
  const cplx I(0.0, 1.0);
  const SpaceTimeFixture um("manufactured",
                            [I](const Jet& x1, const Jet& x2, const Jet& t) {
                              return t * sin(x2 * 3.0) * cos(x1 * 1.3) + t * t * x2 * cplx(0.0, 0.5);
                            },
                            true);
  double err[3];
  for (int l = 0; l < 3; ++l) {
    const Setup s = setup(8 << l, 8 << l, 32 << l);
    const StripGrid& g = s.grid;
    const CoefficientField c = build_coefficients(s.a_tilde, s.b_tilde, g);
    const GridFunction gap = chain_gap_pointwise(build_u_chain(um.sample(g), s.q_tilde, c), c);
    double e = 0.0;
    for (int k = 1; k < g.time_levels() - 1; ++k)
      for (int i = 1; i < g.n1; ++i)
        for (int j = 1; j < g.n2; ++j) {
          const Jet U = um.jet(g.x1(i), g.x2(j), g.t(k));
          const Jet Q = s.q_tilde.jet(g.x1(i), g.x2(j), g.t(k));
          const Jet F = I * U.dt() + s.a_tilde.value(g.x1(i), g.x2(j)) * U.laplacian() - U;
          const cplx exact = (F / Q).dt().value() / (Q.laplacian() / Q).dt().value();
          e = std::max(e, std::abs(gap(k, i, j) - exact));
        }
    err[l] = e;
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("divisor guard") {
  const Setup s = setup(6, 8, 12);
  const CoefficientField c = build_coefficients(s.a_tilde, s.b_tilde, s.grid);
  const SpaceTimeFixture phase = make_fixture("phase", s.ctx);
  CHECK_THROWS_AS(build_v_chain(GridFunction(s.grid), phase, c), DivisorGuardError);
  CHECK_THROWS_AS(build_u_chain(GridFunction(s.grid), phase, c), DivisorGuardError);
}

TEST_CASE("observation noise") {
  const Setup s = setup(40, 8, 400);
  const BoundaryTrace trace = normal_derivative_trace(make_fixture("bump", s.ctx).sample(s.grid), Side::GammaPlus);
  const BoundaryTrace same = add_observation_noise(trace, 0.0, 7);
  CHECK(same.values() == trace.values());
  const BoundaryTrace a = add_observation_noise(trace, 0.01, 7);
  const BoundaryTrace b = add_observation_noise(trace, 0.01, 7);
  const BoundaryTrace c = add_observation_noise(trace, 0.01, 8);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  double rms = 0.0, pert = 0.0;
  for (std::size_t n = 0; n < trace.values().size(); ++n) {
    rms += std::norm(trace.values()[n]);
    pert += std::norm(a.values()[n] - trace.values()[n]);
  }
  CHECK(std::abs(std::sqrt(pert / rms) - 0.01) <= 0.2 * 0.01);
}

TEST_CASE("stability estimate terms") {
  const Setup s = setup(8, 12, 40);
  const CarlemanWeights w = build_weights({make_profile("exp-decreasing", s.ctx), 2.0, 1.0, 8.0}, s.grid);
  const Profile alpha = make_profile("sin-bump", s.ctx).scaled(0.05);
  const Profile gamma = make_profile("cos-bump", s.ctx).scaled(0.05);

  const StabilitySides zero =
      stability_sides(twin(s, 0.0, 0.0).u, SpatialField(s.grid), SpatialField(s.grid), w, Side::GammaPlus);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs() <= 1e-20);

  const StabilitySides one = stability_sides(GridFunction(s.grid), sample_interior(alpha, s.grid),
                                             sample_interior(gamma, s.grid), w);
  const StabilitySides two = stability_sides(GridFunction(s.grid), sample_interior(alpha.scaled(2.0), s.grid),
                                             sample_interior(gamma.scaled(2.0), s.grid), w);
  CHECK(one.lhs > 0.0);
  CHECK(two.lhs == doctest::Approx(4.0 * one.lhs).epsilon(1e-12));

  const TwinRun run = twin(s, 0.05, 0.05);
  const StabilitySides planted = stability_sides(run.u, sample_interior(alpha, s.grid), sample_interior(gamma, s.grid), w);
  CHECK(planted.rhs_boundary > 0.0);
  CHECK(planted.rhs_initial > 0.0);
  CHECK(std::isfinite(planted.ratio()));
}

TEST_CASE("interior sampling and relative error") {
  const Setup s = setup(6, 8, 12);
  const Profile alpha = make_profile("sin-bump", s.ctx);
  const SpatialField a = sample_interior(alpha, s.grid);
  CHECK(a(0, 4) == 0.0);
  CHECK(a(3, 4) == doctest::Approx(alpha.value(s.grid.x1(3), s.grid.x2(4))));
  CHECK(relative_l2_error(a, a) == 0.0);
  SpatialField half = a;
  for (double& v : half.values) v *= 0.5;
  CHECK(relative_l2_error(half, a) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(relative_l2_error(half, SpatialField(s.grid)) == doctest::Approx(std::sqrt(integrate_space_squared(half))));
}

}  // TEST_SUITE
