#include <doctest.h>

#include <cmath>
#include <sstream>

#include "carleman/grid.hpp"
#include "carleman/profiles.hpp"
#include "carleman/weights.hpp"

using namespace carleman;

TEST_SUITE("grid") {

TEST_CASE("reference grid spacings") {
  const StripGrid g = build_grid(4, 1, 1, 160, 40, 200);
  CHECK(g.h2() == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(g.dt() == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.h1() == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(g.time_levels() == 201);
  CHECK(g.t(g.zero_level()) == 0.0);
}

TEST_CASE("degenerate sizes are configuration errors") {
  CHECK_THROWS_AS(build_grid(4, 1, 1, 0, 40, 200), ConfigError);
  CHECK_THROWS_AS(build_grid(4, 1, 1, 160, 3, 200), ConfigError);
  CHECK_THROWS_AS(build_grid(-1, 1, 1, 8, 8, 8), ConfigError);
  CHECK_THROWS_AS(build_grid(4, 0, 1, 8, 8, 8), ConfigError);
  CHECK_THROWS_AS(build_grid(4, 1, std::nan(""), 8, 8, 8), ConfigError);
}

TEST_CASE("node ranges hit the strip edges exactly") {
  const StripGrid g = build_grid(2, 1, 0.5, 80, 20, 100);
  CHECK(g.x2(0) == 1.0);
  CHECK(g.x2(g.n2) == 2.0);
  CHECK(g.x1(0) == -2.0);
  CHECK(g.x1(g.n1) == 2.0);
  CHECK(g.t(0) == -0.5);
  CHECK(g.t(g.nt) == 0.5);
  const StripGrid f = g.forward_half();
  CHECK(f.t(0) == 0.0);
  CHECK(f.t(f.time_levels() - 1) == 0.5);
  CHECK(f.dt() == g.dt());
}

TEST_CASE("space-time integrals of constants") {
  const StripGrid g = build_grid(2, 1, 1, 8, 6, 10);
  CHECK(integrate_space_time(GridFunction(g)) == 0.0);
  // (-2, 2) x (1, 2) x (-1, 1) has volume 4 * 1 * 2.
  CHECK(integrate_space_time(GridFunction(g, 1.0)) == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(integrate_space_time(GridFunction(g, cplx(0.0, 2.0))) == doctest::Approx(32.0).epsilon(1e-13));
}

TEST_CASE("weighted integral decreases with s") {
  const StripGrid g = build_grid(2, 1, 1, 8, 8, 20);
  const ProfileContext ctx{1, 2, 1};
  const GridFunction one(g, 1.0);
  double prev = INFINITY;
  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    const CarlemanWeights w = build_weights({make_profile("exp-decreasing", ctx), 2.0, 1.0, s}, g);
    const double v = integrate_space_time(one, w.exp_weight_field());
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("boundary integrals") {
  const StripGrid g = build_grid(2, 1, 1, 8, 6, 10);
  BoundaryTrace zero(g, Side::GammaPlus);
  CHECK(integrate_boundary(zero) == 0.0);
  BoundaryTrace one(g, Side::GammaPlus, 1.0);
  CHECK(integrate_boundary(one) == doctest::Approx(8.0).epsilon(1e-13));  // 2L * 2T
  RealTrace w(g, Side::GammaPlus, 1.0);
  w(3, 2) = -0.5;
  CHECK_THROWS_AS(integrate_boundary(one, w), PreconditionError);
  RealTrace other(g, Side::GammaMinus, 1.0);
  CHECK_THROWS_AS(integrate_boundary(one, other), GridMismatchError);
}

TEST_CASE("grid mismatch is rejected") {
  const GridFunction f(build_grid(2, 1, 1, 8, 6, 10), 1.0);
  const RealGridFunction w(build_grid(2, 1, 1, 8, 6, 12), 1.0);
  CHECK_THROWS_AS(integrate_space_time(f, w), GridMismatchError);
}

TEST_CASE("trapezoid is exact for multilinear integrands") {
  const StripGrid g = build_grid(1.5, 0.7, 0.8, 7, 5, 12);
  RealGridFunction w(g);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        const double t = g.t(k), x1 = g.x1(i), x2 = g.x2(j);
        w(k, i, j) = (2.0 + x1) * (1.0 + 3.0 * x2) * (1.5 - t) + 0.25;
      }
  // Integral of (2 + x1)(1 + 3 x2)(1.5 - t) + 0.25 over the box, by hand.
  const double L = 1.5, d = 0.7, T = 0.8;
  const double ix1 = 2.0 * 2.0 * L;
  const double ix2 = d + 1.5 * (4.0 * d * d - d * d);
  const double it = 1.5 * 2.0 * T;
  const double exact = ix1 * ix2 * it + 0.25 * 2.0 * L * d * 2.0 * T;
  CHECK(std::abs(integrate_real(w) - exact) <= 1e-12 * exact);
  CHECK(std::abs(integrate_space_time(GridFunction(g, 1.0), w) - exact) <= 1e-12 * exact);
}

TEST_CASE("refinement converges at second order") {
  // int of cos(x1) e^{x2} (1 + t^2) over (-1,1)x(1,2)x(-1,1)
  const double exact = 2.0 * std::sin(1.0) * (std::exp(2.0) - std::exp(1.0)) * (2.0 + 2.0 / 3.0);
  double err[3];
  for (int l = 0; l < 3; ++l) {
    const int f = 1 << l;
    const StripGrid g = build_grid(1, 1, 1, 6 * f, 6 * f, 6 * f);
    RealGridFunction v(g);
    for (int k = 0; k < g.time_levels(); ++k)
      for (int i = 0; i <= g.n1; ++i)
        for (int j = 0; j <= g.n2; ++j) v(k, i, j) = std::cos(g.x1(i)) * std::exp(g.x2(j)) * (1.0 + g.t(k) * g.t(k));
    err[l] = std::abs(integrate_real(v) - exact);
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("boundary partition is complete") {
  const StripGrid g = build_grid(2, 1, 1, 8, 6, 10);
  for (int j = 0; j <= g.n2; ++j) {
    const bool on_edge = g.x2(j) == g.d || g.x2(j) == 2.0 * g.d;
    const int count = int(g.on_side(j, Side::GammaPlus)) + int(g.on_side(j, Side::GammaMinus));
    CHECK(count == (on_edge ? 1 : 0));
  }
}

TEST_CASE("interior region drops the ring and the end levels") {
  const StripGrid g = build_grid(2, 1, 1, 8, 6, 10);
  CHECK_FALSE(in_region(g, Region::Interior, 0, 3, 3));
  CHECK_FALSE(in_region(g, Region::Interior, g.nt, 3, 3));
  CHECK_FALSE(in_region(g, Region::Interior, 4, 0, 3));
  CHECK_FALSE(in_region(g, Region::Interior, 4, 3, g.n2));
  CHECK(in_region(g, Region::Interior, 4, 3, 3));
  CHECK(in_region(g, Region::All, 0, 0, 0));
}

TEST_CASE("snapshot csv round trip") {
  const StripGrid g = build_grid(1, 1, 1, 4, 4, 4);
  GridFunction f(g);
  for (std::size_t n = 0; n < g.size(); ++n) f.values()[n] = cplx(0.1 * double(n), -1.0 / (1.0 + double(n)));
  std::stringstream ss;
  write_csv(ss, f);
  const GridFunction back = read_csv(ss, g);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(back.values()[n] - f.values()[n]) == 0.0);
  std::istringstream bad("t,x1,x2,re,im\n0,0,0,1\n");
  CHECK_THROWS_AS(read_csv(bad, g), ConfigError);
}

}  // TEST_SUITE
