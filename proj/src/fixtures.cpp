#include "carleman/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace carleman {

SpaceTimeFixture::SpaceTimeFixture(std::string name, Fn fn, bool depends_on_x1)
    : name_(std::move(name)), fn_(std::move(fn)), depends_on_x1_(depends_on_x1) {}

SpaceTimeFixture SpaceTimeFixture::tabulated(std::string name, GridFunction samples) {
  SpaceTimeFixture f;
  f.name_ = std::move(name);
  f.depends_on_x1_ = true;
  f.table_ = std::make_shared<const GridFunction>(std::move(samples));
  return f;
}

Jet SpaceTimeFixture::jet(double x1, double x2, double t) const {
  if (!fn_) throw FixtureNotAnalyticError("fixture '" + name_ + "' has no closed form");
  return fn_(Jet::variable_x1(x1), Jet::variable_x2(x2), Jet::variable_t(t));
}

cplx SpaceTimeFixture::value(double x1, double x2, double t) const {
  if (fn_) return fn_(Jet(x1), Jet(x2), Jet(t)).value();
  const GridFunction& g = *table_;
  const StripGrid& grid = g.grid();
  const int i = int(std::lround((x1 + grid.L) / grid.h1()));
  const int j = int(std::lround((x2 - grid.d) / grid.h2()));
  const double t0 = grid.window == TimeWindow::Full ? -grid.T : 0.0;
  const int k = int(std::lround((t - t0) / grid.dt()));
  const double tol = 1e-9 * (1.0 + grid.L + grid.d + grid.T);
  if (i < 0 || i > grid.n1 || j < 0 || j > grid.n2 || k < 0 || k >= grid.time_levels() ||
      std::abs(grid.x1(i) - x1) > tol || std::abs(grid.x2(j) - x2) > tol || std::abs(grid.t(k) - t) > tol)
    throw PreconditionError("fixture '" + name_ + "': point is not a node of its table");
  return g(k, i, j);
}

GridFunction SpaceTimeFixture::sample(const StripGrid& grid) const {
  GridFunction f(grid);
  for (int k = 0; k < grid.time_levels(); ++k)
    for (int i = 0; i <= grid.n1; ++i)
      for (int j = 0; j <= grid.n2; ++j) f(k, i, j) = value(grid.x1(i), grid.x2(j), grid.t(k));
  return f;
}

SpaceTimeFixture SpaceTimeFixture::scaled(cplx factor) const {
  if (!fn_) {
    GridFunction copy = factor * *table_;
    return tabulated(name_, std::move(copy));
  }
  auto fn = fn_;
  return SpaceTimeFixture(name_, [fn, factor](const Jet& x1, const Jet& x2, const Jet& t) { return fn(x1, x2, t) * factor; },
                          depends_on_x1_);
}

Jet smooth_cutoff(const Jet& u, double tau) {
  if (std::abs(u.value().real()) >= tau) return Jet(0.0);
  const Jet r = u * (1.0 / tau);
  const Jet w = Jet(1.0) - r * r;
  return exp(Jet(1.0) - reciprocal(w));
}

std::vector<std::string> fixture_names() { return {"shifted-phase", "bump", "static-bump", "zero", "phase", "x2-squared", "constant"}; }

SpaceTimeFixture make_fixture(const std::string& name, const ProfileContext& ctx) {
  const cplx I(0.0, 1.0);
  const double d = ctx.d;
  const double k = std::numbers::pi / d;
  const double reach = 0.8 * ctx.L;
  const double tau = 0.9 * ctx.T;
  if (name == "shifted-phase")
    return SpaceTimeFixture(
        name, [I](const Jet&, const Jet& x2, const Jet& t) { return exp(t * (-I)) + x2 * x2 + Jet(5.0); }, false);
  if (name == "bump")
    return SpaceTimeFixture(
        name,
        [k, d, reach, tau](const Jet& x1, const Jet& x2, const Jet& t) {
          return sin((x2 - Jet(d)) * k) * smooth_cutoff(x1, reach) * smooth_cutoff(t, tau);
        },
        true);
  if (name == "static-bump")
    return SpaceTimeFixture(
        name,
        [k, d, reach](const Jet& x1, const Jet& x2, const Jet&) {
          return sin((x2 - Jet(d)) * k) * smooth_cutoff(x1, reach);
        },
        true);
  if (name == "zero") return SpaceTimeFixture(name, [](const Jet&, const Jet&, const Jet&) { return Jet(0.0); }, false);
  if (name == "phase") return SpaceTimeFixture(name, [I](const Jet&, const Jet&, const Jet& t) { return exp(t * (-I)); }, false);
  if (name == "x2-squared")
    return SpaceTimeFixture(name, [](const Jet&, const Jet& x2, const Jet&) { return x2 * x2; }, false);
  if (name == "constant") return SpaceTimeFixture(name, [](const Jet&, const Jet&, const Jet&) { return Jet(1.0); }, false);
  throw ConfigError("unknown fixture '" + name + "'");
}

}  // namespace carleman
