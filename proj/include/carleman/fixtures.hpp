#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/jet.hpp"
#include "carleman/profiles.hpp"

namespace carleman {

// Complex space-time field q(x1, x2, t), either closed-form (jets available) or
// tabulated on a grid.
class SpaceTimeFixture {
 public:
  using Fn = std::function<Jet(const Jet& x1, const Jet& x2, const Jet& t)>;

  SpaceTimeFixture() = default;
  SpaceTimeFixture(std::string name, Fn fn, bool depends_on_x1);
  // Non-analytic fixture backed by grid samples; jet() raises FixtureNotAnalyticError.
  static SpaceTimeFixture tabulated(std::string name, GridFunction samples);

  const std::string& name() const { return name_; }
  bool analytic() const { return static_cast<bool>(fn_); }
  bool depends_on_x1() const { return depends_on_x1_; }

  Jet jet(double x1, double x2, double t) const;
  cplx value(double x1, double x2, double t) const;
  // Samples on every node of the grid.
  GridFunction sample(const StripGrid& grid) const;

  SpaceTimeFixture scaled(cplx factor) const;

 private:
  std::string name_;
  Fn fn_;
  bool depends_on_x1_ = false;
  std::shared_ptr<const GridFunction> table_;
};

// Catalog: shifted-phase (e^{-it} + x2^2 + 5), bump, static-bump, zero, phase (e^{-it}),
// x2-squared, constant. Unknown names raise ConfigError.
SpaceTimeFixture make_fixture(const std::string& name, const ProfileContext& ctx);
std::vector<std::string> fixture_names();

// exp(1 - 1/(1 - (u/tau)^2)): smooth, equal to 1 at u = 0 and vanishing
// identically for |u| >= tau.
Jet smooth_cutoff(const Jet& u, double tau);

}  // namespace carleman
