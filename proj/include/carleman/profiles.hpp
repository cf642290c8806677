#pragma once

#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/jet.hpp"

namespace carleman {

// Geometry a named profile may depend on (bump widths scale with L and d).
struct ProfileContext {
  double d = 1.0;
  double L = 1.0;
  double T = 1.0;
};

// Real closed-form function of x = (x1, x2). Evaluating on jets yields all
// spatial derivatives up to third order exactly.
class Profile {
 public:
  using Fn = std::function<Jet(const Jet& x1, const Jet& x2)>;

  Profile() = default;
  Profile(std::string name, Fn fn, bool depends_on_x1);

  const std::string& name() const { return name_; }
  bool depends_on_x1() const { return depends_on_x1_; }
  bool empty() const { return !fn_; }

  Jet jet(double x1, double x2) const;
  double value(double x1, double x2) const;

  Profile scaled(double factor) const;
  friend Profile operator+(const Profile& a, const Profile& b);
  friend Profile operator-(const Profile& a, const Profile& b);

 private:
  std::string name_;
  Fn fn_;
  bool depends_on_x1_ = false;
};

// Catalog: quadratic, exp-decreasing, exp-increasing, linear, constant, zero,
// sin-bump, cos-bump, x1-bump. Unknown names raise ConfigError.
Profile make_profile(const std::string& name, const ProfileContext& ctx);
std::vector<std::string> profile_names();

// x2-only profile read from CSV rows "x2, value, d/dx2, d2/dx2^2"; linear
// interpolation of each column.
Profile tabulated_profile(std::istream& in, const std::string& name);

// Value and spatial derivatives up to order three at one node.
struct SpatialDerivs {
  double v = 0.0;
  double d1 = 0.0, d2 = 0.0;
  double d11 = 0.0, d12 = 0.0, d22 = 0.0;
  double d111 = 0.0, d112 = 0.0, d122 = 0.0, d222 = 0.0;

  double laplacian() const { return d11 + d22; }
};

SpatialDerivs spatial_derivs(const Jet& j);

// A profile sampled on the spatial nodes of a grid, with derivative tables.
class SampledField {
 public:
  SampledField() = default;
  SampledField(const Profile& profile, const StripGrid& grid);

  const StripGrid& grid() const { return grid_; }
  const std::string& name() const { return name_; }
  bool depends_on_x1() const { return depends_on_x1_; }
  const SpatialDerivs& operator()(int i, int j) const { return nodes_[grid_.spatial_index(i, j)]; }
  SpatialField values() const;
  double min_value() const;
  double max_abs_value() const;

 private:
  StripGrid grid_;
  std::string name_;
  bool depends_on_x1_ = false;
  std::vector<SpatialDerivs> nodes_;
};

// Real coefficients a >= a_min > 0 and b of the Schrodinger operator.
struct CoefficientField {
  SampledField a;
  SampledField b;
  double a_min = 0.0;
};

// Samples both profiles; rejects a <= 0 or non-finite derivative tables.
CoefficientField build_coefficients(const Profile& a, const Profile& b, const StripGrid& grid);

}  // namespace carleman
