#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

using cplx = std::complex<double>;

// Which part of [-T, T] a grid samples. Forward grids start at t = 0 and keep the
// time step of the full grid.
enum class TimeWindow { Full, Forward };

// Horizontal boundaries of the strip: Gamma+ is {x2 = 2d}, Gamma- is {x2 = d}.
enum class Side { GammaPlus, GammaMinus };

const char* side_name(Side side);

// Vertex-centred grid over (-L, L) x (d, 2d) x (-T, T). Nodes include the
// boundary; x2 is the fastest index, then x1, then t.
struct StripGrid {
  double L = 0.0;
  double d = 0.0;
  double T = 0.0;
  int n1 = 0;
  int n2 = 0;
  int nt = 0;
  TimeWindow window = TimeWindow::Full;

  double h1() const { return 2.0 * L / n1; }
  double h2() const { return d / n2; }
  double dt() const { return 2.0 * T / nt; }

  double x1(int i) const { return i == n1 ? L : -L + i * h1(); }
  double x2(int j) const { return j == n2 ? 2.0 * d : d + j * h2(); }
  double t(int k) const;

  int time_levels() const { return window == TimeWindow::Full ? nt + 1 : nt / 2 + 1; }
  // Index of the level t = 0 (requires even nt on full grids).
  int zero_level() const;

  std::size_t spatial_size() const { return std::size_t(n1 + 1) * std::size_t(n2 + 1); }
  std::size_t size() const { return spatial_size() * std::size_t(time_levels()); }
  std::size_t spatial_index(int i, int j) const { return std::size_t(i) * std::size_t(n2 + 1) + std::size_t(j); }
  std::size_t index(int k, int i, int j) const { return std::size_t(k) * spatial_size() + spatial_index(i, j); }

  bool on_spatial_boundary(int i, int j) const { return i == 0 || i == n1 || j == 0 || j == n2; }
  // Node belongs to Gamma+ / Gamma- (the x2 faces; the x1 truncation faces are neither).
  bool on_side(int j, Side side) const { return side == Side::GammaPlus ? j == n2 : j == 0; }

  StripGrid forward_half() const;
  StripGrid full() const;

  // Same node coordinates in space (time window may differ).
  bool same_space(const StripGrid& other) const;
  bool operator==(const StripGrid& other) const = default;

  std::string describe() const;
};

// Validates the arguments and returns a full-window grid.
StripGrid build_grid(double L, double d, double T, int n1, int n2, int nt);

template <class T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(const StripGrid& grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}

  const StripGrid& grid() const { return grid_; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  T& operator()(int k, int i, int j) { return values_[grid_.index(k, i, j)]; }
  const T& operator()(int k, int i, int j) const { return values_[grid_.index(k, i, j)]; }

 private:
  StripGrid grid_;
  std::vector<T> values_;
};

// Complex field on the space-time grid: solutions, chain variables, residuals.
using GridFunction = Field<cplx>;
using RealGridFunction = Field<double>;

// Real field on the spatial cross-section (gaps, margins, reconstructions).
struct SpatialField {
  StripGrid grid;
  std::vector<double> values;

  SpatialField() = default;
  explicit SpatialField(const StripGrid& g, double fill = 0.0) : grid(g), values(g.spatial_size(), fill) {}
  double& operator()(int i, int j) { return values[grid.spatial_index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.spatial_index(i, j)]; }
};

// Values on one horizontal boundary over all time levels, indexed (t, x1).
template <class T>
class Trace {
 public:
  Trace() = default;
  Trace(const StripGrid& grid, Side side, T fill = T{})
      : grid_(grid), side_(side), values_(std::size_t(grid.time_levels()) * std::size_t(grid.n1 + 1), fill) {}

  const StripGrid& grid() const { return grid_; }
  Side side() const { return side_; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }
  T& operator()(int k, int i) { return values_[std::size_t(k) * std::size_t(grid_.n1 + 1) + std::size_t(i)]; }
  const T& operator()(int k, int i) const { return values_[std::size_t(k) * std::size_t(grid_.n1 + 1) + std::size_t(i)]; }

 private:
  StripGrid grid_;
  Side side_ = Side::GammaPlus;
  std::vector<T> values_;
};

using BoundaryTrace = Trace<cplx>;
using RealTrace = Trace<double>;

// Quadrature support. Interior drops the spatial boundary ring and the first and
// last time levels, which is where centred stencils are undefined.
enum class Region { All, Interior };

bool in_region(const StripGrid& grid, Region region, int k, int i, int j);

// Composite trapezoid weight of node (k, i, j).
double trapezoid_weight(const StripGrid& grid, int k, int i, int j);

// Trapezoid approximation of the integral of |f|^2 w over the space-time box.
double integrate_space_time(const GridFunction& f, Region region = Region::All);
double integrate_space_time(const GridFunction& f, const RealGridFunction& w, Region region = Region::All);
// Trapezoid approximation of the integral of a real field (no squaring).
double integrate_real(const RealGridFunction& f, Region region = Region::All);

// Trapezoid approximation of the integral of |g|^2 w over one boundary face and time.
double integrate_boundary(const BoundaryTrace& g, const RealTrace& w, bool drop_end_levels = false);
double integrate_boundary(const BoundaryTrace& g);

// Spatial trapezoid integral of f^2.
double integrate_space_squared(const SpatialField& f, bool interior_only = false);

// Snapshot export, one row per node: t, x1, x2, re, im.
void write_csv(std::ostream& out, const GridFunction& f);
GridFunction read_csv(std::istream& in, const StripGrid& grid);

// Pointwise helpers.
double max_abs(const GridFunction& f, Region region = Region::All);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator*(cplx c, const GridFunction& a);

void require_same_grid(const StripGrid& a, const StripGrid& b, const char* what);

}  // namespace carleman
