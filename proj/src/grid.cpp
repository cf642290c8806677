#include "carleman/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace carleman {

const char* side_name(Side side) { return side == Side::GammaPlus ? "gamma-plus" : "gamma-minus"; }

double StripGrid::t(int k) const {
  if (window == TimeWindow::Forward) return k == nt / 2 ? T : k * dt();
  if (k == nt) return T;
  if (2 * k == nt) return 0.0;
  return -T + k * dt();
}

int StripGrid::zero_level() const {
  if (window == TimeWindow::Forward) return 0;
  if (nt % 2 != 0) throw PreconditionError("grid has no t = 0 level: nt must be even");
  return nt / 2;
}

StripGrid StripGrid::forward_half() const {
  if (nt % 2 != 0) throw PreconditionError("forward window needs an even number of time cells");
  StripGrid g = *this;
  g.window = TimeWindow::Forward;
  return g;
}

StripGrid StripGrid::full() const {
  StripGrid g = *this;
  g.window = TimeWindow::Full;
  return g;
}

bool StripGrid::same_space(const StripGrid& o) const {
  return L == o.L && d == o.d && n1 == o.n1 && n2 == o.n2;
}

std::string StripGrid::describe() const {
  std::ostringstream os;
  os << "L=" << L << " d=" << d << " T=" << T << " n1=" << n1 << " n2=" << n2 << " nt=" << nt
     << (window == TimeWindow::Full ? " [-T,T]" : " [0,T]");
  return os.str();
}

StripGrid build_grid(double L, double d, double T, int n1, int n2, int nt) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(L) || !positive(d) || !positive(T))
    throw ConfigError("grid: L, d and T must be positive and finite");
  if (n1 < 4 || n2 < 4 || nt < 4) throw ConfigError("grid: n1, n2 and nt must be at least 4");
  StripGrid g{L, d, T, n1, n2, nt, TimeWindow::Full};
  if (!(g.h1() > 0.0 && g.h2() > 0.0 && g.dt() > 0.0)) throw ConfigError("grid: degenerate spacing");
  return g;
}

void require_same_grid(const StripGrid& a, const StripGrid& b, const char* what) {
  if (!(a == b)) throw GridMismatchError(std::string(what) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
}

bool in_region(const StripGrid& g, Region region, int k, int i, int j) {
  if (region == Region::All) return true;
  return k > 0 && k < g.time_levels() - 1 && !g.on_spatial_boundary(i, j);
}

double trapezoid_weight(const StripGrid& g, int k, int i, int j) {
  double w = g.h1() * g.h2() * g.dt();
  if (i == 0 || i == g.n1) w *= 0.5;
  if (j == 0 || j == g.n2) w *= 0.5;
  if (k == 0 || k == g.time_levels() - 1) w *= 0.5;
  return w;
}

namespace {

template <class F>
double accumulate(const StripGrid& g, Region region, F&& integrand) {
  double total = 0.0;
  for (int k = 0; k < g.time_levels(); ++k) {
    double level = 0.0;
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        if (!in_region(g, region, k, i, j)) continue;
        level += trapezoid_weight(g, k, i, j) * integrand(g.index(k, i, j));
      }
    total += level;
  }
  return total;
}

}  // namespace

double integrate_space_time(const GridFunction& f, Region region) {
  const auto& v = f.values();
  return accumulate(f.grid(), region, [&](std::size_t n) { return std::norm(v[n]); });
}

double integrate_space_time(const GridFunction& f, const RealGridFunction& w, Region region) {
  require_same_grid(f.grid(), w.grid(), "integrate_space_time");
  const auto& v = f.values();
  const auto& wv = w.values();
  for (double x : wv)
    if (x < 0.0 || std::isnan(x)) throw PreconditionError("integrate_space_time: weight must be nonnegative");
  return accumulate(f.grid(), region, [&](std::size_t n) { return std::norm(v[n]) * wv[n]; });
}

double integrate_real(const RealGridFunction& f, Region region) {
  const auto& v = f.values();
  return accumulate(f.grid(), region, [&](std::size_t n) { return v[n]; });
}

double integrate_boundary(const BoundaryTrace& g, const RealTrace& w, bool drop_end_levels) {
  if (!(g.grid() == w.grid()) || g.side() != w.side())
    throw GridMismatchError("integrate_boundary: trace and weight live on different boundaries");
  for (double x : w.values())
    if (x < 0.0 || std::isnan(x)) throw PreconditionError("integrate_boundary: weight must be nonnegative");
  const StripGrid& grid = g.grid();
  const int levels = grid.time_levels();
  double total = 0.0;
  for (int k = 0; k < levels; ++k) {
    if (drop_end_levels && (k == 0 || k == levels - 1)) continue;
    double wk = grid.dt() * ((k == 0 || k == levels - 1) ? 0.5 : 1.0);
    for (int i = 0; i <= grid.n1; ++i) {
      double wi = grid.h1() * ((i == 0 || i == grid.n1) ? 0.5 : 1.0);
      total += wk * wi * std::norm(g(k, i)) * w(k, i);
    }
  }
  return total;
}

double integrate_boundary(const BoundaryTrace& g) {
  RealTrace ones(g.grid(), g.side(), 1.0);
  return integrate_boundary(g, ones);
}

double integrate_space_squared(const SpatialField& f, bool interior_only) {
  const StripGrid& g = f.grid;
  double total = 0.0;
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) {
      if (interior_only && g.on_spatial_boundary(i, j)) continue;
      double w = g.h1() * g.h2();
      if (i == 0 || i == g.n1) w *= 0.5;
      if (j == 0 || j == g.n2) w *= 0.5;
      total += w * f(i, j) * f(i, j);
    }
  return total;
}

void write_csv(std::ostream& out, const GridFunction& f) {
  const StripGrid& g = f.grid();
  out << "t,x1,x2,re,im\n";
  out << std::setprecision(17);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        cplx v = f(k, i, j);
        out << g.t(k) << ',' << g.x1(i) << ',' << g.x2(j) << ',' << v.real() << ',' << v.imag() << '\n';
      }
}

GridFunction read_csv(std::istream& in, const StripGrid& grid) {
  GridFunction f(grid);
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double t, x1, x2, re, im;
    if (!(is >> t >> x1 >> x2 >> re >> im)) throw ConfigError("csv line " + std::to_string(line_no) + ": expected t,x1,x2,re,im");
    if (row >= grid.size()) throw ConfigError("csv line " + std::to_string(line_no) + ": more rows than grid nodes");
    std::size_t k = row / grid.spatial_size();
    std::size_t rem = row % grid.spatial_size();
    int i = int(rem / std::size_t(grid.n2 + 1));
    int j = int(rem % std::size_t(grid.n2 + 1));
    double tol = 1e-9 * (1.0 + grid.L + grid.d + grid.T);
    if (std::abs(t - grid.t(int(k))) > tol || std::abs(x1 - grid.x1(i)) > tol || std::abs(x2 - grid.x2(j)) > tol)
      throw ConfigError("csv line " + std::to_string(line_no) + ": node coordinates do not match the grid");
    f.values()[row++] = cplx(re, im);
  }
  if (row != grid.size()) throw ConfigError("csv: expected " + std::to_string(grid.size()) + " rows, got " + std::to_string(row));
  return f;
}

double max_abs(const GridFunction& f, Region region) {
  const StripGrid& g = f.grid();
  double m = 0.0;
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j)
        if (in_region(g, region, k, i, j)) m = std::max(m, std::abs(f(k, i, j)));
  return m;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "difference");
  GridFunction r(a.grid());
  for (std::size_t n = 0; n < r.values().size(); ++n) r.values()[n] = a.values()[n] - b.values()[n];
  return r;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "sum");
  GridFunction r(a.grid());
  for (std::size_t n = 0; n < r.values().size(); ++n) r.values()[n] = a.values()[n] + b.values()[n];
  return r;
}

GridFunction operator*(cplx c, const GridFunction& a) {
  GridFunction r(a.grid());
  for (std::size_t n = 0; n < r.values().size(); ++n) r.values()[n] = c * a.values()[n];
  return r;
}

}  // namespace carleman
