#pragma once

#include <array>

#include "carleman/grid.hpp"

namespace carleman {

// Second-order finite differences on a GridFunction. Spatial stencils are
// centred and only valid off the spatial boundary; the time derivative is
// centred inside and one-sided (three points) at the first and last level.

inline cplx dt_at(const GridFunction& f, int k, int i, int j) {
  const StripGrid& g = f.grid();
  const int last = g.time_levels() - 1;
  const double h = g.dt();
  if (k == 0) return (-3.0 * f(0, i, j) + 4.0 * f(1, i, j) - f(2, i, j)) / (2.0 * h);
  if (k == last) return (3.0 * f(last, i, j) - 4.0 * f(last - 1, i, j) + f(last - 2, i, j)) / (2.0 * h);
  return (f(k + 1, i, j) - f(k - 1, i, j)) / (2.0 * h);
}

inline cplx dtt_at(const GridFunction& f, int k, int i, int j) {
  const StripGrid& g = f.grid();
  const int last = g.time_levels() - 1;
  const double h2 = g.dt() * g.dt();
  if (k == 0) return (2.0 * f(0, i, j) - 5.0 * f(1, i, j) + 4.0 * f(2, i, j) - f(3, i, j)) / h2;
  if (k == last)
    return (2.0 * f(last, i, j) - 5.0 * f(last - 1, i, j) + 4.0 * f(last - 2, i, j) - f(last - 3, i, j)) / h2;
  return (f(k + 1, i, j) - 2.0 * f(k, i, j) + f(k - 1, i, j)) / h2;
}

inline cplx d1_at(const GridFunction& f, int k, int i, int j) {
  return (f(k, i + 1, j) - f(k, i - 1, j)) / (2.0 * f.grid().h1());
}

inline cplx d2_at(const GridFunction& f, int k, int i, int j) {
  return (f(k, i, j + 1) - f(k, i, j - 1)) / (2.0 * f.grid().h2());
}

inline std::array<cplx, 2> grad_at(const GridFunction& f, int k, int i, int j) {
  return {d1_at(f, k, i, j), d2_at(f, k, i, j)};
}

inline cplx laplacian_at(const GridFunction& f, int k, int i, int j) {
  const StripGrid& g = f.grid();
  const cplx c = f(k, i, j);
  return (f(k, i + 1, j) - 2.0 * c + f(k, i - 1, j)) / (g.h1() * g.h1()) +
         (f(k, i, j + 1) - 2.0 * c + f(k, i, j - 1)) / (g.h2() * g.h2());
}

// Time derivative at every node.
GridFunction time_derivative(const GridFunction& f);

// Three-point moving average in time (end levels left unchanged).
GridFunction moving_average_in_time(const GridFunction& f);

}  // namespace carleman
