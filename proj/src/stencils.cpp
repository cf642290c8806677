#include "carleman/stencils.hpp"

namespace carleman {

GridFunction time_derivative(const GridFunction& f) {
  const StripGrid& g = f.grid();
  if (g.time_levels() < 4) throw PreconditionError("time_derivative: need at least four time levels");
  GridFunction r(g);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) r(k, i, j) = dt_at(f, k, i, j);
  return r;
}

GridFunction moving_average_in_time(const GridFunction& f) {
  const StripGrid& g = f.grid();
  GridFunction r = f;
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) r(k, i, j) = (f(k - 1, i, j) + f(k, i, j) + f(k + 1, i, j)) / 3.0;
  return r;
}

}  // namespace carleman
