#include "carleman/forward.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "carleman/banded.hpp"

namespace carleman {

namespace {

void require_compatible(const ForwardProblem& p) {
  const StripGrid& g = p.grid;
  if (!g.same_space(p.coeffs.a.grid())) throw GridMismatchError("forward problem: coefficients sampled on another grid");
  if (p.q0.size() != g.spatial_size()) throw GridMismatchError("forward problem: q0 has the wrong size");
  if (!p.boundary) throw PreconditionError("forward problem: boundary data missing");
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) {
      if (!g.on_spatial_boundary(i, j)) continue;
      const cplx f = p.boundary(g.x1(i), g.x2(j), 0.0);
      const cplx q = p.q0[g.spatial_index(i, j)];
      if (std::abs(f - q) > 1e-10 * (1.0 + std::abs(q))) {
        std::ostringstream os;
        os << "forward problem: q0 and F disagree at boundary node (" << i << "," << j << ") at t = 0";
        throw PreconditionError(os.str());
      }
    }
}

}  // namespace

ForwardProblem problem_from_fixture(const SpaceTimeFixture& fixture, CoefficientField coeffs, const StripGrid& grid) {
  ForwardProblem p{grid.full(), std::move(coeffs), std::vector<cplx>(grid.spatial_size()), {}};
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) p.q0[grid.spatial_index(i, j)] = fixture.value(grid.x1(i), grid.x2(j), 0.0);
  p.boundary = [fixture](double x1, double x2, double t) { return fixture.value(x1, x2, t); };
  return p;
}

ForwardProblem problem_from_table(const GridFunction& data, CoefficientField coeffs, const StripGrid& grid) {
  if (!data.grid().same_space(grid)) throw GridMismatchError("problem_from_table: table sampled on another grid");
  const int k0 = data.grid().zero_level();
  ForwardProblem p{grid.full(), std::move(coeffs), std::vector<cplx>(grid.spatial_size()), {}};
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) p.q0[grid.spatial_index(i, j)] = data(k0, i, j);
  auto table = SpaceTimeFixture::tabulated("boundary-table", data);
  p.boundary = [table](double x1, double x2, double t) { return table.value(x1, x2, t); };
  return p;
}

std::vector<std::vector<cplx>> solve_face_problem(const ForwardProblem& p, int i) {
  const StripGrid g = p.grid.forward_half();
  const int m2 = g.n2 - 1;
  const double ih2 = 1.0 / (g.h2() * g.h2());
  const cplx c(0.0, 0.5 * g.dt());
  ComplexBandedLu lu(m2, 1, 1);
  for (int j = 1; j <= m2; ++j) {
    const double a = p.coeffs.a(i, j).v;
    lu.set(j - 1, j - 1, 1.0 - c * (-2.0 * a * ih2 + p.coeffs.b(i, j).v));
    if (j > 1) lu.set(j - 1, j - 2, -c * a * ih2);
    if (j < m2) lu.set(j - 1, j, -c * a * ih2);
  }
  lu.factorize();
  std::vector<std::vector<cplx>> q(std::size_t(g.time_levels()), std::vector<cplx>(std::size_t(g.n2 + 1)));
  for (int j = 0; j <= g.n2; ++j) q[0][std::size_t(j)] = p.q0[g.spatial_index(i, j)];
  std::vector<cplx> rhs(static_cast<std::size_t>(m2));
  for (int k = 0; k + 1 < g.time_levels(); ++k) {
    auto& cur = q[std::size_t(k)];
    auto& next = q[std::size_t(k + 1)];
    next[0] = p.boundary(g.x1(i), g.x2(0), g.t(k + 1));
    next[std::size_t(g.n2)] = p.boundary(g.x1(i), g.x2(g.n2), g.t(k + 1));
    for (int j = 1; j <= m2; ++j) {
      const double a = p.coeffs.a(i, j).v;
      const std::size_t J = std::size_t(j);
      cplx v = cur[J] + c * (a * (cur[J + 1] - 2.0 * cur[J] + cur[J - 1]) * ih2 + p.coeffs.b(i, j).v * cur[J]);
      if (j == 1) v += c * a * ih2 * next[0];
      if (j == m2) v += c * a * ih2 * next[std::size_t(g.n2)];
      rhs[J - 1] = v;
    }
    lu.solve(rhs);
    for (int j = 1; j <= m2; ++j) next[std::size_t(j)] = rhs[std::size_t(j - 1)];
  }
  return q;
}

GridFunction solve_forward(const ForwardProblem& p) {
  require_compatible(p);
  const StripGrid g = p.grid.forward_half();
  const int m1 = g.n1 - 1, m2 = g.n2 - 1;
  const int n = m1 * m2;
  const double ih1 = 1.0 / (g.h1() * g.h1());
  const double ih2 = 1.0 / (g.h2() * g.h2());
  const cplx c(0.0, 0.5 * g.dt());  // i dt / 2
  auto unknown = [m2](int i, int j) { return (i - 1) * m2 + (j - 1); };

  // (I - c L) q^{n+1} = (I + c L) q^n with L = a Lap_h + b
  ComplexBandedLu lu(n, m2, m2);
  for (int i = 1; i <= m1; ++i)
    for (int j = 1; j <= m2; ++j) {
      const double a = p.coeffs.a(i, j).v;
      const double b = p.coeffs.b(i, j).v;
      const int r = unknown(i, j);
      lu.set(r, r, 1.0 - c * (-2.0 * a * (ih1 + ih2) + b));
      if (i > 1) lu.set(r, unknown(i - 1, j), -c * a * ih1);
      if (i < m1) lu.set(r, unknown(i + 1, j), -c * a * ih1);
      if (j > 1) lu.set(r, unknown(i, j - 1), -c * a * ih2);
      if (j < m2) lu.set(r, unknown(i, j + 1), -c * a * ih2);
    }
  try {
    lu.factorize();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("solve_forward: step matrix at time level 1: ") + e.what());
  }

  GridFunction q(g);
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) q(0, i, j) = p.q0[g.spatial_index(i, j)];
  std::vector<std::vector<cplx>> face_lo, face_hi;
  if (p.reduced_x1_faces) {
    face_lo = solve_face_problem(p, 0);
    face_hi = solve_face_problem(p, g.n1);
  }

  std::vector<cplx> rhs(static_cast<std::size_t>(n));
  for (int k = 0; k + 1 < g.time_levels(); ++k) {
    const double t_next = g.t(k + 1);
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j)
        if (g.on_spatial_boundary(i, j)) q(k + 1, i, j) = p.boundary(g.x1(i), g.x2(j), t_next);
    if (p.reduced_x1_faces)
      for (int j = 1; j < g.n2; ++j) {
        q(k + 1, 0, j) = face_lo[std::size_t(k + 1)][std::size_t(j)];
        q(k + 1, g.n1, j) = face_hi[std::size_t(k + 1)][std::size_t(j)];
      }

    for (int i = 1; i <= m1; ++i)
      for (int j = 1; j <= m2; ++j) {
        const double a = p.coeffs.a(i, j).v;
        const double b = p.coeffs.b(i, j).v;
        const cplx lq = a * ((q(k, i + 1, j) - 2.0 * q(k, i, j) + q(k, i - 1, j)) * ih1 +
                             (q(k, i, j + 1) - 2.0 * q(k, i, j) + q(k, i, j - 1)) * ih2) +
                        b * q(k, i, j);
        cplx value = q(k, i, j) + c * lq;
        // known boundary neighbours at the new level move to the right-hand side
        if (i == 1) value += c * a * ih1 * q(k + 1, 0, j);
        if (i == m1) value += c * a * ih1 * q(k + 1, g.n1, j);
        if (j == 1) value += c * a * ih2 * q(k + 1, i, 0);
        if (j == m2) value += c * a * ih2 * q(k + 1, i, g.n2);
        rhs[std::size_t(unknown(i, j))] = value;
      }
    lu.solve(rhs);
    for (int i = 1; i <= m1; ++i)
      for (int j = 1; j <= m2; ++j) {
        const cplx v = rhs[std::size_t(unknown(i, j))];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw NumericalError("solve_forward: non-finite solution at time level " + std::to_string(k + 1));
        q(k + 1, i, j) = v;
      }
  }
  return q;
}

GridFunction extend_symmetric(const GridFunction& forward) {
  const StripGrid& g = forward.grid();
  if (g.window != TimeWindow::Forward) throw PreconditionError("extend_symmetric: expects a forward-window field");
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j)
      if (std::abs(forward(0, i, j).imag()) > 1e-12)
        throw PreconditionError("extend_symmetric: initial slice is not real");
  const StripGrid full = g.full();
  const int k0 = full.zero_level();
  GridFunction out(full);
  for (int m = 0; m < g.time_levels(); ++m)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        out(k0 + m, i, j) = forward(m, i, j);
        if (m > 0) out(k0 - m, i, j) = std::conj(forward(m, i, j));
      }
  return out;
}

GridFunction restrict_forward(const GridFunction& full) {
  const StripGrid& g = full.grid();
  if (g.window != TimeWindow::Full) throw PreconditionError("restrict_forward: expects a full-window field");
  const StripGrid half = g.forward_half();
  const int k0 = g.zero_level();
  GridFunction out(half);
  for (int m = 0; m < half.time_levels(); ++m)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) out(m, i, j) = full(k0 + m, i, j);
  return out;
}

double manufactured_residual(const SpaceTimeFixture& fixture, const CoefficientField& coeffs, const StripGrid& grid) {
  if (!fixture.analytic()) throw FixtureNotAnalyticError("manufactured_residual: fixture '" + fixture.name() + "' has no closed form");
  if (!grid.same_space(coeffs.a.grid())) throw GridMismatchError("manufactured_residual: coefficients on another grid");
  const cplx I(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < grid.time_levels(); ++k)
    for (int i = 0; i <= grid.n1; ++i)
      for (int j = 0; j <= grid.n2; ++j) {
        const Jet q = fixture.jet(grid.x1(i), grid.x2(j), grid.t(k));
        const cplx qt = q.derivative(1, 0, 0);
        const cplx lap = q.derivative(0, 2, 0) + q.derivative(0, 0, 2);
        const cplx r = I * qt + coeffs.a(i, j).v * lap + coeffs.b(i, j).v * q.value();
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

BoundaryTrace normal_derivative_trace(const GridFunction& q, Side side) {
  const StripGrid& g = q.grid();
  BoundaryTrace tr(g, side);
  const double h = g.h2();
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) {
      if (side == Side::GammaPlus) {
        const int N = g.n2;
        tr(k, i) = (3.0 * q(k, i, N) - 4.0 * q(k, i, N - 1) + q(k, i, N - 2)) / (2.0 * h);
      } else {
        tr(k, i) = (3.0 * q(k, i, 0) - 4.0 * q(k, i, 1) + q(k, i, 2)) / (2.0 * h);
      }
    }
  return tr;
}

BoundaryTrace second_time_derivative(const BoundaryTrace& trace) {
  const StripGrid& g = trace.grid();
  const int last = g.time_levels() - 1;
  if (last < 3) throw PreconditionError("second_time_derivative: need at least four time levels");
  const double h2 = g.dt() * g.dt();
  BoundaryTrace out(g, trace.side());
  for (int k = 0; k <= last; ++k)
    for (int i = 0; i <= g.n1; ++i) {
      if (k == 0)
        out(k, i) = (2.0 * trace(0, i) - 5.0 * trace(1, i) + 4.0 * trace(2, i) - trace(3, i)) / h2;
      else if (k == last)
        out(k, i) = (2.0 * trace(last, i) - 5.0 * trace(last - 1, i) + 4.0 * trace(last - 2, i) - trace(last - 3, i)) / h2;
      else
        out(k, i) = (trace(k + 1, i) - 2.0 * trace(k, i) + trace(k - 1, i)) / h2;
    }
  return out;
}

QTildeReport check_qtilde_assumptions(const SpaceTimeFixture& fixture, const StripGrid& grid) {
  if (!fixture.analytic())
    throw FixtureNotAnalyticError("check_qtilde_assumptions: fixture '" + fixture.name() + "' has no closed form");
  const double inf = std::numeric_limits<double>::infinity();
  QTildeReport r{inf, inf, inf, inf, false};
  for (int k = 0; k < grid.time_levels(); ++k)
    for (int i = 0; i <= grid.n1; ++i)
      for (int j = 0; j <= grid.n2; ++j) {
        const Jet q = fixture.jet(grid.x1(i), grid.x2(j), grid.t(k));
        const Jet lap = q.laplacian();
        const double aq = std::abs(q.value());
        const double al = std::abs(lap.value());
        r.min_abs_q = std::min(r.min_abs_q, aq);
        r.min_abs_lap = std::min(r.min_abs_lap, al);
        r.min_abs_dt_lap_over_q = aq < kDivisorGuard ? 0.0 : std::min(r.min_abs_dt_lap_over_q, std::abs((lap / q).dt().value()));
        r.min_abs_dt_q_over_lap = al < kDivisorGuard ? 0.0 : std::min(r.min_abs_dt_q_over_lap, std::abs((q / lap).dt().value()));
      }
  r.pass = r.min_abs_q >= kDivisorGuard && r.min_abs_dt_lap_over_q >= kDivisorGuard && r.min_abs_lap >= kDivisorGuard &&
           r.min_abs_dt_q_over_lap >= kDivisorGuard;
  return r;
}

}  // namespace carleman
