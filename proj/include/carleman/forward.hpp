#pragma once

#include <functional>
#include <vector>

#include "carleman/fixtures.hpp"
#include "carleman/grid.hpp"
#include "carleman/profiles.hpp"

namespace carleman {

// Dirichlet data F(x1, x2, t) on the four sides of the truncation box.
using DirichletData = std::function<cplx(double x1, double x2, double t)>;

// i d_t q + a Lap q + b q = 0 on the box, q = F on its boundary, q(., 0) = q0.
struct ForwardProblem {
  StripGrid grid;  // full grid; the solve covers its forward half [0, T]
  CoefficientField coeffs;
  std::vector<cplx> q0;  // one value per spatial node
  DirichletData boundary;
  // Replace F on the x1 truncation faces by the solution of the x1-independent
  // problem in x2 with the face coefficients (exact when nothing varies in x1
  // near the faces). F is still used on Gamma+ and Gamma-.
  bool reduced_x1_faces = false;
};

// Initial datum and boundary data read from a fixture.
ForwardProblem problem_from_fixture(const SpaceTimeFixture& fixture, CoefficientField coeffs, const StripGrid& grid);

// Initial slice and boundary values read from a tabulated field on the forward
// (or full) window of the same spatial grid.
ForwardProblem problem_from_table(const GridFunction& data, CoefficientField coeffs, const StripGrid& grid);

// Crank-Nicolson with the five-point Laplacian; one banded LU factorization
// reused for every step. Returns q on grid.forward_half().
GridFunction solve_forward(const ForwardProblem& problem);

// Crank-Nicolson for i q_t + a(x2) q'' + b(x2) q = 0 on [d, 2d] along the face
// x1 = x1(i), with q0 and the Gamma+/- values of F. Rows are time levels of the
// forward window, n2 + 1 values each.
std::vector<std::vector<cplx>> solve_face_problem(const ForwardProblem& problem, int i);

// q(x, -t) = conj(q(x, t)): maps a forward-window solution onto [-T, T].
// Requires a real initial slice (|Im| <= 1e-12).
GridFunction extend_symmetric(const GridFunction& forward);

// Restriction of a full-window field to [0, T].
GridFunction restrict_forward(const GridFunction& full);

// max over nodes of |i d_t q + a Lap q + b q| evaluated from closed forms.
double manufactured_residual(const SpaceTimeFixture& fixture, const CoefficientField& coeffs, const StripGrid& grid);

// Outward normal derivative on Gamma+ (d/dx2) or Gamma- (-d/dx2) by the
// three-point one-sided stencil.
BoundaryTrace normal_derivative_trace(const GridFunction& q, Side side);

// Second time derivative of a trace: centred inside, four-point one-sided at the ends.
BoundaryTrace second_time_derivative(const BoundaryTrace& trace);

// Absolute lower bound enforced on every divisor of the chains.
inline constexpr double kDivisorGuard = 1e-8;

struct QTildeReport {
  double min_abs_q = 0.0;            // |q~|
  double min_abs_dt_lap_over_q = 0.0;  // |d_t(Lap q~ / q~)|
  double min_abs_lap = 0.0;          // |Lap q~|
  double min_abs_dt_q_over_lap = 0.0;  // |d_t(q~ / Lap q~)|
  bool pass = false;
};

// Lower bounds that the division chains need; each must be >= 1e-8.
QTildeReport check_qtilde_assumptions(const SpaceTimeFixture& fixture, const StripGrid& grid);

}  // namespace carleman
