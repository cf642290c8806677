#include "carleman/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "carleman/stencils.hpp"

namespace carleman {

namespace {

const cplx kI(0.0, 1.0);

using Vec = ChainCoefficients::Vec;

cplx dot(const Vec& b, const std::array<cplx, 2>& g) { return b[0] * g[0] + b[1] * g[1]; }

void guard(cplx v, const char* what, double x1, double x2, double t) {
  if (std::abs(v) >= kDivisorGuard) return;
  std::ostringstream os;
  os << "divisor guard: |" << what << "| = " << std::abs(v) << " < " << kDivisorGuard << " at (x1, x2, t) = (" << x1
     << ", " << x2 << ", " << t << ")";
  throw DivisorGuardError(os.str());
}

ChainCoefficients coefficients_at(ChainKind kind, const SpaceTimeFixture& fixture, double a, double x1, double x2,
                                  double t) {
  const Jet q = fixture.jet(x1, x2, t);
  const Jet lap = q.laplacian();
  const Jet& p = kind == ChainKind::U ? q : lap;
  const Jet& r = kind == ChainKind::U ? lap : q;
  guard(p.value(), kind == ChainKind::U ? "q~" : "Lap q~", x1, x2, t);

  const Jet A11 = (kI * p.dt() + a * p.laplacian()) / p;
  const Jet B11[2] = {2.0 * a * p.dx1() / p, 2.0 * a * p.dx2() / p};
  const Jet g = (r / p).dt();
  guard(g.value(), kind == ChainKind::U ? "d_t(Lap q~ / q~)" : "d_t(q~ / Lap q~)", x1, x2, t);
  const Jet gt = g.dt();
  const Jet A12 = A11.dt();
  const Jet B12[2] = {B11[0].dt(), B11[1].dt()};

  const Jet A13 = A12 / g;
  const Jet A23 = A11 / g;
  const Jet A33 = (kI * gt + a * g.laplacian()) / g;
  const Jet B13[2] = {B12[0] / g, B12[1] / g};
  const Jet B23[2] = {B11[0] / g, B11[1] / g};
  const Jet B33[2] = {2.0 * a * g.dx1() / g, 2.0 * a * g.dx2() / g};

  ChainCoefficients c;
  c.p = p.value();
  c.g = g.value();
  c.gt = gt.value();
  c.A11 = A11.value();
  c.A12 = A12.value();
  c.A13 = A13.value();
  c.A23 = A23.value();
  c.A33 = A33.value();
  c.A14 = A13.dt().value();
  c.A24 = (A23.dt() + A13).value();
  c.A34 = (A33.dt() + A23 * gt + B23[0] * gt.dx1() + B23[1] * gt.dx2()).value();
  c.A44 = (A23 * g + A33 + B23[0] * g.dx1() + B23[1] * g.dx2()).value();
  for (int n = 0; n < 2; ++n) {
    c.B11[n] = B11[n].value();
    c.B12[n] = B12[n].value();
    c.B13[n] = B13[n].value();
    c.B23[n] = B23[n].value();
    c.B33[n] = B33[n].value();
    c.B14[n] = B13[n].dt().value();
    c.B24[n] = (B23[n].dt() + B13[n]).value();
    c.B34[n] = (B33[n].dt() + gt * B23[n]).value();
    c.B44[n] = (B33[n] + g * B23[n]).value();
  }
  return c;
}

bool a_depends_on_x1(const CoefficientField& coeffs) {
  const StripGrid& g = coeffs.a.grid();
  for (int j = 0; j <= g.n2; ++j)
    for (int i = 1; i <= g.n1; ++i)
      if (coeffs.a(i, j).v != coeffs.a(0, j).v) return true;
  return false;
}

template <class F>
double interior_integral(const StripGrid& g, F&& f) {
  double sum = 0.0;
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) sum += trapezoid_weight(g, k, i, j) * f(k, i, j);
  return sum;
}

}  // namespace

TwinExperiment planted_twin(const StripGrid& grid, const SpaceTimeFixture& q_tilde, const Profile& a_tilde,
                            const Profile& b_tilde, const Profile& alpha, const Profile& gamma) {
  return TwinExperiment{grid.full(), q_tilde, a_tilde - alpha, b_tilde - gamma, a_tilde, b_tilde};
}

TwinRun run_twin(const TwinExperiment& exp, bool parallel) {
  TwinRun run;
  run.base = build_coefficients(exp.a, exp.b, exp.grid);
  run.tilde = build_coefficients(exp.a_tilde, exp.b_tilde, exp.grid);
  ForwardProblem base = problem_from_fixture(exp.q_tilde, run.base, exp.grid);
  base.reduced_x1_faces = true;
  ForwardProblem tilde = problem_from_fixture(exp.q_tilde, run.tilde, exp.grid);
  tilde.reduced_x1_faces = true;
  if (parallel) {
    auto fut = std::async(std::launch::async, [&] { return extend_symmetric(solve_forward(base)); });
    run.q_tilde = extend_symmetric(solve_forward(tilde));
    run.q = fut.get();
  } else {
    run.q = extend_symmetric(solve_forward(base));
    run.q_tilde = extend_symmetric(solve_forward(tilde));
  }
  run.u = run.q - run.q_tilde;
  return run;
}

ChainBundle build_chain(ChainKind kind, const GridFunction& u_in, const SpaceTimeFixture& q_tilde,
                        const CoefficientField& coeffs, bool smooth) {
  if (!q_tilde.analytic()) throw FixtureNotAnalyticError("build_chain: q~ '" + q_tilde.name() + "' has no closed form");
  const StripGrid& g = u_in.grid();
  if (!g.same_space(coeffs.a.grid())) throw GridMismatchError("build_chain: coefficients sampled on another grid");
  if (g.time_levels() < 5) throw PreconditionError("build_chain: need at least five time levels");

  ChainBundle b;
  b.kind = kind;
  b.u = smooth ? moving_average_in_time(u_in) : u_in;
  b.per_node_ = q_tilde.depends_on_x1() || a_depends_on_x1(coeffs);
  b.stride_i_ = std::size_t(g.n2 + 1);
  b.stride_k_ = b.per_node_ ? g.spatial_size() : b.stride_i_;
  b.table_.resize(std::size_t(g.time_levels()) * b.stride_k_);
  const int n1_keys = b.per_node_ ? g.n1 : 0;
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= n1_keys; ++i)
      for (int j = 0; j <= g.n2; ++j)
        b.table_[std::size_t(k) * b.stride_k_ + std::size_t(i) * b.stride_i_ + std::size_t(j)] =
            coefficients_at(kind, q_tilde, coeffs.a(i, j).v, g.x1(i), g.x2(j), g.t(k));

  b.w1 = GridFunction(g);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) b.w1(k, i, j) = b.u(k, i, j) / b.coefficients(k, i, j).p;
  b.w2 = time_derivative(b.w1);
  b.w3 = GridFunction(g);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) b.w3(k, i, j) = b.w2(k, i, j) / b.coefficients(k, i, j).g;
  b.w4 = time_derivative(b.w3);
  return b;
}

GridFunction chain_gap_pointwise(const ChainBundle& b, const CoefficientField& coeffs) {
  const StripGrid& g = b.w3.grid();
  GridFunction r(g);
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) {
        const ChainCoefficients& c = b.coefficients(k, i, j);
        const double a = coeffs.a(i, j).v, bb = coeffs.b(i, j).v;
        r(k, i, j) = kI * dt_at(b.w3, k, i, j) + a * laplacian_at(b.w3, k, i, j) + bb * b.w3(k, i, j) +
                     c.A13 * b.w1(k, i, j) + c.A23 * b.w2(k, i, j) + c.A33 * b.w3(k, i, j) +
                     dot(c.B13, grad_at(b.w1, k, i, j)) + dot(c.B23, grad_at(b.w2, k, i, j)) +
                     dot(c.B33, grad_at(b.w3, k, i, j));
      }
  return r;
}

GridFunction chain_w4_residual(const ChainBundle& b, const CoefficientField& coeffs) {
  const StripGrid& g = b.w4.grid();
  GridFunction r(g);
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) {
        const ChainCoefficients& c = b.coefficients(k, i, j);
        const double a = coeffs.a(i, j).v, bb = coeffs.b(i, j).v;
        r(k, i, j) = kI * dt_at(b.w4, k, i, j) + a * laplacian_at(b.w4, k, i, j) + bb * b.w4(k, i, j) +
                     c.A14 * b.w1(k, i, j) + c.A24 * b.w2(k, i, j) + c.A34 * b.w3(k, i, j) + c.A44 * b.w4(k, i, j) +
                     dot(c.B14, grad_at(b.w1, k, i, j)) + dot(c.B24, grad_at(b.w2, k, i, j)) +
                     dot(c.B34, grad_at(b.w3, k, i, j)) + dot(c.B44, grad_at(b.w4, k, i, j));
      }
  return r;
}

Reconstruction reconstruct(const ChainBundle& b, const CoefficientField& coeffs) {
  const GridFunction gap = chain_gap_pointwise(b, coeffs);
  const StripGrid& g = gap.grid();
  Reconstruction rec{SpatialField(g), SpatialField(g), 0.0, 0.0};
  int levels = 0;
  for (int k = 1; k + 1 < g.time_levels(); ++k) {
    if (std::abs(g.t(k)) > 0.5 * g.T + 1e-12 * g.T) continue;
    ++levels;
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) {
        rec.value(i, j) += gap(k, i, j).real();
        rec.imag(i, j) += gap(k, i, j).imag();
      }
  }
  if (levels == 0) throw PreconditionError("reconstruct: no time level with |t| <= T/2");
  for (int i = 1; i < g.n1; ++i)
    for (int j = 1; j < g.n2; ++j) {
      rec.value(i, j) /= levels;
      rec.imag(i, j) /= levels;
      rec.max_abs_value = std::max(rec.max_abs_value, std::abs(rec.value(i, j)));
      rec.max_abs_imag = std::max(rec.max_abs_imag, std::abs(rec.imag(i, j)));
    }
  return rec;
}

NoiseFloor solver_noise_floor(const TwinRun& run, const SpaceTimeFixture& q_tilde, bool smooth) {
  const GridFunction err = run.q_tilde - q_tilde.sample(run.q_tilde.grid());
  NoiseFloor f;
  f.alpha = reconstruct_alpha(build_u_chain(err, q_tilde, run.tilde, smooth), run.tilde).max_abs_value;
  f.gamma = reconstruct_gamma(build_v_chain(err, q_tilde, run.tilde, smooth), run.tilde).max_abs_value;
  return f;
}

SpatialField sample_interior(const Profile& p, const StripGrid& grid) {
  SpatialField f(grid);
  for (int i = 1; i < grid.n1; ++i)
    for (int j = 1; j < grid.n2; ++j) f(i, j) = p.value(grid.x1(i), grid.x2(j));
  return f;
}

double relative_l2_error(const SpatialField& est, const SpatialField& truth) {
  if (!est.grid.same_space(truth.grid)) throw GridMismatchError("relative_l2_error: fields on different grids");
  SpatialField diff(truth.grid);
  for (std::size_t n = 0; n < diff.values.size(); ++n) diff.values[n] = est.values[n] - truth.values[n];
  const double num = std::sqrt(integrate_space_squared(diff, true));
  const double den = std::sqrt(integrate_space_squared(truth, true));
  return den > 0.0 ? num / den : num;
}

double StabilitySides::ratio() const {
  const double r = rhs();
  if (r > 0.0) return lhs / r;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

BoundaryTrace observation_trace(const GridFunction& u, Side side) {
  return second_time_derivative(normal_derivative_trace(u, side));
}

StabilitySides stability_sides(const GridFunction& u, const SpatialField& alpha, const SpatialField& gamma,
                               const CarlemanWeights& w, Side side, const BoundaryTrace* observation) {
  const StripGrid& g = u.grid();
  if (!(g == w.grid())) throw GridMismatchError("stability_sides: weights built on another grid");
  if (g.window != TimeWindow::Full) throw PreconditionError("stability_sides: u must cover [-T, T]");
  if (!alpha.grid.same_space(g) || !gamma.grid.same_space(g))
    throw GridMismatchError("stability_sides: gaps sampled on another grid");
  StabilitySides out;
  out.s = w.s();
  out.lambda = w.lambda();

  out.lhs = interior_integral(g, [&](int k, int i, int j) {
    return w.scaled_weight(k, i, j) * (alpha(i, j) * alpha(i, j) + gamma(i, j) * gamma(i, j));
  });

  // t = 0 data of u, one value per spatial node.
  const int k0 = g.zero_level();
  SpatialField initial(g);
  GridFunction ut(g);
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) ut(k0, i, j) = dt_at(u, k0, i, j);
  for (int i = 1; i < g.n1; ++i)
    for (int j = 1; j < g.n2; ++j) {
      const auto gu = grad_at(u, k0, i, j);
      const auto gut = grad_at(ut, k0, i, j);
      initial(i, j) = std::norm(u(k0, i, j)) + std::norm(ut(k0, i, j)) + std::norm(dtt_at(u, k0, i, j)) +
                      std::norm(gu[0]) + std::norm(gu[1]) + std::norm(gut[0]) + std::norm(gut[1]) +
                      std::norm(laplacian_at(ut, k0, i, j));
    }
  out.rhs_initial =
      w.lambda() * interior_integral(g, [&](int k, int i, int j) { return w.scaled_weight(k, i, j) * initial(i, j); });

  const BoundaryTrace obs = observation ? *observation : observation_trace(u, side);
  if (!(obs.grid() == g) || obs.side() != side) throw GridMismatchError("stability_sides: observation on another boundary");
  const int jb = side == Side::GammaPlus ? g.n2 : 0;
  RealTrace weight(g, side);
  out.min_dnu_beta = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= g.n1; ++i) out.min_dnu_beta = std::min(out.min_dnu_beta, w.normal_derivative_beta(i, side));
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) {
      const double sw = w.scaled_weight(k, i, jb);
      weight(k, i) = sw == 0.0 ? 0.0 : w.phi(k, i, jb) * sw * std::abs(w.normal_derivative_beta(i, side));
    }
  out.rhs_boundary = w.s() * w.lambda() * w.lambda() * integrate_boundary(obs, weight, true);
  return out;
}

BoundaryTrace add_observation_noise(const BoundaryTrace& trace, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw PreconditionError("add_observation_noise: level must be nonnegative");
  BoundaryTrace out = trace;
  if (level == 0.0 || trace.values().empty()) return out;
  double ms = 0.0;
  for (const cplx& v : trace.values()) ms += std::norm(v);
  const double rms = std::sqrt(ms / double(trace.values().size()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, level * rms / std::sqrt(2.0));
  for (cplx& v : out.values()) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cplx(re, im);
  }
  return out;
}

}  // namespace carleman
