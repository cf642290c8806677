#include "carleman/auditor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carleman/forward.hpp"
#include "carleman/stencils.hpp"

namespace carleman {

namespace {

const cplx kI(0.0, 1.0);
constexpr double kNegligible = 1e-14;

// Trapezoid sum of f(k, i, j) over the interior nodes.
template <class F>
double interior_integral(const StripGrid& g, F&& f) {
  double sum = 0.0;
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) sum += trapezoid_weight(g, k, i, j) * f(k, i, j);
  return sum;
}

void require_weights_grid(const GridFunction& f, const CarlemanWeights& w, const char* what) {
  if (!(f.grid() == w.grid())) throw GridMismatchError(std::string(what) + ": weights built on another grid");
}

void require_coeffs_grid(const GridFunction& f, const CoefficientField& c, const char* what) {
  if (!f.grid().same_space(c.a.grid())) throw GridMismatchError(std::string(what) + ": coefficients sampled on another grid");
}

template <class F>
GridFunction interior_map(const StripGrid& g, F&& f) {
  GridFunction r(g);
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) r(k, i, j) = f(k, i, j);
  return r;
}

}  // namespace

GridFunction apply_H(const GridFunction& q, const CoefficientField& coeffs) {
  require_coeffs_grid(q, coeffs, "apply_H");
  return interior_map(q.grid(), [&](int k, int i, int j) {
    return kI * dt_at(q, k, i, j) + coeffs.a(i, j).v * laplacian_at(q, k, i, j) + coeffs.b(i, j).v * q(k, i, j);
  });
}

GridFunction apply_evolution(const GridFunction& q, const CoefficientField& coeffs) {
  require_coeffs_grid(q, coeffs, "apply_evolution");
  return interior_map(q.grid(), [&](int k, int i, int j) {
    return kI * dt_at(q, k, i, j) + coeffs.a(i, j).v * laplacian_at(q, k, i, j);
  });
}

GridFunction apply_M1(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w) {
  require_coeffs_grid(psi, coeffs, "apply_M1");
  require_weights_grid(psi, w, "apply_M1");
  const double s = w.s();
  return interior_map(psi.grid(), [&](int k, int i, int j) {
    const SpatialDerivs& a = coeffs.a(i, j);
    const auto ge = w.grad_eta(k, i, j);
    const double grad2 = ge[0] * ge[0] + ge[1] * ge[1];
    const double ga = ge[0] * a.d1 + ge[1] * a.d2;
    const cplx p = psi(k, i, j);
    return kI * dt_at(psi, k, i, j) + a.v * laplacian_at(psi, k, i, j) + s * s * a.v * grad2 * p +
           (coeffs.b(i, j).v - s * ga) * p;
  });
}

GridFunction apply_M2(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w) {
  require_coeffs_grid(psi, coeffs, "apply_M2");
  require_weights_grid(psi, w, "apply_M2");
  const double s = w.s();
  return interior_map(psi.grid(), [&](int k, int i, int j) {
    const SpatialDerivs& a = coeffs.a(i, j);
    const auto ge = w.grad_eta(k, i, j);
    const auto gp = grad_at(psi, k, i, j);
    // div(a grad eta) = grad a . grad eta + a Lap eta
    const double div = a.d1 * ge[0] + a.d2 * ge[1] + a.v * w.laplacian_eta(k, i, j);
    return kI * s * w.dt_eta(k, i, j) * psi(k, i, j) + 2.0 * a.v * s * (ge[0] * gp[0] + ge[1] * gp[1]) +
           s * div * psi(k, i, j);
  });
}

double conjugation_residual(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w) {
  require_coeffs_grid(psi, coeffs, "conjugation_residual");
  require_weights_grid(psi, w, "conjugation_residual");
  const StripGrid& g = psi.grid();
  // e^{s(eta - eta_min)} psi; the constant factor e^{s eta_min} cancels against
  // the matching damping below since H is linear.
  GridFunction lifted(g);
  std::vector<char> live(g.size(), 0);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        const cplx p = psi(k, i, j);
        if (std::abs(p) < kNegligible) continue;
        lifted(k, i, j) = w.scaled_growth(k, i, j) * p;
        live[g.index(k, i, j)] = 1;
      }
  const GridFunction m1 = apply_M1(psi, coeffs, w);
  const GridFunction m2 = apply_M2(psi, coeffs, w);
  const GridFunction h = apply_H(lifted, coeffs);
  double worst = 0.0;
  for (int k = 1; k + 1 < g.time_levels(); ++k)
    for (int i = 1; i < g.n1; ++i)
      for (int j = 1; j < g.n2; ++j) {
        if (!live[g.index(k, i, j)]) continue;
        const cplx r = m1(k, i, j) + m2(k, i, j) - h(k, i, j) / w.scaled_growth(k, i, j);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

double CarlemanSides::ratio() const {
  const double l = lhs(), r = rhs();
  if (r > 0.0) return l / r;
  return l > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

CarlemanSides carleman_sides(const GridFunction& q, const CoefficientField& coeffs, const CarlemanWeights& w,
                             EstimateVariant variant, Side side) {
  require_coeffs_grid(q, coeffs, "carleman_sides");
  require_weights_grid(q, w, "carleman_sides");
  const StripGrid& g = q.grid();
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j)
        if (g.on_spatial_boundary(i, j) && std::abs(q(k, i, j)) > 1e-12) {
          std::ostringstream os;
          os << "carleman_sides: q does not vanish on the boundary at node (" << k << "," << i << "," << j << ")";
          throw PreconditionError(os.str());
        }

  const double s = w.s(), lambda = w.lambda();
  CarlemanSides out;
  out.s = s;
  out.lambda = lambda;
  out.variant = variant;
  out.side = side;

  GridFunction psi(g);
  for (std::size_t n = 0; n < g.size(); ++n) psi.values()[n] = q.values()[n];
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) psi(k, i, j) *= w.scaled_damping(k, i, j);

  out.lhs_q = std::pow(s, 3) * std::pow(lambda, 4) *
              interior_integral(g, [&](int k, int i, int j) { return w.scaled_weight(k, i, j) * std::norm(q(k, i, j)); });
  out.lhs_grad = s * lambda * interior_integral(g, [&](int k, int i, int j) {
                   const auto gq = grad_at(q, k, i, j);
                   return w.scaled_weight(k, i, j) * (std::norm(gq[0]) + std::norm(gq[1]));
                 });
  const GridFunction m1 = apply_M1(psi, coeffs, w);
  const GridFunction m2 = apply_M2(psi, coeffs, w);
  out.lhs_M1 = interior_integral(g, [&](int k, int i, int j) { return std::norm(m1(k, i, j)); });
  out.lhs_M2 = interior_integral(g, [&](int k, int i, int j) { return std::norm(m2(k, i, j)); });
  if (variant == EstimateVariant::WithEvolution) {
    const GridFunction ev = apply_evolution(q, coeffs);
    out.lhs_evol = interior_integral(g, [&](int k, int i, int j) { return w.scaled_weight(k, i, j) * std::norm(ev(k, i, j)); }) /
                   (s * lambda);
  }
  const GridFunction hq = apply_H(q, coeffs);
  out.rhs_source = interior_integral(g, [&](int k, int i, int j) { return w.scaled_weight(k, i, j) * std::norm(hq(k, i, j)); });

  // The boundary integrand uses |d_nu beta| so the term stays a nonnegative
  // measure whichever face is observed; the signed minimum is reported.
  const int jb = side == Side::GammaPlus ? g.n2 : 0;
  BoundaryTrace dq = normal_derivative_trace(q, side);
  RealTrace weight(g, side);
  out.min_dnu_beta = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= g.n1; ++i) out.min_dnu_beta = std::min(out.min_dnu_beta, w.normal_derivative_beta(i, side));
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) weight(k, i) = w.scaled_weight(k, i, jb) * std::abs(w.normal_derivative_beta(i, side));
  out.rhs_boundary = s * lambda * integrate_boundary(dq, weight, true);
  return out;
}

double LemmaReport::kappa_max() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.kappa_hat);
  return m;
}

double LemmaReport::kappa_spread() const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.kappa_hat);
    hi = std::max(hi, r.kappa_hat);
  }
  if (hi == 0.0) return 1.0;
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

std::vector<double> LemmaReport::decay_factors() const {
  std::vector<double> f;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const double prev = rows[n - 1].rhs > 0.0 ? rows[n - 1].lhs / rows[n - 1].rhs : 0.0;
    const double cur = rows[n].rhs > 0.0 ? rows[n].lhs / rows[n].rhs : 0.0;
    f.push_back(prev > 0.0 ? cur / prev : 0.0);
  }
  return f;
}

GridFunction time_antiderivative(const GridFunction& q) {
  const StripGrid& g = q.grid();
  const int k0 = g.window == TimeWindow::Full ? g.zero_level() : 0;
  const double h = g.dt();
  GridFunction r(g);
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) {
      for (int k = k0 + 1; k < g.time_levels(); ++k) r(k, i, j) = r(k - 1, i, j) + 0.5 * h * (q(k - 1, i, j) + q(k, i, j));
      for (int k = k0 - 1; k >= 0; --k) r(k, i, j) = r(k + 1, i, j) - 0.5 * h * (q(k + 1, i, j) + q(k, i, j));
    }
  return r;
}

LemmaReport lemma_audit(const GridFunction& q, const WeightSpec& spec, const std::vector<double>& s_values) {
  const StripGrid& g = q.grid();
  const GridFunction Q = time_antiderivative(q);
  LemmaReport report;
  for (double s : s_values) {
    WeightSpec ws = spec;
    ws.s = s;
    const CarlemanWeights w = build_weights(ws, g);
    LemmaRow row;
    row.s = s;
    for (int k = 0; k < g.time_levels(); ++k)
      for (int i = 0; i <= g.n1; ++i)
        for (int j = 0; j <= g.n2; ++j) {
          const double c = trapezoid_weight(g, k, i, j) * w.scaled_weight(k, i, j);
          if (c == 0.0) continue;
          row.lhs += c * std::norm(Q(k, i, j));
          row.rhs += c * std::norm(q(k, i, j));
        }
    row.kappa_hat = row.rhs > 0.0 ? s * row.lhs / row.rhs : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace carleman
