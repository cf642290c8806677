#include "carleman/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace carleman {

double CarlemanWeights::eta(int k, int i, int j) const {
  if (endpoint(k)) return std::numeric_limits<double>::infinity();
  return alpha_[grid_.spatial_index(i, j)] * theta_[std::size_t(k)];
}

double CarlemanWeights::phi(int k, int i, int j) const {
  if (endpoint(k)) return std::numeric_limits<double>::infinity();
  return exp_beta_[grid_.spatial_index(i, j)] * theta_[std::size_t(k)];
}

double CarlemanWeights::dt_eta(int k, int i, int j) const {
  if (endpoint(k)) return std::numeric_limits<double>::infinity();
  return alpha_[grid_.spatial_index(i, j)] * dtheta_[std::size_t(k)];
}

std::array<double, 2> CarlemanWeights::grad_eta(int k, int i, int j) const {
  const std::size_t n = grid_.spatial_index(i, j);
  const double f = -lambda_ * exp_beta_[n] * theta_[std::size_t(k)];
  return {f * beta_tilde_[n].d1, f * beta_tilde_[n].d2};
}

double CarlemanWeights::laplacian_eta(int k, int i, int j) const {
  const std::size_t n = grid_.spatial_index(i, j);
  const SpatialDerivs& b = beta_tilde_[n];
  const double grad2 = b.d1 * b.d1 + b.d2 * b.d2;
  return -lambda_ * exp_beta_[n] * (b.laplacian() + lambda_ * grad2) * theta_[std::size_t(k)];
}

double CarlemanWeights::exp_weight(int k, int i, int j) const {
  if (endpoint(k)) return 0.0;
  const double x = 2.0 * s_ * eta(k, i, j);
  return x > kLogWeightCap ? 0.0 : std::exp(-x);
}

double CarlemanWeights::scaled_weight(int k, int i, int j) const {
  if (endpoint(k)) return 0.0;
  const double x = 2.0 * s_ * (eta(k, i, j) - eta_min_);
  return x > kLogWeightCap ? 0.0 : std::exp(-x);
}

double CarlemanWeights::scaled_damping(int k, int i, int j) const {
  if (endpoint(k)) return 0.0;
  const double x = 2.0 * s_ * (eta(k, i, j) - eta_min_);
  return x > kLogWeightCap ? 0.0 : std::exp(-0.5 * x);
}

double CarlemanWeights::scaled_growth(int k, int i, int j) const {
  const double x = endpoint(k) ? std::numeric_limits<double>::infinity() : s_ * (eta(k, i, j) - eta_min_);
  if (x > kLogWeightCap) {
    std::ostringstream os;
    os << "e^{s eta} overflows at node (" << k << "," << i << "," << j << ")";
    throw NumericalError(os.str());
  }
  return std::exp(x);
}

double CarlemanWeights::normal_derivative_beta(int i, Side side) const {
  const int j = side == Side::GammaPlus ? grid_.n2 : 0;
  const double d2 = beta_tilde_[grid_.spatial_index(i, j)].d2;
  return side == Side::GammaPlus ? d2 : -d2;
}

namespace {

template <class F>
RealGridFunction materialize(const StripGrid& g, F&& f) {
  RealGridFunction r(g);
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) r(k, i, j) = f(k, i, j);
  return r;
}

}  // namespace

RealGridFunction CarlemanWeights::eta_field() const {
  return materialize(grid_, [&](int k, int i, int j) { return eta(k, i, j); });
}
RealGridFunction CarlemanWeights::phi_field() const {
  return materialize(grid_, [&](int k, int i, int j) { return phi(k, i, j); });
}
RealGridFunction CarlemanWeights::exp_weight_field() const {
  return materialize(grid_, [&](int k, int i, int j) { return exp_weight(k, i, j); });
}
RealGridFunction CarlemanWeights::scaled_weight_field() const {
  return materialize(grid_, [&](int k, int i, int j) { return scaled_weight(k, i, j); });
}

CarlemanWeights build_weights(const WeightSpec& spec, const StripGrid& grid) {
  if (spec.beta_tilde.empty()) throw ConfigError("weights: beta_tilde profile missing");
  if (!(spec.m > 1.0)) throw ConfigError("weights: m must satisfy m > 1 (got " + std::to_string(spec.m) + ")");
  if (!(spec.lambda > 0.0)) throw ConfigError("weights: lambda must be positive");
  if (!(spec.s > 0.0)) throw ConfigError("weights: s must be positive");

  CarlemanWeights w;
  w.grid_ = grid;
  w.lambda_ = spec.lambda;
  w.s_ = spec.s;
  w.m_ = spec.m;

  // sup norm over the cross-section, x2 refined four times
  const int fine = 4 * grid.n2;
  double sup = 0.0;
  for (int i = 0; i <= grid.n1; ++i)
    for (int q = 0; q <= fine; ++q) {
      const double x2 = q == fine ? 2.0 * grid.d : grid.d + q * grid.d / fine;
      const double v = spec.beta_tilde.value(grid.x1(i), x2);
      if (!(v > 0.0)) throw ConfigError("weights: beta_tilde must be positive on the closed strip");
      sup = std::max(sup, v);
    }
  w.sup_ = sup;
  w.K_ = spec.m * sup;

  const double lam = spec.lambda;
  if (2.0 * lam * w.K_ > kLogWeightCap)
    throw NumericalError("weights: lambda * beta exceeds the log-space cap (2 lambda K = " + std::to_string(2.0 * lam * w.K_) + ")");
  const double e2K = std::exp(2.0 * lam * w.K_);

  const std::size_t ns = grid.spatial_size();
  w.beta_.resize(ns);
  w.exp_beta_.resize(ns);
  w.alpha_.resize(ns);
  w.beta_tilde_.resize(ns);
  double alpha_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) {
      const std::size_t n = grid.spatial_index(i, j);
      w.beta_tilde_[n] = spatial_derivs(spec.beta_tilde.jet(grid.x1(i), grid.x2(j)));
      w.beta_[n] = w.beta_tilde_[n].v + w.K_;
      w.exp_beta_[n] = std::exp(lam * w.beta_[n]);
      w.alpha_[n] = e2K - w.exp_beta_[n];
      alpha_min = std::min(alpha_min, w.alpha_[n]);
    }
  if (!(alpha_min > 0.0)) throw NumericalError("weights: e^{2 lambda K} - e^{lambda beta} must stay positive");

  const int levels = grid.time_levels();
  w.theta_.resize(std::size_t(levels));
  w.dtheta_.resize(std::size_t(levels));
  w.endpoint_.resize(std::size_t(levels));
  const double T = grid.T;
  double theta_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < levels; ++k) {
    const double t = grid.t(k);
    const double prod = (T + t) * (T - t);
    const bool end = std::abs(prod) <= 1e-14 * T * T;
    w.endpoint_[std::size_t(k)] = end;
    w.theta_[std::size_t(k)] = end ? std::numeric_limits<double>::infinity() : 1.0 / prod;
    w.dtheta_[std::size_t(k)] = end ? std::numeric_limits<double>::infinity() : 2.0 * t / (prod * prod);
    if (!end) theta_min = std::min(theta_min, w.theta_[std::size_t(k)]);
  }
  w.eta_min_ = alpha_min * theta_min;
  return w;
}

PseudoConvexity pseudo_convexity_margin(const SampledField& a, const SampledField& beta_tilde) {
  require_same_grid(a.grid(), beta_tilde.grid(), "pseudo_convexity_margin");
  const StripGrid& g = a.grid();
  PseudoConvexity out{SpatialField(g), std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) {
      const SpatialDerivs& A = a(i, j);
      const SpatialDerivs& B = beta_tilde(i, j);
      const double a2 = A.v * A.v;
      // D_kl = d_k(a^2 d_l beta~) = 2 a d_k a d_l beta~ + a^2 d_kl beta~
      const double D11 = 2.0 * A.v * A.d1 * B.d1 + a2 * B.d11;
      const double D12 = 2.0 * A.v * A.d1 * B.d2 + a2 * B.d12;
      const double D21 = 2.0 * A.v * A.d2 * B.d1 + a2 * B.d12;
      const double D22 = 2.0 * A.v * A.d2 * B.d2 + a2 * B.d22;
      const double ga_gb = A.d1 * B.d1 + A.d2 * B.d2;
      const double S11 = 2.0 * D11 - ga_gb + 2.0 * a2 * B.d1 * B.d1;
      const double S22 = 2.0 * D22 - ga_gb + 2.0 * a2 * B.d2 * B.d2;
      const double S12 = D12 + D21 + 2.0 * a2 * B.d1 * B.d2;
      const double mean = 0.5 * (S11 + S22);
      const double radius = std::hypot(0.5 * (S11 - S22), S12);
      const double lo = mean - radius;
      out.margin(i, j) = lo;
      out.min_margin = std::min(out.min_margin, lo);
    }
  return out;
}

namespace {

void require_x2_only(const SampledField& f, const char* what) {
  const StripGrid& g = f.grid();
  for (int j = 0; j <= g.n2; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
    for (int i = 0; i <= g.n1; ++i) {
      lo = std::min(lo, f(i, j).v);
      hi = std::max(hi, f(i, j).v);
      scale = std::max(scale, std::abs(f(i, j).v));
    }
    if (hi - lo > 1e-12 * std::max(scale, 1e-300))
      throw NotApplicableError(std::string("reduced 1-D conditions: ") + what + " depends on x1");
  }
}

}  // namespace

ReducedConditions reduced_1d_conditions(const SampledField& a, const SampledField& beta_tilde) {
  require_same_grid(a.grid(), beta_tilde.grid(), "reduced_1d_conditions");
  require_x2_only(a, "a");
  require_x2_only(beta_tilde, "beta_tilde");
  const StripGrid& g = a.grid();
  ReducedConditions out{SpatialField(g), SpatialField(g), std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j) {
      const SpatialDerivs& A = a(i, j);
      const SpatialDerivs& B = beta_tilde(i, j);
      const double a2 = A.v * A.v;
      const double d2_a2b = 2.0 * A.v * A.d2 * B.d2 + a2 * B.d22;
      const double d1_a2b = 2.0 * A.v * A.d1 * B.d2 + a2 * B.d12;
      const double Aval = 2.0 * d2_a2b - A.d2 * B.d2 + 2.0 * a2 * B.d2 * B.d2;
      const double cross = d1_a2b == 0.0 ? 0.0 : d1_a2b * d1_a2b / Aval;
      const double second = -cross - A.d2 * B.d2;
      out.A(i, j) = Aval;
      out.second(i, j) = second;
      out.min_A = std::min(out.min_A, Aval);
      out.min_second = std::min(out.min_second, second);
    }
  return out;
}

AssumptionReport check_assumptions(const SampledField& a, const SampledField& b, const WeightSpec& spec,
                                   const StripGrid& grid) {
  require_same_grid(a.grid(), grid, "check_assumptions");
  require_same_grid(b.grid(), grid, "check_assumptions");
  if (!(spec.m > 1.0)) throw ConfigError("weights: m must satisfy m > 1 (got " + std::to_string(spec.m) + ")");
  const SampledField bt(spec.beta_tilde, grid);

  AssumptionReport r;
  r.a_min = a.min_value();
  r.c0 = std::numeric_limits<double>::infinity();
  r.gamma_minus_sign = -std::numeric_limits<double>::infinity();
  r.gamma_minus_outward = -std::numeric_limits<double>::infinity();
  double bt_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) {
      const SpatialDerivs& B = bt(i, j);
      r.c0 = std::min(r.c0, std::hypot(B.d1, B.d2));
      bt_min = std::min(bt_min, B.v);
      if (j == 0) {
        r.gamma_minus_sign = std::max(r.gamma_minus_sign, B.d2);
        r.gamma_minus_outward = std::max(r.gamma_minus_outward, -B.d2);
      }
    }
  r.cpc = pseudo_convexity_margin(a, bt).min_margin;

  try {
    const ReducedConditions red = reduced_1d_conditions(a, bt);
    r.reduced_applicable = true;
    r.reduced1d_A = red.min_A;
    r.reduced1d_second = red.min_second;
    const bool reduced_positive = red.min_A > kPositivityFloor && red.min_second > kPositivityFloor;
    r.reduced_consistent = reduced_positive == (r.cpc > kPositivityFloor);
  } catch (const NotApplicableError&) {
    r.reduced_applicable = false;
  }

  if (!(r.a_min > 0.0)) r.failures.push_back("a >= a_min > 0 violated (min a = " + std::to_string(r.a_min) + ")");
  if (!(bt_min > 0.0)) r.failures.push_back("beta_tilde must be positive");
  if (!(r.c0 > kPositivityFloor)) r.failures.push_back("|grad beta_tilde| >= C0 > 0 violated (min = " + std::to_string(r.c0) + ")");
  if (!(r.gamma_minus_sign <= 0.0))
    r.failures.push_back("d_nu beta_tilde <= 0 on Gamma- violated (max d_x2 beta_tilde = " + std::to_string(r.gamma_minus_sign) + ")");
  if (!(r.cpc > kPositivityFloor))
    r.failures.push_back("pseudo-convexity margin C_pc > 0 violated (min eigenvalue = " + std::to_string(r.cpc) + ")");
  r.orientation_discrepancy = (r.gamma_minus_sign <= 0.0) != (r.gamma_minus_outward <= 0.0);
  r.pass = r.failures.empty();
  return r;
}

}  // namespace carleman
