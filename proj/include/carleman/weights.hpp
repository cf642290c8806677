#pragma once

#include <array>
#include <string>
#include <vector>

#include "carleman/grid.hpp"
#include "carleman/profiles.hpp"

namespace carleman {

// Exponent cap of the damped weight: e^{-x} is flushed to exactly 0 for x > 700.
inline constexpr double kLogWeightCap = 700.0;

// Threshold below which the positivity constants C0 and C_pc count as zero.
inline constexpr double kPositivityFloor = 1e-8;

struct WeightSpec {
  Profile beta_tilde;
  double m = 2.0;
  double lambda = 1.0;
  double s = 1.0;
};

// beta = beta~ + K with K = m ||beta~||_inf, and for |t| < T
//   phi = e^{lambda beta} / ((T + t)(T - t)),
//   eta = (e^{2 lambda K} - e^{lambda beta}) / ((T + t)(T - t)).
// Spatial and temporal factors are stored separately and combined on access.
//
// The raw damped weight e^{-2 s eta} underflows for moderate (s, lambda), so the
// audits use the scaled weight e^{-2 s (eta - eta_min)}. The factor e^{2 s eta_min}
// is common to every term of the audited inequalities and cancels in all ratios;
// log_offset() records it.
class CarlemanWeights {
 public:
  const StripGrid& grid() const { return grid_; }
  double lambda() const { return lambda_; }
  double s() const { return s_; }
  double m() const { return m_; }
  double K() const { return K_; }
  double beta_tilde_sup() const { return sup_; }

  double beta(int i, int j) const { return beta_[grid_.spatial_index(i, j)]; }
  const SpatialDerivs& beta_tilde(int i, int j) const { return beta_tilde_.at(grid_.spatial_index(i, j)); }
  bool endpoint(int k) const { return endpoint_[std::size_t(k)]; }

  double eta(int k, int i, int j) const;
  double phi(int k, int i, int j) const;
  double dt_eta(int k, int i, int j) const;
  std::array<double, 2> grad_eta(int k, int i, int j) const;
  double laplacian_eta(int k, int i, int j) const;

  // e^{-2 s eta} with the overflow guard; exactly 0 at |t| = T.
  double exp_weight(int k, int i, int j) const;
  double eta_min() const { return eta_min_; }
  double log_offset() const { return 2.0 * s_ * eta_min_; }
  // e^{-2 s (eta - eta_min)} and e^{-s (eta - eta_min)} with the same guard.
  double scaled_weight(int k, int i, int j) const;
  double scaled_damping(int k, int i, int j) const;
  // e^{+s (eta - eta_min)}; raises NumericalError when not representable.
  double scaled_growth(int k, int i, int j) const;

  // Outward normal derivative of beta at a boundary node of the given side.
  double normal_derivative_beta(int i, Side side) const;

  RealGridFunction eta_field() const;
  RealGridFunction phi_field() const;
  RealGridFunction exp_weight_field() const;
  RealGridFunction scaled_weight_field() const;

 private:
  friend CarlemanWeights build_weights(const WeightSpec& spec, const StripGrid& grid);

  StripGrid grid_;
  double lambda_ = 0.0, s_ = 0.0, m_ = 0.0, K_ = 0.0, sup_ = 0.0, eta_min_ = 0.0;
  std::vector<double> beta_;        // beta~ + K
  std::vector<double> exp_beta_;    // e^{lambda beta}
  std::vector<double> alpha_;       // e^{2 lambda K} - e^{lambda beta}
  std::vector<SpatialDerivs> beta_tilde_;
  std::vector<double> theta_;       // 1 / ((T + t)(T - t))
  std::vector<double> dtheta_;      // 2 t / (T^2 - t^2)^2
  std::vector<bool> endpoint_;
};

CarlemanWeights build_weights(const WeightSpec& spec, const StripGrid& grid);

struct PseudoConvexity {
  SpatialField margin;  // smaller eigenvalue of S at each node
  double min_margin = 0.0;
};

// S = (D + D^T) - (grad a . grad beta~) I + 2 a^2 grad beta~ grad beta~^T with
// D_kl = d_k(a^2 d_l beta~). Its smallest eigenvalue bounds C_pc from below.
PseudoConvexity pseudo_convexity_margin(const SampledField& a, const SampledField& beta_tilde);

struct ReducedConditions {
  SpatialField A;       // 2 d2(a^2 d2 b~) - d2 a d2 b~ + 2 a^2 (d2 b~)^2
  SpatialField second;  // -(d1(a^2 d2 b~))^2 / A - d2 a d2 b~
  double min_A = 0.0;
  double min_second = 0.0;
};

// Reduced x2-only form of the pseudo-convexity condition. Raises
// NotApplicableError when a or beta~ vary in x1.
ReducedConditions reduced_1d_conditions(const SampledField& a, const SampledField& beta_tilde);

struct AssumptionReport {
  double a_min = 0.0;
  double c0 = 0.0;                   // min |grad beta~|
  double gamma_minus_sign = 0.0;     // max of d_{x2} beta~ on Gamma- (sign test used for pass)
  double gamma_minus_outward = 0.0;  // max of the outward derivative -d_{x2} beta~ on Gamma-
  double cpc = 0.0;                  // min eigenvalue margin
  bool reduced_applicable = false;
  double reduced1d_A = 0.0;
  double reduced1d_second = 0.0;
  bool reduced_consistent = true;    // eigenvalue margin and reduced minima agree on sign
  bool orientation_discrepancy = false;
  bool pass = false;
  std::vector<std::string> failures;
};

AssumptionReport check_assumptions(const SampledField& a, const SampledField& b, const WeightSpec& spec,
                                   const StripGrid& grid);

}  // namespace carleman
