#pragma once

#include <vector>

#include "carleman/grid.hpp"
#include "carleman/profiles.hpp"
#include "carleman/weights.hpp"

namespace carleman {

// Hq = i d_t q + a Lap q + b q by centred differences. Nodes outside
// Region::Interior are left at 0 and must not enter quadratures.
GridFunction apply_H(const GridFunction& q, const CoefficientField& coeffs);

// i d_t q + a Lap q (H without the potential).
GridFunction apply_evolution(const GridFunction& q, const CoefficientField& coeffs);

// M1 psi = i d_t psi + a Lap psi + s^2 a |grad eta|^2 psi + (b - s grad eta . grad a) psi
// M2 psi = i s d_t eta psi + 2 a s grad eta . grad psi + s div(a grad eta) psi
// with closed-form weight derivatives and centred differences of psi.
GridFunction apply_M1(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w);
GridFunction apply_M2(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w);

// max over interior nodes of |M1 psi + M2 psi - e^{-s eta} H(e^{s eta} psi)|.
// Nodes with |psi| < 1e-14 are set to zero before exponentiation and are not
// scored.
double conjugation_residual(const GridFunction& psi, const CoefficientField& coeffs, const CarlemanWeights& w);

enum class EstimateVariant { Basic = 1, WithEvolution = 2 };

// Both sides of the weighted estimate
//   s^3 l^4 |q|^2 + s l |grad q|^2 + |M1 psi|^2 + |M2 psi|^2 [+ (s l)^-1 |i q_t + a Lap q|^2]
//     <= C ( s l |d_nu q|^2 |d_nu beta| on the observed side + |Hq|^2 ),
// all weighted by e^{-2 s eta} and psi = e^{-s eta} q. Every term carries the
// common factor e^{2 s eta_min} (see CarlemanWeights).
struct CarlemanSides {
  double s = 0.0, lambda = 0.0;
  EstimateVariant variant = EstimateVariant::Basic;
  Side side = Side::GammaPlus;
  double lhs_q = 0.0;
  double lhs_grad = 0.0;
  double lhs_M1 = 0.0;
  double lhs_M2 = 0.0;
  double lhs_evol = 0.0;
  double rhs_boundary = 0.0;
  double rhs_source = 0.0;
  double min_dnu_beta = 0.0;  // signed minimum of the outward d_nu beta on the observed side
  double lhs() const { return lhs_q + lhs_grad + lhs_M1 + lhs_M2 + lhs_evol; }
  double rhs() const { return rhs_boundary + rhs_source; }
  // lhs / rhs; +inf when rhs = 0 < lhs (inequality violated), 0 when both vanish.
  double ratio() const;
};

// q must vanish on the spatial boundary to 1e-12 (PreconditionError otherwise).
CarlemanSides carleman_sides(const GridFunction& q, const CoefficientField& coeffs, const CarlemanWeights& w,
                             EstimateVariant variant, Side side = Side::GammaPlus);

struct LemmaRow {
  double s = 0.0;
  double lhs = 0.0;  // integral of |int_0^t q|^2 e^{-2 s eta}
  double rhs = 0.0;  // integral of |q|^2 e^{-2 s eta}
  double kappa_hat = 0.0;
};

struct LemmaReport {
  std::vector<LemmaRow> rows;
  double kappa_max() const;
  double kappa_spread() const;  // max / min of kappa_hat (1 when all vanish)
  // lhs/rhs(s_{n+1}) divided by lhs/rhs(s_n) for consecutive rows.
  std::vector<double> decay_factors() const;
};

// Antiderivative from t = 0 by the cumulative trapezoid, in both time directions.
GridFunction time_antiderivative(const GridFunction& q);

LemmaReport lemma_audit(const GridFunction& q, const WeightSpec& spec, const std::vector<double>& s_values);

}  // namespace carleman
