#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "carleman/fixtures.hpp"
#include "carleman/forward.hpp"
#include "carleman/weights.hpp"

namespace carleman {

// Two coefficient pairs sharing q0 and F, both read from the closed-form q~.
// q~ solves the equation with (a~, b~); q solves it with (a, b). The gaps
// alpha = a~ - a and gamma = b~ - b are time-independent by construction.
struct TwinExperiment {
  StripGrid grid;  // full window
  SpaceTimeFixture q_tilde;
  Profile a, b;
  Profile a_tilde, b_tilde;
};

// a = a~ - alpha, b = b~ - gamma.
TwinExperiment planted_twin(const StripGrid& grid, const SpaceTimeFixture& q_tilde, const Profile& a_tilde,
                            const Profile& b_tilde, const Profile& alpha, const Profile& gamma);

struct TwinRun {
  CoefficientField base;   // (a, b)
  CoefficientField tilde;  // (a~, b~)
  GridFunction q;          // base run, extended to [-T, T]
  GridFunction q_tilde;    // tilde run, extended to [-T, T]
  GridFunction u;          // q - q~
};

// Both forward solves (concurrently when parallel is set) and their symmetric
// extensions. Requires a real initial slice. Both runs take their x1-face data
// from the reduced x2 problem: q~ is only exact data for the tilde run, and
// identical twins must give identical discrete solutions.
TwinRun run_twin(const TwinExperiment& exp, bool parallel = false);

// Closed-form chain coefficients at one node. A22 = A11 and B22 = B11.
struct ChainCoefficients {
  using Vec = std::array<cplx, 2>;
  cplx p;      // divisor
  cplx g, gt;  // g = d_t(r / p) and its time derivative
  cplx A11, A12, A13, A23, A33, A14, A24, A34, A44;
  Vec B11, B12, B13, B23, B33, B14, B24, B34, B44;
};

// u-chain: divide by p = q~ (companion r = Lap q~), isolates alpha.
// v-chain: divide by p = Lap q~ (companion r = q~), isolates gamma.
enum class ChainKind { U, V };

// w1 = u / p, w2 = d_t w1, w3 = w2 / g, w4 = d_t w3 with
//   i d_t w3 + a Lap w3 + b w3 + sum_i A_i3 w_i + B_i3 . grad w_i = gap
//   i d_t w4 + a Lap w4 + b w4 + sum_i A_i4 w_i + B_i4 . grad w_i = 0.
class ChainBundle {
 public:
  ChainKind kind = ChainKind::U;
  GridFunction u, w1, w2, w3, w4;

  const ChainCoefficients& coefficients(int k, int i, int j) const {
    return table_[std::size_t(k) * stride_k_ + std::size_t(per_node_ ? i : 0) * stride_i_ + std::size_t(j)];
  }
  bool per_node() const { return per_node_; }

 private:
  friend ChainBundle build_chain(ChainKind kind, const GridFunction& u, const SpaceTimeFixture& q_tilde,
                                 const CoefficientField& coeffs, bool smooth);
  std::vector<ChainCoefficients> table_;
  bool per_node_ = false;
  std::size_t stride_k_ = 0, stride_i_ = 0;
};

// Coefficients are evaluated from jets of q~ and tabulated per (t, x2) when
// neither q~ nor a depends on x1. Raises DivisorGuardError when |p| or |g|
// drops below kDivisorGuard. smooth applies a three-point moving average in t
// to u first.
ChainBundle build_chain(ChainKind kind, const GridFunction& u, const SpaceTimeFixture& q_tilde,
                        const CoefficientField& coeffs, bool smooth = false);
inline ChainBundle build_u_chain(const GridFunction& u, const SpaceTimeFixture& q_tilde, const CoefficientField& coeffs,
                                 bool smooth = false) {
  return build_chain(ChainKind::U, u, q_tilde, coeffs, smooth);
}
inline ChainBundle build_v_chain(const GridFunction& u, const SpaceTimeFixture& q_tilde, const CoefficientField& coeffs,
                                 bool smooth = false) {
  return build_chain(ChainKind::V, u, q_tilde, coeffs, smooth);
}

// Left side of the w3 equation at every interior node (0 elsewhere).
GridFunction chain_gap_pointwise(const ChainBundle& bundle, const CoefficientField& coeffs);

// Left side of the w4 equation at every interior node; vanishes in the continuum.
GridFunction chain_w4_residual(const ChainBundle& bundle, const CoefficientField& coeffs);

struct Reconstruction {
  SpatialField value;  // real part, averaged over |t| <= T/2
  SpatialField imag;   // imaginary part, same average
  double max_abs_imag = 0.0;
  double max_abs_value = 0.0;
};

// Time average of the pointwise gap over interior levels with |t| <= T/2.
// Only interior spatial nodes are filled.
Reconstruction reconstruct(const ChainBundle& bundle, const CoefficientField& coeffs);
inline Reconstruction reconstruct_alpha(const ChainBundle& u_chain, const CoefficientField& coeffs) {
  return reconstruct(u_chain, coeffs);
}
inline Reconstruction reconstruct_gamma(const ChainBundle& v_chain, const CoefficientField& coeffs) {
  return reconstruct(v_chain, coeffs);
}

// Reconstructions read off pure discretization error: both chains applied to
// q~_h - q~ from the tilde run, with the tilde coefficients.
struct NoiseFloor {
  double alpha = 0.0;  // max |alpha^|
  double gamma = 0.0;  // max |gamma^|
};
NoiseFloor solver_noise_floor(const TwinRun& run, const SpaceTimeFixture& q_tilde, bool smooth = false);

// Planted profile on the interior spatial nodes of a grid (0 on the ring).
SpatialField sample_interior(const Profile& p, const StripGrid& grid);

// ||est - truth|| / ||truth|| in the interior spatial L2 norm. When truth
// vanishes the absolute norm of est is returned.
double relative_l2_error(const SpatialField& est, const SpatialField& truth);

// Terms of the weighted stability estimate
//   int e^{-2 s eta}(|alpha|^2 + |gamma|^2)
//     <= C [ s l^2 int_side phi e^{-2 s eta} |d_nu beta| |d_nu d_t^2 u|^2
//            + l int e^{-2 s eta} (sum_{i<=2} |d_t^i u(.,0)|^2 + |grad u(.,0)|^2
//                                  + |d_t grad u(.,0)|^2 + |d_t Lap u(.,0)|^2) ].
// Volume integrals run over Region::Interior; the boundary integral drops the end levels.
struct StabilitySides {
  double s = 0.0, lambda = 0.0;
  double lhs = 0.0;
  double rhs_boundary = 0.0;
  double rhs_initial = 0.0;
  double min_dnu_beta = 0.0;
  double rhs() const { return rhs_boundary + rhs_initial; }
  double ratio() const;
};

// observation, when given, replaces d_nu d_t^2 u on the observed side (e.g. a noisy copy).
StabilitySides stability_sides(const GridFunction& u, const SpatialField& alpha, const SpatialField& gamma,
                               const CarlemanWeights& w, Side side = Side::GammaPlus,
                               const BoundaryTrace* observation = nullptr);

// d_nu d_t^2 u on one side of the strip.
BoundaryTrace observation_trace(const GridFunction& u, Side side);

// Adds complex Gaussian noise with E|n|^2 = (level * RMS(trace))^2, deterministic per seed.
BoundaryTrace add_observation_noise(const BoundaryTrace& trace, double level, std::uint64_t seed);

}  // namespace carleman
