#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "carleman/weights.hpp"

using namespace carleman;

namespace {

const ProfileContext kCtx{1.0, 4.0, 1.0};

StripGrid small_grid() { return build_grid(2, 1, 1, 8, 10, 20); }

WeightSpec spec(const std::string& beta, double lambda, double s, double m = 2.0) {
  return {make_profile(beta, kCtx), m, lambda, s};
}

AssumptionReport assumptions(const std::string& a, const std::string& beta, const StripGrid& g) {
  return check_assumptions(SampledField(make_profile(a, kCtx), g), SampledField(make_profile("constant", kCtx).scaled(-1.0), g),
                           spec(beta, 1.0, 1.0), g);
}

bool mentions(const std::vector<std::string>& failures, const std::string& needle) {
  return std::any_of(failures.begin(), failures.end(), [&](const std::string& f) { return f.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("shift K is m times the sup of beta tilde") {
  const CarlemanWeights w = build_weights(spec("exp-decreasing", 1.0, 1.0), small_grid());
  CHECK(w.beta_tilde_sup() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(w.K() == doctest::Approx(0.735759).epsilon(1e-6));
  CHECK(w.beta(3, 0) == doctest::Approx(std::exp(-1.0) + w.K()).epsilon(1e-14));
}

TEST_CASE("eta at t = 0 matches the closed form") {
  const StripGrid g = small_grid();
  const double lambda = 1.5;
  const CarlemanWeights w = build_weights(spec("exp-decreasing", lambda, 3.0), g);
  const int k = g.zero_level();
  for (int j = 0; j <= g.n2; j += 5) {
    const double beta = std::exp(-g.x2(j)) + 2.0 * std::exp(-1.0);
    const double eta = (std::exp(2.0 * lambda * 2.0 * std::exp(-1.0)) - std::exp(lambda * beta)) / (g.T * g.T);
    CHECK(w.eta(k, 4, j) == doctest::Approx(eta).epsilon(1e-13));
    CHECK(w.phi(k, 4, j) == doctest::Approx(std::exp(lambda * beta)).epsilon(1e-13));
  }
}

TEST_CASE("m must exceed one") {
  CHECK_THROWS_WITH_AS(build_weights(spec("exp-decreasing", 1.0, 1.0, 1.0), small_grid()), doctest::Contains("m > 1"),
                       ConfigError);
  CHECK_THROWS_AS(build_weights(spec("exp-decreasing", 0.0, 1.0), small_grid()), ConfigError);
  CHECK_THROWS_AS(build_weights(spec("exp-decreasing", 1.0, -1.0), small_grid()), ConfigError);
}

TEST_CASE("damped weight properties") {
  const StripGrid g = small_grid();
  for (double lambda : {1.0, 2.0}) {
    const CarlemanWeights lo = build_weights(spec("exp-decreasing", lambda, 2.0), g);
    const CarlemanWeights hi = build_weights(spec("exp-decreasing", lambda, 4.0), g);
    for (int k = 0; k < g.time_levels(); ++k)
      for (int i = 0; i <= g.n1; i += 2)
        for (int j = 0; j <= g.n2; ++j) {
          if (lo.endpoint(k)) {
            CHECK(lo.exp_weight(k, i, j) == 0.0);
            CHECK(lo.scaled_weight(k, i, j) == 0.0);
            continue;
          }
          CHECK(lo.eta(k, i, j) > 0.0);
          CHECK(hi.exp_weight(k, i, j) <= lo.exp_weight(k, i, j));
          CHECK(lo.scaled_weight(k, i, j) <= 1.0 + 1e-15);
          // beta~ decreasing in x2 means eta increasing in x2.
          if (j > 0) CHECK(lo.eta(k, i, j) > lo.eta(k, i, j - 1));
          CHECK(lo.scaled_weight(k, i, j) ==
                doctest::Approx(lo.exp_weight(k, i, j) * std::exp(lo.log_offset())).epsilon(1e-10));
        }
  }
}

TEST_CASE("eta derivatives agree with finite differences") {
  const StripGrid g = build_grid(2, 1, 1, 40, 400, 4000);
  const CarlemanWeights w = build_weights(spec("exp-decreasing", 1.0, 1.0), g);
  const int k = g.zero_level() + 700;
  const int i = 13, j = 170;
  const auto grad = w.grad_eta(k, i, j);
  // Fourth-order central differences.
  const double d2 = (8.0 * (w.eta(k, i, j + 1) - w.eta(k, i, j - 1)) - (w.eta(k, i, j + 2) - w.eta(k, i, j - 2))) / (12.0 * g.h2());
  const double dt = (8.0 * (w.eta(k + 1, i, j) - w.eta(k - 1, i, j)) - (w.eta(k + 2, i, j) - w.eta(k - 2, i, j))) / (12.0 * g.dt());
  const double d1 = (w.eta(k, i + 1, j) - w.eta(k, i - 1, j)) / (2.0 * g.h1());
  CHECK(std::abs(grad[1] - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
  CHECK(std::abs(grad[0] - d1) <= 1e-12);
  CHECK(std::abs(w.dt_eta(k, i, j) - dt) <= 1e-6 * std::max(1.0, std::abs(dt)));
  const double lap = (w.eta(k, i, j + 1) - 2.0 * w.eta(k, i, j) + w.eta(k, i, j - 1)) / (g.h2() * g.h2());
  CHECK(std::abs(w.laplacian_eta(k, i, j) - lap) <= 1e-5 * std::max(1.0, std::abs(lap)));
}

TEST_CASE("reference pair satisfies the assumptions") {
  const StripGrid g = build_grid(4, 1, 1, 160, 40, 200);
  const AssumptionReport r = assumptions("quadratic", "exp-decreasing", g);
  CHECK(r.pass);
  CHECK(r.failures.empty());
  CHECK(r.cpc > 0.0);
  CHECK(r.c0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(r.a_min == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.reduced_applicable);
  CHECK(r.reduced1d_A > 0.0);
  CHECK(r.reduced1d_second > 0.0);
  CHECK(r.reduced_consistent);
  // The derivative of beta~ along +x2 is negative on Gamma-, the outward one is positive.
  CHECK(r.gamma_minus_sign < 0.0);
  CHECK(r.gamma_minus_outward > 0.0);
  CHECK(r.orientation_discrepancy);
}

TEST_CASE("reduced conditions at x2 = 1.5 against a hand evaluation") {
  const StripGrid g = build_grid(4, 1, 1, 8, 40, 4);
  const ReducedConditions rc =
      reduced_1d_conditions(SampledField(make_profile("quadratic", kCtx), g), SampledField(make_profile("exp-decreasing", kCtx), g));
  const double x2 = 1.5, a = (x2 * x2 + 5.0) / 2.0, da = x2, e = std::exp(-x2);
  const double d2_a2b = 2.0 * a * da * (-e) + a * a * e;
  const double A = 2.0 * d2_a2b - da * (-e) + 2.0 * a * a * e * e;
  const int j = 20;
  REQUIRE(g.x2(j) == x2);
  CHECK(rc.A(4, j) == doctest::Approx(A).epsilon(1e-12));
  CHECK(std::abs(rc.A(4, j) - 2.65) <= 0.05 * 2.65);
  // With no x1 dependence the second condition reduces to a' e^{-x2}.
  CHECK(rc.second(4, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(rc.second(4, j) == doctest::Approx(da * e).epsilon(1e-12));
}

TEST_CASE("reduced conditions for unit diffusion") {
  const StripGrid g = build_grid(1, 1, 1, 4, 10, 4);
  const ReducedConditions rc =
      reduced_1d_conditions(SampledField(make_profile("constant", kCtx), g), SampledField(make_profile("exp-decreasing", kCtx), g));
  for (int j = 0; j <= g.n2; ++j) {
    const double e = std::exp(-g.x2(j));
    CHECK(rc.A(2, j) == doctest::Approx(2.0 * e + 2.0 * e * e).epsilon(1e-13));
    CHECK(rc.second(2, j) == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(reduced_1d_conditions(SampledField(make_profile("x1-bump", kCtx), g),
                                        SampledField(make_profile("exp-decreasing", kCtx), g)),
                  NotApplicableError);
}

TEST_CASE("linear weight with constant diffusion has zero margin") {
  const StripGrid g = build_grid(1, 1, 1, 6, 10, 4);
  const PseudoConvexity pc =
      pseudo_convexity_margin(SampledField(make_profile("constant", kCtx), g), SampledField(make_profile("linear", kCtx), g));
  CHECK(std::abs(pc.min_margin) <= 1e-14);
  const AssumptionReport r = assumptions("constant", "linear", g);
  CHECK_FALSE(r.pass);
  CHECK(mentions(r.failures, "C_pc"));
}

TEST_CASE("increasing weight fails the second reduced condition") {
  const StripGrid g = build_grid(1, 1, 1, 6, 20, 4);
  const AssumptionReport r = assumptions("quadratic", "exp-increasing", g);
  CHECK_FALSE(r.pass);
  CHECK(r.reduced1d_second < 0.0);
  CHECK(r.cpc < 0.0);
  CHECK(r.reduced_consistent);
}

TEST_CASE("constant weight has no gradient") {
  const StripGrid g = build_grid(1, 1, 1, 6, 10, 4);
  const AssumptionReport r = assumptions("quadratic", "constant", g);
  CHECK_FALSE(r.pass);
  CHECK(r.c0 == 0.0);
  CHECK(mentions(r.failures, "C0"));
}

TEST_CASE("sign of the margin matches the reduced minima") {
  const StripGrid g = build_grid(1, 1, 1, 6, 20, 4);
  for (const char* beta : {"exp-decreasing", "exp-increasing", "linear"}) {
    const AssumptionReport r = assumptions("quadratic", beta, g);
    CAPTURE(beta);
    CHECK(r.reduced_consistent);
  }
}

}  // TEST_SUITE
