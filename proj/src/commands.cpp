#include "carleman/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <thread>

#include "carleman/auditor.hpp"
#include "carleman/fixtures.hpp"
#include "carleman/forward.hpp"
#include "carleman/inverse.hpp"
#include "carleman/weights.hpp"

namespace carleman {

namespace {

using nlohmann::json;

// Evaluates f(0..n-1) on up to `jobs` threads. Results and the first failing
// index's exception come back in index order, so output never depends on jobs.
template <class F>
auto parallel_map(std::size_t n, int jobs, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using T = decltype(f(std::size_t{}));
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < n;) {
      try {
        slots[k].emplace(f(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, std::size_t(std::max(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct SweepPoint {
  double s, lambda;
};

// Cartesian (s, lambda) grid sorted by s, then lambda.
std::vector<SweepPoint> sweep_points(const RunConfig& c) {
  std::vector<SweepPoint> pts;
  for (double s : c.weights.s)
    for (double l : c.weights.lambda) pts.push_back({s, l});
  std::sort(pts.begin(), pts.end(), [](const SweepPoint& x, const SweepPoint& y) {
    return x.s != y.s ? x.s < y.s : x.lambda < y.lambda;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const SweepPoint& x, const SweepPoint& y) { return x.s == y.s && x.lambda == y.lambda; }),
            pts.end());
  return pts;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

WeightSpec weight_spec(const RunConfig& c, double lambda, double s) { return {c.weights.beta_tilde.profile, c.weights.m, lambda, s}; }

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 1.0;
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

// Time levels across one standard deviation of the weight around t = 0, at the
// node where eta is smallest: e^{-2 s eta} ~ exp(-2 s eta_min t^2 / T^2) there.
double time_cells(const CarlemanWeights& w) {
  const StripGrid& g = w.grid();
  return g.T / (2.0 * std::sqrt(w.s() * w.eta_min())) / g.dt();
}

constexpr double kResolvedCells = 2.0;

std::string key(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json assumption_json(const AssumptionReport& r) {
  return {{"a_min", r.a_min},
          {"c0", r.c0},
          {"gamma_minus_sign", r.gamma_minus_sign},
          {"gamma_minus_outward", r.gamma_minus_outward},
          {"orientation_discrepancy", r.orientation_discrepancy},
          {"cpc", r.cpc},
          {"reduced_applicable", r.reduced_applicable},
          {"reduced1d_A", r.reduced_applicable ? json(r.reduced1d_A) : json(nullptr)},
          {"reduced1d_second", r.reduced_applicable ? json(r.reduced1d_second) : json(nullptr)},
          {"reduced_consistent", r.reduced_consistent},
          {"pass", r.pass},
          {"failures", r.failures}};
}

// ---------------------------------------------------------------------------

void cmd_check_weights(const RunConfig& c, const CommandOptions&, AuditReport& rep) {
  const StripGrid g = c.build_grid();
  const CoefficientField coeffs = build_coefficients(c.coefficients.a.profile, c.coefficients.b.profile, g);
  const WeightSpec spec = weight_spec(c, c.weights.lambda.front(), c.weights.s.front());
  const AssumptionReport r = check_assumptions(coeffs.a, coeffs.b, spec, g);
  const SampledField bt(spec.beta_tilde, g);
  const PseudoConvexity pc = pseudo_convexity_margin(coeffs.a, bt);
  std::optional<ReducedConditions> red;
  if (r.reduced_applicable) red = reduced_1d_conditions(coeffs.a, bt);
  const CarlemanWeights w = build_weights(spec, g);

  CsvTable t{"check_weights", {"x1", "x2", "margin", "reduced_A", "reduced_second"}, {}};
  for (int i = 0; i <= g.n1; ++i)
    for (int j = 0; j <= g.n2; ++j)
      t.add({cell(g.x1(i)), cell(g.x2(j)), cell(pc.margin(i, j)),
             cell(red ? red->A(i, j) : std::numeric_limits<double>::quiet_NaN()),
             cell(red ? red->second(i, j) : std::numeric_limits<double>::quiet_NaN())});
  rep.tables.push_back(std::move(t));

  rep.results = assumption_json(r);
  rep.results["K"] = w.K();
  rep.results["beta_tilde_sup"] = w.beta_tilde_sup();
  if (red && g.n2 % 2 == 0) {
    rep.results["reduced_A_mid"] = {{"x2", g.x2(g.n2 / 2)}, {"value", red->A(g.n1 / 2, g.n2 / 2)}};
  }
  rep.pass = {{"assumptions", r.pass}, {"cpc_positive", r.cpc > kPositivityFloor}, {"c0_positive", r.c0 > kPositivityFloor},
              {"gamma_minus_sign", r.gamma_minus_sign <= 0.0}};
  if (r.reduced_applicable)
    rep.pass["reduced_positive"] = r.reduced1d_A > kPositivityFloor && r.reduced1d_second > kPositivityFloor;
  for (const auto& f : r.failures) rep.messages.push_back("assumption failed: " + f);
  if (r.orientation_discrepancy)
    rep.messages.push_back("note: Gamma- sign test passes with d_x2 beta_tilde but fails with the outward normal derivative");
  rep.exit_code = r.pass ? 0 : 4;
}

// ---------------------------------------------------------------------------

void emit_field(AuditReport& rep, const std::string& name, const GridFunction& f) {
  const StripGrid& g = f.grid();
  CsvTable t{name, {"t", "x1", "x2", "re", "im"}, {}};
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i)
      for (int j = 0; j <= g.n2; ++j) {
        const cplx v = f(k, i, j);
        t.add({cell(g.t(k)), cell(g.x1(i)), cell(g.x2(j)), cell(v.real()), cell(v.imag())});
      }
  rep.tables.push_back(std::move(t));
}

void emit_trace(AuditReport& rep, const std::string& name, const BoundaryTrace& tr) {
  const StripGrid& g = tr.grid();
  CsvTable t{name, {"t", "x1", "re", "im"}, {}};
  for (int k = 0; k < g.time_levels(); ++k)
    for (int i = 0; i <= g.n1; ++i) t.add({cell(g.t(k)), cell(g.x1(i)), cell(tr(k, i).real()), cell(tr(k, i).imag())});
  rep.tables.push_back(std::move(t));
}

void cmd_forward(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const SpaceTimeFixture fix = make_fixture(c.fixture.q_tilde, c.context());
  struct Level {
    StripGrid grid;
    double error;
    GridFunction solution;
  };
  const int levels = c.run.levels;
  auto levels_out = parallel_map(std::size_t(levels), o.jobs, [&](std::size_t l) {
    const int f = 1 << l;
    const StripGrid g = build_grid(c.grid.L, c.grid.d, c.grid.T, c.run.refine_n1 ? c.grid.n1 * f : c.grid.n1,
                                   c.grid.n2 * f, c.grid.nt * f);
    const CoefficientField coeffs = build_coefficients(c.coefficients.a.profile, c.coefficients.b.profile, g);
    GridFunction q = solve_forward(problem_from_fixture(fix, coeffs, g));
    const double err = max_abs(q - fix.sample(g.forward_half()));
    return Level{g, err, l == 0 && c.run.export_fields ? std::move(q) : GridFunction()};
  });

  CsvTable t{"forward_convergence", {"n1", "n2", "nt", "h2", "dt", "max_error", "order"}, {}};
  std::vector<double> orders;
  for (std::size_t l = 0; l < levels_out.size(); ++l) {
    const auto& L = levels_out[l];
    double order = std::numeric_limits<double>::quiet_NaN();
    if (l > 0 && L.error > 0.0 && levels_out[l - 1].error > 0.0) {
      order = std::log2(levels_out[l - 1].error / L.error);
      orders.push_back(order);
    }
    t.add({cell(L.grid.n1), cell(L.grid.n2), cell(L.grid.nt), cell(L.grid.h2()), cell(L.grid.dt()), cell(L.error),
           cell(order)});
  }
  rep.tables.push_back(std::move(t));

  const StripGrid g0 = levels_out.front().grid;
  const CoefficientField c0 = build_coefficients(c.coefficients.a.profile, c.coefficients.b.profile, g0);
  rep.results["manufactured_residual"] = manufactured_residual(fix, c0, g0);
  json errs = json::array();
  for (const auto& L : levels_out) errs.push_back(L.error);
  rep.results["max_errors"] = errs;
  rep.results["orders"] = orders;
  const double min_order = orders.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : *std::min_element(orders.begin(), orders.end());
  rep.results["min_order"] = json_number(min_order);
  try {
    const QTildeReport q = check_qtilde_assumptions(fix, g0);
    rep.results["qtilde_assumptions"] = {{"min_abs_q", q.min_abs_q},
                                         {"min_abs_dt_lap_over_q", q.min_abs_dt_lap_over_q},
                                         {"min_abs_lap", q.min_abs_lap},
                                         {"min_abs_dt_q_over_lap", q.min_abs_dt_q_over_lap},
                                         {"pass", q.pass}};
  } catch (const FixtureNotAnalyticError&) {
  }
  rep.pass["order_ge_1_9"] = !orders.empty() && min_order >= 1.9;
  if (c.run.export_fields) {
    const GridFunction& q = levels_out.front().solution;
    emit_field(rep, "forward_solution", q);
    emit_trace(rep, "forward_trace", normal_derivative_trace(q, c.run.side));
  }
}

// ---------------------------------------------------------------------------

struct CarlemanRow {
  CarlemanSides sides;
  double conjugation;
  double cells;
};

std::vector<CarlemanRow> carleman_rows(const RunConfig& c, const CommandOptions& o, EstimateVariant variant,
                                       const GridFunction& q, const CoefficientField& coeffs) {
  const auto pts = sweep_points(c);
  return parallel_map(pts.size(), o.jobs, [&](std::size_t n) {
    const CarlemanWeights w = build_weights(weight_spec(c, pts[n].lambda, pts[n].s), q.grid());
    CarlemanRow row{carleman_sides(q, coeffs, w, variant, c.run.side), std::numeric_limits<double>::quiet_NaN(),
                    time_cells(w)};
    try {
      row.conjugation = conjugation_residual(q, coeffs, w);
    } catch (const NumericalError&) {
      // e^{s eta} psi not representable at this (s, lambda)
    }
    return row;
  });
}

void cmd_carleman_audit(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const StripGrid g = c.build_grid();
  const CoefficientField coeffs = build_coefficients(c.coefficients.a.profile, c.coefficients.b.profile, g);
  const GridFunction q = make_fixture(c.fixture.audit, c.context()).sample(g);
  const auto variant = static_cast<EstimateVariant>(c.run.variant);
  const auto rows = carleman_rows(c, o, variant, q, coeffs);

  CsvTable t{"carleman_audit",
             {"variant", "s", "lambda", "lhs_q", "lhs_grad", "lhs_M1", "lhs_M2", "lhs_evol", "rhs_boundary",
              "rhs_source", "ratio", "min_dnu_beta", "conjugation_residual", "time_cells"},
             {}};
  std::vector<double> ratios, resolved;
  std::map<double, std::vector<double>> by_lambda;
  bool nonneg = true, finite = true;
  for (const auto& r : rows) {
    const CarlemanSides& S = r.sides;
    t.add({cell(c.run.variant), cell(S.s), cell(S.lambda), cell(S.lhs_q), cell(S.lhs_grad), cell(S.lhs_M1),
           cell(S.lhs_M2), cell(S.lhs_evol), cell(S.rhs_boundary), cell(S.rhs_source), cell(S.ratio()),
           cell(S.min_dnu_beta), cell(r.conjugation), cell(r.cells)});
    if (r.cells >= kResolvedCells) resolved.push_back(S.ratio());
    for (double v : {S.lhs_q, S.lhs_grad, S.lhs_M1, S.lhs_M2, S.lhs_evol, S.rhs_boundary, S.rhs_source})
      nonneg = nonneg && v >= 0.0;
    finite = finite && std::isfinite(S.ratio()) && S.rhs() > 0.0;
    ratios.push_back(S.ratio());
    by_lambda[S.lambda].push_back(S.ratio());
  }
  rep.tables.push_back(std::move(t));

  const double rmax = *std::max_element(ratios.begin(), ratios.end());
  const double rmin = *std::min_element(ratios.begin(), ratios.end());
  bool holds = true;
  for (const auto& r : rows) holds = holds && r.sides.lhs() <= rmax * r.sides.rhs() * (1.0 + 1e-12);
  json per_lambda = json::object();
  for (const auto& [l, v] : by_lambda) per_lambda[key(l)] = json_number(spread(v));
  rep.results = {{"ratio_min", json_number(rmin)},
                 {"ratio_max", json_number(rmax)},
                 {"ratio_spread", json_number(spread(ratios))},
                 {"ratio_spread_per_lambda", per_lambda},
                 {"resolved_points", resolved.size()},
                 {"ratio_spread_resolved", json_number(spread(resolved))},
                 {"side", side_name(c.run.side)},
                 {"log_weight_offset_note", "every term carries the common factor e^{2 s eta_min}"}};
  const AssumptionReport ar = check_assumptions(coeffs.a, coeffs.b, weight_spec(c, c.weights.lambda.front(), c.weights.s.front()), g);
  rep.results["assumptions"] = assumption_json(ar);
  rep.pass = {{"finite", finite}, {"nonnegative", nonneg}, {"stable", finite && spread(ratios) <= 5.0},
              {"inequality_with_ratio_max", holds}};
  if (!(finite && spread(ratios) <= 5.0)) rep.messages.push_back("ratio is not uniform across the (s, lambda) sweep");
}

// ---------------------------------------------------------------------------

void cmd_lemma_audit(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const StripGrid g = c.build_grid();
  const GridFunction q = make_fixture(c.fixture.audit, c.context()).sample(g);
  const auto lambdas = sorted_unique(c.weights.lambda);
  const auto svals = sorted_unique(c.weights.s);
  const auto reports = parallel_map(lambdas.size(), o.jobs, [&](std::size_t n) {
    return lemma_audit(q, weight_spec(c, lambdas[n], svals.front()), svals);
  });

  CsvTable t{"lemma_audit", {"lambda", "s", "lhs", "rhs", "lhs_over_rhs", "kappa_hat", "decay_factor", "time_cells"}, {}};
  bool bounded = true, halving = true;
  json per = json::object();
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    const LemmaReport& R = reports[n];
    const auto decay = R.decay_factors();
    double min_cells = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < R.rows.size(); ++k) {
      const LemmaRow& row = R.rows[k];
      const double cells = time_cells(build_weights(weight_spec(c, lambdas[n], row.s), g));
      min_cells = std::min(min_cells, cells);
      t.add({cell(lambdas[n]), cell(row.s), cell(row.lhs), cell(row.rhs),
             cell(row.rhs > 0.0 ? row.lhs / row.rhs : 0.0), cell(row.kappa_hat),
             cell(k == 0 ? std::numeric_limits<double>::quiet_NaN() : decay[k - 1]), cell(cells)});
    }
    // Doubling s should halve lhs/rhs; consecutive s values need not be doublings.
    bool halves = true;
    for (std::size_t k = 1; k < R.rows.size(); ++k) {
      const double expected = R.rows[k - 1].s / R.rows[k].s;
      halves = halves && std::abs(decay[k - 1] - expected) <= 0.25 * expected;
    }
    bounded = bounded && R.kappa_spread() <= 3.0;
    halving = halving && halves;
    per[key(lambdas[n])] = {{"kappa_max", R.kappa_max()}, {"kappa_spread", json_number(R.kappa_spread())},
                             {"decay_factors", decay}, {"min_time_cells", min_cells},
                             {"resolved", min_cells >= kResolvedCells}};
  }
  rep.tables.push_back(std::move(t));
  rep.results["per_lambda"] = per;
  rep.results["fixture"] = c.fixture.audit;
  rep.pass = {{"kappa_bounded", bounded}, {"rate_1_over_s", halving}};
}

// ---------------------------------------------------------------------------

struct InverseSetup {
  SpaceTimeFixture q_tilde;
  Profile alpha, gamma;
};

InverseSetup inverse_setup(const RunConfig& c) {
  return {make_fixture(c.fixture.q_tilde, c.context()), c.coefficients.alpha.profile, c.coefficients.gamma.profile};
}

TwinRun twin_for(const RunConfig& c, const InverseSetup& in, double scale, const CommandOptions& o) {
  const TwinExperiment exp = planted_twin(c.build_grid(), in.q_tilde, c.coefficients.a_tilde.profile,
                                          c.coefficients.b_tilde.profile, in.alpha.scaled(scale), in.gamma.scaled(scale));
  return run_twin(exp, o.jobs > 1);
}

double l2(const SpatialField& f) { return std::sqrt(integrate_space_squared(f, true)); }

void cmd_invert(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const InverseSetup in = inverse_setup(c);
  const TwinRun run = twin_for(c, in, 1.0, o);
  const StripGrid& g = run.u.grid();
  const Reconstruction ra = reconstruct_alpha(build_u_chain(run.u, in.q_tilde, run.base, c.run.smooth), run.base);
  const Reconstruction rg = reconstruct_gamma(build_v_chain(run.u, in.q_tilde, run.base, c.run.smooth), run.base);
  const NoiseFloor floor = solver_noise_floor(run, in.q_tilde, c.run.smooth);
  const SpatialField A = sample_interior(in.alpha, g), G = sample_interior(in.gamma, g);

  CsvTable t{"invert_reconstruction",
             {"x1", "x2", "alpha", "alpha_hat", "alpha_hat_imag", "gamma", "gamma_hat", "gamma_hat_imag"},
             {}};
  for (int i = 1; i < g.n1; ++i)
    for (int j = 1; j < g.n2; ++j)
      t.add({cell(g.x1(i)), cell(g.x2(j)), cell(A(i, j)), cell(ra.value(i, j)), cell(ra.imag(i, j)), cell(G(i, j)),
             cell(rg.value(i, j)), cell(rg.imag(i, j))});
  rep.tables.push_back(std::move(t));

  const double na = l2(A), ng = l2(G);
  const double ea = relative_l2_error(ra.value, A), eg = relative_l2_error(rg.value, G);
  rep.results = {{"alpha_norm", na},
                 {"gamma_norm", ng},
                 {"alpha_error", ea},
                 {"gamma_error", eg},
                 {"alpha_error_kind", na > 0.0 ? "relative" : "absolute"},
                 {"gamma_error_kind", ng > 0.0 ? "relative" : "absolute"},
                 {"alpha_max_abs_imag", ra.max_abs_imag},
                 {"gamma_max_abs_imag", rg.max_abs_imag},
                 {"alpha_max_abs", ra.max_abs_value},
                 {"gamma_max_abs", rg.max_abs_value},
                 {"noise_floor_alpha", floor.alpha},
                 {"noise_floor_gamma", floor.gamma},
                 {"max_abs_u", max_abs(run.u)}};
  if (na > 0.0) {
    rep.pass["alpha_error_le_15pct"] = ea <= 0.15;
    rep.pass["alpha_imag_le_5pct"] = ra.max_abs_imag <= 0.05 * na;
  } else {
    rep.pass["alpha_below_10x_floor"] = ra.max_abs_value <= 10.0 * floor.alpha;
  }
  if (ng > 0.0) {
    rep.pass["gamma_error_le_15pct"] = eg <= 0.15;
    rep.pass["gamma_imag_le_5pct"] = rg.max_abs_imag <= 0.05 * ng;
  } else {
    rep.pass["gamma_below_10x_floor"] = rg.max_abs_value <= 10.0 * floor.gamma;
  }
}

// ---------------------------------------------------------------------------

struct StabilityRow {
  double scale;
  StabilitySides sides;
  double cells;
};

std::vector<StabilityRow> stability_rows(const RunConfig& c, const CommandOptions& o, const std::vector<double>& scales,
                                         const std::vector<double>& lambdas) {
  const InverseSetup in = inverse_setup(c);
  std::vector<StabilityRow> out;
  for (std::size_t n = 0; n < scales.size(); ++n) {
    const double sc = scales[n];
    const TwinRun run = twin_for(c, in, sc, o);
    const StripGrid& g = run.u.grid();
    const SpatialField A = sample_interior(in.alpha.scaled(sc), g), G = sample_interior(in.gamma.scaled(sc), g);
    BoundaryTrace obs = observation_trace(run.u, c.run.side);
    if (c.run.noise_level > 0.0) obs = add_observation_noise(obs, c.run.noise_level, c.run.seed + 7919 * n);
    std::vector<SweepPoint> pts;
    for (double s : sorted_unique(c.weights.s))
      for (double l : lambdas) pts.push_back({s, l});
    auto rows = parallel_map(pts.size(), o.jobs, [&](std::size_t k) {
      const CarlemanWeights w = build_weights(weight_spec(c, pts[k].lambda, pts[k].s), g);
      return StabilityRow{sc, stability_sides(run.u, A, G, w, c.run.side, &obs), time_cells(w)};
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

void cmd_stability_audit(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const auto scales = sorted_unique(c.run.gap_scales);
  const auto rows = stability_rows(c, o, scales, {c.run.stability_lambda});

  CsvTable t{"stability_audit", {"scale", "s", "lambda", "lhs", "rhs_boundary", "rhs_initial", "ratio", "min_dnu_beta", "time_cells"},
             {}};
  std::map<double, std::vector<double>> ratios;
  std::map<double, std::map<double, const StabilitySides*>> table;
  for (const auto& r : rows) {
    const StabilitySides& S = r.sides;
    t.add({cell(r.scale), cell(S.s), cell(S.lambda), cell(S.lhs), cell(S.rhs_boundary), cell(S.rhs_initial),
           cell(S.ratio()), cell(S.min_dnu_beta), cell(r.cells)});
    ratios[r.scale].push_back(S.ratio());
    table[r.scale][S.s] = &S;
  }
  rep.tables.push_back(std::move(t));

  bool stable = true;
  json per = json::object();
  for (const auto& [sc, v] : ratios) {
    per[key(sc)] = {{"ratio_spread", json_number(spread(v))},
                     {"ratio_min", *std::min_element(v.begin(), v.end())},
                     {"ratio_max", *std::max_element(v.begin(), v.end())}};
    stable = stable && spread(v) <= 5.0;
  }
  rep.results["per_scale"] = per;
  rep.results["lambda"] = c.run.stability_lambda;
  rep.pass["ratio_spread_le_5"] = stable;

  // Gap scaling: lhs and rhs against (c / c0)^2 at every s.
  if (scales.size() > 1) {
    const double c0 = scales.front();
    bool lhs_ok = true;
    json sc_json = json::array();
    for (std::size_t n = 1; n < scales.size(); ++n) {
      const double expected = (scales[n] / c0) * (scales[n] / c0);
      for (const auto& [s, S] : table[scales[n]]) {
        const StabilitySides* S0 = table[c0][s];
        const double lr = S0->lhs > 0.0 ? S->lhs / S0->lhs : std::numeric_limits<double>::quiet_NaN();
        const double rr = S0->rhs() > 0.0 ? S->rhs() / S0->rhs() : std::numeric_limits<double>::quiet_NaN();
        lhs_ok = lhs_ok && std::abs(lr - expected) <= 0.2 * expected;
        sc_json.push_back({{"scale", scales[n]}, {"s", s}, {"expected", expected}, {"lhs_factor", json_number(lr)},
                           {"rhs_factor", json_number(rr)}});
      }
    }
    rep.results["gap_scaling"] = sc_json;
    rep.pass["lhs_scaling_within_20pct"] = lhs_ok;
  }
  rep.results["noise_level"] = c.run.noise_level;
  rep.results["seed"] = c.run.seed;
}

// ---------------------------------------------------------------------------

void cmd_sweep(const RunConfig& c, const CommandOptions& o, AuditReport& rep) {
  const StripGrid g = c.build_grid();
  const CoefficientField coeffs = build_coefficients(c.coefficients.a.profile, c.coefficients.b.profile, g);
  const GridFunction q = make_fixture(c.fixture.audit, c.context()).sample(g);

  CsvTable t{"sweep", {"audit", "variant", "s", "lambda", "lhs", "rhs", "ratio"}, {}};
  std::map<std::string, std::vector<double>> ratios;
  for (int v : {1, 2}) {
    for (const auto& r : carleman_rows(c, o, static_cast<EstimateVariant>(v), q, coeffs)) {
      const std::string name = "carleman-" + std::to_string(v);
      t.add({name, cell(v), cell(r.sides.s), cell(r.sides.lambda), cell(r.sides.lhs()), cell(r.sides.rhs()),
             cell(r.sides.ratio())});
      ratios[name].push_back(r.sides.ratio());
    }
  }
  const auto lambdas = sorted_unique(c.weights.lambda);
  const auto svals = sorted_unique(c.weights.s);
  const auto lemma = parallel_map(lambdas.size(), o.jobs, [&](std::size_t n) {
    return lemma_audit(q, weight_spec(c, lambdas[n], svals.front()), svals);
  });
  // Lemma rows report kappa_hat = s lhs / rhs as the ratio. Lemma and stability
  // spreads are taken per lambda, across s.
  for (std::size_t n = 0; n < lambdas.size(); ++n)
    for (const auto& row : lemma[n].rows) {
      t.add({"lemma", cell(0), cell(row.s), cell(lambdas[n]), cell(row.lhs), cell(row.rhs), cell(row.kappa_hat)});
      ratios["lemma@lambda=" + key(lambdas[n])].push_back(row.kappa_hat);
    }
  for (const auto& r : stability_rows(c, o, {1.0}, lambdas)) {
    t.add({"stability", cell(0), cell(r.sides.s), cell(r.sides.lambda), cell(r.sides.lhs), cell(r.sides.rhs()),
           cell(r.sides.ratio())});
    ratios["stability@lambda=" + key(r.sides.lambda)].push_back(r.sides.ratio());
  }
  rep.tables.push_back(std::move(t));
  bool lemma_ok = true, stab_ok = true;
  for (const auto& [name, v] : ratios) {
    const double sp = spread(v);
    rep.results[name] = {{"ratio_spread", json_number(sp)}};
    if (name.rfind("lemma@", 0) == 0) lemma_ok = lemma_ok && sp <= 3.0;
    if (name.rfind("stability@", 0) == 0) stab_ok = stab_ok && sp <= 5.0;
  }
  rep.pass = {{"carleman_stable", spread(ratios["carleman-2"]) <= 5.0}, {"lemma_bounded", lemma_ok},
              {"stability_stable", stab_ok}};
}

using Handler = std::function<void(const RunConfig&, const CommandOptions&, AuditReport&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{{"check-weights", cmd_check_weights},
                                                {"forward", cmd_forward},
                                                {"carleman-audit", cmd_carleman_audit},
                                                {"lemma-audit", cmd_lemma_audit},
                                                {"invert", cmd_invert},
                                                {"stability-audit", cmd_stability_audit},
                                                {"sweep", cmd_sweep}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"check-weights", "forward",         "carleman-audit", "lemma-audit",
                                              "invert",        "stability-audit", "sweep"};
  return names;
}

AuditReport run_command(const std::string& name, const RunConfig& config, const CommandOptions& options) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ConfigError("unknown command '" + name + "'");
  const auto t0 = std::chrono::steady_clock::now();
  AuditReport rep;
  rep.command = name;
  rep.digest = config.digest();
  it->second(config, options, rep);
  rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<std::filesystem::path> emit_report(const AuditReport& report, const RunConfig& config,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string stamp = utc_timestamp();
  std::vector<std::filesystem::path> paths;
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!(out << text)) throw NumericalError("cannot write '" + p.string() + "'");
    paths.push_back(p);
  };
  json tables = json::array();
  for (const auto& t : report.tables) {
    write(dir / (t.name + ".csv"), t.render(report.command, report.digest, stamp));
    tables.push_back(t.name + ".csv");
  }
  json j = {{"command", report.command},
            {"schema", kCsvSchema},
            {"digest", report.digest},
            {"timestamp", stamp},
            {"wall_clock_seconds", report.wall_clock},
            {"exit_code", report.exit_code},
            {"config", config.to_json()},
            {"seed_from_env", config.run.seed_from_env},
            {"tables", tables},
            {"results", report.results},
            {"pass", report.pass},
            {"messages", report.messages}};
  write(dir / (report.command + ".json"), j.dump(2) + "\n");
  return paths;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const AssumptionError*>(&e)) return 4;
  return 3;
}

}  // namespace carleman
