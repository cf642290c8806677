#include "carleman/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace carleman {

Profile::Profile(std::string name, Fn fn, bool depends_on_x1)
    : name_(std::move(name)), fn_(std::move(fn)), depends_on_x1_(depends_on_x1) {}

Jet Profile::jet(double x1, double x2) const { return fn_(Jet::variable_x1(x1), Jet::variable_x2(x2)); }

double Profile::value(double x1, double x2) const { return fn_(Jet(x1), Jet(x2)).value().real(); }

Profile Profile::scaled(double factor) const {
  auto fn = fn_;
  std::ostringstream name;
  name << factor << '*' << name_;
  return Profile(name.str(), [fn, factor](const Jet& x1, const Jet& x2) { return fn(x1, x2) * factor; }, depends_on_x1_);
}

Profile operator+(const Profile& a, const Profile& b) {
  auto fa = a.fn_, fb = b.fn_;
  return Profile(a.name_ + " + " + b.name_, [fa, fb](const Jet& x1, const Jet& x2) { return fa(x1, x2) + fb(x1, x2); },
                 a.depends_on_x1_ || b.depends_on_x1_);
}

Profile operator-(const Profile& a, const Profile& b) {
  auto fa = a.fn_, fb = b.fn_;
  return Profile(a.name_ + " - (" + b.name_ + ")",
                 [fa, fb](const Jet& x1, const Jet& x2) { return fa(x1, x2) - fb(x1, x2); },
                 a.depends_on_x1_ || b.depends_on_x1_);
}

std::vector<std::string> profile_names() {
  return {"quadratic", "exp-decreasing", "exp-increasing", "linear", "constant", "zero", "sin-bump", "cos-bump", "x1-bump"};
}

Profile make_profile(const std::string& name, const ProfileContext& ctx) {
  const double d = ctx.d;
  const double width = 0.2 * ctx.L;  // exp(-25) ~ 1e-11 at x1 = +-L
  const double k = std::numbers::pi / d;
  if (name == "quadratic")
    return Profile(name, [](const Jet&, const Jet& x2) { return (x2 * x2 + Jet(5.0)) * 0.5; }, false);
  if (name == "exp-decreasing") return Profile(name, [](const Jet&, const Jet& x2) { return exp(-x2); }, false);
  if (name == "exp-increasing") return Profile(name, [](const Jet&, const Jet& x2) { return exp(x2); }, false);
  if (name == "linear") return Profile(name, [](const Jet&, const Jet& x2) { return x2; }, false);
  if (name == "constant") return Profile(name, [](const Jet&, const Jet&) { return Jet(1.0); }, false);
  if (name == "zero") return Profile(name, [](const Jet&, const Jet&) { return Jet(0.0); }, false);
  if (name == "sin-bump")
    return Profile(name, [k, d](const Jet&, const Jet& x2) { return sin((x2 - Jet(d)) * k); }, false);
  if (name == "x1-bump")
    return Profile(name, [width](const Jet& x1, const Jet&) { return exp(-(x1 * x1) * (1.0 / (width * width))); }, true);
  if (name == "cos-bump")
    return Profile(
        name,
        [k, d, width](const Jet& x1, const Jet& x2) {
          return cos((x2 - Jet(d)) * k) * exp(-(x1 * x1) * (1.0 / (width * width)));
        },
        true);
  throw ConfigError("unknown profile '" + name + "'");
}

Profile tabulated_profile(std::istream& in, const std::string& name) {
  struct Row {
    double x2, v, d1, d2;
  };
  auto rows = std::make_shared<std::vector<Row>>();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    Row r{};
    if (!(is >> r.x2 >> r.v >> r.d1 >> r.d2)) {
      if (rows->empty()) continue;  // header
      throw ConfigError(name + " line " + std::to_string(line_no) + ": expected x2, value, d/dx2, d2/dx2^2");
    }
    if (!rows->empty() && r.x2 <= rows->back().x2)
      throw ConfigError(name + " line " + std::to_string(line_no) + ": x2 must be strictly increasing");
    rows->push_back(r);
  }
  if (rows->size() < 2) throw ConfigError(name + ": need at least two rows");
  auto fn = [rows, name](const Jet&, const Jet& x2) {
    const double x = x2.value().real();
    const auto& r = *rows;
    const double tol = 1e-9 * (1.0 + std::abs(r.back().x2));
    if (x < r.front().x2 - tol || x > r.back().x2 + tol)
      throw PreconditionError(name + ": x2 = " + std::to_string(x) + " outside the tabulated range");
    auto it = std::upper_bound(r.begin(), r.end(), x, [](double v, const Row& row) { return v < row.x2; });
    std::size_t hi = std::clamp<std::size_t>(std::size_t(it - r.begin()), 1, r.size() - 1);
    const Row& a = r[hi - 1];
    const Row& b = r[hi];
    const double w = (x - a.x2) / (b.x2 - a.x2);
    const std::array<std::complex<double>, 3> taylor = {(1 - w) * a.v + w * b.v, (1 - w) * a.d1 + w * b.d1,
                                                         0.5 * ((1 - w) * a.d2 + w * b.d2)};
    return Jet::compose(x2, taylor);
  };
  return Profile(name, fn, false);
}

SpatialDerivs spatial_derivs(const Jet& j) {
  auto r = [&](int p1, int p2) { return j.derivative(0, p1, p2).real(); };
  return {r(0, 0), r(1, 0), r(0, 1), r(2, 0), r(1, 1), r(0, 2), r(3, 0), r(2, 1), r(1, 2), r(0, 3)};
}

SampledField::SampledField(const Profile& profile, const StripGrid& grid)
    : grid_(grid), name_(profile.name()), depends_on_x1_(profile.depends_on_x1()), nodes_(grid.spatial_size()) {
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) nodes_[grid.spatial_index(i, j)] = spatial_derivs(profile.jet(grid.x1(i), grid.x2(j)));
}

SpatialField SampledField::values() const {
  SpatialField f(grid_);
  for (std::size_t n = 0; n < nodes_.size(); ++n) f.values[n] = nodes_[n].v;
  return f;
}

double SampledField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) m = std::min(m, n.v);
  return m;
}

double SampledField::max_abs_value() const {
  double m = 0.0;
  for (const auto& n : nodes_) m = std::max(m, std::abs(n.v));
  return m;
}

CoefficientField build_coefficients(const Profile& a, const Profile& b, const StripGrid& grid) {
  CoefficientField c{SampledField(a, grid), SampledField(b, grid), 0.0};
  auto finite = [](const SpatialDerivs& s) {
    for (double v : {s.v, s.d1, s.d2, s.d11, s.d12, s.d22, s.d111, s.d112, s.d122, s.d222})
      if (!std::isfinite(v)) return false;
    return true;
  };
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j)
      if (!finite(c.a(i, j)) || !finite(c.b(i, j)))
        throw AssumptionError("coefficients: non-finite derivative table at node (" + std::to_string(i) + "," + std::to_string(j) + ")");
  c.a_min = c.a.min_value();
  if (!(c.a_min > 0.0))
    throw AssumptionError("coefficients: a must satisfy a >= a_min > 0 (min a = " + std::to_string(c.a_min) + ")");
  return c;
}

}  // namespace carleman
