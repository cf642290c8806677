#include "carleman/jet.hpp"

#include <cmath>
#include <vector>

namespace carleman {

namespace {

constexpr int kMaxNilpotency = Jet::kTimeOrder + Jet::kSpaceOrder;

struct Term {
  int a;
  int b;
  int out;
};

struct Exponents {
  int kt, p1, p2;
};

Exponents exponents_of(int idx) {
  const int kt = idx / Jet::kSpaceTerms;
  int m = idx % Jet::kSpaceTerms;
  int n = 0;
  while ((n + 1) * (n + 2) / 2 <= m) ++n;
  const int p2 = m - n * (n + 1) / 2;
  return {kt, n - p2, p2};
}

// All (a, b) -> out products that survive truncation, grouped by output index in
// increasing order so division can be solved by forward substitution.
const std::vector<Term>& product_table() {
  static const std::vector<Term> table = [] {
    std::vector<Term> t;
    for (int out = 0; out < Jet::kSize; ++out) {
      const Exponents eo = exponents_of(out);
      for (int a = 0; a < Jet::kSize; ++a) {
        const Exponents ea = exponents_of(a);
        const int kt = eo.kt - ea.kt, p1 = eo.p1 - ea.p1, p2 = eo.p2 - ea.p2;
        if (kt < 0 || p1 < 0 || p2 < 0) continue;
        t.push_back({a, Jet::index(kt, p1, p2), out});
      }
    }
    return t;
  }();
  return table;
}

bool is_scalar(const std::array<std::complex<double>, Jet::kSize>& c) {
  for (int n = 1; n < Jet::kSize; ++n)
    if (c[std::size_t(n)] != 0.0) return false;
  return true;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Jet Jet::variable_t(double t0) {
  Jet j(t0);
  j.c_[index(1, 0, 0)] = 1.0;
  return j;
}

Jet Jet::variable_x1(double x0) {
  Jet j(x0);
  j.c_[index(0, 1, 0)] = 1.0;
  return j;
}

Jet Jet::variable_x2(double x0) {
  Jet j(x0);
  j.c_[index(0, 0, 1)] = 1.0;
  return j;
}

std::complex<double> Jet::derivative(int kt, int p1, int p2) const {
  return c_[index(kt, p1, p2)] * (factorial(kt) * factorial(p1) * factorial(p2));
}

Jet Jet::dt() const {
  Jet r;
  for (int kt = 0; kt < kTimeOrder; ++kt)
    for (int m = 0; m < kSpaceTerms; ++m) r.c_[kt * kSpaceTerms + m] = double(kt + 1) * c_[(kt + 1) * kSpaceTerms + m];
  return r;
}

Jet Jet::dx1() const {
  Jet r;
  for (int kt = 0; kt <= kTimeOrder; ++kt)
    for (int n = 0; n < kSpaceOrder; ++n)
      for (int p2 = 0; p2 <= n; ++p2) {
        const int p1 = n - p2;
        r.c_[index(kt, p1, p2)] = double(p1 + 1) * c_[index(kt, p1 + 1, p2)];
      }
  return r;
}

Jet Jet::dx2() const {
  Jet r;
  for (int kt = 0; kt <= kTimeOrder; ++kt)
    for (int n = 0; n < kSpaceOrder; ++n)
      for (int p2 = 0; p2 <= n; ++p2) {
        const int p1 = n - p2;
        r.c_[index(kt, p1, p2)] = double(p2 + 1) * c_[index(kt, p1, p2 + 1)];
      }
  return r;
}

Jet Jet::laplacian() const { return dx1().dx1() + dx2().dx2(); }

Jet& Jet::operator+=(const Jet& o) {
  for (int n = 0; n < kSize; ++n) c_[n] += o.c_[n];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (int n = 0; n < kSize; ++n) c_[n] -= o.c_[n];
  return *this;
}

Jet& Jet::operator*=(std::complex<double> s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  // plain values take the scalar path; this keeps point evaluation cheap
  if (is_scalar(a.c_)) return b * a.c_[0];
  if (is_scalar(b.c_)) return a * b.c_[0];
  Jet r;
  for (const Term& t : product_table()) r.c_[t.out] += a.c_[t.a] * b.c_[t.b];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  // Solve r * b = a by forward substitution: out index grows along the table.
  if (is_scalar(b.c_)) return a * (1.0 / b.c_[0]);
  Jet r;
  const auto& table = product_table();
  const std::complex<double> b0 = b.c_[0];
  std::size_t pos = 0;
  for (int out = 0; out < Jet::kSize; ++out) {
    std::complex<double> acc = a.c_[out];
    for (; pos < table.size() && table[pos].out == out; ++pos) {
      if (table[pos].b == 0) continue;
      acc -= r.c_[table[pos].a] * b.c_[table[pos].b];
    }
    r.c_[out] = acc / b0;
  }
  return r;
}

Jet Jet::compose(const Jet& u, std::span<const std::complex<double>> taylor) {
  Jet delta = u;
  delta.c_[0] = 0.0;
  if (is_scalar(delta.c_)) return Jet(taylor.empty() ? std::complex<double>(0.0) : taylor.front());
  Jet r(taylor.empty() ? std::complex<double>(0.0) : taylor.back());
  for (int k = int(taylor.size()) - 2; k >= 0; --k) {
    r = r * delta;
    r.c_[0] += taylor[std::size_t(k)];
  }
  return r;
}

Jet exp(const Jet& u) {
  std::array<std::complex<double>, kMaxNilpotency + 1> tc;
  const std::complex<double> e = std::exp(u.value());
  for (int k = 0; k <= kMaxNilpotency; ++k) tc[std::size_t(k)] = e / factorial(k);
  return Jet::compose(u, tc);
}

Jet sin(const Jet& u) {
  std::array<std::complex<double>, kMaxNilpotency + 1> tc;
  const std::complex<double> s = std::sin(u.value()), c = std::cos(u.value());
  const std::complex<double> cycle[4] = {s, c, -s, -c};
  for (int k = 0; k <= kMaxNilpotency; ++k) tc[std::size_t(k)] = cycle[k % 4] / factorial(k);
  return Jet::compose(u, tc);
}

Jet cos(const Jet& u) {
  std::array<std::complex<double>, kMaxNilpotency + 1> tc;
  const std::complex<double> s = std::sin(u.value()), c = std::cos(u.value());
  const std::complex<double> cycle[4] = {c, -s, -c, s};
  for (int k = 0; k <= kMaxNilpotency; ++k) tc[std::size_t(k)] = cycle[k % 4] / factorial(k);
  return Jet::compose(u, tc);
}

Jet reciprocal(const Jet& u) { return Jet(1.0) / u; }

}  // namespace carleman
