#pragma once

#include <array>
#include <complex>
#include <span>

namespace carleman {

// Truncated multivariate Taylor expansion in (t, x1, x2) around a point.
//
// Coefficients are stored as c[kt][m] = d^kt_t d^p1_x1 d^p2_x2 f / (kt! p1! p2!),
// with time order kt <= kTimeOrder and spatial total order p1 + p2 <= kSpaceOrder.
// Arithmetic truncates in both groups, so closed-form fixtures evaluated on
// seeded variables yield every partial derivative up to those orders exactly.
// Differentiation lowers the valid order of the result; callers never read
// beyond it.
class Jet {
 public:
  static constexpr int kTimeOrder = 3;
  static constexpr int kSpaceOrder = 4;
  static constexpr int kSpaceTerms = (kSpaceOrder + 1) * (kSpaceOrder + 2) / 2;
  static constexpr int kSize = (kTimeOrder + 1) * kSpaceTerms;

  Jet() = default;
  Jet(std::complex<double> constant) { c_[0] = constant; }  // NOLINT: implicit scalar lift
  Jet(double constant) { c_[0] = constant; }                // NOLINT

  static Jet variable_t(double t0);
  static Jet variable_x1(double x0);
  static Jet variable_x2(double x0);

  static constexpr int space_index(int p1, int p2) {
    const int n = p1 + p2;
    return n * (n + 1) / 2 + p2;
  }
  static constexpr int index(int kt, int p1, int p2) { return kt * kSpaceTerms + space_index(p1, p2); }

  std::complex<double> coefficient(int kt, int p1, int p2) const { return c_[index(kt, p1, p2)]; }
  std::complex<double>& coefficient(int kt, int p1, int p2) { return c_[index(kt, p1, p2)]; }
  // Partial derivative d^kt_t d^p1_x1 d^p2_x2 at the expansion point.
  std::complex<double> derivative(int kt, int p1, int p2) const;
  std::complex<double> value() const { return c_[0]; }

  Jet dt() const;
  Jet dx1() const;
  Jet dx2() const;
  Jet laplacian() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(std::complex<double> s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, std::complex<double> s) { return a *= s; }
  friend Jet operator*(std::complex<double> s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  // f(u) for an analytic f given its Taylor coefficients f^(k)(u0)/k! at u0 = u.value().
  static Jet compose(const Jet& u, std::span<const std::complex<double>> taylor);

 private:
  std::array<std::complex<double>, kSize> c_{};
};

Jet exp(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet reciprocal(const Jet& u);

}  // namespace carleman
