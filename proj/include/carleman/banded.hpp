#pragma once

#include <complex>
#include <span>
#include <vector>

namespace carleman {

// General complex band matrix with an LU factorization (partial pivoting),
// stored in LAPACK band layout.
class ComplexBandedLu {
 public:
  ComplexBandedLu(int n, int kl, int ku);

  int size() const { return n_; }
  void set(int row, int col, std::complex<double> value);
  std::complex<double> get(int row, int col) const;

  // Raises NumericalError when the matrix is singular or its reciprocal
  // condition number falls below min_rcond.
  void factorize(double min_rcond = 1e-14);
  bool factorized() const { return factorized_; }
  double rcond() const { return rcond_; }

  // Overwrites rhs with the solution.
  void solve(std::span<std::complex<double>> rhs) const;

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<std::complex<double>> ab_;
  std::vector<int> ipiv_;
  bool factorized_ = false;
  double rcond_ = 0.0;
};

}  // namespace carleman
