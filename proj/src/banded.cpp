#include "carleman/banded.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <string>

#include "carleman/errors.hpp"

namespace carleman {

ComplexBandedLu::ComplexBandedLu(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(std::size_t(ldab_) * std::size_t(n)), ipiv_(std::size_t(n)) {
  if (n <= 0 || kl < 0 || ku < 0) throw PreconditionError("banded matrix: invalid dimensions");
}

void ComplexBandedLu::set(int row, int col, std::complex<double> value) {
  if (factorized_) throw PreconditionError("banded matrix: already factorized");
  if (row - col > kl_ || col - row > ku_) throw PreconditionError("banded matrix: entry outside the band");
  ab_[std::size_t(kl_ + ku_ + row - col) + std::size_t(col) * std::size_t(ldab_)] = value;
}

std::complex<double> ComplexBandedLu::get(int row, int col) const {
  if (row - col > kl_ || col - row > ku_) return 0.0;
  return ab_[std::size_t(kl_ + ku_ + row - col) + std::size_t(col) * std::size_t(ldab_)];
}

void ComplexBandedLu::factorize(double min_rcond) {
  double anorm = 0.0;
  for (int col = 0; col < n_; ++col) {
    double sum = 0.0;
    for (int row = std::max(0, col - ku_); row <= std::min(n_ - 1, col + kl_); ++row) sum += std::abs(get(row, col));
    anorm = std::max(anorm, sum);
  }
  lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
  if (info > 0) throw NumericalError("banded LU: matrix is singular (zero pivot at row " + std::to_string(info) + ")");
  if (info < 0) throw NumericalError("banded LU: invalid argument " + std::to_string(-info));
  info = LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data(), anorm, &rcond_);
  if (info != 0) throw NumericalError("banded LU: condition estimate failed");
  factorized_ = true;
  if (rcond_ < min_rcond) throw NumericalError("banded LU: ill-conditioned matrix (rcond = " + std::to_string(rcond_) + ")");
}

void ComplexBandedLu::solve(std::span<std::complex<double>> rhs) const {
  if (!factorized_) throw PreconditionError("banded LU: solve before factorize");
  if (int(rhs.size()) != n_) throw PreconditionError("banded LU: right-hand side has the wrong length");
  const lapack_int info =
      LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_, ipiv_.data(), rhs.data(), n_);
  if (info != 0) throw NumericalError("banded LU: back substitution failed");
}

}  // namespace carleman
