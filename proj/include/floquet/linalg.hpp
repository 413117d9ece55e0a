#pragma once

#include "floquet/lattice.hpp"

namespace floquet {

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns are orthonormal eigenvectors
};

// LAPACK zheevd; the input is treated as exactly Hermitian (lower triangle read).
HermitianEigen hermitian_eigen(const Matrix& h);

struct SchurForm {
  Vector diagonal;   // eigenvalues of a normal matrix
  Matrix vectors;    // unitary Schur vectors
  double off_diagonal = 0;  // Frobenius norm of the strict upper triangle
};

// LAPACK zgees, complex Schur decomposition A = Z T Z^*.
SchurForm schur(const Matrix& a);

// Nearest unitary in Frobenius norm (polar factor) via SVD.
Matrix nearest_unitary(const Matrix& a);

// V f(E) V^* for a Hermitian eigensystem.
template <class F>
Matrix spectral_function(const HermitianEigen& e, F&& f) {
  Vector d(e.values.size());
  for (Index i = 0; i < d.size(); ++i) d(i) = f(e.values(i));
  return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

// e^{-i t H}
Matrix exp_hermitian(const Matrix& h, double t);

}  // namespace floquet
