#include "floquet/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <string>

namespace floquet {

namespace {

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void check_info(lapack_int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string(routine) + " failed with info = " + std::to_string(info));
}

}  // namespace

HermitianEigen hermitian_eigen(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigen: non-square input");
  const lapack_int n = lapack_int(h.rows());
  HermitianEigen out;
  out.vectors = h;
  out.values.resize(n);
  if (n == 0) return out;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, as_lapack(out.vectors.data()), n,
                            out.values.data()),
             "zheevd");
  return out;
}

SchurForm schur(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("schur: non-square input");
  const lapack_int n = lapack_int(a.rows());
  Matrix t = a;
  SchurForm out;
  out.diagonal.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  lapack_int sdim = 0;
  check_info(LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, as_lapack(t.data()), n, &sdim,
                           as_lapack(out.diagonal.data()), as_lapack(out.vectors.data()), n),
             "zgees");
  out.off_diagonal = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  return out;
}

Matrix nearest_unitary(const Matrix& a) {
  const lapack_int n = lapack_int(a.rows());
  Matrix work = a;
  Matrix u(n, n), vt(n, n);
  RealVector s(n);
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', n, n, as_lapack(work.data()), n, s.data(),
                            as_lapack(u.data()), n, as_lapack(vt.data()), n),
             "zgesdd");
  return u * vt;
}

Matrix exp_hermitian(const Matrix& h, double t) {
  const auto e = hermitian_eigen(h);
  return spectral_function(e, [t](double x) { return std::exp(cplx(0, -t * x)); });
}

}  // namespace floquet
