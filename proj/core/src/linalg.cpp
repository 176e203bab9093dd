#include "qlab/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>

namespace qlab {

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RVec singular_values(const Mat& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  Mat work = m;  // gesvd destroys its input
  RVec s(std::min(rows, cols));
  RVec superb(std::max<lapack_int>(1, std::min(rows, cols) - 1));
  lapack_int info = LAPACKE_zgesvd(
      LAPACK_COL_MAJOR, 'N', 'N', rows, cols,
      reinterpret_cast<lapack_complex_double*>(work.data()), rows, s.data(),
      nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw std::runtime_error("zgesvd failed, info=" + std::to_string(info));
  return s;
}

RVec eigvals_hermitian(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigvals_hermitian: not square");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Mat work = m;
  RVec w(n);
  lapack_int info = LAPACKE_zheev(
      LAPACK_COL_MAJOR, 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, w.data());
  if (info != 0) throw std::runtime_error("zheev failed, info=" + std::to_string(info));
  return w;
}

RVec eigvals_symmetric_inplace(RMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigvals_symmetric: not square");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  RVec w(n);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed, info=" + std::to_string(info));
  return w;
}

HermitianEig eig_hermitian(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_hermitian: not square");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  HermitianEig out;
  out.vectors = m;
  out.values.resize(n);
  lapack_int info = LAPACKE_zheev(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
      out.values.data());
  if (info != 0) throw std::runtime_error("zheev failed, info=" + std::to_string(info));
  return out;
}

double trace_norm(const Mat& m) { return singular_values(m).sum(); }

double trace_norm_hermitian(const Mat& m) {
  return eigvals_hermitian(m).cwiseAbs().sum();
}

}  // namespace qlab
