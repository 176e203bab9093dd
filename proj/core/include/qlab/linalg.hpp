#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qlab {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Kronecker product, row-major register convention:
/// (a (x) b)[i*dim(b)+j] = a[i]*b[j].
Vec kron(const Vec& a, const Vec& b);
Mat kron(const Mat& a, const Mat& b);

/// Singular values in descending order (LAPACK gesvd).
RVec singular_values(const Mat& m);

/// Eigenvalues of a Hermitian matrix, ascending (LAPACK heev).
RVec eigvals_hermitian(const Mat& m);

/// Eigenvalues of a real symmetric matrix, ascending (LAPACK syev).
/// The input buffer is destroyed.
RVec eigvals_symmetric_inplace(RMat& m);

struct HermitianEig {
  RVec values;   // ascending
  Mat vectors;   // column k pairs with values[k]
};

/// Full Hermitian eigendecomposition (LAPACK heev, vectors included).
HermitianEig eig_hermitian(const Mat& m);

/// Sum of singular values. For Hermitian input prefer trace_norm_hermitian.
double trace_norm(const Mat& m);

/// Sum of |eigenvalues| for Hermitian m; cheaper than a full SVD.
double trace_norm_hermitian(const Mat& m);

}  // namespace qlab
