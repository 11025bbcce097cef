#pragma once

// Small dense helpers shared by every module: compound (exterior power)
// matrices, wedge norms, frames and principal angles. Templated on the scalar
// so the extended-precision oracles reuse the same code paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace anosov {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Increasing p-subsets of {0,...,d-1} in lexicographic order; this ordering
/// indexes the standard basis e_I = e_{i1} ^ ... ^ e_{ip} of the p-th exterior
/// power.
std::vector<std::vector<int>> subsets(int d, int p);

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// p-th compound matrix: entry (I, J) is the minor det M[I, J]. This is the
/// matrix of the p-th exterior power in the orthonormal basis e_I, so
/// sigma_1(C_p(M)) = sigma_1(M) ... sigma_p(M).
template <typename Derived>
MatX<typename Derived::Scalar> compound_matrix(const Eigen::MatrixBase<Derived>& m, int p) {
  using Scalar = typename Derived::Scalar;
  const int d = static_cast<int>(m.rows());
  const auto idx = subsets(d, p);
  const int n = static_cast<int>(idx.size());
  MatX<Scalar> out(n, n);
  MatX<Scalar> block(p, p);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) block(i, j) = m(idx[a][i], idx[b][j]);
      out(a, b) = p == 1 ? block(0, 0) : block.determinant();
    }
  }
  return out;
}

/// log ||v_1 ^ ... ^ v_p|| for the columns of v, via the R factor of a QR
/// decomposition (|det R| is the p-volume).
template <typename Derived>
typename Derived::Scalar log_wedge_norm(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Eigen::HouseholderQR<MatX<Scalar>> qr(v);
  const auto& r = qr.matrixQR();
  Scalar acc = 0;
  for (int i = 0; i < v.cols(); ++i) acc += std::log(std::abs(r(i, i)));
  return acc;
}

/// Orthonormal basis of the column span (columns assumed independent); the
/// first k columns of the result span the first k input columns.
template <typename Derived>
MatX<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Eigen::HouseholderQR<MatX<Scalar>> qr(v);
  MatX<Scalar> q = qr.householderQ() * MatX<Scalar>::Identity(v.rows(), v.cols());
  // Fix column signs so that q^T v has a positive diagonal.
  const auto& r = qr.matrixQR();
  for (int i = 0; i < v.cols(); ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

/// Sign canonicalization for projective classes: the first entry whose
/// magnitude exceeds tol is made positive.
template <typename Derived>
void sign_canonicalize(Eigen::MatrixBase<Derived>& v, typename Derived::Scalar tol = 1e-12) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

/// Sine of the smallest principal angle between span(P) and span(Q), with
/// orthonormal columns and dim P <= dim Q. Computed as the smallest singular
/// value of the component of P orthogonal to Q, which stays accurate for
/// nearly-aligned subspaces.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar min_angle_sine(const Eigen::MatrixBase<DerivedP>& p,
                                         const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  MatX<Scalar> resid = p - q * (q.transpose() * p);
  Eigen::JacobiSVD<MatX<Scalar>> svd(resid);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Random matrix with i.i.d. standard normal entries.
template <typename Rng>
Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix).
template <typename Rng>
Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  return orthonormalize(gaussian_matrix(d, d, rng));
}

/// Divides by |det|^{1/d}; afterwards |det| = 1.
Eigen::MatrixXd normalize_determinant(const Eigen::MatrixXd& m);

}  // namespace anosov
