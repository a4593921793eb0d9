#include "bsheat/linsolve.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace bsheat {

namespace {

// Deterministic probe vector (xorshift64), entries in [-1, 1].
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> probe_vector(Eigen::Index n) {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto draw = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return 2.0 * (static_cast<double>(state >> 11) / 9007199254740992.0) - 1.0;
  };
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
      const double re = draw(), im = draw();
      w[i] = Scalar(re, im);
    } else {
      w[i] = draw();
    }
  }
  return w;
}

template <typename Scalar>
double inf_norm(const Eigen::SparseMatrix<Scalar>& M) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(M.rows());
  for (int col = 0; col < M.outerSize(); ++col)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(M, col); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  return M.rows() == 0 ? 0.0 : row_sums.maxCoeff();
}

} // namespace

template <typename Scalar>
SparseFactorizationT<Scalar>::SparseFactorizationT(const Matrix& M) : M_(M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("SparseFactorization: matrix must be square");
  M_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Matrix>>();
  lu_->compute(M_);
  if (lu_->info() != Eigen::Success)
    throw SingularSystemError("sparse factorization failed (numerically singular matrix): " +
                              std::string(lu_->lastErrorMessage()));
  norm_inf_ = inf_norm(M_);

  // Rank-deficiency probe: for a singular M the computed solution of
  // M x = M w wanders along the near-kernel and differs visibly from w.
  const Vector w = probe_vector<Scalar>(M_.rows());
  const Vector x = lu_->solve(M_ * w);
  probe_error_ = (x - w).norm() / w.norm();
  if (!(probe_error_ < 1e-6))
    throw SingularSystemError("matrix is numerically singular (rank-deficiency probe error " +
                              std::to_string(probe_error_) + ")");
}

template <typename Scalar>
typename SparseFactorizationT<Scalar>::Vector SparseFactorizationT<Scalar>::solve(const Vector& rhs) const {
  const Vector x = lu_->solve(rhs);
  const double denom = norm_inf_ * x.norm() + rhs.norm();
  const double residual = (M_ * x - rhs).norm() / (denom > 0.0 ? denom : 1.0);
  if (!(residual < 1e-10))
    throw SingularSystemError("sparse solve exceeded the residual tolerance (relative residual " +
                              std::to_string(residual) + ")");
  return x;
}

template class SparseFactorizationT<double>;
template class SparseFactorizationT<std::complex<double>>;

Eigen::VectorXd solve_sparse(const SpMat& M, const Eigen::VectorXd& rhs) {
  return SparseFactorization(M).solve(rhs);
}

Eigen::VectorXcd solve_sparse(const SpMatC& M, const Eigen::VectorXcd& rhs) {
  return ComplexSparseFactorization(M).solve(rhs);
}

double SpectrumReport::sigma_max() const {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : eigenvalues) s = std::max(s, -lambda.real());
  return s;
}

SpectrumReport generalized_eigs(const SpMat& B, const SpMat& A, int dense_cutoff) {
  if (B.rows() != B.cols() || A.rows() != A.cols() || B.rows() != A.rows())
    throw std::invalid_argument("generalized_eigs: B and A must be square and of equal size");
  const int n = static_cast<int>(B.rows());
  if (n > dense_cutoff)
    throw std::invalid_argument("generalized_eigs: dimension " + std::to_string(n) +
                                " exceeds the dense cutoff " + std::to_string(dense_cutoff) +
                                "; coarsen the mesh (fewer rings)");
  if (n == 0) return {};

  // Dense QZ on B x = lambda A x.
  Eigen::MatrixXd Bd(B), Ad(A);
  std::vector<double> alphar(n), alphai(n), beta(n);
  Eigen::MatrixXd vl(n, n), vr(n, n);
  const lapack_int info =
      LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'V', n, Bd.data(), n, Ad.data(), n, alphar.data(),
                    alphai.data(), beta.data(), vl.data(), n, vr.data(), n);
  if (info < 0)
    throw std::invalid_argument("generalized_eigs: invalid argument " + std::to_string(-info) +
                                " passed to the QZ driver");
  if (info > 0)
    throw std::runtime_error("generalized_eigs: QZ iteration failed to converge (info " +
                             std::to_string(info) + ")");

  // Unpack eigenvectors; complex conjugate pairs are stored as two real
  // columns (real part, imaginary part).
  Eigen::MatrixXcd vecs(n, n);
  for (int j = 0; j < n;) {
    if (alphai[j] != 0.0 && j + 1 < n) {
      vecs.col(j) = vr.col(j).cast<std::complex<double>>() +
                    std::complex<double>(0.0, 1.0) * vr.col(j + 1).cast<std::complex<double>>();
      vecs.col(j + 1) = vecs.col(j).conjugate();
      j += 2;
    } else {
      vecs.col(j) = vr.col(j).cast<std::complex<double>>();
      j += 1;
    }
  }

  double beta_max = 0.0;
  for (int j = 0; j < n; ++j) beta_max = std::max(beta_max, std::abs(beta[j]));
  const double beta_tol = 1e-12 * beta_max;

  std::vector<int> finite;
  finite.reserve(n);
  int infinite_count = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(beta[j]) <= beta_tol)
      ++infinite_count;  // discretization artifact of the mass near-kernel
    else
      finite.push_back(j);
  }

  // Stable order: ascending real part, then imaginary part.
  std::sort(finite.begin(), finite.end(), [&](int a, int b) {
    const double ra = alphar[a] / beta[a], rb = alphar[b] / beta[b];
    if (ra != rb) return ra < rb;
    return alphai[a] / beta[a] < alphai[b] / beta[b];
  });

  const double normA = inf_norm(A), normB = inf_norm(B);
  const SpMatC Bc = B.cast<std::complex<double>>(), Ac = A.cast<std::complex<double>>();

  SpectrumReport report;
  report.eigenvalues.reserve(finite.size());
  report.residuals.reserve(finite.size());
  report.eigenvectors.resize(n, static_cast<Eigen::Index>(finite.size()));
  report.infinite_count = infinite_count;
  for (size_t idx = 0; idx < finite.size(); ++idx) {
    const int j = finite[idx];
    const std::complex<double> lambda(alphar[j] / beta[j], alphai[j] / beta[j]);
    const Eigen::VectorXcd x = vecs.col(j);
    const double res = (Bc * x - lambda * (Ac * x)).norm() /
                       ((std::abs(lambda) * normA + normB) * x.norm());
    report.eigenvalues.push_back(lambda);
    report.residuals.push_back(res);
    report.eigenvectors.col(static_cast<Eigen::Index>(idx)) = x;
  }
  return report;
}

SpectrumReport generalized_eigs(const Pencil& pencil, double mesh_h, int dense_cutoff) {
  SpectrumReport report = generalized_eigs(pencil.B_stiff, pencil.A_mass, dense_cutoff);
  report.k = pencil.k;
  report.l = pencil.l;
  report.h = mesh_h;
  return report;
}

void write_spectrum_csv(const SpectrumReport& report, std::ostream& out) {
  out << "re_lambda,im_lambda,residual\n";
  char buf[96];
  for (size_t i = 0; i < report.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", report.eigenvalues[i].real(),
                  report.eigenvalues[i].imag(), report.residuals[i]);
    out << buf << '\n';
  }
}

} // namespace bsheat
