#pragma once

#include "bsheat/assembly.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <complex>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

namespace bsheat {

using SpMatC = Eigen::SparseMatrix<std::complex<double>>;

// Raised when a linear system is numerically singular.  For pencil systems
// lambda*A + B this is meaningful information: lambda sits (approximately) in
// the discrete spectrum.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sparse LU with a deterministic rank-deficiency probe.  The factorization is
// reusable across many right-hand sides (time stepping, resolvent sweeps).
// Construction throws SingularSystemError if the factorization fails or the
// probe solve M x = M w (fixed pseudo-random w) errs by more than 1e-6,
// which catches numerically singular matrices that LU "factorizes" anyway.
template <typename Scalar>
class SparseFactorizationT {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SparseFactorizationT(const Matrix& M);

  // Solves M x = rhs; throws SingularSystemError if the relative residual
  // exceeds 1e-10.
  Vector solve(const Vector& rhs) const;

  // Solve without the residual guard (hot loops that check elsewhere).
  Vector solve_unchecked(const Vector& rhs) const { return lu_->solve(rhs); }

  double probe_error() const { return probe_error_; }

 private:
  std::shared_ptr<Eigen::SparseLU<Matrix>> lu_;  // shared: factorization is immutable
  Matrix M_;
  double probe_error_ = 0.0;
  double norm_inf_ = 0.0;
};

using SparseFactorization = SparseFactorizationT<double>;
using ComplexSparseFactorization = SparseFactorizationT<std::complex<double>>;

// One-shot solve with the same guarantees as SparseFactorizationT.
Eigen::VectorXd solve_sparse(const SpMat& M, const Eigen::VectorXd& rhs);
Eigen::VectorXcd solve_sparse(const SpMatC& M, const Eigen::VectorXcd& rhs);

// Complete generalized eigensolution of B x = lambda A x via dense QZ.
struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // finite eigenvalues only
  std::vector<double> residuals;                  // backward errors, same order
  Eigen::MatrixXcd eigenvectors;                  // column j pairs with eigenvalues[j]
  int infinite_count = 0;  // |beta| below 1e-12 of the largest: excluded above
  double k = std::numeric_limits<double>::quiet_NaN();  // pencil parameters,
  double l = std::numeric_limits<double>::quiet_NaN();  // when known
  double h = std::numeric_limits<double>::quiet_NaN();  // mesh size, when known

  // Largest growth rate sigma = max Re(-lambda) over finite eigenvalues.
  double sigma_max() const;
};

// B, A square and equal size, dimension <= dense_cutoff (else throws
// std::invalid_argument advising a coarser mesh).  Eigenvalues are returned
// with right eigenvectors and per-pair backward errors
//   ||B x - lambda A x|| / ((|lambda| ||A||_inf + ||B||_inf) ||x||).
SpectrumReport generalized_eigs(const SpMat& B, const SpMat& A, int dense_cutoff = 3000);

// Convenience overload recording the pencil parameters and mesh size.
SpectrumReport generalized_eigs(const Pencil& pencil, double mesh_h, int dense_cutoff = 3000);

// CSV serialization: header `re_lambda,im_lambda,residual`, one row per
// finite eigenvalue, 17 significant digits.
void write_spectrum_csv(const SpectrumReport& report, std::ostream& out);

} // namespace bsheat
