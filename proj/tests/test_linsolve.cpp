#include "bsheat/linsolve.hpp"

#include "bsheat/mesh.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

using namespace bsheat;

namespace {

SpMat sparse_identity(int n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

SpMat sparse_diag(const std::vector<double>& d) {
  SpMat D(int(d.size()), int(d.size()));
  for (int i = 0; i < int(d.size()); ++i) D.insert(i, i) = d[i];
  D.makeCompressed();
  return D;
}

} // namespace

TEST_SUITE("linsolve") {

TEST_CASE("identity system returns the right-hand side") {
  const int n = 40;
  SpMat I = sparse_identity(n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = std::sin(0.7 * i) + 0.01 * i;
  Eigen::VectorXd x = solve_sparse(I, rhs);
  CHECK((x - rhs).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("factorization is reusable and guarded") {
  Mesh mesh = build_disk_mesh(6);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 1.0, 1.0);
  SpMat M = 10.0 * pencil.A_mass + pencil.B_stiff; // lambda = 10: solvable
  SparseFactorization fact(M);
  CHECK(fact.probe_error() <= 1e-10);
  for (double seed : {1.0, 2.0}) {
    Eigen::VectorXd rhs(pencil.dim());
    for (int i = 0; i < pencil.dim(); ++i) rhs[i] = std::cos(seed * (i + 1));
    Eigen::VectorXd x = fact.solve(rhs);
    double resid = (M * x - rhs).norm() / rhs.norm();
    CHECK(resid <= 1e-10);
  }
}

TEST_CASE("singular stiffness matrix is rejected even with a consistent rhs") {
  // K_bulk annihilates constants, so it is exactly rank deficient.  The rhs
  // K e_0 lies in the range; a naive LU would happily return garbage.
  Mesh mesh = build_disk_mesh(4);
  SpMat K = assemble_bulk(mesh).second;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(mesh.num_nodes());
  e0[0] = 1.0;
  Eigen::VectorXd rhs = K * e0;
  CHECK_THROWS_AS((void)solve_sparse(K, rhs), SingularSystemError);
}

TEST_CASE("pencil matrix at lambda = 0 is singular (constants in the kernel)") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(pencil.dim());
  CHECK_THROWS_AS((void)solve_sparse(pencil.B_stiff, rhs), SingularSystemError);
}

TEST_CASE("diagonal pencil reproduces its entries") {
  SpMat B = sparse_diag({1.0, 2.0});
  SpMat A = sparse_identity(2);
  SpectrumReport rep = generalized_eigs(B, A);
  REQUIRE(rep.eigenvalues.size() == 2);
  CHECK(rep.infinite_count == 0);
  std::vector<double> re = {rep.eigenvalues[0].real(), rep.eigenvalues[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(re[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(rep.eigenvalues[0].imag()) <= 1e-13);
  CHECK(std::abs(rep.eigenvalues[1].imag()) <= 1e-13);
  for (double r : rep.residuals) CHECK(r <= 1e-14);
}

TEST_CASE("rank-deficient mass matrix produces infinite eigenvalues") {
  SpMat B = sparse_identity(2);
  SpMat A = sparse_diag({1.0, 0.0});
  SpectrumReport rep = generalized_eigs(B, A);
  CHECK(rep.infinite_count == 1);
  REQUIRE(rep.eigenvalues.size() == 1);
  CHECK(rep.eigenvalues[0].real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constants are a zero mode of the pencil") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());
  CHECK(rep.k == 2.0);
  CHECK(rep.l == 0.5);

  int zero_index = -1;
  double best = 1e300;
  for (int j = 0; j < int(rep.eigenvalues.size()); ++j) {
    double mag = std::abs(rep.eigenvalues[j]);
    if (mag < best) { best = mag; zero_index = j; }
  }
  REQUIRE(zero_index >= 0);
  CHECK(best <= 1e-6);

  Eigen::VectorXcd v = rep.eigenvectors.col(zero_index);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(v.size());
  double cosine = std::abs(ones.dot(v)) / (ones.norm() * v.norm());
  CHECK(cosine >= 1.0 - 1e-8);
}

TEST_CASE("marginal surface mode sits within O(h^2) of zero") {
  // k = l n^2 with n = 2: the quadratic harmonic r^2 cos(2 theta) is a steady
  // state of the continuum flow, so the discrete pencil must carry a pair of
  // eigenvalues at consistency-error distance from zero.
  Mesh mesh = build_disk_mesh(8);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 1.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());

  std::vector<double> mags;
  for (auto lam : rep.eigenvalues) mags.push_back(std::abs(lam));
  std::sort(mags.begin(), mags.end());
  REQUIRE(mags.size() >= 3);
  CHECK(mags[0] <= 1e-8);          // constants, exact zero mode
  CHECK(mags[1] >= 1e-9);          // marginal pair: small but genuinely discrete
  CHECK(mags[2] <= 0.05);          // O(h^2) at h ~ 1/8
  double h2 = mesh.longest_edge() * mesh.longest_edge();
  CHECK(mags[2] <= 3.0 * h2);
}

TEST_CASE("complex eigenvalues arrive in conjugate pairs") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());

  std::vector<std::complex<double>> complex_ones;
  for (auto lam : rep.eigenvalues)
    if (std::abs(lam.imag()) > 1e-9 * (1.0 + std::abs(lam))) complex_ones.push_back(lam);
  std::vector<bool> used(complex_ones.size(), false);
  for (std::size_t i = 0; i < complex_ones.size(); ++i) {
    if (used[i]) continue;
    bool found = false;
    for (std::size_t j = i + 1; j < complex_ones.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(complex_ones[j] - std::conj(complex_ones[i])) <=
          1e-7 * (1.0 + std::abs(complex_ones[i]))) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    CHECK_MESSAGE(found, "unpaired complex eigenvalue ", complex_ones[i].real(), "+",
                  complex_ones[i].imag(), "i");
  }
}

TEST_CASE("finite and infinite eigenvalues account for every degree of freedom") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());
  CHECK(int(rep.eigenvalues.size()) + rep.infinite_count == pencil.dim());
  for (double r : rep.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("absorbing boundary gives a dissipative spectrum") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, -1.0, 1.0);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());
  for (auto lam : rep.eigenvalues) CHECK(lam.real() >= -1e-8);
  CHECK(rep.sigma_max() <= 1e-8);
}

TEST_CASE("reactive boundary growth rate approaches the continuum value") {
  Mesh mesh = build_disk_mesh(8);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());
  const double sigma_exact = 2.9190488713158373; // fastest mode, n = 2
  CHECK(std::abs(rep.sigma_max() - sigma_exact) <= 0.06 * sigma_exact);
}

TEST_CASE("dense cutoff guards against accidental huge QZ calls") {
  Mesh mesh = build_disk_mesh(4);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 1.0, 1.0);
  try {
    (void)generalized_eigs(pencil.B_stiff, pencil.A_mass, pencil.dim() - 1);
    FAIL("expected std::invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("coarsen") != std::string::npos);
  }
}

TEST_CASE("spectrum CSV is deterministic with the documented header") {
  Mesh mesh = build_disk_mesh(2);
  TraceMap trace = trace_map(mesh);
  Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  SpectrumReport rep = generalized_eigs(pencil, mesh.longest_edge());
  std::ostringstream first, second;
  write_spectrum_csv(rep, first);
  write_spectrum_csv(rep, second);
  std::string text = first.str();
  CHECK(text == second.str());
  CHECK(text.substr(0, 29) == "re_lambda,im_lambda,residual\n");
  std::size_t rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == rep.eigenvalues.size() + 1);
}

} // TEST_SUITE
