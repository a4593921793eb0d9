#include "doctest.h"

#include "bsheat/assembly.hpp"
#include "bsheat/linsolve.hpp"
#include "bsheat/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

using namespace bsheat;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mesh unit_right_triangle() {
  std::istringstream in("3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 2\n");
  return load_mesh_text(in);
}

double perimeter_6R(int R) { return 12.0 * R * std::sin(kPi / (6.0 * R)); }

} // namespace

TEST_SUITE("assembly") {

TEST_CASE("single-element stiffness matches the hand computation") {
  const Mesh mesh = unit_right_triangle();
  const auto [M, K] = assemble_bulk(mesh);
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(K);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  // every entry is an exact binary fraction, so equality is bitwise
  CHECK((Kd - expected).cwiseAbs().maxCoeff() == 0.0);
  // element rows sum to zero exactly (diagonal assembled as minus the rest)
  CHECK((Kd * Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd Md = Eigen::MatrixXd(M);
  Eigen::MatrixXd mass_exp(3, 3);
  const double a = 0.5 / 12.0;
  mass_exp << 2 * a, a, a, a, 2 * a, a, a, a, 2 * a;
  CHECK((Md - mass_exp).cwiseAbs().maxCoeff() <= 1e-16);
}

TEST_CASE("degenerate triangle is rejected naming the triangle") {
  Mesh broken;
  broken.nodes.resize(3, 2);
  broken.nodes << 0, 0, 1, 0, 2, 0;  // colinear
  broken.triangles.resize(1, 3);
  broken.triangles << 0, 1, 2;
  broken.boundary_loop = {0, 1, 2};
  try {
    assemble_bulk(broken);
    FAIL("expected AssemblyError");
  } catch (const AssemblyError& e) {
    CHECK(std::string(e.what()).find("triangle 0") != std::string::npos);
  }
}

TEST_CASE("kernel invariants at machine precision") {
  const Mesh mesh = build_disk_mesh(8);
  const TraceMap trace = trace_map(mesh);
  const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  const auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
  const Pencil pencil = build_pencil(mesh, trace, 2.0, 0.5);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_nodes());
  CHECK((K_bulk * ones).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((K_bnd * ones).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((pencil.B_stiff * ones).cwiseAbs().maxCoeff() <= 1e-13);
  (void)M_bulk;
  (void)M_bnd;
}

TEST_CASE("all assembled operators are symmetric") {
  const Mesh mesh = build_disk_mesh(6);
  const TraceMap trace = trace_map(mesh);
  const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  const auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
  const Pencil pencil = build_pencil(mesh, trace, 1.5, 0.7);
  const GramSet grams = gram_set(mesh, trace);
  for (const SpMat* M : {&M_bulk, &K_bulk, &M_bnd, &K_bnd, &pencil.A_mass, &pencil.B_stiff,
                         &grams.G_H, &grams.G_H1Omega, &grams.G_H1Gamma})
    CHECK(max_asymmetry(*M) <= 1e-13);
}

TEST_CASE("mass totals reproduce area and perimeter") {
  for (int R : {4, 8, 16}) {
    const Mesh mesh = build_disk_mesh(R);
    const TraceMap trace = trace_map(mesh);
    const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
    const auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_nodes());
    CHECK(ones.dot(M_bulk * ones) == doctest::Approx(mesh.total_area()).epsilon(1e-13));
    CHECK(ones.dot(M_bnd * ones) == doctest::Approx(perimeter_6R(R)).epsilon(1e-13));
    (void)K_bulk;
    (void)K_bnd;
  }
}

TEST_CASE("boundary stiffness is the periodic 1-D stencil") {
  const int R = 2;
  const Mesh mesh = build_disk_mesh(R);
  const TraceMap trace = trace_map(mesh);
  const auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  const int m = mesh.num_boundary_nodes();
  const double chord = 2.0 * std::sin(kPi / (6.0 * R));
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(K_loop);
  const Eigen::MatrixXd Md = Eigen::MatrixXd(M_loop);
  for (int j = 0; j < m; ++j) {
    CHECK(Kd(j, j) == doctest::Approx(2.0 / chord).epsilon(1e-13));
    CHECK(Kd(j, (j + 1) % m) == doctest::Approx(-1.0 / chord).epsilon(1e-13));
    CHECK(Md(j, j) == doctest::Approx(2.0 * chord / 3.0).epsilon(1e-13));
    CHECK(Md(j, (j + 1) % m) == doctest::Approx(chord / 6.0).epsilon(1e-13));
  }
}

TEST_CASE("surface Laplacian eigenvalues approach n^2") {
  const Mesh mesh = build_disk_mesh(16);
  const TraceMap trace = trace_map(mesh);
  const auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  const SpectrumReport report = generalized_eigs(K_loop, M_loop);
  REQUIRE(report.infinite_count == 0);
  std::vector<double> eigs;
  for (const auto& lambda : report.eigenvalues) {
    CHECK(std::abs(lambda.imag()) <= 1e-8);
    eigs.push_back(lambda.real());
  }
  std::sort(eigs.begin(), eigs.end());
  const double expected[5] = {0.0, 1.0, 1.0, 4.0, 4.0};
  for (int i = 0; i < 5; ++i) {
    if (expected[i] == 0.0)
      CHECK(std::abs(eigs[i]) <= 1e-8);
    else
      CHECK(eigs[i] == doctest::Approx(expected[i]).epsilon(0.02));
  }
}

TEST_CASE("pencil definiteness depends on the sign of k") {
  const Mesh mesh = build_disk_mesh(4);
  const TraceMap trace = trace_map(mesh);

  const Pencil dissipative = build_pencil(mesh, trace, -1.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_neg(Eigen::MatrixXd(dissipative.A_mass));
  CHECK(es_neg.eigenvalues().minCoeff() > 0.0);

  const Pencil reactive = build_pencil(mesh, trace, 1.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_pos(Eigen::MatrixXd(reactive.A_mass));
  CHECK(es_pos.eigenvalues().minCoeff() < 0.0);
}

TEST_CASE("k = 0 is rejected as out of scope") {
  const Mesh mesh = build_disk_mesh(2);
  const TraceMap trace = trace_map(mesh);
  try {
    build_pencil(mesh, trace, 0.0, 1.0);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("k must be nonzero") != std::string::npos);
  }
  CHECK_THROWS_AS(build_pencil(mesh, trace, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_pencil(mesh, trace, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("scaling l scales only the boundary part of B_stiff") {
  const Mesh mesh = build_disk_mesh(4);
  const TraceMap trace = trace_map(mesh);
  const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  const double k = 2.0, l0 = 0.5, c = 3.0;
  const Pencil base = build_pencil(mesh, trace, k, l0);
  const Pencil scaled = build_pencil(mesh, trace, k, c * l0);
  const SpMat lhs = scaled.B_stiff - K_bulk;
  const SpMat rhs = SpMat(c * (base.B_stiff - K_bulk));
  CHECK(Eigen::MatrixXd(lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
  (void)M_bulk;
}

TEST_CASE("gram matrices reproduce the constant-state norms") {
  const int R = 8;
  const Mesh mesh = build_disk_mesh(R);
  const TraceMap trace = trace_map(mesh);
  const GramSet grams = gram_set(mesh, trace);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_nodes());
  // only the boundary mass survives on constants
  CHECK(ones.dot(grams.G_H * ones) == doctest::Approx(perimeter_6R(R)).epsilon(1e-13));
  const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  const auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
  CHECK(std::abs(ones.dot((K_bulk + K_bnd) * ones)) <= 1e-12);
  (void)M_bulk;
  (void)M_bnd;
}

TEST_CASE("the H norm is equivalent to the standard product norm") {
  const Mesh mesh = build_disk_mesh(8);
  const TraceMap trace = trace_map(mesh);
  const GramSet grams = gram_set(mesh, trace);
  const auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
  // full-space embedding of the boundary H^1 Gram
  const SpMat standard = SpMat(grams.G_H1Omega + K_bnd + M_bnd);
  const SpectrumReport report = generalized_eigs(standard, grams.G_H);
  REQUIRE(report.infinite_count == 0);
  double c = 1e300, C = 0.0;
  for (const auto& lambda : report.eigenvalues) {
    CHECK(std::abs(lambda.imag()) <= 1e-8);
    c = std::min(c, lambda.real());
    C = std::max(C, lambda.real());
  }
  CHECK(c > 0.0);
  CHECK(std::isfinite(C));
  MESSAGE("norm equivalence constants at rings=8: c = ", c, ", C = ", C);
}

TEST_CASE("DtN matrix is symmetric, annihilates constants, and has eigenvalues n") {
  const Mesh mesh = build_disk_mesh(16);
  const TraceMap trace = trace_map(mesh);
  const Eigen::MatrixXd S = dtn_matrix(mesh, trace);
  const int m = mesh.num_boundary_nodes();
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((S * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-10);

  const auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  const SparseFactorization mass(M_loop);
  for (int n = 1; n <= 3; ++n) {
    Eigen::VectorXd v(m);
    for (int j = 0; j < m; ++j) {
      const int node = mesh.boundary_loop[j];
      v[j] = std::cos(n * std::atan2(mesh.nodes(node, 1), mesh.nodes(node, 0)));
    }
    const Eigen::VectorXd w = mass.solve(S * v);
    CHECK((w - n * v).norm() / (n * v.norm()) <= 0.05);
  }
  (void)K_loop;
}

TEST_CASE("discrete Green identity for the DtN form") {
  const Mesh mesh = build_disk_mesh(8);
  const TraceMap trace = trace_map(mesh);
  const Eigen::MatrixXd S = dtn_matrix(mesh, trace);
  const auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  const int V = mesh.num_nodes();
  const int m = mesh.num_boundary_nodes();

  // harmonic extension: solve the interior rows of K for fixed boundary data
  std::vector<int> interior;
  for (int i = 0; i < V; ++i)
    if (!trace.is_boundary(i)) interior.push_back(i);
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(K_bulk);
  Eigen::MatrixXd K_II(interior.size(), interior.size());
  for (std::size_t a = 0; a < interior.size(); ++a)
    for (std::size_t b = 0; b < interior.size(); ++b) K_II(a, b) = Kd(interior[a], interior[b]);

  auto extend = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(V);
    for (int j = 0; j < m; ++j) u[mesh.boundary_loop[j]] = g[j];
    const Eigen::VectorXd Ku = Kd * u;  // interior entries of u are zero
    Eigen::VectorXd rhs(interior.size());
    for (std::size_t a = 0; a < interior.size(); ++a) rhs[a] = -Ku[interior[a]];
    const Eigen::VectorXd ui = K_II.ldlt().solve(rhs);
    for (std::size_t a = 0; a < interior.size(); ++a) u[interior[a]] = ui[a];
    return u;
  };

  Eigen::VectorXd g1(m), g2(m);
  for (int j = 0; j < m; ++j) {
    const int node = mesh.boundary_loop[j];
    const double theta = std::atan2(mesh.nodes(node, 1), mesh.nodes(node, 0));
    g1[j] = std::cos(theta);
    g2[j] = std::sin(2.0 * theta) + 0.3 * std::cos(5.0 * theta);
  }
  const Eigen::VectorXd u1 = extend(g1), u2 = extend(g2);
  const double form = g1.dot(S * g2);
  const double energy = u1.dot(K_bulk * u2);
  CHECK(form == doctest::Approx(energy).epsilon(1e-10));
  (void)M_bulk;
}

TEST_CASE("auxiliary boundary form is coercive and solvable") {
  const Mesh mesh = build_disk_mesh(8);
  const TraceMap trace = trace_map(mesh);
  const int m = mesh.num_boundary_nodes();
  const Eigen::MatrixXd A = auxiliary_boundary_matrix(mesh, trace, 1.0, -1.0, 1.0);

  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // on constants only the Lambda mass term survives
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  CHECK(ones.dot(A * ones) == doctest::Approx(perimeter_6R(8)).epsilon(1e-12));

  // the discrete surface problem is solvable for arbitrary data
  const auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  Eigen::VectorXd phi(m);
  for (int j = 0; j < m; ++j) phi[j] = std::sin(0.7 * j) + 0.25;
  const Eigen::VectorXd rhs = M_loop * phi;
  const Eigen::VectorXd v = A.ldlt().solve(rhs);
  CHECK((A * v - rhs).norm() / rhs.norm() <= 1e-10);
  (void)K_loop;

  CHECK_THROWS_AS(auxiliary_boundary_matrix(mesh, trace, -1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(auxiliary_boundary_matrix(mesh, trace, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(auxiliary_boundary_matrix(mesh, trace, 1.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("coordinate-format export is deterministic and exact") {
  const Mesh mesh = unit_right_triangle();
  const auto [M, K] = assemble_bulk(mesh);
  std::ostringstream first, second;
  write_coordinate_text(K, first);
  write_coordinate_text(K, second);
  CHECK(first.str() == second.str());
  CHECK(first.str() ==
        "0 0 1\n0 1 -0.5\n0 2 -0.5\n"
        "1 0 -0.5\n1 1 0.5\n"
        "2 0 -0.5\n2 2 0.5\n");
  (void)M;
}

} // TEST_SUITE
