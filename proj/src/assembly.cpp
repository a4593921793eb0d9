#include "bsheat/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace bsheat {

namespace {

using Triplet = Eigen::Triplet<double>;

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& ts) {
  SpMat M(rows, cols);
  M.setFromTriplets(ts.begin(), ts.end());
  M.prune(0.0);  // no explicit zeros after finalization
  M.makeCompressed();
  return M;
}

} // namespace

std::pair<SpMat, SpMat> assemble_bulk(const Mesh& mesh) {
  const int V = mesh.num_nodes();
  const int F = mesh.num_triangles();
  std::vector<Triplet> mt, kt;
  mt.reserve(9 * F);
  kt.reserve(9 * F);

  for (int t = 0; t < F; ++t) {
    const int id[3] = {mesh.triangles(t, 0), mesh.triangles(t, 1), mesh.triangles(t, 2)};
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0))
      throw AssemblyError("triangle " + std::to_string(t) + " is degenerate (signed area " +
                          std::to_string(area) + ")");

    // Edge vector opposite vertex a; gradients of the linear hat functions
    // are the rotated opposite edges, so K_ab = (e_a . e_b) / (4 area).
    Eigen::Vector2d e[3];
    for (int a = 0; a < 3; ++a)
      e[a] = mesh.nodes.row(id[(a + 2) % 3]) - mesh.nodes.row(id[(a + 1) % 3]);

    double offdiag[3] = {0.0, 0.0, 0.0};  // accumulated off-diagonal sums per row
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        mt.emplace_back(id[a], id[b], area / 12.0 * (a == b ? 2.0 : 1.0));
        if (a != b) {
          const double kab = e[a].dot(e[b]) / (4.0 * area);
          kt.emplace_back(id[a], id[b], kab);
          offdiag[a] += kab;
        }
      }
      kt.emplace_back(id[a], id[a], -offdiag[a]);  // exact zero row sum
    }
  }
  return {from_triplets(V, V, mt), from_triplets(V, V, kt)};
}

std::pair<SpMat, SpMat> assemble_boundary(const Mesh& mesh, const TraceMap& trace) {
  const int V = mesh.num_nodes();
  const int m = mesh.num_boundary_nodes();
  std::vector<Triplet> mt, kt;
  mt.reserve(4 * m);
  kt.reserve(4 * m);
  for (int j = 0; j < m; ++j) {
    const int a = mesh.boundary_loop[j], b = mesh.boundary_loop[(j + 1) % m];
    const double len = trace.arc_weights[j];
    const double w = 1.0 / len;
    kt.emplace_back(a, a, w);
    kt.emplace_back(b, b, w);
    kt.emplace_back(a, b, -w);
    kt.emplace_back(b, a, -w);
    mt.emplace_back(a, a, len / 3.0);
    mt.emplace_back(b, b, len / 3.0);
    mt.emplace_back(a, b, len / 6.0);
    mt.emplace_back(b, a, len / 6.0);
  }
  return {from_triplets(V, V, mt), from_triplets(V, V, kt)};
}

std::pair<SpMat, SpMat> boundary_loop_matrices(const Mesh& mesh, const TraceMap& trace) {
  const int m = mesh.num_boundary_nodes();
  std::vector<Triplet> mt, kt;
  mt.reserve(4 * m);
  kt.reserve(4 * m);
  for (int j = 0; j < m; ++j) {
    const int a = j, b = (j + 1) % m;
    const double len = trace.arc_weights[j];
    const double w = 1.0 / len;
    kt.emplace_back(a, a, w);
    kt.emplace_back(b, b, w);
    kt.emplace_back(a, b, -w);
    kt.emplace_back(b, a, -w);
    mt.emplace_back(a, a, len / 3.0);
    mt.emplace_back(b, b, len / 3.0);
    mt.emplace_back(a, b, len / 6.0);
    mt.emplace_back(b, a, len / 6.0);
  }
  return {from_triplets(m, m, mt), from_triplets(m, m, kt)};
}

Pencil build_pencil(const Mesh& mesh, const TraceMap& trace, double k, double l) {
  if (k == 0.0)
    throw std::invalid_argument("build_pencil: k must be nonzero (the non-interactive case k=0 is out of scope)");
  if (!(l > 0.0)) throw std::invalid_argument("build_pencil: l must be positive");

  auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);

  Pencil p;
  p.A_mass = M_bulk - (1.0 / k) * M_bnd;
  p.B_stiff = K_bulk - (l / k) * K_bnd;
  p.A_mass.makeCompressed();
  p.B_stiff.makeCompressed();
  p.k = k;
  p.l = l;
  p.boundary_loop = mesh.boundary_loop;
  return p;
}

GramSet gram_set(const Mesh& mesh, const TraceMap& trace) {
  auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  auto [M_bnd, K_bnd] = assemble_boundary(mesh, trace);
  auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);

  GramSet g;
  g.G_H = K_bulk + K_bnd + M_bnd;
  g.G_H1Omega = K_bulk + M_bulk;
  g.G_H1Gamma = K_loop + M_loop;
  g.G_H.makeCompressed();
  g.G_H1Omega.makeCompressed();
  g.G_H1Gamma.makeCompressed();
  return g;
}

Eigen::MatrixXd dtn_matrix(const Mesh& mesh, const TraceMap& trace) {
  const int V = mesh.num_nodes();
  const int m = mesh.num_boundary_nodes();
  const int ni = V - m;
  if (ni <= 0) throw std::invalid_argument("dtn_matrix: mesh has no interior nodes");

  auto [M_bulk, K_bulk] = assemble_bulk(mesh);
  (void)M_bulk;

  // Global-to-interior index map; boundary nodes map through the loop order.
  std::vector<int> interior_index(V, -1);
  {
    int next = 0;
    for (int v = 0; v < V; ++v)
      if (!trace.is_boundary(v)) interior_index[v] = next++;
  }

  std::vector<Eigen::Triplet<double>> kii, kig;
  Eigen::MatrixXd K_GG = Eigen::MatrixXd::Zero(m, m);
  for (int col = 0; col < K_bulk.outerSize(); ++col) {
    for (SpMat::InnerIterator it(K_bulk, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      const bool rb = trace.is_boundary(r), cb = trace.is_boundary(c);
      if (!rb && !cb)
        kii.emplace_back(interior_index[r], interior_index[c], it.value());
      else if (!rb && cb)
        kig.emplace_back(interior_index[r], trace.position_in_loop[c], it.value());
      else if (rb && cb)
        K_GG(trace.position_in_loop[r], trace.position_in_loop[c]) += it.value();
    }
  }
  SpMat K_II(ni, ni), K_IG(ni, m);
  K_II.setFromTriplets(kii.begin(), kii.end());
  K_IG.setFromTriplets(kig.begin(), kig.end());

  // K_II is SPD (grounded stiffness of a connected mesh with boundary), so a
  // Cholesky factorization P K_II P^T = L L^T exists; with W = L^{-1} P K_IG
  // the Schur complement is K_GG - W^T W, symmetric by construction.
  Eigen::SimplicialLLT<SpMat> llt(K_II);
  if (llt.info() != Eigen::Success)
    throw AssemblyError("dtn_matrix: interior stiffness block is not positive definite");
  Eigen::MatrixXd W = llt.permutationP() * Eigen::MatrixXd(K_IG);
  llt.matrixL().solveInPlace(W);

  Eigen::MatrixXd S = 0.5 * (K_GG + K_GG.transpose());
  S.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose(), -1.0);
  S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
  return S;
}

Eigen::MatrixXd auxiliary_boundary_matrix(const Mesh& mesh, const TraceMap& trace,
                                          double l_tilde, double k_tilde, double Lambda) {
  if (!(l_tilde > 0.0)) throw std::invalid_argument("auxiliary_boundary_matrix: l_tilde must be positive");
  if (!(k_tilde < 0.0)) throw std::invalid_argument("auxiliary_boundary_matrix: k_tilde must be negative");
  if (!(Lambda > 0.0)) throw std::invalid_argument("auxiliary_boundary_matrix: Lambda must be positive");

  auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  Eigen::MatrixXd out = -k_tilde * dtn_matrix(mesh, trace);
  out += l_tilde * Eigen::MatrixXd(K_loop) + Lambda * Eigen::MatrixXd(M_loop);
  return out;
}

void write_coordinate_text(const SpMat& M, std::ostream& out) {
  // Collect and emit entries in row-major order for a stable external format.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(M.nonZeros());
  for (int col = 0; col < M.outerSize(); ++col)
    for (SpMat::InnerIterator it(M, col); it; ++it)
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  char buf[48];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.value());
    out << e.row() << ' ' << e.col() << ' ' << buf << '\n';
  }
}

double max_asymmetry(const SpMat& M) {
  const SpMat D = SpMat(M - SpMat(M.transpose()));
  double worst = 0.0;
  for (int col = 0; col < D.outerSize(); ++col)
    for (SpMat::InnerIterator it(D, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

} // namespace bsheat
