#pragma once

#include "bsheat/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <utility>

namespace bsheat {

using SpMat = Eigen::SparseMatrix<double>;

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix pair of the coupled weak form.  With M/K the bulk mass/stiffness and
// Ms/Ks their boundary (surface) counterparts, the heat flow
//     u_t = Laplace(u)            in Omega,
//     u_t = k du/dnu + l Laplace_Gamma(u)   on Gamma,   k != 0, l > 0,
// tested against functions whose trace is shared with the bulk unknown,
// discretizes to  A_mass du/dt = -B_stiff u  with
//     A_mass  = M - (1/k) Ms,     B_stiff = K - (l/k) Ks.
// Both matrices are symmetric; B_stiff annihilates constants; A_mass is
// positive definite for k < 0 and indefinite for k > 0.
struct Pencil {
  SpMat A_mass;
  SpMat B_stiff;
  double k = 0.0;
  double l = 0.0;
  std::vector<int> boundary_loop;  // kept for residual splitting and norms

  int dim() const { return static_cast<int>(A_mass.rows()); }
};

// Gram matrices of the energy norms:
//   G_H        = K_bulk + K_bnd + M_bnd   (coupled space, V x V, PD)
//   G_H1Omega  = K_bulk + M_bulk          (bulk H^1 norm, V x V, PD)
//   G_H1Gamma  = K_bnd + M_bnd restricted to the loop (m x m, PD)
struct GramSet {
  SpMat G_H;
  SpMat G_H1Omega;
  SpMat G_H1Gamma;
};

// Consistent linear-element mass and stiffness on the triangulation.
// Stiffness rows sum to zero exactly at the element level (the diagonal is
// assembled as minus the off-diagonal sum, not by cancellation).
// Throws AssemblyError naming the triangle if one is degenerate.
std::pair<SpMat, SpMat> assemble_bulk(const Mesh& mesh);  // (M_bulk, K_bulk)

// 1-D periodic linear elements along the boundary loop with chord-length
// weights, embedded into the full V x V index space (interior rows/columns
// are empty).  K_bnd rows sum to zero exactly at the element level.
std::pair<SpMat, SpMat> assemble_boundary(const Mesh& mesh, const TraceMap& trace);  // (M_bnd, K_bnd)

// Same boundary operators restricted to the loop, in loop order (m x m).
std::pair<SpMat, SpMat> boundary_loop_matrices(const Mesh& mesh, const TraceMap& trace);  // (M_loop, K_loop)

Pencil build_pencil(const Mesh& mesh, const TraceMap& trace, double k, double l);

GramSet gram_set(const Mesh& mesh, const TraceMap& trace);

// Discrete Dirichlet-to-Neumann map: the Schur complement of the bulk
// stiffness eliminating interior nodes,
//   A_h = K_GG - K_GI K_II^{-1} K_IG   (m x m, loop order),
// computed as K_GG - W^T W with W the triangular solve of the interior
// Cholesky factor, so the result is symmetric to machine precision.
// Symmetric PSD with A_h 1 = 0.
Eigen::MatrixXd dtn_matrix(const Mesh& mesh, const TraceMap& trace);

// Boundary form  -k_tilde A_h + l_tilde K_loop + Lambda M_loop  (m x m),
// symmetric positive definite for l_tilde > 0, k_tilde < 0, Lambda > 0;
// violations of those signs raise std::invalid_argument.
Eigen::MatrixXd auxiliary_boundary_matrix(const Mesh& mesh, const TraceMap& trace,
                                          double l_tilde, double k_tilde, double Lambda);

// Coordinate-format text export: one `row col value` line per stored entry,
// 17 significant digits, row-major order.
void write_coordinate_text(const SpMat& M, std::ostream& out);

// Largest absolute asymmetry max_ij |M_ij - M_ji|; assembled operators keep
// this at machine level and the tests pin it.
double max_asymmetry(const SpMat& M);

} // namespace bsheat
