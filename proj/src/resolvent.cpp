#include "bsheat/resolvent.hpp"

#include "bsheat/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bsheat {

ConstantsReport constants_report(double k, double l, double c8) {
  if (k == 0.0) throw std::invalid_argument("constants_report: k must be nonzero");
  if (!(l > 0.0)) throw std::invalid_argument("constants_report: l must be positive");
  if (!(c8 > 0.0)) throw std::invalid_argument("constants_report: c8 must be positive");

  ConstantsReport r;
  r.k = k;
  r.l = l;
  r.c8 = c8;
  const double ak = std::abs(k);
  r.c6 = (ak + l) * (ak + l) / (2.0 * l) + 1.5 * ak;
  r.delta0 = std::min(2.0, l) / (4.0 * r.c6 * c8);
  r.lambda0 = std::max(r.c6 * c8 / r.delta0,
                       ak + 2.0 * r.c6 * c8 * (r.delta0 + 1.0 / r.delta0));
  r.c5 = std::min({0.5, l / 4.0, r.lambda0 / 2.0});
  r.epsilon = l / (ak + l);
  return r;
}

namespace {

void put_line(std::ostream& out, const char* name, double value, const char* note = nullptr) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-8s %.17g", name, value);
  out << buf;
  if (note) out << "   " << note;
  out << '\n';
}

} // namespace

void write_constants_text(const ConstantsReport& r, std::ostream& out) {
  put_line(out, "k", r.k);
  put_line(out, "l", r.l);
  put_line(out, "C8", r.c8, "(configured domain constant, not computed)");
  put_line(out, "C6", r.c6);
  put_line(out, "delta0", r.delta0);
  put_line(out, "lambda0", r.lambda0, "(upper-bound template, scales with C8)");
  put_line(out, "C5", r.c5);
  put_line(out, "epsilon", r.epsilon);
}

void write_constants_csv(const ConstantsReport& r, std::ostream& out) {
  out << "k,l,c8,c6,delta0,lambda0,c5,epsilon\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                r.k, r.l, r.c8, r.c6, r.delta0, r.lambda0, r.c5, r.epsilon);
  out << buf << '\n';
}

namespace {

SpMatC to_complex(const SpMat& M) { return M.cast<std::complex<double>>(); }

EllipticSolution finish_solution(const Pencil& pencil, std::complex<double> lambda,
                                 Eigen::VectorXcd u, const Eigen::VectorXcd& rhs) {
  const SpMatC Ac = to_complex(pencil.A_mass);
  const SpMatC Bc = to_complex(pencil.B_stiff);
  const Eigen::VectorXcd resid = lambda * (Ac * u) + Bc * u - rhs;

  std::vector<char> on_boundary(pencil.dim(), 0);
  for (int idx : pencil.boundary_loop) on_boundary[idx] = 1;
  double bulk_sq = 0.0, bnd_sq = 0.0;
  for (int i = 0; i < pencil.dim(); ++i)
    (on_boundary[i] ? bnd_sq : bulk_sq) += std::norm(resid[i]);

  const double scale = std::max(rhs.norm(), 1e-300);
  EllipticSolution sol;
  sol.u = std::move(u);
  sol.lambda = lambda;
  sol.residual_bulk = std::sqrt(bulk_sq) / scale;
  sol.residual_boundary = std::sqrt(bnd_sq) / scale;
  return sol;
}

[[noreturn]] void rethrow_singular(std::complex<double> lambda) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "resolvent system singular: lambda = %.17g%+.17gi lies near the discrete spectrum",
                lambda.real(), lambda.imag());
  throw SingularSystemError(buf);
}

} // namespace

EllipticSolution solve_resolvent(const Pencil& pencil, std::complex<double> lambda,
                                 const Eigen::VectorXcd& h) {
  if (h.size() != pencil.dim())
    throw std::invalid_argument("solve_resolvent: data length does not match the pencil dimension");

  if (lambda.imag() == 0.0 && h.imag().isZero(0.0))
    return solve_resolvent(pencil, lambda, Eigen::VectorXd(h.real()));

  const SpMatC Ac = to_complex(pencil.A_mass);
  const SpMatC M = Ac * lambda + to_complex(pencil.B_stiff);
  const Eigen::VectorXcd rhs = Ac * h;
  try {
    return finish_solution(pencil, lambda, solve_sparse(M, rhs), rhs);
  } catch (const SingularSystemError&) {
    rethrow_singular(lambda);
  }
}

EllipticSolution solve_resolvent(const Pencil& pencil, std::complex<double> lambda,
                                 const Eigen::VectorXd& h) {
  if (h.size() != pencil.dim())
    throw std::invalid_argument("solve_resolvent: data length does not match the pencil dimension");
  if (lambda.imag() != 0.0)
    return solve_resolvent(pencil, lambda, Eigen::VectorXcd(h.cast<std::complex<double>>()));

  const SpMat M = pencil.A_mass * lambda.real() + pencil.B_stiff;
  const Eigen::VectorXd rhs = pencil.A_mass * h;
  try {
    Eigen::VectorXd u = solve_sparse(M, rhs);
    return finish_solution(pencil, lambda, u.cast<std::complex<double>>(),
                           rhs.cast<std::complex<double>>());
  } catch (const SingularSystemError&) {
    rethrow_singular(lambda);
  }
}

double compatibility_residual(const BoundaryField& field, double k, double l, const Mesh& mesh) {
  if (!field.laplacian || !field.normal_derivative || !field.surface_laplacian)
    throw std::invalid_argument("compatibility_residual: all three boundary closures must be set");

  const TraceMap trace = trace_map(mesh);
  const auto [M_loop, K_loop] = boundary_loop_matrices(mesh, trace);
  (void)K_loop;

  const int m = mesh.num_boundary_nodes();
  Eigen::VectorXd defect(m);
  for (int j = 0; j < m; ++j) {
    const int node = mesh.boundary_loop[j];
    const double x = mesh.nodes(node, 0);
    const double y = mesh.nodes(node, 1);
    defect[j] = field.laplacian(x, y) - k * field.normal_derivative(x, y) -
                l * field.surface_laplacian(x, y);
  }
  return std::sqrt(std::max(0.0, defect.dot(M_loop * defect)));
}

} // namespace bsheat
