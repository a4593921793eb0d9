#pragma once

#include "bsheat/assembly.hpp"
#include "bsheat/mesh.hpp"

#include <complex>
#include <functional>
#include <iosfwd>

namespace bsheat {

// Explicit coercivity constants for the boundary-value problem with
// parameters (k, l).  C8 is a domain-dependent trace/interpolation constant
// that is not computable from (k, l) alone; it is a configuration input
// (default 1.0), which makes lambda0 an upper-bound template rather than a
// sharp threshold.  The operational growth bound comes from the discrete
// spectrum instead (see SpectrumReport::sigma_max).
struct ConstantsReport {
  double k = 0.0;
  double l = 0.0;
  double c8 = 1.0;

  double c6 = 0.0;      // (|k|+l)^2 / (2l) + (3/2)|k|
  double delta0 = 0.0;  // min{2, l} / (4 c6 c8)
  double lambda0 = 0.0; // max{ c6 c8 / delta0, |k| + 2 c6 c8 (delta0 + 1/delta0) }
  double c5 = 0.0;      // min{ 1/2, l/4, lambda0/2 }
  double epsilon = 0.0; // l / (|k| + l)
};

// Evaluates the formulas above.  Requires k != 0, l > 0, c8 > 0; all outputs
// are then positive and finite, and c5 <= l/4 holds structurally.
ConstantsReport constants_report(double k, double l, double c8 = 1.0);

// Aligned-key text block (one screen) and CSV row serialization.
void write_constants_text(const ConstantsReport& report, std::ostream& out);
void write_constants_csv(const ConstantsReport& report, std::ostream& out);

// Solution of the discrete resolvent system (lambda A_mass + B_stiff) u =
// A_mass h, the weak form of
//   -Delta u + lambda u = h              in Omega,
//   -k u_nu - l Lap_Gamma u + lambda u = h   on Gamma,
// over one nodal vector (trace consistency is structural).  The residual of
// the solved system is reported split into boundary rows and the rest, each
// relative to the full right-hand side norm.
struct EllipticSolution {
  Eigen::VectorXcd u;
  std::complex<double> lambda{0.0, 0.0};
  double residual_bulk = 0.0;
  double residual_boundary = 0.0;
};

// Throws SingularSystemError mentioning lambda when the shifted pencil is
// singular (lambda approximately in the discrete spectrum).  Real lambda with
// real data takes a real-arithmetic fast path; the two paths agree to 1e-12.
EllipticSolution solve_resolvent(const Pencil& pencil, std::complex<double> lambda,
                                 const Eigen::VectorXcd& h);
EllipticSolution solve_resolvent(const Pencil& pencil, std::complex<double> lambda,
                                 const Eigen::VectorXd& h);

// Analytic first-order boundary data of a smooth field u0: each closure is
// evaluated at boundary node coordinates (x, y).
struct BoundaryField {
  std::function<double(double, double)> laplacian;           // Delta u0
  std::function<double(double, double)> normal_derivative;   // u0_nu (outward)
  std::function<double(double, double)> surface_laplacian;   // Lap_Gamma u0
};

// Discrete L2(Gamma) norm of the first-order compatibility defect
//   (Delta u0)|_Gamma - k u0_nu - l Lap_Gamma u0,
// i.e. sqrt(g^T M_bnd g) with g the nodal defect on the boundary loop.
// Fields compatible at order one (e.g. u0 = r^2 with k = 2) give zero.
double compatibility_residual(const BoundaryField& field, double k, double l, const Mesh& mesh);

} // namespace bsheat
