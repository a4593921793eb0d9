#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

// Independent semi-analytic references on the unit disk.  Nothing in this
// module touches the finite-element assembly or the linear solvers: Bessel
// evaluation, root bracketing, and the radial solver are self-contained so
// that agreement with the FEM side is meaningful evidence.
namespace bsheat::oracle {

struct RadialSingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Modified (I) and ordinary (J) Bessel functions of integer order, evaluated
// by ascending power series for small arguments and Miller backward
// recurrence with series normalization for moderate ones.  Domain: x in
// [0, 35], n in [0, 64]; out-of-range arguments raise std::invalid_argument.
double bessel_in(int n, double x);
double bessel_in_prime(int n, double x);
double bessel_jn(int n, double x);
double bessel_jn_prime(int n, double x);

// One root of the per-mode dispersion relation for separated solutions
// e^{sigma t} R(r) cos(n theta) of the coupled heat flow on the unit disk:
//   growing branch ('I', sigma = mu^2):   k mu I_n'(mu)/I_n(mu) - l n^2 - mu^2 = 0
//   decaying branch ('J', sigma = -mu^2): k mu J_n'(mu)/J_n(mu) - l n^2 + mu^2 = 0
//   marginal root  ('0', sigma = 0):      emitted exactly when k n - l n^2 = 0, n >= 1
// residual is the dispersion function magnitude at the root.
struct DispersionRoot {
  int n = 0;
  double sigma = 0.0;
  double mu = 0.0;
  char branch = 'I';
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
};

// All sign-change-bracketed real roots of both branches for modes n <= n_max
// and mu <= mu_max (mu_max <= 30), refined by bisection to 1e-12 in mu.
// Growing roots exist for mode n >= 1 iff k n - l n^2 > 0, and for n = 0 iff
// k > 2.  Results are ordered by mode, then descending sigma.
std::vector<DispersionRoot> dispersion_roots(double k, double l, int n_max, double mu_max);

// Second-order finite-difference solution of the mode-n radial reduction of
// the elliptic problem
//   -(R'' + R'/r - n^2 R / r^2) + lambda R = H      on (0, 1),
//   -k R'(1) + (l n^2 + lambda) R(1) = H(1)          at r = 1,
// with the natural regularity closure at r = 0 (R'(0)=0 for n=0, R(0)=0
// otherwise).  The boundary row is folded into the last interior equation by
// ghost-point elimination, keeping the scheme second order up to the wall.
struct RadialSolution {
  Eigen::VectorXd grid;    // uniform radii 0..1
  Eigen::VectorXd values;  // R at the grid
  int n = 0;
  double lambda = 0.0;
  double residual = 0.0;   // max-norm residual of the discrete system
};

RadialSolution radial_resolvent_fd(int n, double lambda, double k, double l,
                                   const std::function<double(double)>& H, int points = 10001);
RadialSolution radial_resolvent_fd(int n, double lambda, double k, double l,
                                   const Eigen::VectorXd& H_samples);

// Exact modal evolution e^{sigma t} R(r) cos(n theta), with the radial
// profile normalized to R(1) = 1, sampled at the given points.
Eigen::VectorXd modal_reference(const DispersionRoot& root, double t,
                                const Eigen::Matrix<double, Eigen::Dynamic, 2>& points);

// CSV serialization: header `n,sigma,branch,residual`, 17 significant digits.
void write_dispersion_csv(const std::vector<DispersionRoot>& roots, std::ostream& out);

} // namespace bsheat::oracle
