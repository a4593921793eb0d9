#pragma once

#include "bsheat/assembly.hpp"
#include "bsheat/linsolve.hpp"
#include "bsheat/mesh.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsheat {

// Raised when the theta-scheme step matrix A + theta tau B is numerically
// singular: 1/(theta tau) then sits near the discrete spectrum, and a smaller
// step restores solvability.
struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trajectory record of one evolve() run.  All vectors share indexing; times
// start at 0 and increase by tau.  conserved tracks 1^T A_mass u, which every
// theta-scheme step preserves exactly (B_stiff annihilates constants on both
// sides of the update).
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> norm_H;         // sqrt(u^T G_H u)
  std::vector<double> norm_H1_omega;  // sqrt(u^T G_H1Omega u)
  std::vector<double> conserved;      // 1^T A_mass u
  std::vector<int> snapshot_steps;
  std::vector<Eigen::VectorXd> snapshots;
};

// One-step integrator for A_mass du/dt = -B_stiff u:
//   (A + theta tau B) u+ = (A - (1-theta) tau B) u.
// theta in [1/2, 1] only: the mass matrix is indefinite for k > 0 and the
// system is stiff, so explicit schemes are excluded.  The factorization of
// the step matrix is formed once and reused for every step.
class ThetaStepper {
 public:
  ThetaStepper(const Pencil& pencil, double tau, double theta);

  Eigen::VectorXd step(const Eigen::VectorXd& u) const;

  double tau() const { return tau_; }
  double theta() const { return theta_; }

 private:
  SpMat S_minus_;
  SparseFactorization plus_;
  double tau_ = 0.0;
  double theta_ = 1.0;
};

// Convenience single step (builds and discards the factorization).
Eigen::VectorXd theta_step(const Pencil& pencil, const Eigen::VectorXd& u, double tau, double theta);

// Runs ceil(T / tau) steps from u0 and tracks the norms above.  Requires
// T >= tau.  If snapshot_stride > 0 the state is stored every that many steps
// (plus the initial and final states).
TimeSeries evolve(const Pencil& pencil, const Eigen::VectorXd& u0, double tau, double T,
                  double theta, const GramSet& grams, int snapshot_stride = 0);

// Built-in initial data on the disk: "constant" (1 everywhere), "harmonic"
// (r^n cos n theta, n = mode_n), "gaussian" (off-center bump
// exp(-|x - (0.3, 0)|^2 / 0.2^2)).  Unknown names raise invalid_argument.
Eigen::VectorXd make_initial_state(const Mesh& mesh, const std::string& kind, int mode_n = 1);

// One row of the l -> 0+ experiment: identical data, step and horizon, with
// only l varying.  predicted_sigma_max = k^2 / (4 l) is the large-mode
// asymptote of the growth rate, reported for context.
struct LLimitRow {
  double l = 0.0;
  double peak_norm_H1 = 0.0;        // max over the trajectory, t = 0 included
  double predicted_sigma_max = 0.0;
};

// Requires k != 0 and l_list strictly decreasing and positive.  k < 0 is the
// dissipative control case: peaks then stay bounded by the initial norm
// instead of blowing up.
std::vector<LLimitRow> l_limit_experiment(const Mesh& mesh, double k,
                                          const std::vector<double>& l_list,
                                          const Eigen::VectorXd& u0, double tau, double T,
                                          double theta = 1.0);

// Power-iteration estimate of the G_H operator norm of one theta-scheme step.
// The Rayleigh quotient increases monotonically, so the value is a lower
// bound of the true norm (tight after enough iterations for separated top
// singular values).
double step_operator_norm_estimate(const Pencil& pencil, const GramSet& grams, double tau,
                                   double theta, int iterations = 300);

// CSV serialization: `t,norm_H,norm_H1_omega,conserved` and
// `l,peak_norm_H1,predicted_sigma_max`, 17 significant digits.
void write_timeseries_csv(const TimeSeries& series, std::ostream& out);
void write_l_limit_csv(const std::vector<LLimitRow>& rows, std::ostream& out);

} // namespace bsheat
