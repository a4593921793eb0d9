#include "bsheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <utility>

namespace bsheat {

namespace {

SpMat step_matrix(const Pencil& pencil, double weight) {
  SpMat M = pencil.A_mass;
  if (weight != 0.0) M += weight * pencil.B_stiff;
  return M;
}

// Validation lives here so it runs before any factorization work.
SpMat minus_matrix(const Pencil& pencil, double tau, double theta) {
  if (!(tau > 0.0)) throw std::invalid_argument("theta-scheme: tau must be positive");
  if (!(theta >= 0.5 && theta <= 1.0))
    throw std::invalid_argument("theta-scheme: theta must lie in [0.5, 1]");
  return step_matrix(pencil, -(1.0 - theta) * tau);
}

[[noreturn]] void throw_step_size(double tau, double theta) {
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "step matrix A + theta*tau*B singular at tau = %.17g, theta = %.17g; "
                "1/(theta*tau) sits near the discrete spectrum - reduce tau below 1/lambda0",
                tau, theta);
  throw StepSizeError(buf);
}

} // namespace

ThetaStepper::ThetaStepper(const Pencil& pencil, double tau, double theta) try
    : S_minus_(minus_matrix(pencil, tau, theta)),
      plus_(step_matrix(pencil, theta * tau)),
      tau_(tau),
      theta_(theta) {
} catch (const SingularSystemError&) {
  throw_step_size(tau, theta);
}

Eigen::VectorXd ThetaStepper::step(const Eigen::VectorXd& u) const {
  try {
    return plus_.solve(S_minus_ * u);
  } catch (const SingularSystemError&) {
    throw_step_size(tau_, theta_);
  }
}

Eigen::VectorXd theta_step(const Pencil& pencil, const Eigen::VectorXd& u, double tau,
                           double theta) {
  if (u.size() != pencil.dim())
    throw std::invalid_argument("theta_step: state length does not match the pencil dimension");
  return ThetaStepper(pencil, tau, theta).step(u);
}

namespace {

double quad_norm(const SpMat& G, const Eigen::VectorXd& u) {
  return std::sqrt(std::max(0.0, u.dot(G * u)));
}

void record(TimeSeries& out, const GramSet& grams, const Eigen::VectorXd& ones_A,
            double t, const Eigen::VectorXd& u) {
  out.times.push_back(t);
  out.norm_H.push_back(quad_norm(grams.G_H, u));
  out.norm_H1_omega.push_back(quad_norm(grams.G_H1Omega, u));
  out.conserved.push_back(ones_A.dot(u));
}

} // namespace

TimeSeries evolve(const Pencil& pencil, const Eigen::VectorXd& u0, double tau, double T,
                  double theta, const GramSet& grams, int snapshot_stride) {
  if (u0.size() != pencil.dim())
    throw std::invalid_argument("evolve: state length does not match the pencil dimension");
  if (!(T >= tau)) throw std::invalid_argument("evolve: horizon T must be at least tau");

  const ThetaStepper stepper(pencil, tau, theta);
  const int steps = static_cast<int>(std::ceil(T / tau - 1e-12));

  const Eigen::VectorXd ones_A =
      pencil.A_mass * Eigen::VectorXd::Ones(pencil.dim());  // A symmetric: 1^T A as a vector

  TimeSeries series;
  series.times.reserve(steps + 1);
  series.norm_H.reserve(steps + 1);
  series.norm_H1_omega.reserve(steps + 1);
  series.conserved.reserve(steps + 1);

  Eigen::VectorXd u = u0;
  record(series, grams, ones_A, 0.0, u);
  if (snapshot_stride > 0) {
    series.snapshot_steps.push_back(0);
    series.snapshots.push_back(u);
  }
  for (int n = 1; n <= steps; ++n) {
    u = stepper.step(u);
    record(series, grams, ones_A, n * tau, u);
    if (snapshot_stride > 0 && (n % snapshot_stride == 0 || n == steps)) {
      series.snapshot_steps.push_back(n);
      series.snapshots.push_back(u);
    }
  }
  return series;
}

Eigen::VectorXd make_initial_state(const Mesh& mesh, const std::string& kind, int mode_n) {
  const int V = mesh.num_nodes();
  Eigen::VectorXd u(V);
  if (kind == "constant") {
    u.setOnes();
  } else if (kind == "harmonic") {
    if (mode_n < 0) throw std::invalid_argument("make_initial_state: mode_n must be nonnegative");
    for (int i = 0; i < V; ++i) {
      const double x = mesh.nodes(i, 0), y = mesh.nodes(i, 1);
      u[i] = std::pow(std::hypot(x, y), mode_n) * std::cos(mode_n * std::atan2(y, x));
    }
  } else if (kind == "gaussian") {
    for (int i = 0; i < V; ++i) {
      const double dx = mesh.nodes(i, 0) - 0.3, dy = mesh.nodes(i, 1);
      u[i] = std::exp(-(dx * dx + dy * dy) / 0.04);
    }
  } else {
    throw std::invalid_argument("make_initial_state: unknown kind '" + kind +
                                "' (expected constant, harmonic, or gaussian)");
  }
  return u;
}

std::vector<LLimitRow> l_limit_experiment(const Mesh& mesh, double k,
                                          const std::vector<double>& l_list,
                                          const Eigen::VectorXd& u0, double tau, double T,
                                          double theta) {
  if (k == 0.0) throw std::invalid_argument("l_limit_experiment: k must be nonzero");
  if (l_list.empty()) throw std::invalid_argument("l_limit_experiment: l_list must be nonempty");
  for (std::size_t i = 0; i < l_list.size(); ++i) {
    if (!(l_list[i] > 0.0))
      throw std::invalid_argument("l_limit_experiment: every l must be positive");
    if (i > 0 && !(l_list[i] < l_list[i - 1]))
      throw std::invalid_argument("l_limit_experiment: l_list must be strictly decreasing");
  }

  const TraceMap trace = trace_map(mesh);
  std::vector<LLimitRow> rows;
  rows.reserve(l_list.size());
  for (double l : l_list) {
    const Pencil pencil = build_pencil(mesh, trace, k, l);
    const GramSet grams = gram_set(mesh, trace);
    const TimeSeries series = evolve(pencil, u0, tau, T, theta, grams);
    LLimitRow row;
    row.l = l;
    row.peak_norm_H1 = *std::max_element(series.norm_H1_omega.begin(), series.norm_H1_omega.end());
    row.predicted_sigma_max = k * k / (4.0 * l);
    rows.push_back(row);
  }
  return rows;
}

double step_operator_norm_estimate(const Pencil& pencil, const GramSet& grams, double tau,
                                   double theta, int iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  const SpMat S_minus = minus_matrix(pencil, tau, theta);
  std::unique_ptr<SparseFactorization> plus;
  try {
    plus = std::make_unique<SparseFactorization>(step_matrix(pencil, theta * tau));
  } catch (const SingularSystemError&) {
    throw_step_size(tau, theta);
  }
  const SparseFactorization gram(grams.G_H);

  const int V = pencil.dim();
  Eigen::VectorXd v(V);
  for (int i = 0; i < V; ++i) v[i] = std::sin(i + 1.0);  // deterministic, full support

  // Power iteration on T = G^{-1} E^T G E with E = S_plus^{-1} S_minus, which
  // is self-adjoint PSD in the G inner product; E^T = S_minus S_plus^{-1}
  // because both step matrices are symmetric.  The square root of the
  // Rayleigh quotient increases monotonically towards ||E||_G.
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    v /= std::sqrt(v.dot(grams.G_H * v));
    const Eigen::VectorXd Ev = plus->solve(S_minus * v);
    estimate = std::sqrt(std::max(0.0, Ev.dot(grams.G_H * Ev)));
    v = gram.solve(S_minus * plus->solve(grams.G_H * Ev));
  }
  return estimate;
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& out) {
  out << "t,norm_H,norm_H1_omega,conserved\n";
  char buf[160];
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", series.times[i], series.norm_H[i],
                  series.norm_H1_omega[i], series.conserved[i]);
    out << buf << '\n';
  }
}

void write_l_limit_csv(const std::vector<LLimitRow>& rows, std::ostream& out) {
  out << "l,peak_norm_H1,predicted_sigma_max\n";
  char buf[120];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", r.l, r.peak_norm_H1,
                  r.predicted_sigma_max);
    out << buf << '\n';
  }
}

} // namespace bsheat
