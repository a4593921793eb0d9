#include "bsheat/disk_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace bsheat::oracle {

namespace {

constexpr double kMaxArgument = 35.0;
constexpr int kMaxOrder = 64;
constexpr double kDispersionMuCap = 30.0;

void check_domain(int n, double x) {
  if (n < 0 || n > kMaxOrder)
    throw std::invalid_argument("bessel order must lie in [0, " + std::to_string(kMaxOrder) + "]");
  if (!(x >= 0.0) || x > kMaxArgument)
    throw std::invalid_argument("bessel argument must lie in [0, " + std::to_string(kMaxArgument) + "]");
}

// Ascending series  sum_m s^m (x/2)^{n+2m} / (m! (n+m)!)  with s = +1 for I_n
// and s = -1 for J_n.  Used where the alternating cancellation is harmless.
double bessel_series(int n, double x, double sign) {
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= x / (2.0 * i);  // (x/2)^n / n!
  const double q = sign * x * x / 4.0;
  double sum = term;
  for (int m = 1; m <= 400; ++m) {
    term *= q / (m * static_cast<double>(n + m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Miller backward recurrence for I_n normalized with e^x = I_0 + 2 sum I_k.
double bessel_in_backward(int n, double x) {
  const int start = std::max(n, static_cast<int>(x)) + 60;
  double fkp1 = 0.0, fk = 1e-280, sum = 0.0, saved = (n == start) ? fk : 0.0;
  for (int k = start; k >= 1; --k) {
    const double fkm1 = fkp1 + (2.0 * k / x) * fk;
    sum += 2.0 * fk;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 == n) saved = fk;
    if (std::abs(fk) > 1e250) {
      fk *= 1e-250;
      fkp1 *= 1e-250;
      sum *= 1e-250;
      saved *= 1e-250;
    }
  }
  sum += fk;  // f_0
  return saved * std::exp(x) / sum;
}

// Miller backward recurrence for J_n normalized with 1 = J_0 + 2 sum J_{2k}.
double bessel_jn_backward(int n, double x) {
  int start = std::max(n, static_cast<int>(x)) + 60;
  if (start % 2 != 0) ++start;
  double fkp1 = 0.0, fk = 1e-280, sum = 0.0, saved = (n == start) ? fk : 0.0;
  for (int k = start; k >= 1; --k) {
    const double fkm1 = (2.0 * k / x) * fk - fkp1;
    if (k % 2 == 0) sum += 2.0 * fk;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 == n) saved = fk;
    if (std::abs(fk) > 1e250) {
      fk *= 1e-250;
      fkp1 *= 1e-250;
      sum *= 1e-250;
      saved *= 1e-250;
    }
  }
  sum += fk;  // J_0 share
  return saved / sum;
}

} // namespace

double bessel_in(int n, double x) {
  check_domain(n, x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 12.0) return bessel_series(n, x, +1.0);
  return bessel_in_backward(n, x);
}

double bessel_in_prime(int n, double x) {
  check_domain(n, x);
  if (n == 0) return bessel_in(1, x);
  if (x == 0.0) return n == 1 ? 0.5 : 0.0;
  return 0.5 * (bessel_in(n - 1, x) + bessel_in(n + 1, x));
}

double bessel_jn(int n, double x) {
  check_domain(n, x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 8.0) return bessel_series(n, x, -1.0);
  return bessel_jn_backward(n, x);
}

double bessel_jn_prime(int n, double x) {
  check_domain(n, x);
  if (n == 0) return -bessel_jn(1, x);
  if (x == 0.0) return n == 1 ? 0.5 : 0.0;
  return 0.5 * (bessel_jn(n - 1, x) - bessel_jn(n + 1, x));
}

namespace {

// Cleared (pole-free) forms of the two dispersion branches, suitable for
// sign scanning: the growing branch multiplies through by I_n(mu) > 0, the
// decaying one by J_n(mu), whose zeros do not create spurious sign changes
// because k mu J_n'(mu) is bounded away from zero there.
double growing_cleared(double k, double l, int n, double mu) {
  return k * mu * bessel_in_prime(n, mu) - (l * n * n + mu * mu) * bessel_in(n, mu);
}

double decaying_cleared(double k, double l, int n, double mu) {
  return k * mu * bessel_jn_prime(n, mu) - (l * n * n - mu * mu) * bessel_jn(n, mu);
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) != (fmid < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

void scan_branch(double k, double l, int n, double mu_max, char branch,
                 std::vector<DispersionRoot>& out) {
  const auto cleared = [&](double mu) {
    return branch == 'I' ? growing_cleared(k, l, n, mu) : decaying_cleared(k, l, n, mu);
  };
  const int intervals = 6000;
  const double lo = 1e-4;
  double prev_mu = lo, prev_val = cleared(lo);
  for (int i = 1; i <= intervals; ++i) {
    const double mu = lo + (mu_max - lo) * i / intervals;
    const double val = cleared(mu);
    if (prev_val == 0.0 || (prev_val < 0.0) != (val < 0.0)) {
      const double root = prev_val == 0.0 ? prev_mu : bisect(cleared, prev_mu, mu);
      DispersionRoot r;
      r.n = n;
      r.mu = root;
      r.branch = branch;
      r.bracket_lo = prev_mu;
      r.bracket_hi = mu;
      if (branch == 'I') {
        r.sigma = root * root;
        r.residual = std::abs(k * root * bessel_in_prime(n, root) / bessel_in(n, root) -
                              l * n * n - root * root);
      } else {
        r.sigma = -root * root;
        const double jn = bessel_jn(n, root);
        r.residual = std::abs(jn) > 1e-300
                         ? std::abs(k * root * bessel_jn_prime(n, root) / jn - l * n * n + root * root)
                         : std::abs(cleared(root));
      }
      out.push_back(r);
    }
    prev_mu = mu;
    prev_val = val;
  }
}

} // namespace

std::vector<DispersionRoot> dispersion_roots(double k, double l, int n_max, double mu_max) {
  if (k == 0.0) throw std::invalid_argument("dispersion_roots: k must be nonzero");
  if (!(l > 0.0)) throw std::invalid_argument("dispersion_roots: l must be positive");
  if (n_max < 0) throw std::invalid_argument("dispersion_roots: n_max must be nonnegative");
  if (!(mu_max > 0.0) || mu_max > kDispersionMuCap)
    throw std::invalid_argument("dispersion_roots: mu_max must lie in (0, " +
                                std::to_string(kDispersionMuCap) + "]");

  std::vector<DispersionRoot> roots;
  for (int n = 0; n <= n_max; ++n) {
    std::vector<DispersionRoot> mode;
    if (n >= 1 && k * n - l * n * n == 0.0) {
      DispersionRoot r;
      r.n = n;
      r.branch = '0';  // harmonic mode r^n cos(n theta), exactly stationary
      mode.push_back(r);
    }
    scan_branch(k, l, n, mu_max, 'I', mode);
    scan_branch(k, l, n, mu_max, 'J', mode);
    std::stable_sort(mode.begin(), mode.end(),
                     [](const DispersionRoot& a, const DispersionRoot& b) { return a.sigma > b.sigma; });
    roots.insert(roots.end(), mode.begin(), mode.end());
  }
  return roots;
}

namespace {

struct Tridiag {
  Eigen::VectorXd sub, diag, super, rhs;  // sub[i] couples row i to i-1 (i >= 1)
};

Eigen::VectorXd thomas_solve(const Tridiag& t) {
  const Eigen::Index N = t.diag.size();
  Eigen::VectorXd c(N), d(N), x(N);
  double scale = t.diag.cwiseAbs().maxCoeff();
  double piv = t.diag[0];
  if (std::abs(piv) < 1e-300 * std::max(1.0, scale))
    throw RadialSingularError("singular reduced radial system (lambda near the discrete spectrum)");
  c[0] = t.super[0] / piv;
  d[0] = t.rhs[0] / piv;
  for (Eigen::Index i = 1; i < N; ++i) {
    piv = t.diag[i] - t.sub[i] * c[i - 1];
    if (std::abs(piv) < 1e-300 * std::max(1.0, scale))
      throw RadialSingularError("singular reduced radial system (lambda near the discrete spectrum)");
    c[i] = (i + 1 < N ? t.super[i] : 0.0) / piv;
    d[i] = (t.rhs[i] - t.sub[i] * d[i - 1]) / piv;
  }
  x[N - 1] = d[N - 1];
  for (Eigen::Index i = N - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

double tridiag_residual(const Tridiag& t, const Eigen::VectorXd& x) {
  const Eigen::Index N = t.diag.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    double r = t.diag[i] * x[i] - t.rhs[i];
    if (i > 0) r += t.sub[i] * x[i - 1];
    if (i + 1 < N) r += t.super[i] * x[i + 1];
    worst = std::max(worst, std::abs(r));
  }
  return worst / std::max(1.0, t.rhs.cwiseAbs().maxCoeff());
}

} // namespace

RadialSolution radial_resolvent_fd(int n, double lambda, double k, double l,
                                   const Eigen::VectorXd& H_samples) {
  const int N = static_cast<int>(H_samples.size());
  if (N < 10000)
    throw std::invalid_argument("radial_resolvent_fd: at least 10000 grid points are required");
  if (n < 0) throw std::invalid_argument("radial_resolvent_fd: mode n must be nonnegative");
  if (k == 0.0) throw std::invalid_argument("radial_resolvent_fd: k must be nonzero");
  if (!(l > 0.0)) throw std::invalid_argument("radial_resolvent_fd: l must be positive");

  const double dr = 1.0 / (N - 1);
  Tridiag t;
  t.sub.setZero(N);
  t.diag.setZero(N);
  t.super.setZero(N);
  t.rhs = H_samples;

  if (n == 0) {
    // Symmetry closure at the center: R'(0) = 0 gives -4 (R_1 - R_0)/dr^2.
    t.diag[0] = 4.0 / (dr * dr) + lambda;
    t.super[0] = -4.0 / (dr * dr);
  } else {
    t.diag[0] = 1.0;
    t.super[0] = 0.0;
    t.rhs[0] = 0.0;
  }

  for (int i = 1; i < N - 1; ++i) {
    const double r = i * dr;
    t.diag[i] = 2.0 / (dr * dr) + n * n / (r * r) + lambda;
    t.sub[i] = -1.0 / (dr * dr) + 1.0 / (2.0 * dr * r);
    t.super[i] = -1.0 / (dr * dr) - 1.0 / (2.0 * dr * r);
  }

  // Ghost-point elimination at r = 1: the centered boundary condition
  //   -k (R_g - R_{N-2}) / (2 dr) + (l n^2 + lambda) R_{N-1} = H(1)
  // solves for the ghost value R_g, which is substituted into the interior
  // equation evaluated at r = 1.
  {
    const int i = N - 1;
    const double g = -1.0 / (dr * dr) - 1.0 / (2.0 * dr);  // ghost coefficient
    t.diag[i] = 2.0 / (dr * dr) + static_cast<double>(n) * n + lambda +
                g * (2.0 * dr / k) * (l * n * n + lambda);
    t.sub[i] = (-1.0 / (dr * dr) + 1.0 / (2.0 * dr)) + g;
    t.rhs[i] = H_samples[i] * (1.0 + g * (2.0 * dr / k));
  }

  RadialSolution sol;
  sol.grid = Eigen::VectorXd::LinSpaced(N, 0.0, 1.0);
  sol.values = thomas_solve(t);
  sol.n = n;
  sol.lambda = lambda;
  sol.residual = tridiag_residual(t, sol.values);
  return sol;
}

RadialSolution radial_resolvent_fd(int n, double lambda, double k, double l,
                                   const std::function<double(double)>& H, int points) {
  Eigen::VectorXd samples(points);
  for (int i = 0; i < points; ++i) samples[i] = H(static_cast<double>(i) / (points - 1));
  return radial_resolvent_fd(n, lambda, k, l, samples);
}

Eigen::VectorXd modal_reference(const DispersionRoot& root, double t,
                                const Eigen::Matrix<double, Eigen::Dynamic, 2>& points) {
  const double amp = std::exp(root.sigma * t);
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = points(i, 0), y = points(i, 1);
    const double r = std::hypot(x, y);
    const double theta = std::atan2(y, x);
    double radial = 0.0;
    switch (root.branch) {
      case 'I': radial = bessel_in(root.n, root.mu * r) / bessel_in(root.n, root.mu); break;
      case 'J': radial = bessel_jn(root.n, root.mu * r) / bessel_jn(root.n, root.mu); break;
      default: radial = std::pow(r, root.n); break;  // marginal harmonic mode
    }
    out[i] = amp * radial * std::cos(root.n * theta);
  }
  return out;
}

void write_dispersion_csv(const std::vector<DispersionRoot>& roots, std::ostream& out) {
  out << "n,sigma,branch,residual\n";
  char buf[96];
  for (const auto& r : roots) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%c,%.17g", r.n, r.sigma, r.branch, r.residual);
    out << buf << '\n';
  }
}

} // namespace bsheat::oracle
