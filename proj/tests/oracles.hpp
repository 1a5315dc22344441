#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Nelder-Mead with restarts from the best vertex; the simplex scale shrinks
// by 10 on every restart.
inline Eigen::VectorXd nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
    double scale = 1.0, int restarts = 12, int iters = 4000) {
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd best = x0;
  for (int r = 0; r < restarts; ++r, scale *= 0.3) {
    std::vector<Eigen::VectorXd> s(n + 1, best);
    for (int i = 0; i < n; ++i) s[i + 1][i] += scale;
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[i] = f(s[i]);
    for (int it = 0; it < iters; ++it) {
      std::vector<int> idx(n + 1);
      for (int i = 0; i <= n; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
      const int lo = idx[0], hi = idx[n], nh = idx[n - 1];
      if (std::abs(fv[hi] - fv[lo]) < 1e-15 * (1 + std::abs(fv[lo])) &&
          (s[hi] - s[lo]).norm() < 1e-12) {
        break;
      }
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      for (int i = 0; i <= n; ++i) if (i != hi) c += s[i];
      c /= n;
      const Eigen::VectorXd xr = c + (c - s[hi]);
      const double fr = f(xr);
      if (fr < fv[lo]) {
        const Eigen::VectorXd xe = c + 2.0 * (c - s[hi]);
        const double fe = f(xe);
        if (fe < fr) { s[hi] = xe; fv[hi] = fe; } else { s[hi] = xr; fv[hi] = fr; }
      } else if (fr < fv[nh]) {
        s[hi] = xr; fv[hi] = fr;
      } else {
        const Eigen::VectorXd xc = fr < fv[hi] ? c + 0.5 * (xr - c) : c + 0.5 * (s[hi] - c);
        const double fc = f(xc);
        if (fc < std::min(fr, fv[hi])) {
          s[hi] = xc; fv[hi] = fc;
        } else {
          for (int i = 0; i <= n; ++i) {
            if (i == lo) continue;
            s[i] = s[lo] + 0.5 * (s[i] - s[lo]);
            fv[i] = f(s[i]);
          }
        }
      }
    }
    int lo = 0;
    for (int i = 1; i <= n; ++i) if (fv[i] < fv[lo]) lo = i;
    if (fv[lo] <= f(best)) best = s[lo];
  }
  return best;
}

// Golden-section minimization of a unimodal function on [a, b].
inline double golden_section(const std::function<double(double)>& f, double a,
                             double b, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * (1 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Central second differences of f along each axis.
inline double fd_laplacian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double h = 1e-4) {
  double lap = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd p = x, m = x;
    p[i] += h;
    m[i] -= h;
    lap += (f(p) - 2.0 * f(x) + f(m)) / (h * h);
  }
  return lap;
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule,
// which converges geometrically for this integrand.
inline double bessel_k_integral(double nu, double x) {
  const double h = 1.0 / 64.0;
  double sum = 0.5 * std::exp(-x);
  for (int i = 1;; ++i) {
    const double t = i * h;
    const double v = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += v;
    if (v < 1e-300 || (t > 5 && v < 1e-18 * sum)) break;
  }
  return sum * h;
}

}  // namespace oracle
