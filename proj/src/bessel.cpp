#include "genlearn/bessel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

constexpr double kEuler = 0.57721566490153286060651209;
constexpr double kSeriesCutoff = 1e-4;

// K_0 and K_1 from the ascending series; used for 0 < x <= 2.
void k01_series(double x, double& k0, double& k1) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  double term0 = 1.0;  // q^k / (k!)^2
  double term1 = 1.0;  // q^k / (k! (k+1)!)
  double harmonic = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      harmonic += 1.0 / k;
      term0 *= q / (double(k) * k);
      term1 *= q / (double(k) * (k + 1));
    }
    i0 += term0;
    i1 += term1;
    s0 += harmonic * term0;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 += (-2.0 * kEuler + 2.0 * harmonic + 1.0 / (k + 1)) * term1;
    if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1) break;
  }
  i1 *= 0.5 * x;
  k0 = -(log_half + kEuler) * i0 + s0;
  k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
}

// Steed's continued fraction (CF2, Temme's normalisation) for K_0 and K_1;
// used for x > 2.
void k01_continued_fraction(double x, double& k0, double& k1) {
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double digamma_int(int n) {  // psi(n) for integer n >= 1
  double v = -kEuler;
  for (int k = 1; k < n; ++k) v += 1.0 / k;
  return v;
}

// t^e with the conventions needed at t = 0.
double power_at(double t, int e) {
  if (e == 0) return 1.0;
  if (t == 0.0) return e > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(t, e);
}

// t^power K_m(t) from the ascending series of K_m (integer m >= 0).
double power_bessel_series(int power, int m, double t) {
  constexpr int kTerms = 8;
  double sum = 0.0;
  // Singular polynomial part: 0.5 (t/2)^-m sum_{k<m} (m-k-1)!/k! (-t^2/4)^k.
  for (int k = 0; k < m; ++k) {
    const double coef = 0.5 * std::pow(2.0, m) * factorial(m - k - 1) /
                        factorial(k) * std::pow(-0.25, k);
    sum += coef * power_at(t, power - m + 2 * k);
  }
  // Logarithmic part: (-1)^{m+1} ln(t/2) I_m(t).
  // and regular part: (-1)^m 0.5 (t/2)^m sum psi-terms.
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  for (int k = 0; k < kTerms; ++k) {
    const int e = power + m + 2 * k;
    const double base =
        std::pow(0.5, m) * std::pow(0.25, k) / (factorial(k) * factorial(m + k));
    if (e == 0) {
      // Only reached for power = m = k = 0; the logarithm diverges.
      return std::numeric_limits<double>::infinity();
    }
    if (t == 0.0) {
      if (e < 0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double te = std::pow(t, e);
    sum += -sign * std::log(0.5 * t) * base * te;
    sum += sign * 0.5 * (digamma_int(k + 1) + digamma_int(m + k + 1)) * base * te;
  }
  return sum;
}

}  // namespace

double bessel_k(int nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw invalid_input("bessel_k: argument must be positive and finite");
  }
  nu = std::abs(nu);
  double k0, k1;
  if (x <= 2.0) {
    k01_series(x, k0, k1);
  } else {
    k01_continued_fraction(x, k0, k1);
  }
  if (nu == 0) return k0;
  // Upward recurrence K_{n+1} = K_{n-1} + (2n/x) K_n is stable for K.
  double prev = k0, cur = k1;
  for (int n = 1; n < nu; ++n) {
    const double next = prev + (2.0 * n / x) * cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

double power_bessel_k(int power, int order, double t) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw invalid_input("power_bessel_k: argument must be finite and >= 0");
  }
  order = std::abs(order);
  if (t < kSeriesCutoff) return power_bessel_series(power, order, t);
  return std::pow(t, power) * bessel_k(order, t);
}

}  // namespace genlearn
