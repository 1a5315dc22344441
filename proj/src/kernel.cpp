#include "genlearn/kernel.hpp"

#include <cmath>

#include "genlearn/bessel.hpp"
#include "genlearn/error.hpp"

namespace genlearn {
namespace {

void check_points(const Point& x, const Point& z) {
  if (x.size() != z.size() || x.size() == 0) {
    throw invalid_input("kernel: points must share a nonzero dimension");
  }
  if (!x.allFinite() || !z.allFinite()) {
    throw invalid_input("kernel: non-finite coordinates");
  }
}

// Gaussian radial profiles are p(s) exp(-a s) with s = r^2, a = theta^2.
// The Laplacian in d dimensions maps p to
//   4 s (p'' - 2a p' + a^2 p) + 2d (p' - a p).
std::vector<double> gaussian_laplacian(const std::vector<double>& p, double a,
                                       int d) {
  const std::size_t n = p.size();
  std::vector<double> dp(n, 0.0), ddp(n, 0.0), out(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) dp[i - 1] = i * p[i];
  for (std::size_t i = 2; i < n; ++i) ddp[i - 2] = i * (i - 1.0) * p[i];
  for (std::size_t i = 0; i < n; ++i) {
    const double inner = ddp[i] - 2.0 * a * dp[i] + a * a * p[i];
    out[i + 1] += 4.0 * inner;
    out[i] += 2.0 * d * (dp[i] - a * p[i]);
  }
  return out;
}

double gaussian_op(double theta, int laplacians, int d, double r2) {
  const double a = theta * theta;
  std::vector<double> p{1.0};
  for (int i = 0; i < laplacians; ++i) p = gaussian_laplacian(p, a, d);
  double poly = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) poly = poly * r2 + p[i];
  return poly * std::exp(-a * r2);
}

// Matérn radial profiles are sums of c t^{2k} phi_mu(t) with
// phi_mu(t) = t^mu K_mu(t) and t = theta r. Using phi_mu' = -t phi_{mu-1},
// the radial Laplacian (in t) of t^{2k} phi_mu is
//   2k(2k+d-2) t^{2k-2} phi_mu - (4k+d) t^{2k} phi_{mu-1} + t^{2k+2} phi_{mu-2}.
struct MaternTerm {
  double coef;
  int k;
  int mu;
};

std::vector<MaternTerm> matern_laplacian(const std::vector<MaternTerm>& terms,
                                         int d) {
  std::vector<MaternTerm> out;
  for (const auto& t : terms) {
    const double lead = 2.0 * t.k * (2.0 * t.k + d - 2.0);
    if (lead != 0.0) out.push_back({t.coef * lead, t.k - 1, t.mu});
    out.push_back({-t.coef * (4.0 * t.k + d), t.k, t.mu - 1});
    out.push_back({t.coef, t.k + 1, t.mu - 2});
  }
  return out;
}

double matern_op(double theta, int j, int laplacians, int d, double r) {
  std::vector<MaternTerm> terms{{1.0, 0, j - 1}};
  double scale = 1.0;
  for (int i = 0; i < laplacians; ++i) {
    terms = matern_laplacian(terms, d);
    scale *= theta * theta;
  }
  const double t = theta * r;
  double sum = 0.0;
  for (const auto& term : terms) {
    sum += term.coef * power_bessel_k(2 * term.k + term.mu, term.mu, t);
  }
  return scale * sum;
}

}  // namespace

KernelSpec KernelSpec::gaussian(double theta) {
  KernelSpec s{KernelType::gaussian, theta, 4};
  s.validate();
  return s;
}

KernelSpec KernelSpec::min_kernel() { return {KernelType::min, 1.0, 4}; }

KernelSpec KernelSpec::sobolev_matern(double theta, int j) {
  KernelSpec s{KernelType::sobolev_matern, theta, j};
  s.validate();
  return s;
}

KernelSpec KernelSpec::linear() { return {KernelType::linear, 1.0, 4}; }

void KernelSpec::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw invalid_input("kernel: theta must be positive");
  }
  if (type == KernelType::sobolev_matern && j < 4) {
    throw invalid_input("kernel: sobolev order j must be >= 4");
  }
}

std::string to_string(KernelType type) {
  switch (type) {
    case KernelType::gaussian: return "gaussian";
    case KernelType::min: return "min";
    case KernelType::sobolev_matern: return "sobolev";
    case KernelType::linear: return "linear";
  }
  return "unknown";
}

std::string to_string(DiffOp op) {
  return op == DiffOp::identity ? "identity" : "laplacian";
}

bool supports(const KernelSpec& spec, DiffOp op) {
  if (op == DiffOp::identity) return true;
  return spec.type != KernelType::min;
}

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& z) {
  return eval_op_kernel(spec, DiffOp::identity, x, DiffOp::identity, z);
}

double eval_op_kernel(const KernelSpec& spec, DiffOp op_left, const Point& x,
                      DiffOp op_right, const Point& z) {
  check_points(x, z);
  if (!supports(spec, op_left) || !supports(spec, op_right)) {
    throw capability_error("kernel " + to_string(spec.type) +
                           " does not support the laplacian");
  }
  const int laplacians = (op_left == DiffOp::laplacian ? 1 : 0) +
                         (op_right == DiffOp::laplacian ? 1 : 0);
  const int d = static_cast<int>(x.size());
  switch (spec.type) {
    case KernelType::gaussian:
      return gaussian_op(spec.theta, laplacians, d, (x - z).squaredNorm());
    case KernelType::sobolev_matern:
      return matern_op(spec.theta, spec.j, laplacians, d, (x - z).norm());
    case KernelType::min: {
      double v = 1.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) v *= std::min(x[i], z[i]);
      return v;
    }
    case KernelType::linear:
      // Linear functions are harmonic.
      return laplacians == 0 ? x.dot(z) : 0.0;
  }
  throw invalid_input("kernel: unknown type");
}

std::vector<Point> tensor_grid(int per_dim, int dims, double lo, double hi) {
  if (per_dim < 1 || dims < 1) throw invalid_input("tensor_grid: bad size");
  std::vector<Point> out;
  std::size_t total = 1;
  for (int i = 0; i < dims; ++i) total *= per_dim;
  out.reserve(total);
  const double h = per_dim > 1 ? (hi - lo) / (per_dim - 1) : 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p(dims);
    std::size_t rest = idx;
    for (int dim = 0; dim < dims; ++dim) {
      p[dim] = per_dim > 1 ? lo + h * (rest % per_dim) : 0.5 * (lo + hi);
      rest /= per_dim;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace genlearn
