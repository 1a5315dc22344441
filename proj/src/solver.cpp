#include "genlearn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "genlearn/error.hpp"
#include "genlearn/risk.hpp"

namespace genlearn {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Largest eigenvalue of a symmetric PSD matrix, 30 power iterations from
// the all-ones vector.
double power_iteration(const MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  VectorXd v = VectorXd::Ones(a.rows()) / std::sqrt(double(a.rows()));
  double est = 0.0;
  for (int it = 0; it < 30; ++it) {
    VectorXd w = a * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    est = v.dot(w);
    v = w / n;
  }
  return std::max(est, (a * v).norm());
}

double g_norm(const MatrixXd& g, const VectorXd& c) {
  return std::sqrt(std::max(0.0, c.dot(g * c)));
}

// argmin_r w phi(r) + (r - r0)^2 / 2 for r >= 0.
double radial_shrink(double r0, double w, const Regularizer& reg) {
  if (r0 <= 0.0) return 0.0;
  switch (reg.kind) {
    case RegularizerKind::linear: return std::max(0.0, r0 - w);
    case RegularizerKind::quadratic: return r0 / (1.0 + 2.0 * w);
    case RegularizerKind::power: {
      double lo = 0.0, hi = r0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid + w * reg.derivative(mid) > r0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return r0;
}

// prox of w phi(||f||) with f = sum c_j rep_j: radial shrinkage of f.
VectorXd radial_prox(const MatrixXd& g, const VectorXd& c, double w,
                     const Regularizer& reg) {
  const double r0 = g_norm(g, c);
  if (r0 == 0.0) return VectorXd::Zero(c.size());
  return c * (radial_shrink(r0, w, reg) / r0);
}

// Regularized risk over representer coefficients c of a fixed basis with
// Gram `gram`; sample k reads <f, xi_k> = (G c)[rows[k]]. An optional
// anchor adds (anchor_weight / 2) ||f - f_anchor||^2.
struct CoefficientProblem {
  const MatrixXd* gram = nullptr;
  std::vector<Index> rows;
  VectorXd y;
  std::vector<Loss> losses;
  double lambda = 0.0;
  Regularizer reg;
  VectorXd anchor;
  double anchor_weight = 0.0;

  double objective(const VectorXd& c) const {
    const VectorXd gc = (*gram) * c;
    double v = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      v += loss_value(losses[k], y[k], gc[rows[k]]);
    }
    v += lambda * reg.value(std::sqrt(std::max(0.0, c.dot(gc))));
    if (anchor.size() != 0) {
      const VectorXd d = c - anchor;
      v += 0.5 * anchor_weight * d.dot((*gram) * d);
    }
    return v;
  }

  // Coefficients of an RKHS subgradient: loss terms contribute a_k to the
  // coefficient of their own representer.
  VectorXd subgradient(const VectorXd& c) const { return direction(c, 0.0); }

  // Minimum-norm element of the subdifferentials met within `radius` of c:
  // every loss whose kink lies within radius * ||rep_k|| of its prediction
  // contributes its whole interval, and the minimum-norm combination is
  // found by coordinate descent on the box. radius = 0 gives a plain
  // subgradient.
  VectorXd direction(const VectorXd& c, double radius) const {
    const MatrixXd& g = *gram;
    const VectorXd gc = g * c;
    VectorXd d = VectorXd::Zero(c.size());
    std::vector<std::size_t> free;
    std::vector<Interval> boxes;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Index r = rows[k];
      const double t = gc[r];
      double kink = t;
      bool has_kink = false;
      if (losses[k].kind == LossKind::absolute) {
        kink = y[k];
        has_kink = true;
      } else if (losses[k].kind == LossKind::hinge && y[k] != 0.0) {
        kink = 1.0 / y[k];
        has_kink = true;
      }
      if (has_kink && radius > 0.0 && t != kink &&
          std::abs(t - kink) <= radius * std::sqrt(std::max(g(r, r), 0.0))) {
        free.push_back(k);
        boxes.push_back(genlearn::subgradient(losses[k], y[k], kink));
        d[r] += boxes.back().pick();
      } else {
        const Interval iv = genlearn::subgradient(losses[k], y[k], t);
        if (iv.lo < iv.hi && radius > 0.0) {
          free.push_back(k);
          boxes.push_back(iv);
        }
        d[r] += iv.pick();
      }
    }
    const double rn = std::sqrt(std::max(0.0, c.dot(gc)));
    VectorXd fixed = VectorXd::Zero(c.size());
    if (rn > 0.0) fixed += (lambda * reg.derivative(rn) / rn) * c;
    if (anchor.size() != 0) fixed += anchor_weight * (c - anchor);
    if (!free.empty()) {
      std::vector<double> a(free.size());
      for (std::size_t i = 0; i < free.size(); ++i) a[i] = boxes[i].pick();
      VectorXd total = d + fixed;
      VectorXd gt = g * total;
      for (int sweep = 0; sweep < 100; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < free.size(); ++i) {
          const Index r = rows[free[i]];
          if (!(g(r, r) > 0.0)) continue;
          const double next =
              std::clamp(a[i] - gt[r] / g(r, r), boxes[i].lo, boxes[i].hi);
          const double delta = next - a[i];
          if (delta == 0.0) continue;
          a[i] = next;
          total[r] += delta;
          gt += delta * g.col(r);
          moved = std::max(moved, std::abs(delta));
        }
        if (moved <= 1e-14) break;
      }
      d = total - fixed;
    }
    d += fixed;
    // A linear phi is kinked at f = 0; its subdifferential there is the
    // lambda-ball.
    if (reg.kind == RegularizerKind::linear && rn <= radius) {
      const double dn = g_norm(g, d);
      d *= dn > lambda ? 1.0 - lambda / dn : 0.0;
    }
    return d;
  }

  bool all_square() const {
    return std::all_of(losses.begin(), losses.end(),
                       [](const Loss& l) { return l.kind == LossKind::square; });
  }
};

struct IterateResult {
  VectorXd x;
  double objective;
  int iterations;
  bool converged;
};

struct DescentOps {
  std::function<double(const VectorXd&)> objective;
  // Descent direction at x for step scale eta.
  std::function<VectorXd(const VectorXd&, double)> direction;
  std::function<double(const VectorXd&)> norm;
  // Optional proximal map applied after each step with the step length.
  std::function<VectorXd(const VectorXd&, double)> prox;
};

// Restarted subgradient method. Stage s runs up to kStage iterations with
// normalized steps of length eta_s / sqrt(k + 1) from the best iterate. eta
// is kept while the best iterate keeps travelling, and halved otherwise.
IterateResult restarted_subgradient(const DescentOps& ops, VectorXd x0,
                                    double eta0, int max_iter, double tol) {
  constexpr int kStage = 1000;
  constexpr int kQuietStages = 4;
  VectorXd best = std::move(x0);
  double best_obj = ops.objective(best);
  double eta = eta0;
  int total = 0;
  int quiet = 0;
  while (total < max_iter) {
    VectorXd x = best;
    const VectorXd start = best;
    const double stage_start = best_obj;
    double budget = 0.0;
    for (int k = 0; k < kStage && total < max_iter; ++k, ++total) {
      const VectorXd g = ops.direction(x, eta);
      const double gn = ops.norm(g);
      double alpha;
      if (gn > 0.0) {
        alpha = eta / std::sqrt(k + 1.0) / gn;
        x -= alpha * g;
        budget += eta / std::sqrt(k + 1.0);
      } else if (ops.prox) {
        alpha = eta / std::sqrt(k + 1.0);
      } else {
        ++total;
        break;  // stationary at this resolution; refine eta
      }
      if (ops.prox) x = ops.prox(x, alpha);
      const double o = ops.objective(x);
      if (o < best_obj) {
        best_obj = o;
        best = x;
      }
    }
    const double gain = stage_start - best_obj;
    if (gain <= tol * (1.0 + std::abs(best_obj))) {
      // Stalled stages only count once the step is below the resolution.
      if (++quiet >= kQuietStages &&
          eta <= 100.0 * tol * (1.0 + ops.norm(best))) {
        return {best, best_obj, total, true};
      }
    } else {
      quiet = 0;
    }
    // A best iterate that travelled a good part of the step budget is still
    // heading somewhere; otherwise the stage was oscillating.
    if (!(ops.norm(best - start) > 0.25 * budget)) eta *= 0.5;
    if (eta < 1e-300) break;
  }
  return {best, best_obj, total, false};
}

// Proximal gradient on sum_k s_k (t_k - y_k)^2 [+ anchor term] plus
// w phi(||f||), with RKHS gradient steps and radial proximal steps.
IterateResult prox_gradient(const CoefficientProblem& prob, VectorXd c,
                            int max_iter, double tol, bool check_monotone) {
  const MatrixXd& g = *prob.gram;
  const Index m = g.rows();
  // Hessian (coefficient form) of the smooth part: 2 P S G + anchor_weight.
  MatrixXd sg = MatrixXd::Zero(m, m);
  VectorXd sy = VectorXd::Zero(m);
  for (std::size_t k = 0; k < prob.rows.size(); ++k) {
    const Index r = prob.rows[k];
    sg.row(r) += prob.losses[k].weight * g.row(r);
    sy[r] += prob.losses[k].weight * prob.y[k];
  }
  // sg = P S G with P S diagonal, so the spectrum equals that of the
  // symmetric S^{1/2} G S^{1/2} restricted to the sampled rows.
  VectorXd sqrt_s = VectorXd::Zero(m);
  for (std::size_t k = 0; k < prob.rows.size(); ++k) {
    sqrt_s[prob.rows[k]] = std::sqrt(sqrt_s[prob.rows[k]] *
                                         sqrt_s[prob.rows[k]] +
                                     prob.losses[k].weight);
  }
  const MatrixXd sym = sqrt_s.asDiagonal() * g * sqrt_s.asDiagonal();
  const double lip = 2.0 * power_iteration(sym) + prob.anchor_weight;
  double step = lip > 0.0 ? 0.9 / lip : 1.0;

  auto smooth_grad = [&](const VectorXd& x) {
    VectorXd grad = 2.0 * (sg * x - sy);
    if (prob.anchor.size() != 0) grad += prob.anchor_weight * (x - prob.anchor);
    return grad;
  };
  double obj = prob.objective(c);
  for (int it = 1; it <= max_iter; ++it) {
    VectorXd next;
    double next_obj;
    for (;;) {
      next = radial_prox(g, c - step * smooth_grad(c), prob.lambda * step,
                         prob.reg);
      next_obj = prob.objective(next);
      if (!check_monotone ||
          next_obj <= obj + 1e-13 * (1.0 + std::abs(obj)) || step < 1e-300) {
        break;
      }
      step *= 0.5;  // power-iteration estimate fell short of L
    }
    const double change = std::abs(obj - next_obj);
    c = std::move(next);
    obj = next_obj;
    if (change <= tol * std::abs(obj) || change == 0.0) {
      return {c, obj, it, true};
    }
  }
  return {c, obj, max_iter, false};
}

CoefficientProblem make_problem(const GeneralizedDataset& ds,
                                const MatrixXd& g, double lambda,
                                const Regularizer& reg, Index offset = 0) {
  CoefficientProblem p;
  p.gram = &g;
  p.y = ds.outputs();
  p.losses = ds.multiloss().sample_losses();
  for (Index k = 0; k < ds.size(); ++k) p.rows.push_back(offset + k);
  p.lambda = lambda;
  p.reg = reg;
  return p;
}

SolveInfo make_info(Method m, double lambda, double objective, int iterations,
                    bool converged) {
  SolveInfo info;
  info.method = to_string(m);
  info.lambda = lambda;
  info.objective = objective;
  info.iterations = iterations;
  info.converged = converged;
  if (!converged) {
    info.warnings.push_back("iteration budget exhausted; returning best iterate");
  }
  return info;
}

void check_dataset(const GeneralizedDataset& ds) {
  ds.validate();
  if (ds.size() == 0) throw invalid_input("solver: dataset has no samples");
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform on [lo, hi) from a portable generator.
double uniform(std::uint64_t& state, double lo, double hi) {
  const double u = double(splitmix(state) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

Regularizer Regularizer::power(double p) {
  if (!(p > 1.0)) throw invalid_input("regularizer: power needs p > 1");
  return {RegularizerKind::power, p};
}

double Regularizer::exponent() const {
  switch (kind) {
    case RegularizerKind::linear: return 1.0;
    case RegularizerKind::quadratic: return 2.0;
    case RegularizerKind::power: return p;
  }
  return 1.0;
}

double Regularizer::value(double r) const { return std::pow(r, exponent()); }

double Regularizer::derivative(double r) const {
  switch (kind) {
    case RegularizerKind::linear: return 1.0;
    case RegularizerKind::quadratic: return 2.0 * r;
    case RegularizerKind::power: return p * std::pow(r, p - 1.0);
  }
  return 0.0;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::tikhonov: return "tikhonov";
    case Method::subgradient: return "subgradient";
    case Method::prox_grad: return "prox_grad";
    case Method::douglas_rachford: return "douglas_rachford";
    case Method::feature_pnorm: return "feature_pnorm";
    case Method::model_class: return "model_class";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::tikhonov, Method::subgradient, Method::prox_grad,
                   Method::douglas_rachford, Method::feature_pnorm,
                   Method::model_class}) {
    if (to_string(m) == name) return m;
  }
  throw invalid_input("unknown method '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw invalid_input("solver: lambda must be positive");
  }
  if (!(tol > 0.0)) throw invalid_input("solver: tol must be positive");
  if (max_iter < 1) throw invalid_input("solver: max_iter must be >= 1");
  if (!(dr_theta > 0.0)) throw invalid_input("solver: dr_theta must be > 0");
  if (!(dr_sigma > 0.0 && dr_sigma < 2.0)) {
    throw invalid_input("solver: dr_sigma must lie in (0, 2)");
  }
  if (method == Method::feature_pnorm && !(p >= 1.0 && p <= 2.0)) {
    throw invalid_input("solver: feature p must lie in [1, 2]");
  }
}

double regularized_objective(const GeneralizedDataset& ds, const Solution& f,
                             double lambda, const Regularizer& reg) {
  return empirical_risk(ds, f) + lambda * reg.value(f.norm());
}

Solution solve_tikhonov(const GeneralizedDataset& ds, double lambda) {
  check_dataset(ds);
  if (!(lambda > 0.0)) throw invalid_input("tikhonov: lambda must be positive");
  if (!ds.all_square()) {
    throw invalid_method("tikhonov: closed form needs square losses only");
  }
  auto basis = ds.functionals();
  const MatrixXd g = gram(ds.kernel, basis);
  const auto losses = ds.multiloss().sample_losses();
  const Index n = g.rows();
  VectorXd s(n);
  for (Index k = 0; k < n; ++k) s[k] = losses[k].weight;
  const VectorXd y = ds.outputs();

  MatrixXd a = s.asDiagonal() * g;
  a.diagonal().array() += lambda;
  const VectorXd rhs = s.cwiseProduct(y);
  VectorXd c = a.partialPivLu().solve(rhs);
  SolveInfo info;
  if (!c.allFinite() || (a * c - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
    const double eps = 1e-10 * g.trace() / double(n);
    a.diagonal().array() += eps;
    c = a.fullPivLu().solve(rhs);
    info.warnings.push_back("tikhonov: jitter added to the system");
    if (!c.allFinite()) throw numerical_error("tikhonov: singular system");
  }
  Solution f = Solution::representer(ds.kernel, std::move(basis), c, g);
  const double obj =
      regularized_objective(ds, f, lambda, Regularizer::quadratic());
  auto warnings = std::move(info.warnings);
  f.info = make_info(Method::tikhonov, lambda, obj, 1, true);
  f.info.warnings = std::move(warnings);
  return f;
}

Solution solve_subgradient(const GeneralizedDataset& ds,
                           const SolverConfig& cfg) {
  check_dataset(ds);
  cfg.validate();
  auto basis = ds.functionals();
  const MatrixXd g = gram(ds.kernel, basis);
  const CoefficientProblem prob =
      make_problem(ds, g, cfg.lambda, cfg.regularizer);
  DescentOps ops;
  ops.objective = [&](const VectorXd& c) { return prob.objective(c); };
  ops.direction = [&](const VectorXd& c, double eta) {
    return prob.direction(c, eta);
  };
  ops.norm = [&](const VectorXd& d) { return g_norm(g, d); };
  const double eta0 = 1.0 / (1.0 + power_iteration(g));
  const auto res = restarted_subgradient(ops, VectorXd::Zero(g.rows()), eta0,
                                         cfg.max_iter, cfg.tol);
  Solution f = Solution::representer(ds.kernel, std::move(basis), res.x, g);
  f.info = make_info(Method::subgradient, cfg.lambda,
                     regularized_objective(ds, f, cfg.lambda, cfg.regularizer),
                     res.iterations, res.converged);
  return f;
}

Solution solve_prox_grad(const GeneralizedDataset& ds, const SolverConfig& cfg) {
  check_dataset(ds);
  cfg.validate();
  if (!ds.all_square()) {
    throw invalid_method("prox_grad: the smooth part must be square losses");
  }
  auto basis = ds.functionals();
  const MatrixXd g = gram(ds.kernel, basis);
  const CoefficientProblem prob =
      make_problem(ds, g, cfg.lambda, cfg.regularizer);
  const auto res =
      prox_gradient(prob, VectorXd::Zero(g.rows()), cfg.max_iter, cfg.tol, true);
  Solution f = Solution::representer(ds.kernel, std::move(basis), res.x, g);
  f.info = make_info(Method::prox_grad, cfg.lambda,
                     regularized_objective(ds, f, cfg.lambda, cfg.regularizer),
                     res.iterations, res.converged);
  return f;
}

namespace {

// prox_{theta T}(anchor) for T = R_component + lambda' phi(||.||).
class ComponentProx {
 public:
  ComponentProx(CoefficientProblem prob, double theta, const SolverConfig& cfg)
      : prob_(std::move(prob)), theta_(theta), cfg_(cfg) {
    prob_.anchor_weight = 1.0 / theta_;
    const MatrixXd& g = *prob_.gram;
    if (!prob_.rows.empty() && prob_.all_square() &&
        prob_.reg.kind == RegularizerKind::quadratic) {
      // (2 P S G + (2 lambda' + 1/theta) I) c = 2 P S y + anchor / theta.
      MatrixXd a = MatrixXd::Identity(g.rows(), g.cols()) *
                   (2.0 * prob_.lambda + 1.0 / theta_);
      rhs_base_ = VectorXd::Zero(g.rows());
      for (std::size_t k = 0; k < prob_.rows.size(); ++k) {
        const Index r = prob_.rows[k];
        a.row(r) += 2.0 * prob_.losses[k].weight * g.row(r);
        rhs_base_[r] += 2.0 * prob_.losses[k].weight * prob_.y[k];
      }
      lu_.compute(a);
      closed_form_ = true;
    }
  }

  VectorXd operator()(const VectorXd& anchor, std::vector<std::string>& warnings) {
    const MatrixXd& g = *prob_.gram;
    if (prob_.rows.empty()) {
      return radial_prox(g, anchor, theta_ * prob_.lambda, prob_.reg);
    }
    if (closed_form_) return lu_.solve(rhs_base_ + anchor / theta_);
    prob_.anchor = anchor;
    const double inner_tol = cfg_.tol / 10.0;
    const int inner_cap = std::max(1, cfg_.max_iter / 10);
    IterateResult res = prob_.all_square()
                            ? prox_gradient(prob_, anchor, inner_cap, inner_tol, true)
                            : primal_dual(anchor, inner_cap, inner_tol);
    if (!res.converged && warnings.size() < 8) {
      warnings.push_back("douglas_rachford: inner prox did not converge");
    }
    return res.x;
  }

 private:
  // Primal-dual iteration on sum_k loss_k(<f, xi_k>) + R(f) with
  // R = lambda' phi(||f||) + ||f - anchor||^2 / (2 theta). Warm-started from
  // the previous call.
  IterateResult primal_dual(const VectorXd& anchor, int cap, double tol) {
    const MatrixXd& g = *prob_.gram;
    const Index n = static_cast<Index>(prob_.rows.size());
    if (knorm_ < 0.0) {
      MatrixXd sub(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) sub(i, j) = g(prob_.rows[i], prob_.rows[j]);
      knorm_ = std::sqrt(std::max(power_iteration(sub), 1e-300));
      c_ = anchor;
      u_ = VectorXd::Zero(n);
    }
    const double tau = 0.99 / knorm_, sigma = 0.99 / knorm_;
    const double blend = 1.0 / theta_ + 1.0 / tau;
    VectorXd c = c_, u = u_, cbar = c;
    for (int it = 1; it <= cap; ++it) {
      // f <- prox_{tau R}(f - tau K* u)
      VectorXd v = c;
      for (Index k = 0; k < n; ++k) v[prob_.rows[k]] -= tau * u[k];
      const VectorXd mid = (anchor / theta_ + v / tau) / blend;
      const VectorXd next = radial_prox(g, mid, prob_.lambda / blend, prob_.reg);
      cbar = 2.0 * next - c;
      // u <- prox_{sigma loss*}(u + sigma K cbar) via the Moreau identity.
      const VectorXd gc = g * cbar;
      VectorXd unext(n);
      for (Index k = 0; k < n; ++k) {
        const double w = u[k] + sigma * gc[prob_.rows[k]];
        unext[k] = w - sigma * prox(prob_.losses[k], prob_.y[k], w / sigma,
                                    1.0 / sigma);
      }
      const double dc = g_norm(g, next - c), du = (unext - u).norm();
      c = next;
      u = unext;
      if (dc <= tol && du <= tol) {
        c_ = c;
        u_ = u;
        return {c, prob_.objective(c), it, true};
      }
    }
    c_ = c;
    u_ = u;
    return {c, prob_.objective(c), cap, false};
  }

  CoefficientProblem prob_;
  double theta_;
  double knorm_ = -1.0;
  VectorXd c_, u_;
  SolverConfig cfg_;
  bool closed_form_ = false;
  Eigen::PartialPivLU<MatrixXd> lu_;
  VectorXd rhs_base_;
};

}  // namespace

Solution solve_douglas_rachford(const GeneralizedDataset& ds_a,
                                const GeneralizedDataset& ds_b,
                                const SolverConfig& cfg) {
  cfg.validate();
  if (!(ds_a.kernel == ds_b.kernel)) {
    throw invalid_input("douglas_rachford: datasets must share the kernel");
  }
  ds_a.validate();
  ds_b.validate();
  const GeneralizedDataset merged = merge(ds_a, ds_b);
  if (merged.size() == 0) {
    throw invalid_input("douglas_rachford: both datasets are empty");
  }
  auto basis = merged.functionals();
  const MatrixXd g = gram(merged.kernel, basis);
  const double half = 0.5 * cfg.lambda;

  auto component = [&](const GeneralizedDataset& ds, Index offset) {
    CoefficientProblem p;
    p.gram = &g;
    p.lambda = half;
    p.reg = cfg.regularizer;
    if (ds.size() > 0) {
      p = make_problem(ds, g, half, cfg.regularizer, offset);
    }
    return p;
  };
  ComponentProx prox_b(component(ds_a, 0), cfg.dr_theta, cfg);
  ComponentProx prox_w(component(ds_b, ds_a.size()), cfg.dr_theta, cfg);

  std::vector<std::string> warnings;
  VectorXd gk = VectorXd::Zero(g.rows());
  VectorXd hb = gk;
  bool converged = false;
  bool diverged = false;
  int it = 0;
  for (it = 1; it <= cfg.max_iter; ++it) {
    hb = prox_b(gk, warnings);
    const VectorXd hw = prox_w(2.0 * hb - gk, warnings);
    const VectorXd diff = hw - hb;
    gk += cfg.dr_sigma * diff;
    if (g_norm(g, diff) < cfg.tol) {
      converged = true;
      break;
    }
    if (g_norm(g, gk) > 1e8 || !gk.allFinite()) {
      diverged = true;
      break;
    }
  }
  Solution f = Solution::representer(merged.kernel, std::move(basis), hb, g);
  f.info = make_info(Method::douglas_rachford, cfg.lambda,
                     regularized_objective(merged, f, cfg.lambda, cfg.regularizer),
                     std::min(it, cfg.max_iter), converged);
  if (diverged) f.info.warnings.push_back("douglas_rachford: iterates diverged");
  f.info.warnings.insert(f.info.warnings.end(), warnings.begin(), warnings.end());
  return f;
}

Solution solve_feature_pnorm(const GeneralizedDataset& ds,
                             const SolverConfig& cfg,
                             std::shared_ptr<const FeatureMap> features) {
  check_dataset(ds);
  cfg.validate();
  if (!(cfg.p >= 1.0 && cfg.p <= 2.0)) {
    throw invalid_input("feature_pnorm: p must lie in [1, 2]");
  }
  if (!features || !(features->spec() == ds.kernel)) {
    throw invalid_input("feature_pnorm: feature map must use the data kernel");
  }
  const auto xis = ds.functionals();
  const Index n = ds.size(), m = features->size();
  MatrixXd phi(n, m);
  for (Index k = 0; k < n; ++k) phi.row(k) = features->apply(xis[k]).transpose();
  const VectorXd y = ds.outputs();
  const auto losses = ds.multiloss().sample_losses();
  VectorXd s(n);
  for (Index k = 0; k < n; ++k) s[k] = losses[k].weight;
  const double p = cfg.p, lambda = cfg.lambda;

  auto objective = [&](const VectorXd& w) {
    const VectorXd t = phi * w;
    double v = 0.0;
    for (Index k = 0; k < n; ++k) v += loss_value(losses[k], y[k], t[k]);
    return v + lambda * w.array().abs().pow(p).sum();
  };
  auto loss_direction = [&](const VectorXd& w) {
    const VectorXd t = phi * w;
    VectorXd a(n);
    for (Index k = 0; k < n; ++k) a[k] = subgradient(losses[k], y[k], t[k]).pick();
    return VectorXd(phi.transpose() * a);
  };
  auto soft = [lambda](const VectorXd& w, double step) {
    return VectorXd(w.unaryExpr([&](double v) {
      return std::copysign(std::max(0.0, std::abs(v) - lambda * step), v);
    }));
  };
  const bool smooth = ds.all_square();
  const double lip =
      2.0 * power_iteration(phi.transpose() * s.asDiagonal() * phi);

  IterateResult res{VectorXd::Zero(m), objective(VectorXd::Zero(m)), 0, false};
  if (smooth && (p == 1.0 || p == 2.0)) {
    // Iterative soft-thresholding (p = 1) or gradient descent (p = 2).
    const double step = 0.9 / (lip + (p == 2.0 ? 2.0 * lambda : 0.0) + 1e-300);
    VectorXd w = res.x;
    double obj = res.objective;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      VectorXd grad = 2.0 * phi.transpose() * s.cwiseProduct(phi * w - y);
      VectorXd next;
      if (p == 1.0) {
        next = soft(w - step * grad, step);
      } else {
        next = w - step * (grad + 2.0 * lambda * w);
      }
      const double next_obj = objective(next);
      const double change = std::abs(obj - next_obj);
      w = std::move(next);
      obj = next_obj;
      res = {w, obj, it, false};
      if (change <= cfg.tol * std::abs(obj) || change == 0.0) {
        res.converged = true;
        break;
      }
    }
  } else {
    DescentOps ops;
    ops.objective = objective;
    ops.norm = [](const VectorXd& d) { return d.norm(); };
    if (p == 1.0) {
      ops.direction = [&](const VectorXd& w, double) { return loss_direction(w); };
      ops.prox = soft;
    } else {
      ops.direction = [&](const VectorXd& w, double) {
        VectorXd g = loss_direction(w);
        g += (lambda * p) *
             w.unaryExpr([p](double v) {
                return std::copysign(std::pow(std::abs(v), p - 1.0), v);
              });
        return g;
      };
    }
    const double eta0 = 1.0 / (1.0 + lip);
    res = restarted_subgradient(ops, VectorXd::Zero(m), eta0, cfg.max_iter,
                                cfg.tol);
  }
  Solution f = Solution::features(std::move(features), res.x, p);
  f.info = make_info(Method::feature_pnorm, lambda, objective(res.x),
                     res.iterations, res.converged);
  return f;
}

namespace {

// Copies `small` into a network with wider hidden layers. New units get
// small random incoming weights and zero outgoing weights, so the function
// is unchanged.
VectorXd embed_network(const SigmoidNetwork& small, const VectorXd& small_params,
                       const SigmoidNetwork& big, std::uint64_t& rng) {
  const auto& ws = small.widths();
  const auto& wb = big.widths();
  if (ws.size() != wb.size()) {
    throw invalid_input("model_class: warm start needs the same depth");
  }
  VectorXd out(big.parameter_count());
  Index at_s = 0, at_b = 0;
  for (std::size_t l = 1; l < wb.size(); ++l) {
    const int out_s = ws[l], in_s = ws[l - 1];
    const int out_b = wb[l], in_b = wb[l - 1];
    if (out_s > out_b || in_s > in_b) {
      throw invalid_input("model_class: warm start network is larger");
    }
    for (int i = 0; i < out_b; ++i) {
      for (int j = 0; j < in_b; ++j) {
        double v;
        if (i < out_s && j < in_s) {
          v = small_params[at_s + i * in_s + j];
        } else if (i >= out_s && l + 1 < wb.size()) {
          v = uniform(rng, -1.0, 1.0);  // incoming weights of a new unit
        } else {
          v = 0.0;  // outgoing weights of new units
        }
        out[at_b + i * in_b + j] = v;
      }
    }
    at_s += out_s * in_s;
    at_b += out_b * in_b;
    for (int i = 0; i < out_b; ++i) {
      out[at_b + i] = i < out_s ? small_params[at_s + i]
                                : (l + 1 < wb.size() ? uniform(rng, -1.0, 1.0)
                                                     : 0.0);
    }
    at_s += out_s;
    at_b += out_b;
  }
  return out;
}

}  // namespace

Solution solve_model_class(const GeneralizedDataset& ds, const SolverConfig& cfg,
                           const ModelClass& mc, const Solution* warm_start) {
  check_dataset(ds);
  cfg.validate();
  if (!(mc.bound > 0.0)) throw invalid_input("model_class: bound must be > 0");
  const auto xis = ds.functionals();
  for (const auto& xi : xis) {
    if (xi.uses(DiffOp::laplacian)) {
      throw capability_error("model_class: networks take point and quadrature "
                             "functionals only");
    }
  }
  const int d = xis.front().dimension();
  std::vector<int> widths{d};
  SigmoidNetwork net = mc.hidden.empty()
                           ? network_for_budget(d, mc.m)
                           : SigmoidNetwork([&] {
                               widths.insert(widths.end(), mc.hidden.begin(),
                                             mc.hidden.end());
                               return widths;
                             }());
  const std::vector<Point> grid =
      mc.grid.empty() ? tensor_grid(33, d, mc.lo, mc.hi) : mc.grid;
  const VectorXd y = ds.outputs();
  const auto losses = ds.multiloss().sample_losses();
  const Index n = ds.size(), np = net.parameter_count();
  const double lambda = cfg.lambda;
  const Regularizer reg = cfg.regularizer;

  auto predictions = [&](const VectorXd& w) {
    VectorXd t(n);
    for (Index k = 0; k < n; ++k) {
      double v = 0.0;
      for (const auto& a : xis[k].atoms()) v += a.weight * net.evaluate(w, a.x);
      t[k] = v;
    }
    return t;
  };
  auto sup_norm = [&](const VectorXd& w, Index* arg) {
    double best = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = std::abs(net.evaluate(w, grid[i]));
      if (v > best) {
        best = v;
        if (arg) *arg = static_cast<Index>(i);
      }
    }
    return best;
  };
  auto objective = [&](const VectorXd& w) {
    const VectorXd t = predictions(w);
    double v = 0.0;
    for (Index k = 0; k < n; ++k) v += loss_value(losses[k], y[k], t[k]);
    return v + lambda * reg.value(sup_norm(w, nullptr));
  };
  auto gradient = [&](const VectorXd& w) {
    VectorXd grad = VectorXd::Zero(np), gx;
    for (Index k = 0; k < n; ++k) {
      double t = 0.0;
      VectorXd gk = VectorXd::Zero(np);
      for (const auto& a : xis[k].atoms()) {
        t += a.weight * net.evaluate_with_gradient(w, a.x, gx);
        gk += a.weight * gx;
      }
      grad += subgradient(losses[k], y[k], t).pick() * gk;
    }
    Index arg = 0;
    const double r = sup_norm(w, &arg);
    if (r > 0.0) {
      const double v = net.evaluate_with_gradient(w, grid[arg], gx);
      grad += lambda * reg.derivative(r) * (v >= 0.0 ? 1.0 : -1.0) * gx;
    }
    return grad;
  };
  auto clamp = [&](VectorXd w) {
    return VectorXd(w.cwiseMax(-mc.bound).cwiseMin(mc.bound));
  };

  std::uint64_t rng = cfg.seed * 0x2545F4914F6CDD1Dull + 0x1234567ull;
  const int restarts = std::max(1, mc.restarts);
  const int per_restart = std::max(1, cfg.max_iter / restarts);
  VectorXd best;
  double best_obj = std::numeric_limits<double>::infinity();
  int total_iters = 0;
  bool any_converged = false;
  for (int r = 0; r < restarts; ++r) {
    VectorXd w(np);
    if (r == 0 && warm_start != nullptr) {
      const auto* prev = warm_start->as_network();
      if (!prev) throw invalid_input("model_class: warm start must be a network");
      w = clamp(embed_network(prev->network, prev->params, net, rng));
    } else {
      // Hidden layers get spread-out slopes and offsets; the output starts
      // small.
      Index at = 0;
      const auto& ws = net.widths();
      for (std::size_t l = 1; l < ws.size(); ++l) {
        const bool output = l + 1 == ws.size();
        const double scale = output ? 0.5 : 4.0;
        for (int i = 0; i < ws[l] * (ws[l - 1] + 1); ++i) {
          w[at++] = uniform(rng, -scale, scale);
        }
      }
      w = clamp(w);
    }
    double obj = objective(w);
    double step = 0.1;
    double window_start = obj;
    bool converged = false;
    int it = 0;
    for (it = 1; it <= per_restart; ++it) {
      const VectorXd grad = gradient(w);
      if (!grad.allFinite()) break;
      bool accepted = false;
      while (step > 1e-14) {
        VectorXd cand = clamp(w - step * grad);
        const double o = objective(cand);
        if (o < obj) {
          w = std::move(cand);
          obj = o;
          step *= 1.25;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        converged = true;
        break;
      }
      if (it % 200 == 0) {
        if (window_start - obj <= cfg.tol * (1.0 + std::abs(obj))) {
          converged = true;
          break;
        }
        window_start = obj;
      }
    }
    total_iters += std::min(it, per_restart);
    if (std::isfinite(obj) && obj < best_obj) {
      best_obj = obj;
      best = w;
      any_converged = converged;
    }
  }
  if (!std::isfinite(best_obj)) {
    throw convergence_error("model_class: every restart diverged");
  }
  Solution f = Solution::network(net, best, grid);
  f.info = make_info(Method::model_class, lambda, best_obj, total_iters,
                     any_converged);
  return f;
}

std::vector<Point> default_feature_nodes(int dims) {
  if (dims == 1) return tensor_grid(64, 1);
  if (dims == 2) return tensor_grid(8, 2);
  return tensor_grid(4, dims);
}

Solution solve(const GeneralizedDataset& ds, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::tikhonov: return solve_tikhonov(ds, cfg.lambda);
    case Method::subgradient: return solve_subgradient(ds, cfg);
    case Method::prox_grad: return solve_prox_grad(ds, cfg);
    case Method::douglas_rachford: {
      GeneralizedDataset a = ds, b = ds;
      const std::size_t half = (ds.blocks.size() + 1) / 2;
      a.blocks.assign(ds.blocks.begin(), ds.blocks.begin() + half);
      b.blocks.assign(ds.blocks.begin() + half, ds.blocks.end());
      return solve_douglas_rachford(a, b, cfg);
    }
    case Method::feature_pnorm: {
      ds.validate();
      const int dims = ds.functionals().front().dimension();
      auto nodes = default_feature_nodes(dims);
      const int m = cfg.feature_count > 0
                        ? std::min<int>(cfg.feature_count, nodes.size())
                        : static_cast<int>(nodes.size());
      auto map = std::make_shared<const FeatureMap>(ds.kernel, std::move(nodes), m);
      return solve_feature_pnorm(ds, cfg, std::move(map));
    }
    case Method::model_class: return solve_model_class(ds, cfg, ModelClass{});
  }
  throw invalid_input("solve: unknown method");
}

RepresenterReport verify_representer(const GeneralizedDataset& ds,
                                     const Solution& f, double tol) {
  const auto* rep = f.as_representer();
  if (!rep) throw invalid_input("verify_representer: needs a representer expansion");
  if (!(rep->kernel == ds.kernel)) {
    throw invalid_input("verify_representer: kernel mismatch");
  }
  const auto xis = ds.functionals();
  RepresenterReport report;
  report.c_hat = VectorXd::Zero(xis.size());
  const double norm = f.norm();
  if (norm == 0.0) return report;

  const MatrixXd gd = gram(ds.kernel, xis);
  VectorXd c;
  double residual_sq;
  if (rep->basis == xis) {
    c = rep->coefficients;
    residual_sq = 0.0;
  } else {
    // Project f onto span{rep(xi_k)}: G c = <f, xi>.
    const MatrixXd cross = cross_gram(ds.kernel, xis, rep->basis);
    const VectorXd values = cross * rep->coefficients;
    c = gd.completeOrthogonalDecomposition().solve(values);
    // || sum c_k rep_k - f ||^2 expanded through the Gram blocks.
    residual_sq = c.dot(gd * c) - 2.0 * c.dot(values) + norm * norm;
  }
  report.c_hat = c / norm;
  report.residual = std::sqrt(std::max(0.0, residual_sq));
  const VectorXd values = f.apply(xis);
  report.condition_ii_gap =
      std::abs(report.c_hat.dot(values) - norm) / std::max(1.0, norm);
  report.condition_i_gap =
      std::abs(std::sqrt(std::max(0.0, report.c_hat.dot(gd * report.c_hat))) - 1.0);
  report.passed = report.residual <= tol * std::max(1.0, norm) &&
                  report.condition_ii_gap <= tol &&
                  report.condition_i_gap <= tol;
  return report;
}

LambdaSchedule adaptive_lambda(const std::vector<int>& n,
                               const std::vector<double>& reference_risks) {
  if (n.empty() || n.size() != reference_risks.size()) {
    throw invalid_input("adaptive_lambda: need one reference risk per stage");
  }
  LambdaSchedule s;
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (reference_risks[i] < 0.0 || !std::isfinite(reference_risks[i])) {
      throw invalid_input("adaptive_lambda: reference risks must be >= 0");
    }
    if (n[i] < 1) throw invalid_input("adaptive_lambda: stages must be >= 1");
    const double lam = std::max(1.0 / std::sqrt(double(n[i])),
                                std::sqrt(reference_risks[i]));
    running = std::min(running, lam);
    s.n.push_back(n[i]);
    s.lambda.push_back(running);
    s.reference_risk.push_back(reference_risks[i]);
  }
  std::vector<double> ns(n.begin(), n.end());
  const double slope = loglog_slope(ns, reference_risks);
  s.non_vanishing_reference =
      reference_risks.back() > 0.0 && !(slope < -0.1);
  return s;
}

LambdaSchedule adaptive_lambda(const std::vector<GeneralizedDataset>& seq,
                               const Solution& reference) {
  std::vector<int> n;
  std::vector<double> risks;
  for (const auto& ds : seq) {
    n.push_back(ds.stage);
    risks.push_back(empirical_risk(ds, reference));
  }
  return adaptive_lambda(n, risks);
}

}  // namespace genlearn
