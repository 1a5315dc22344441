#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genlearn/dataset.hpp"
#include "genlearn/solution.hpp"

namespace genlearn {

enum class RegularizerKind { linear, quadratic, power };

// phi: [0, inf) -> [0, inf), continuous, strictly increasing, unbounded.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::quadratic;
  double p = 2.0;  // exponent of the power variant

  static Regularizer linear() { return {RegularizerKind::linear, 1.0}; }
  static Regularizer quadratic() { return {RegularizerKind::quadratic, 2.0}; }
  static Regularizer power(double p);

  double value(double r) const;
  double derivative(double r) const;
  double exponent() const;
};

enum class Method {
  tikhonov,
  subgradient,
  prox_grad,
  douglas_rachford,
  feature_pnorm,
  model_class,
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct SolverConfig {
  double lambda = 1.0;
  Regularizer regularizer = Regularizer::quadratic();
  Method method = Method::tikhonov;
  double tol = 1e-8;
  int max_iter = 50000;
  std::uint64_t seed = 0;
  // Douglas-Rachford step theta and relaxation sigma in (0, 2).
  double dr_theta = 1.0;
  double dr_sigma = 1.0;
  // Feature p-norm realization: exponent and number of retained features
  // (0 = every node).
  double p = 1.0;
  int feature_count = 0;

  void validate() const;
};

// Parametric model class N_m: sigmoid networks with m coefficients,
// coefficients clamped to [-bound, bound].
struct ModelClass {
  int m = 16;
  std::vector<int> hidden;  // empty: one hidden layer sized from m
  double bound = 10.0;
  int restarts = 4;
  std::vector<Point> grid;  // sup-norm grid; empty: 33^d grid on [lo, hi]^d
  double lo = -1.0;
  double hi = 1.0;
};

// L_n(xi, y, <f, xi>) + lambda phi(||f||).
double regularized_objective(const GeneralizedDataset& ds, const Solution& f,
                             double lambda, const Regularizer& reg);

// Closed-form minimizer for all-square data with phi(r) = r^2: the
// coefficients solve (W G + lambda I) c = W y.
Solution solve_tikhonov(const GeneralizedDataset& ds, double lambda);

// Restarted subgradient method in representer coefficients. Each stage runs
// eta_s / sqrt(k + 1) steps along a normalized subgradient from the best
// iterate so far; eta is halved between stages.
Solution solve_subgradient(const GeneralizedDataset& ds, const SolverConfig& cfg);

// Proximal gradient for square losses plus lambda phi(||f||); the
// proximal step is the radial shrinkage of f.
Solution solve_prox_grad(const GeneralizedDataset& ds, const SolverConfig& cfg);

// Douglas-Rachford splitting of (R_A + lambda/2 phi) + (R_B + lambda/2 phi)
// over the span of both datasets' functionals.
Solution solve_douglas_rachford(const GeneralizedDataset& ds_a,
                                const GeneralizedDataset& ds_b,
                                const SolverConfig& cfg);

// L_n(xi, y, Phi w) + lambda ||w||_p^p over Nyström feature weights.
Solution solve_feature_pnorm(const GeneralizedDataset& ds, const SolverConfig& cfg,
                             std::shared_ptr<const FeatureMap> features);

// Gradient descent over clamped network coefficients with restarts. A
// smaller network passed as `warm_start` is embedded exactly into the new
// one and used as restart 0.
Solution solve_model_class(const GeneralizedDataset& ds, const SolverConfig& cfg,
                           const ModelClass& mc,
                           const Solution* warm_start = nullptr);

// Dispatches on cfg.method (douglas_rachford splits the blocks in half;
// feature_pnorm builds features on the default node grid).
Solution solve(const GeneralizedDataset& ds, const SolverConfig& cfg);

struct RepresenterReport {
  Eigen::VectorXd c_hat;
  double residual = 0.0;          // || ||f|| c_hat . xi - f ||
  double condition_i_gap = 0.0;   // | ||c_hat . xi||_* - 1 |
  double condition_ii_gap = 0.0;  // | c_hat . <f, xi> - ||f|| |
  bool passed = true;
};

// Checks the representer conditions of a representer-expansion solution
// against the dataset functionals.
RepresenterReport verify_representer(const GeneralizedDataset& ds,
                                     const Solution& f, double tol);

struct LambdaSchedule {
  std::vector<int> n;
  std::vector<double> lambda;
  std::vector<double> reference_risk;
  bool non_vanishing_reference = false;
};

// lambda_n = max(n^{-1/2}, sqrt(R_n(f0))), made nonincreasing.
LambdaSchedule adaptive_lambda(const std::vector<int>& n,
                               const std::vector<double>& reference_risks);
LambdaSchedule adaptive_lambda(const std::vector<GeneralizedDataset>& seq,
                               const Solution& reference);

// Node grid used for feature realizations: 64 points on [0,1] (d = 1) or
// an 8 x 8 grid on [0,1]^2 (d = 2).
std::vector<Point> default_feature_nodes(int dims);

}  // namespace genlearn
