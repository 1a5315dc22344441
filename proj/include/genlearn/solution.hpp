#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "genlearn/functional.hpp"
#include "genlearn/network.hpp"
#include "genlearn/nystrom.hpp"

namespace genlearn {

// f = sum_j coefficients[j] * (Riesz representer of basis[j]).
struct RepresenterExpansion {
  KernelSpec kernel;
  std::vector<Functional> basis;
  Eigen::VectorXd coefficients;
};

// f = sum_k weights[k] psi_k with norm ||weights||_p.
struct FeatureExpansion {
  std::shared_ptr<const FeatureMap> features;
  Eigen::VectorXd weights;
  double p = 1.0;
};

// f = network(params) with norm max |f| over `grid`.
struct NetworkExpansion {
  SigmoidNetwork network;
  Eigen::VectorXd params;
  std::vector<Point> grid;
};

// A closed-form target (a manufactured solution, a known minimizer). Not
// serializable; used as the reference side of diagnostics.
struct ReferenceFunction {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<double(const Point&)> laplacian;  // may be empty
  double norm = std::numeric_limits<double>::quiet_NaN();
};

struct SolveInfo {
  std::string method;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = true;
  std::vector<std::string> warnings;
};

class Solution {
 public:
  using Representation = std::variant<RepresenterExpansion, FeatureExpansion,
                                      NetworkExpansion, ReferenceFunction>;

  static Solution representer(KernelSpec kernel, std::vector<Functional> basis,
                              Eigen::VectorXd coefficients);
  // Reuses a Gram matrix of `basis` for the norm.
  static Solution representer(KernelSpec kernel, std::vector<Functional> basis,
                              Eigen::VectorXd coefficients,
                              const Eigen::MatrixXd& basis_gram);
  static Solution features(std::shared_ptr<const FeatureMap> map,
                           Eigen::VectorXd weights, double p);
  static Solution network(SigmoidNetwork net, Eigen::VectorXd params,
                          std::vector<Point> grid);
  static Solution reference(ReferenceFunction f);

  const Representation& representation() const { return rep_; }
  const RepresenterExpansion* as_representer() const {
    return std::get_if<RepresenterExpansion>(&rep_);
  }
  const FeatureExpansion* as_features() const {
    return std::get_if<FeatureExpansion>(&rep_);
  }
  const NetworkExpansion* as_network() const {
    return std::get_if<NetworkExpansion>(&rep_);
  }
  std::string kind() const;

  // Cached norm in the realization's own geometry (NaN when unknown).
  double norm() const { return norm_; }

  // <f, xi>.
  double apply(const Functional& xi) const;
  Eigen::VectorXd apply(const std::vector<Functional>& xis) const;
  double evaluate(const Point& x) const { return apply(Functional::point(x)); }

  SolveInfo info;

 private:
  Solution(Representation rep, double norm)
      : rep_(std::move(rep)), norm_(norm) {}
  Representation rep_;
  double norm_;
};

// <f, xi> after checking that f lives over `spec` (representer expansions
// must share the kernel).
double apply(const KernelSpec& spec, const Functional& xi, const Solution& f);

// Zero element of the representer realization over `basis`.
Solution zero_solution(const KernelSpec& spec, std::vector<Functional> basis);

// Coordinates (f(e_1), ..., f(e_d)) of a linear-kernel solution, i.e. the
// vector in R^d it represents.
Eigen::VectorXd euclidean_coordinates(const Solution& f, int dims);

// Sup-norm of the network over the grid.
double network_sup_norm(const SigmoidNetwork& net, const Eigen::VectorXd& params,
                        const std::vector<Point>& grid);

}  // namespace genlearn
