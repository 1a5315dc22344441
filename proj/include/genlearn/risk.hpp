#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "genlearn/dataset.hpp"
#include "genlearn/solution.hpp"

namespace genlearn {

// R_n(f) = L_n(xi_n, y_n, <f, xi_n>).
double empirical_risk(const GeneralizedDataset& ds, const Solution& f);

// R(f) = int_a^b |f(x) - target(x)| weight(x) dx on an interval.
struct WeightedL1Oracle {
  std::function<double(double)> target;
  std::function<double(double)> weight;
  double a = 0.0;
  double b = 1.0;
};

// R(f) = 1/2 int_[0,1]^2 |Lap f - h|^2 + 1/2 int_boundary |f - g|^2 dS.
struct PoissonResidualOracle {
  std::function<double(const Point&)> h;
  std::function<double(const Point&)> g;
};

// R(f) = ||A f - b||_2^2 for f in R^d (linear-kernel realization).
struct LinearSystemOracle {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

using ExpectedRiskOracle =
    std::variant<WeightedL1Oracle, PoissonResidualOracle, LinearSystemOracle>;

// Adaptive Simpson (1-D) or composite tensor Gauss (2-D) at relative
// tolerance 1e-6; exact for the linear system. Throws numerical_error (with
// the partial value) when refinement is exhausted.
double expected_risk(const ExpectedRiskOracle& oracle, const Solution& f);

// Least-squares slope of log(value) against log(n) over the entries with
// value > 0. NaN when fewer than two such entries exist.
double loglog_slope(const std::vector<double>& n, const std::vector<double>& values);

struct GapRow {
  std::string f_id;
  int n;
  double gap;
};

struct ConditionITable {
  std::vector<GapRow> rows;
  std::vector<std::string> f_ids;
  std::vector<double> slopes;  // per test function, NaN = undefined
};

// |R(f) - R_n(f)| for every (f, n) plus the per-f log-log trend.
ConditionITable condition_I_check(const ExpectedRiskOracle& oracle,
                                  const std::vector<GeneralizedDataset>& seq,
                                  const std::vector<Solution>& test_fs,
                                  const std::vector<std::string>& f_ids = {});

// CSV with columns f_id,n,gap,slope.
std::string to_csv(const ConditionITable& table);

// Helpers shared with the experiments.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth = 40);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace genlearn
