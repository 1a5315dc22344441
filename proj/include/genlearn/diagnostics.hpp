#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genlearn/dataset.hpp"
#include "genlearn/risk.hpp"
#include "genlearn/solution.hpp"
#include "genlearn/solver.hpp"

namespace genlearn {

// sup over the battery of |<f_ref - f, xi>|.
double weakstar_gap(const Solution& f_ref, const Solution& f,
                    const FunctionalSet& battery);
double weakstar_gap(const Solution& f_ref, const Solution& f,
                    const std::vector<Functional>& battery);

// Staged data with whatever ground truth is known about the limit problem.
struct ProblemSequence {
  std::vector<int> ladder;
  std::function<GeneralizedDataset(int n)> generate;
  std::optional<ExpectedRiskOracle> oracle;
  std::optional<Solution> reference;  // f0
  // Gap battery; empty means each stage's data functionals plus 16 grid points.
  std::vector<Functional> battery;

  void validate() const;
};

// lambda schedule over the ladder: a fixed grid (every n paired with every
// value), a coupled power law scale * n^(-exponent), or the adaptive rule
// driven by the reference solution.
struct LambdaRule {
  enum class Kind { grid, power, adaptive };
  Kind kind = Kind::power;
  std::vector<double> values;
  double exponent = 0.5;
  double scale = 1.0;

  static LambdaRule grid(std::vector<double> values);
  static LambdaRule power(double exponent, double scale = 1.0);
  static LambdaRule adaptive();
};

struct SweepRecord {
  int n = 0;
  double lambda = 0.0;
  double empirical_risk = 0.0;
  double expected_risk = std::numeric_limits<double>::quiet_NaN();
  double norm = 0.0;
  double weakstar_gap = 0.0;
  double gap_over_lambda = 0.0;
  double wall_time = 0.0;
  bool converged = false;
  std::string error;  // solver error message of a failed cell
  std::optional<Solution> solution;
};

struct TrendSummary {
  std::string metric;
  double slope;        // NaN when undefined
  std::string status;  // converging | diverging | flat | zero | undefined
};

// Trend tests for the records of one lambda series (one value of a grid,
// or the whole ladder of a coupled rule).
struct SeriesVerdict {
  std::string label;
  std::vector<TrendSummary> trends;
  std::string verdict;  // converging | diverging | inconclusive
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ordered by (n, lambda)
  std::vector<SeriesVerdict> series;
  std::string verdict;
  std::vector<std::string> notes;
};

using CellSolver =
    std::function<Solution(const GeneralizedDataset&, const SolverConfig&)>;

// Solves every (n, lambda) cell and summarizes log-log trends. Cell errors
// are recorded and the sweep continues.
SweepResult convergence_sweep(const ProblemSequence& seq, const LambdaRule& rule,
                              const SolverConfig& cfg, int workers = 1,
                              const CellSolver& solver = {});

// Classifies a log-log slope: < -0.1 converging, > 0.1 diverging.
std::string trend_status(double slope);

// CSV with columns
// n,lambda,emp_risk,exp_risk,norm,weakstar_gap,gap_over_lambda,wall_time,converged
std::string to_csv(const std::vector<SweepRecord>& records,
                   bool include_wall_time = true);

struct MinNormReport {
  double limit_norm = 0.0;
  double limit_risk = 0.0;
  std::vector<double> candidate_norms;
  std::vector<double> candidate_risks;
  std::vector<bool> admitted;  // candidate risk equals the minimal risk
  double min_candidate_norm = 0.0;
  bool passed = false;
};

// The limit solution (last converged record) must nearly minimize the
// expected risk (within tol) and must not have a larger norm than any
// admitted candidate. Candidates are admitted when their risk is minimal
// within risk_tol.
MinNormReport min_norm_check(const std::vector<SweepRecord>& records,
                             const std::vector<Solution>& candidates,
                             const ExpectedRiskOracle& oracle,
                             double tol = 1e-3, double risk_tol = 1e-8);

struct NetRow {
  int n;
  std::size_t accumulated;
  int net_size;
  double dual_norm_sup;
};

struct LipschitzRow {
  double theta;
  std::vector<double> per_stage;  // C_n^theta along the ladder
  double slope;
  bool uniform;
};

struct ConditionIIReport {
  double eps = 0.1;
  std::vector<NetRow> nets;
  std::vector<LipschitzRow> lipschitz;
  double dual_norm_slope = 0.0;
  double net_slope = 0.0;
  std::vector<std::string> flags;
  bool passed = true;
};

// C_n^theta = sum_j rho_j max_k C_jk, the Lipschitz constant of the
// multi-loss in the sup norm of the prediction vector on [-theta, theta].
double multiloss_lipschitz(const GeneralizedDataset& ds, double theta);

// Dual-norm and eps-net trends over the accumulated functional sets and the
// uniformity of the loss Lipschitz constants over theta_grid.
ConditionIIReport condition_II_report(const ProblemSequence& seq,
                                      const std::vector<double>& theta_grid,
                                      double eps = 0.1);

}  // namespace genlearn
