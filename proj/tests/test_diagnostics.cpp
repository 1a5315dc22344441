#include <doctest.h>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"

using namespace genlearn;

namespace {
Solution vector2(double a, double b) {
  return Solution::representer(
      KernelSpec::linear(),
      {Functional::point(Eigen::Vector2d(1, 0)), Functional::point(Eigen::Vector2d(0, 1))},
      Eigen::Vector2d(a, b));
}
}  // namespace

TEST_CASE("weak-star gap") {
  const Solution f = vector2(1, 0);
  CHECK(weakstar_gap(f, f, {Functional::point(Eigen::Vector2d(0.3, 0.4))}) == 0.0);
  const Functional single = Functional::point(Eigen::Vector2d(0.2, 1.0));
  CHECK(weakstar_gap(f, vector2(1, 0.5), {single}) == doctest::Approx(0.5));
  const BuiltinProblem b = make_builtin("illposed-2d");
  CHECK(weakstar_gap(f, vector2(1, 0.5), b.sequence.generate(1).functionals()) ==
        doctest::Approx(0.5));
}

TEST_CASE("trend status") {
  CHECK(trend_status(-0.5) == "converging");
  CHECK(trend_status(0.5) == "diverging");
  CHECK(trend_status(0.0) == "flat");
  CHECK(trend_status(NAN) == "undefined");
}

TEST_CASE("sweep on the ill-posed system") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  const SweepResult good = convergence_sweep(b.sequence, LambdaRule::power(0.5), b.solver);
  CHECK(good.verdict == "converging");
  CHECK(good.records.back().weakstar_gap <= 0.01);
  const SweepResult bad = convergence_sweep(b.sequence, LambdaRule::power(2.0), b.solver);
  CHECK(bad.verdict == "diverging");
  CHECK(euclidean_coordinates(*bad.records.back().solution, 2)[1] ==
        doctest::Approx(5000.0).epsilon(1e-6));

  const SweepResult parallel =
      convergence_sweep(b.sequence, LambdaRule::grid({0.1, 1.0}), b.solver, 3);
  const SweepResult serial = convergence_sweep(b.sequence, LambdaRule::grid({0.1, 1.0}), b.solver);
  CHECK(to_csv(parallel.records, false) == to_csv(serial.records, false));
  CHECK(parallel.series.size() == 2);
}

TEST_CASE("sweep of a constant problem") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  ProblemSequence seq;
  seq.ladder = {1, 2, 3};
  const GeneralizedDataset ds = b.sequence.generate(5);
  seq.generate = [ds](int) { return ds; };
  const SweepResult r = convergence_sweep(seq, LambdaRule::grid({0.5}), b.solver);
  for (const auto& rec : r.records) {
    CHECK(rec.norm == r.records[0].norm);
    CHECK(rec.empirical_risk == r.records[0].empirical_risk);
  }
  CHECK_THROWS_AS(convergence_sweep(seq, LambdaRule::adaptive(), b.solver), invalid_input);
  seq.ladder = {1, 2};
  CHECK_THROWS_AS(convergence_sweep(seq, LambdaRule::grid({0.5}), b.solver), invalid_input);
}

TEST_CASE("sweep csv layout") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  const SweepResult r = convergence_sweep(b.sequence, LambdaRule::grid({1.0}), b.solver);
  const std::string csv = to_csv(r.records);
  CHECK(csv.rfind("n,lambda,emp_risk,exp_risk,norm,weakstar_gap,gap_over_lambda,wall_time,converged\n", 0) == 0);
  CHECK(to_csv(r.records, false).find("wall_time") == std::string::npos);
}

TEST_CASE("min-norm check") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  const SweepResult r = convergence_sweep(b.sequence, LambdaRule::power(0.5), b.solver);
  const MinNormReport ok = min_norm_check(r.records, {vector2(1, 5)}, *b.sequence.oracle);
  CHECK(ok.passed);
  CHECK(ok.candidate_norms[0] == doctest::Approx(std::sqrt(26.0)));
  // Smaller norm but larger risk: excluded.
  const MinNormReport filt = min_norm_check(r.records, {vector2(0.5, 0)}, *b.sequence.oracle);
  CHECK_FALSE(filt.admitted[0]);
  CHECK(filt.passed);
  // The limit itself as the only candidate.
  const MinNormReport self =
      min_norm_check(r.records, {*r.records.back().solution}, *b.sequence.oracle);
  CHECK(self.passed);
}

TEST_CASE("Condition II report") {
  const BuiltinProblem g = make_builtin("gaussian-regression");
  const ConditionIIReport r = condition_II_report(g.sequence, {0.5, 1.0});
  CHECK(r.passed);
  CHECK(r.nets.back().net_size == r.nets[1].net_size);

  const BuiltinProblem h = make_builtin("minkernel-hinge");
  for (const auto& row : condition_II_report(h.sequence, {1.0, 3.0}).lipschitz) {
    for (double c : row.per_stage) CHECK(c == 1.0);
    CHECK(row.uniform);
  }

  // Quadratures concentrating mass n at a point have dual norms ~ n.
  ProblemSequence grow;
  grow.ladder = {1, 4, 16, 64};
  grow.generate = [](int n) {
    GeneralizedDataset ds;
    ds.kernel = KernelSpec::gaussian(1.0);
    DataBlock blk;
    blk.functionals = {Functional::quadrature({Point::Constant(1, 0.5)}, {double(n)})};
    blk.y = Eigen::VectorXd::Zero(1);
    ds.blocks.push_back(blk);
    return ds;
  };
  const ConditionIIReport bad = condition_II_report(grow, {1.0});
  CHECK_FALSE(bad.passed);
  CHECK(bad.dual_norm_slope > 0.5);
}

TEST_CASE("lambda rules") {
  CHECK_THROWS_AS(LambdaRule::grid({}), invalid_input);
  CHECK_THROWS_AS(LambdaRule::grid({0.0}), invalid_input);
  CHECK_THROWS_AS(LambdaRule::power(0.5, -1.0), invalid_input);
}
