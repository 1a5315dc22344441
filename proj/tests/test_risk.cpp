#include <doctest.h>

#include <cmath>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"
#include "genlearn/risk.hpp"

using namespace genlearn;

namespace {
Solution vector2(double a, double b) {
  return Solution::representer(
      KernelSpec::linear(),
      {Functional::point(Eigen::Vector2d(1, 0)), Functional::point(Eigen::Vector2d(0, 1))},
      Eigen::Vector2d(a, b));
}
}  // namespace

TEST_CASE("empirical risk on the ill-posed system") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  for (int n : {1, 10, 100}) {
    const GeneralizedDataset ds = b.sequence.generate(n);
    // || A_n (1,0) - b ||^2 = 0 + 1 + 1.
    CHECK(empirical_risk(ds, vector2(1, 0)) == doctest::Approx(2.0));
    CHECK(empirical_risk(ds, vector2(0, 0)) == doctest::Approx(3.0));
  }
  CHECK(expected_risk(*b.sequence.oracle, vector2(1, 0)) == doctest::Approx(2.0));
  CHECK(expected_risk(*b.sequence.oracle, vector2(0, 0)) == doctest::Approx(3.0));
}

TEST_CASE("interpolating and margin-satisfying solutions have zero risk") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const Solution f = Solution::representer(k, {Functional::point(Point::Constant(1, 0.5))},
                                           Eigen::VectorXd::Constant(1, 2.0));
  GeneralizedDataset ds;
  ds.kernel = k;
  DataBlock blk;
  blk.functionals = {Functional::point(Point::Constant(1, 0.1)),
                     Functional::point(Point::Constant(1, 0.8))};
  blk.y = f.apply(blk.functionals);
  ds.blocks.push_back(blk);
  CHECK(empirical_risk(ds, f) == 0.0);

  DataBlock hinge;
  hinge.loss = LossKind::hinge;
  hinge.functionals = {Functional::point(Point::Constant(1, 0.5))};
  hinge.y = Eigen::VectorXd::Ones(1);
  ds.blocks = {hinge};
  CHECK(f.evaluate(Point::Constant(1, 0.5)) == 2.0);
  CHECK(empirical_risk(ds, f) == 0.0);
}

TEST_CASE("expected-risk oracles vanish at the targets") {
  const BuiltinProblem g = make_builtin("gaussian-regression");
  CHECK(expected_risk(*g.sequence.oracle, *g.sequence.reference) <= 1e-8);
  const BuiltinProblem p = make_builtin("poisson-collocation");
  CHECK(expected_risk(*p.sequence.oracle, *p.sequence.reference) <= 1e-8);
}

TEST_CASE("Poisson empirical risk uses half weights per block") {
  const BuiltinProblem p = make_builtin("poisson-collocation");
  const GeneralizedDataset ds = p.sequence.generate(4);
  REQUIRE(ds.blocks.size() == 2);
  CHECK(ds.blocks[0].functionals.size() == 16);
  CHECK(ds.blocks[1].functionals.size() == 4);
  CHECK(ds.blocks[0].rho == 0.5);
  CHECK(ds.blocks[1].rho == 0.5);
  const Solution zero = zero_solution(ds.kernel, ds.functionals());
  double want = 0.0;
  for (int k = 0; k < 16; ++k) want += 0.5 / 16 * ds.blocks[0].y[k] * ds.blocks[0].y[k];
  CHECK(empirical_risk(ds, zero) == doctest::Approx(want));
  CHECK(empirical_risk(ds, *p.sequence.reference) <= 1e-20);
}

TEST_CASE("Condition I on the ill-posed system has zero gap at the origin") {
  const BuiltinProblem b = make_builtin("illposed-2d");
  std::vector<GeneralizedDataset> seq;
  for (int n : {1, 10, 100}) seq.push_back(b.sequence.generate(n));
  const ConditionITable t = condition_I_check(*b.sequence.oracle, seq, {vector2(0, 0)}, {"zero"});
  for (const auto& row : t.rows) CHECK(row.gap == doctest::Approx(0.0));
}

TEST_CASE("Condition I slope on noiseless midpoint data") {
  BuiltinOptions opt;
  opt.noise = 0.0;
  const BuiltinProblem g = make_builtin("gaussian-regression", opt);
  std::vector<GeneralizedDataset> seq;
  for (int n : {10, 20, 40, 80}) seq.push_back(g.sequence.generate(n));
  const Solution& bump = g.condition_I_tests[1];
  const ConditionITable t = condition_I_check(*g.sequence.oracle, seq, {bump});
  CHECK(t.slopes[0] <= -0.5);
  const ConditionITable single = condition_I_check(*g.sequence.oracle, {seq[0]}, {bump});
  CHECK(std::isnan(single.slopes[0]));
}

TEST_CASE("loglog slope") {
  CHECK(loglog_slope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
  CHECK(std::isnan(loglog_slope({1}, {1})));
  CHECK(std::isnan(loglog_slope({1, 2}, {0, 0})));
}

TEST_CASE("adaptive lambda") {
  const LambdaSchedule exact = adaptive_lambda({4, 16, 64}, {0, 0, 0});
  CHECK(exact.lambda[0] == doctest::Approx(0.5));
  CHECK(exact.lambda[2] == doctest::Approx(0.125));
  const LambdaSchedule small = adaptive_lambda({4, 16, 64}, {1.0 / 16, 1.0 / 256, 1.0 / 4096});
  CHECK(small.lambda[1] == doctest::Approx(0.25));
  const LambdaSchedule flat = adaptive_lambda({4, 16, 64}, {1, 1, 1});
  CHECK(flat.lambda[2] == 1.0);
  CHECK(flat.non_vanishing_reference);
  CHECK_THROWS_AS(adaptive_lambda({4, 16}, {0.0}), invalid_input);
}
