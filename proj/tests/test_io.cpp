#include <doctest.h>

#include <filesystem>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"

using namespace genlearn;

TEST_CASE("kernel spec json") {
  const json j = to_json(KernelSpec::gaussian(2.0));
  CHECK(j == json::parse(R"({"type":"gaussian","theta":2.0})"));
  CHECK(kernel_from_json(to_json(KernelSpec::sobolev_matern(1.5, 5))) ==
        KernelSpec::sobolev_matern(1.5, 5));
  CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"type":"cauchy"})")), invalid_input);
}

TEST_CASE("dataset json round trip is a fixed point") {
  for (const auto& name : builtin_names()) {
    const GeneralizedDataset ds = make_builtin(name).sequence.generate(8);
    const json once = to_json(ds);
    const json twice = to_json(dataset_from_json(once));
    CHECK(once == twice);
  }
  const json j = json::parse(R"({
    "kernel": {"type": "min"},
    "blocks": [{"functionals": [{"type": "point", "x": [0.5, 0.5]}],
                "y": [1.0], "loss": "hinge", "rho": 1.0}]})");
  const GeneralizedDataset ds = dataset_from_json(j);
  CHECK(ds.blocks[0].loss == LossKind::hinge);
  CHECK_THROWS_AS(dataset_from_json(json::parse(R"({"kernel":{"type":"min"},"blocks":[]})")),
                  invalid_input);
}

TEST_CASE("solution json round trip") {
  const BuiltinProblem b = make_builtin("poisson-collocation");
  const GeneralizedDataset ds = b.sequence.generate(4);
  const Solution f = solve_tikhonov(ds, 0.5);
  const Solution g = solution_from_json(json::parse(to_json(f).dump()));
  const Point x = Eigen::Vector2d(0.3, 0.6);
  CHECK(g.evaluate(x) == f.evaluate(x));
  CHECK(g.norm() == doctest::Approx(f.norm()).epsilon(1e-14));
  CHECK(to_json(g) == to_json(f));

  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_iter = 200;
  ModelClass mc;
  mc.m = 7;
  mc.restarts = 1;
  const GeneralizedDataset net_ds = make_builtin("sigmoid-network").sequence.generate(5);
  const Solution n = solve_model_class(net_ds, cfg, mc);
  const Solution n2 = solution_from_json(to_json(n));
  CHECK(n2.evaluate(Point::Constant(1, 0.2)) == n.evaluate(Point::Constant(1, 0.2)));

  const GeneralizedDataset fr = make_builtin("gaussian-regression").sequence.generate(10);
  cfg.method = Method::feature_pnorm;
  const Solution p = solve(fr, cfg);
  const Solution p2 = solution_from_json(to_json(p));
  CHECK(p2.evaluate(Point::Constant(1, 0.2)) == doctest::Approx(p.evaluate(Point::Constant(1, 0.2))));
}

TEST_CASE("solver config json") {
  SolverConfig base;
  base.lambda = 0.3;
  const SolverConfig c = solver_config_from_json(
      json::parse(R"({"method":"subgradient","regularizer":{"type":"power","p":1.5}})"), base);
  CHECK(c.method == Method::subgradient);
  CHECK(c.regularizer.kind == RegularizerKind::power);
  CHECK(c.lambda == 0.3);
  const SolverConfig back = solver_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(read_file("/nonexistent/genlearn.json"), io_error);
  CHECK_THROWS_AS(write_file("/nonexistent/dir/out.json", "{}"), io_error);
  const auto path = std::filesystem::temp_directory_path() / "genlearn_bad.json";
  write_file(path.string(), "{not json");
  CHECK_THROWS_AS(read_json(path.string()), invalid_input);
  std::filesystem::remove(path);
}
