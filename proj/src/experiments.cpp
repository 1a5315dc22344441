#include "genlearn/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "genlearn/error.hpp"
#include "genlearn/plot.hpp"

namespace genlearn {
namespace {

constexpr double kPi = std::numbers::pi;

// splitmix64 stream; portable across standard libraries.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t salt)
      : state_(seed * 0x9E3779B97F4A7C15ull ^ (salt + 0x632BE59BD9B4E019ull)) {}
  double uniform() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return double(z >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

Point pt(std::initializer_list<double> v) {
  Point p(v.size());
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Solution reference_from(std::string name, Solution f) {
  auto shared = std::make_shared<Solution>(std::move(f));
  ReferenceFunction r;
  r.name = std::move(name);
  r.value = [shared](const Point& x) { return shared->evaluate(x); };
  return Solution::reference(std::move(r));
}

BuiltinProblem gaussian_regression(const BuiltinOptions& opt) {
  BuiltinProblem b;
  b.name = "gaussian-regression";
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  const Solution f0 = Solution::representer(
      spec, {Functional::point(pt({0.25})), Functional::point(pt({0.75}))},
      Eigen::Vector2d(1.0, -0.5));
  auto omega = [](double x) { return 1.0 + x; };
  const double noise = opt.noise;
  const std::uint64_t seed = opt.seed;
  b.sequence.ladder = opt.ladder.empty() ? std::vector<int>{10, 40, 160, 640} : opt.ladder;
  b.sequence.generate = [=](int n) {
    Stream rng(seed, static_cast<std::uint64_t>(n));
    DataBlock blk;
    blk.loss = LossKind::absolute;
    blk.y.resize(n);
    blk.weights.resize(n);
    for (int k = 1; k <= n; ++k) {
      const double x = (k - 0.5) / n;
      blk.functionals.push_back(Functional::point(pt({x})));
      blk.y[k - 1] = f0.evaluate(pt({x})) + noise / n * (2.0 * rng.uniform() - 1.0);
      blk.weights[k - 1] = omega(x);
    }
    GeneralizedDataset ds{spec, {std::move(blk)}, n};
    return ds;
  };
  b.sequence.oracle = WeightedL1Oracle{
      [f0](double x) { return f0.evaluate(pt({x})); }, omega, 0.0, 1.0};
  b.sequence.reference = reference_from("f0", f0);
  b.solver.method = Method::feature_pnorm;
  b.solver.p = 1.0;
  b.solver.regularizer = Regularizer::linear();
  b.solver.max_iter = 20000;
  b.lambda_rule = LambdaRule::power(0.5, 0.1);
  const auto& rep = *f0.as_representer();
  b.condition_I_tests = {
      zero_solution(spec, {Functional::point(pt({0.5}))}),
      Solution::representer(spec, {Functional::point(pt({0.5}))}, Eigen::VectorXd::Ones(1)),
      Solution::representer(spec, rep.basis, 0.5 * rep.coefficients)};
  b.condition_I_ids = {"zero", "k_half", "half_f0"};
  return b;
}

BuiltinProblem minkernel_hinge(const BuiltinOptions& opt) {
  BuiltinProblem b;
  b.name = "minkernel-hinge";
  const KernelSpec spec = KernelSpec::min_kernel();
  const std::uint64_t seed = opt.seed;
  b.sequence.ladder = opt.ladder.empty() ? std::vector<int>{8, 16, 32, 64} : opt.ladder;
  b.sequence.generate = [=](int n) {
    Stream rng(seed, static_cast<std::uint64_t>(n));
    DataBlock blk;
    blk.loss = LossKind::hinge;
    blk.y.resize(n);
    for (int k = 0; k < n; ++k) {
      // Points in (0,1]^2 labelled by the side of the line v1 + v2 = 1.
      const double v1 = 1.0 - rng.uniform(), v2 = 1.0 - rng.uniform();
      blk.functionals.push_back(Functional::point(pt({v1, v2})));
      blk.y[k] = v1 + v2 >= 1.0 ? 1.0 : -1.0;
    }
    return GeneralizedDataset{spec, {std::move(blk)}, n};
  };
  b.solver.method = Method::subgradient;
  b.solver.regularizer = Regularizer::quadratic();
  b.lambda_rule = LambdaRule::power(0.5, 0.1);
  return b;
}

BuiltinProblem poisson_collocation(const BuiltinOptions& opt) {
  BuiltinProblem b;
  b.name = "poisson-collocation";
  const KernelSpec spec = KernelSpec::sobolev_matern(1.0, 4);
  auto f0 = [](const Point& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
  auto h = [f0](const Point& x) { return -2.0 * kPi * kPi * f0(x); };
  auto g = [](const Point&) { return 0.0; };
  b.sequence.ladder = opt.ladder.empty() ? std::vector<int>{4, 8, 16} : opt.ladder;
  b.sequence.generate = [=](int n) {
    DataBlock interior, boundary;
    interior.rho = boundary.rho = 0.5;
    for (const auto& x : halton(n * n, 2)) {
      interior.functionals.push_back(Functional::op(DiffOp::laplacian, x));
    }
    interior.y.resize(n * n);
    for (int k = 0; k < n * n; ++k) {
      interior.y[k] = h(std::get<OpEval>(interior.functionals[k].value()).x);
    }
    const auto edge = boundary_grid(n);
    boundary.y.resize(n);
    for (int k = 0; k < n; ++k) {
      boundary.functionals.push_back(Functional::point(edge[k]));
      boundary.y[k] = g(edge[k]);
    }
    return GeneralizedDataset{spec, {std::move(interior), std::move(boundary)}, n};
  };
  b.sequence.oracle = PoissonResidualOracle{h, g};
  ReferenceFunction ref;
  ref.name = "sin(pi v1) sin(pi v2)";
  ref.value = f0;
  ref.laplacian = h;
  b.sequence.reference = Solution::reference(std::move(ref));
  for (const auto& x : tensor_grid(9, 2)) {
    b.sequence.battery.push_back(Functional::point(x));
  }
  b.solver.method = Method::tikhonov;
  b.lambda_rule = LambdaRule::power(0.5);
  b.theta_grid = {1.0, 10.0, 25.0};
  return b;
}

BuiltinProblem sigmoid_network(const BuiltinOptions& opt) {
  BuiltinProblem b;
  b.name = "sigmoid-network";
  const KernelSpec spec = KernelSpec::gaussian(1.0);  // unused by networks
  auto f0 = [](const Point& x) { return std::sin(kPi * x[0]); };
  b.sequence.ladder = opt.ladder.empty() ? std::vector<int>{5, 10, 20, 40} : opt.ladder;
  b.sequence.generate = [=](int n) {
    DataBlock blk;
    blk.y.resize(n);
    for (int k = 1; k <= n; ++k) {
      const Point x = pt({-1.0 + (2.0 * k - 1.0) / n});
      blk.functionals.push_back(Functional::point(x));
      blk.y[k - 1] = f0(x);
    }
    return GeneralizedDataset{spec, {std::move(blk)}, n};
  };
  ReferenceFunction ref;
  ref.name = "sin(pi x)";
  ref.value = f0;
  ref.norm = 1.0;
  b.sequence.reference = Solution::reference(std::move(ref));
  b.sequence.battery.clear();
  for (const auto& x : tensor_grid(16, 1, -1.0, 1.0)) {
    b.sequence.battery.push_back(Functional::point(x));
  }
  b.solver.method = Method::model_class;
  b.solver.max_iter = 4000;
  b.solver.tol = 1e-9;
  ModelClass mc;
  mc.m = 25;
  mc.restarts = 2;
  mc.lo = -1.0;
  mc.hi = 1.0;
  b.model = mc;
  b.lambda_rule = LambdaRule::power(0.5, 0.01);
  return b;
}

BuiltinProblem illposed_2d(const BuiltinOptions& opt) {
  BuiltinProblem b;
  b.name = "illposed-2d";
  const KernelSpec spec = KernelSpec::linear();
  b.sequence.ladder =
      opt.ladder.empty() ? std::vector<int>{1, 10, 100, 10000} : opt.ladder;
  b.sequence.generate = [=](int n) {
    // Rows of A_n as functionals on R^2; sample weight 3 over N = 3 makes
    // the empirical risk ||A_n f - b||^2.
    DataBlock blk;
    blk.functionals = {Functional::point(pt({1.0, 0.0})),
                       Functional::point(pt({0.0, 1.0 / n})),
                       Functional::point(pt({0.0, 0.0}))};
    blk.y = Eigen::Vector3d(1.0, 1.0, 1.0);
    blk.weights = Eigen::Vector3d::Constant(3.0);
    return GeneralizedDataset{spec, {std::move(blk)}, n};
  };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
  a(0, 0) = 1.0;
  b.sequence.oracle = LinearSystemOracle{a, Eigen::Vector3d(1.0, 1.0, 1.0)};
  const std::vector<Functional> axes{Functional::point(pt({1.0, 0.0})),
                                     Functional::point(pt({0.0, 1.0}))};
  b.sequence.reference = Solution::representer(spec, axes, Eigen::Vector2d(1.0, 0.0));
  b.solver.method = Method::tikhonov;
  b.lambda_rule = LambdaRule::power(0.5);
  for (double t : {1.0, 2.0, 5.0}) {
    b.min_norm_candidates.push_back(
        Solution::representer(spec, axes, Eigen::Vector2d(1.0, t)));
  }
  return b;
}

std::string cell_name(const SweepRecord& r, int index) {
  return "solution_n" + std::to_string(r.n) + "_" + std::to_string(index) + ".json";
}

}  // namespace

std::vector<Point> halton(int count, int dims) {
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  if (count < 1) throw invalid_input("halton: count must be >= 1");
  if (dims < 1 || dims > 6) throw invalid_input("halton: dims must lie in [1, 6]");
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 1; i <= count; ++i) {
    Point p(dims);
    for (int d = 0; d < dims; ++d) {
      const int base = primes[d];
      double f = 1.0, r = 0.0;
      for (int k = i; k > 0; k /= base) {
        f /= base;
        r += f * (k % base);
      }
      p[d] = r;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<Point> boundary_grid(int n) {
  if (n < 4) throw invalid_input("boundary_grid: n must be >= 4");
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const int edge = 4 * k / n;
    const double u = double(4 * k - edge * n) / n;
    switch (edge) {
      case 0: pts.push_back(pt({u, 0.0})); break;
      case 1: pts.push_back(pt({1.0, u})); break;
      case 2: pts.push_back(pt({1.0 - u, 1.0})); break;
      default: pts.push_back(pt({0.0, 1.0 - u})); break;
    }
  }
  return pts;
}

std::vector<std::string> builtin_names() {
  return {"gaussian-regression", "minkernel-hinge", "poisson-collocation",
          "sigmoid-network", "illposed-2d"};
}

BuiltinProblem make_builtin(const std::string& name, const BuiltinOptions& opt) {
  BuiltinProblem b;
  if (name == "gaussian-regression") {
    b = gaussian_regression(opt);
  } else if (name == "minkernel-hinge") {
    b = minkernel_hinge(opt);
  } else if (name == "poisson-collocation") {
    b = poisson_collocation(opt);
  } else if (name == "sigmoid-network") {
    b = sigmoid_network(opt);
  } else if (name == "illposed-2d") {
    b = illposed_2d(opt);
  } else {
    throw invalid_input("unknown builtin '" + name + "'");
  }
  b.solver.seed = opt.seed;
  b.sequence.validate();
  return b;
}

void ExperimentConfig::validate() const {
  if (problem.empty() == dataset.empty()) {
    throw invalid_input("experiment: set exactly one of 'problem' and 'dataset'");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) {
      throw invalid_input("experiment: ladder must be strictly increasing");
    }
  }
  for (int n : ladder) {
    if (n < 1) throw invalid_input("experiment: ladder entries must be >= 1");
  }
  if (workers < 1) throw invalid_input("experiment: workers must be >= 1");
  if (!(noise >= 0.0)) throw invalid_input("experiment: noise must be >= 0");
}

LambdaRule lambda_rule_from_json(const json& j) {
  const std::string rule = j.value("rule", std::string("power"));
  if (rule == "grid") {
    return LambdaRule::grid(j.at("values").get<std::vector<double>>());
  }
  if (rule == "power") {
    return LambdaRule::power(j.value("exponent", 0.5), j.value("scale", 1.0));
  }
  if (rule == "adaptive") return LambdaRule::adaptive();
  throw invalid_input("unknown lambda rule '" + rule + "'");
}

ExperimentConfig experiment_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.problem = j.value("problem", std::string());
    c.dataset = j.value("dataset", std::string());
    c.ladder = j.value("ladder", std::vector<int>{});
    if (j.contains("lambda")) c.lambda_rule = lambda_rule_from_json(j["lambda"]);
    if (j.contains("solver")) c.solver = j["solver"];
    c.output = j.value("output", c.output);
    c.seed = j.value("seed", c.seed);
    c.noise = j.value("noise", c.noise);
    c.workers = j.value("workers", c.workers);
    c.charts = j.value("charts", c.charts);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw invalid_input(std::string("experiment config: ") + e.what());
  }
}

OutputBundle run(const ExperimentConfig& cfg) {
  cfg.validate();
  BuiltinProblem b;
  if (!cfg.problem.empty()) {
    b = make_builtin(cfg.problem, {cfg.ladder, cfg.seed, cfg.noise});
  } else {
    // A fixed dataset repeated at every stage.
    const GeneralizedDataset ds = load_dataset(cfg.dataset);
    b.name = cfg.dataset;
    b.sequence.ladder = cfg.ladder.empty() ? std::vector<int>{1, 2, 3} : cfg.ladder;
    b.sequence.generate = [ds](int n) {
      GeneralizedDataset d = ds;
      d.stage = n;
      return d;
    };
    b.solver.method = ds.all_square() ? Method::tikhonov : Method::subgradient;
    b.solver.seed = cfg.seed;
    b.lambda_rule = LambdaRule::grid({b.solver.lambda});
  }
  SolverConfig solver = b.solver;
  if (cfg.solver) solver = solver_config_from_json(*cfg.solver, solver);
  solver.seed = cfg.seed;
  const LambdaRule rule = cfg.lambda_rule.value_or(b.lambda_rule);

  CellSolver cell;
  if (b.model && solver.method == Method::model_class) {
    const ModelClass mc = *b.model;
    cell = [mc](const GeneralizedDataset& ds, const SolverConfig& c) {
      return solve_model_class(ds, c, mc);
    };
  }

  OutputBundle out;
  out.directory = cfg.output;
  out.sweep = convergence_sweep(b.sequence, rule, solver, cfg.workers, cell);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) throw io_error("cannot create '" + cfg.output + "': " + ec.message());
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = (std::filesystem::path(cfg.output) / name).string();
    write_file(path, text);
    out.files.push_back(path);
  };

  const std::string csv = to_csv(out.sweep.records);
  emit("sweep.csv", csv);
  int last_n = -1, index = 0;
  for (const auto& r : out.sweep.records) {
    index = r.n == last_n ? index + 1 : 0;
    last_n = r.n;
    if (r.solution) emit(cell_name(r, index), to_json(*r.solution).dump(2) + "\n");
  }

  json verdict = verdict_json(out.sweep);
  verdict["problem"] = b.name;
  verdict["seed"] = cfg.seed;
  verdict["ladder"] = b.sequence.ladder;
  verdict["solver"] = to_json(solver);
  if (b.sequence.oracle && !b.condition_I_tests.empty()) {
    std::vector<GeneralizedDataset> data;
    for (int n : b.sequence.ladder) data.push_back(b.sequence.generate(n));
    const ConditionITable table = condition_I_check(
        *b.sequence.oracle, data, b.condition_I_tests, b.condition_I_ids);
    emit("condition_I.csv", to_csv(table));
    json slopes = json::object();
    for (std::size_t i = 0; i < table.f_ids.size(); ++i) {
      slopes[table.f_ids[i]] =
          std::isfinite(table.slopes[i]) ? json(table.slopes[i]) : json(nullptr);
    }
    verdict["condition_I_slopes"] = slopes;
  }
  if (b.sequence.oracle && !b.min_norm_candidates.empty()) {
    verdict["min_norm"] =
        to_json(min_norm_check(out.sweep.records, b.min_norm_candidates, *b.sequence.oracle));
  }
  if (b.sequence.ladder.size() >= 2) {
    verdict["condition_II"] = to_json(condition_II_report(b.sequence, b.theta_grid));
  }
  out.verdict = verdict;
  emit("verdict.json", verdict.dump(2) + "\n");

  if (cfg.charts) {
    emit("gap_vs_n.svg", render_svg(csv, {"n", {"weakstar_gap", "gap_over_lambda"}, true,
                                          true, b.name + ": weak* gap"}));
    emit("norm_vs_n.svg",
         render_svg(csv, {"n", {"norm"}, true, false, b.name + ": norm"}));
  }
  return out;
}

}  // namespace genlearn
