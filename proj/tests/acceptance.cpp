// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"
#include "problems.hpp"

using namespace genlearn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Nonzero convergent representer solves collected for the representer check.
struct Solved {
  std::string label;
  GeneralizedDataset ds;
  Solution f;
};
std::vector<Solved> solved;

void keep(const std::string& label, const GeneralizedDataset& ds, const Solution& f) {
  if (f.as_representer() && f.info.converged && f.norm() > 0.0) {
    solved.push_back({label, ds, f});
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Components of a linear-kernel solution in R^2.
Eigen::Vector2d components(const Solution& f) {
  return {f.evaluate(Eigen::Vector2d(1.0, 0.0)), f.evaluate(Eigen::Vector2d(0.0, 1.0))};
}

// (A_n^T A_n + lambda I)^{-1} A_n^T b, computed directly.
Eigen::Vector2d illposed_oracle(int n, double lambda) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0 / n;
  const Eigen::Vector3d b(1.0, 1.0, 1.0);
  const Eigen::Matrix2d m = a.transpose() * a + lambda * Eigen::Matrix2d::Identity();
  return m.ldlt().solve(a.transpose() * b);
}

Outcome closed_form() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltinProblem b = make_builtin("illposed-2d");
  double worst = 0.0, worst_second = 0.0;
  for (int n : {1, 10, 100}) {
    const GeneralizedDataset ds = b.sequence.generate(n);
    for (double lambda : {1.0, 0.1}) {
      const Solution f = solve_tikhonov(ds, lambda);
      keep("illposed n=" + std::to_string(n), ds, f);
      const Eigen::Vector2d got = components(f);
      worst = std::max(worst, (got - illposed_oracle(n, lambda)).cwiseAbs().maxCoeff());
      const double second = n / (1.0 + lambda * n * n);
      worst_second = std::max(worst_second, std::abs(got[1] - second));
      worst = std::max(worst, std::abs(got[0] - 1.0 / (1.0 + lambda)));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = worst <= 1e-10 && worst_second <= 1e-10 && secs < 1.0;
  o.detail = "max error vs (1/(1+lambda), n/(1+lambda n^2)) " + fmt("%.2e", worst) +
             ", " + fmt("%.3f", secs) + " s";
  return o;
}

Outcome dichotomy() {
  Outcome o;
  BuiltinOptions opt;
  opt.ladder = {1, 10, 100, 10000};
  const BuiltinProblem b = make_builtin("illposed-2d", opt);
  const GeneralizedDataset ds = b.sequence.generate(10000);
  const Solution good = solve_tikhonov(ds, 1.0 / std::sqrt(10000.0));
  keep("illposed lambda=n^-1/2", ds, good);
  const Eigen::Vector2d g = components(good);
  const double dist = (g - Eigen::Vector2d(1.0, 0.0)).norm();
  // The second component alone follows n/(1+n^{3/2}); the first adds
  // lambda/(1+lambda).
  const double bound = std::hypot(0.01 / 1.01, 1e4 / (1.0 + 1e6)) + 1e-6;

  SolverConfig cfg = b.solver;
  const SweepResult sweep = convergence_sweep(b.sequence, LambdaRule::power(2.0), cfg);
  const Solution& last = *sweep.records.back().solution;
  const double second = components(last)[1];
  o.pass = g[1] <= 0.011 && dist <= bound && second > 1e3 && sweep.verdict == "diverging";
  o.detail = "n^-1/2: |f - (1,0)| = " + fmt("%.5f", dist) + ", second " + fmt("%.5f", g[1]) +
             "; n^-2: second " + fmt("%.1f", second) + ", verdict " + sweep.verdict;
  return o;
}

Outcome min_norm() {
  Outcome o;
  BuiltinOptions opt;
  opt.ladder = {1, 10, 100, 10000, 1000000, 100000000};
  const BuiltinProblem b = make_builtin("illposed-2d", opt);
  const SweepResult sweep = convergence_sweep(b.sequence, LambdaRule::power(0.5), b.solver);
  for (const auto& r : sweep.records) {
    if (r.solution) keep("illposed sweep", b.sequence.generate(r.n), *r.solution);
  }
  const MinNormReport rep =
      min_norm_check(sweep.records, b.min_norm_candidates, *b.sequence.oracle);
  o.pass = rep.passed && std::abs(rep.limit_norm - 1.0) <= 1e-3;
  o.detail = "limit norm " + fmt("%.6f", rep.limit_norm) + ", min candidate norm " +
             fmt("%.4f", rep.min_candidate_norm);
  return o;
}

Outcome poisson() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltinProblem b = make_builtin("poisson-collocation");
  const auto grid = tensor_grid(21, 2);
  std::vector<double> errors;
  double ref_risk = 0.0;
  for (int n : {4, 8, 16}) {
    const GeneralizedDataset ds = b.sequence.generate(n);
    const Solution f = solve_tikhonov(ds, 1.0 / std::sqrt(double(n)));
    keep("poisson n=" + std::to_string(n), ds, f);
    double err = 0.0;
    for (const auto& x : grid) {
      err = std::max(err, std::abs(f.evaluate(x) - b.sequence.reference->evaluate(x)));
    }
    errors.push_back(err);
    ref_risk = std::max(ref_risk, empirical_risk(ds, *b.sequence.reference));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = errors[1] < errors[0] && errors[2] < errors[1] && ref_risk <= 1e-20 && secs < 60;
  o.detail = "sup errors " + fmt("%.4f", errors[0]) + ", " + fmt("%.4f", errors[1]) + ", " +
             fmt("%.4f", errors[2]) + "; R_n(f0) " + fmt("%.1e", ref_risk) + "; " +
             fmt("%.2f", secs) + " s";
  return o;
}

Outcome condition_I() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const BuiltinProblem b = make_builtin("gaussian-regression");
  std::vector<GeneralizedDataset> seq;
  for (int n : {10, 40, 160, 640}) seq.push_back(b.sequence.generate(n));
  const ConditionITable t =
      condition_I_check(*b.sequence.oracle, seq, b.condition_I_tests, b.condition_I_ids);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = t.slopes.size() == 3 && secs < 30;
  std::ostringstream os;
  os << "slopes";
  for (std::size_t i = 0; i < t.slopes.size(); ++i) {
    o.pass = o.pass && t.slopes[i] <= -0.5 + 0.2;
    os << ' ' << t.f_ids[i] << '=' << fmt("%.3f", t.slopes[i]);
  }
  os << "; " << fmt("%.2f", secs) << " s";
  o.detail = os.str();
  return o;
}

Outcome condition_II() {
  Outcome o;
  const BuiltinProblem reg = make_builtin("gaussian-regression");
  std::vector<Functional> acc;
  for (int n = 10; acc.size() < 2000; n *= 2) {
    const auto f = reg.sequence.generate(n).functionals();
    acc.insert(acc.end(), f.begin(), f.end());
  }
  const std::vector<Functional> first(acc.begin(), acc.begin() + 1000);
  const std::vector<Functional> both(acc.begin(), acc.begin() + 2000);
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  const int net_1000 = epsilon_net_size(FunctionalSet(spec, first), 0.1);
  const int net_2000 = epsilon_net_size(FunctionalSet(spec, both), 0.1);

  const BuiltinProblem hinge = make_builtin("minkernel-hinge");
  bool uniform = true;
  for (const auto* p : {&reg, &hinge}) {
    const ConditionIIReport r = condition_II_report(p->sequence, p->theta_grid);
    for (const auto& row : r.lipschitz) uniform = uniform && row.uniform;
  }
  // Absolute loss: bounded by sup weight; hinge: constant.
  double abs_max = 0.0, hinge_spread = 0.0;
  for (int n : {10, 100, 1000}) {
    abs_max = std::max(abs_max, multiloss_lipschitz(reg.sequence.generate(n), 1.0));
    hinge_spread = std::max(
        hinge_spread,
        std::abs(multiloss_lipschitz(hinge.sequence.generate(n), 1.0) -
                 multiloss_lipschitz(hinge.sequence.generate(8), 1.0)));
  }
  o.pass = net_1000 == net_2000 && uniform && abs_max <= 2.0 && hinge_spread == 0.0;
  o.detail = "net sizes " + std::to_string(net_1000) + "/" + std::to_string(net_2000) +
             ", absolute C <= " + fmt("%.4f", abs_max) + ", hinge spread " +
             fmt("%.1e", hinge_spread);
  return o;
}

Outcome equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    const GeneralizedDataset ds = testing_problems::random_problem(rng, t % 4 == 0);
    SolverConfig cfg;
    cfg.lambda = 0.05 + u(rng);
    cfg.regularizer = t % 3 == 0   ? Regularizer::quadratic()
                      : t % 3 == 1 ? Regularizer::linear()
                                   : Regularizer::power(1.5);
    const double ref = testing_problems::oracle_objective(ds, cfg.lambda, cfg.regularizer);
    const double tol = 1e-5 * (1.0 + std::abs(ref));
    std::vector<Method> methods{Method::subgradient, Method::douglas_rachford};
    if (ds.all_square()) methods.push_back(Method::prox_grad);
    for (Method m : methods) {
      cfg.method = m;
      const Solution f = solve(ds, cfg);
      keep("random " + to_string(m), ds, f);
      const double gap = std::abs(f.info.objective - ref);
      worst = std::max(worst, gap / (1.0 + std::abs(ref)));
      if (gap > tol) ++failures;
    }
  }
  double dr_gap = 0.0;
  for (int t = 0; t < 10; ++t) {
    const GeneralizedDataset a = testing_problems::random_problem(rng, true);
    GeneralizedDataset bds = testing_problems::random_problem(rng, true);
    bds.kernel = a.kernel;
    SolverConfig cfg;
    cfg.lambda = 0.05 + u(rng);
    const Solution dr = solve_douglas_rachford(a, bds, cfg);
    const GeneralizedDataset m = merge(a, bds);
    const Solution tk = solve_tikhonov(m, cfg.lambda);
    keep("merged douglas_rachford", m, dr);
    dr_gap = std::max(dr_gap, std::abs(dr.info.objective - tk.info.objective));
  }
  o.pass = failures == 0 && dr_gap <= 1e-6;
  o.detail = std::to_string(failures) + " failures, worst relative gap " + fmt("%.2e", worst) +
             ", DR vs Tikhonov " + fmt("%.2e", dr_gap);
  return o;
}

Outcome prox_suite() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const LossKind kind = static_cast<LossKind>(i % 3);
    const Loss loss{kind, 0.1 + 3.0 * u(rng)};
    const double y = kind == LossKind::hinge ? (u(rng) < 0.5 ? -1.0 : 1.0) : 4.0 * u(rng) - 2.0;
    const double v = 6.0 * u(rng) - 3.0;
    const double step = 0.01 + 5.0 * u(rng);
    const double p = prox(loss, y, v, step);
    if (!subgradient(loss, y, p).contains((v - p) / step, 1e-9)) ++failures;
  }
  o.pass = failures == 0;
  o.detail = std::to_string(1000 - failures) + "/1000 optimality checks";
  return o;
}

Outcome representer() {
  Outcome o;
  int failures = 0;
  double worst = 0.0;
  for (const auto& s : solved) {
    const RepresenterReport r = verify_representer(s.ds, s.f, 1e-8);
    worst = std::max({worst, r.residual, r.condition_i_gap, r.condition_ii_gap});
    if (!r.passed) ++failures;
  }
  o.pass = failures == 0 && !solved.empty();
  o.detail = std::to_string(solved.size() - failures) + "/" + std::to_string(solved.size()) +
             " solves, worst residual " + fmt("%.1e", worst);
  return o;
}

Outcome model_class() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  GeneralizedDataset ds;
  ds.kernel = KernelSpec::gaussian(1.0);
  DataBlock blk;
  blk.y.resize(5);
  for (int k = 0; k < 5; ++k) {
    const double x = -0.8 + 0.4 * k;
    blk.functionals.push_back(Functional::point(Point::Constant(1, x)));
    blk.y[k] = std::sin(M_PI * x);
  }
  ds.blocks.push_back(blk);
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  cfg.method = Method::model_class;
  cfg.max_iter = 4000;
  const double tik = solve_tikhonov(ds, cfg.lambda).info.objective;
  std::vector<double> objs;
  std::optional<Solution> prev;
  for (int m : {4, 16, 64}) {
    ModelClass mc;
    mc.m = m;
    mc.restarts = 2;
    prev = solve_model_class(ds, cfg, mc, prev ? &*prev : nullptr);
    objs.push_back(prev->info.objective);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = objs[1] <= objs[0] && objs[2] <= objs[1] && objs[2] <= 1.05 * tik && secs < 60;
  o.detail = "objectives " + fmt("%.3e", objs[0]) + ", " + fmt("%.3e", objs[1]) + ", " +
             fmt("%.3e", objs[2]) + " vs Tikhonov " + fmt("%.3e", tik) + "; " +
             fmt("%.1f", secs) + " s";
  return o;
}

// File bytes with the wall_time column of a sweep CSV removed.
std::string stable_bytes(const fs::path& p) {
  std::string text = read_file(p.string());
  if (p.filename() != "sweep.csv") return text;
  std::istringstream in(text);
  std::string line, out;
  int drop = -1;
  for (bool header = true; std::getline(in, line); header = false) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "wall_time") drop = static_cast<int>(i);
      }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<int>(i) != drop) out += cells[i] + ',';
    }
    out += '\n';
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "genlearn_acceptance";
  fs::remove_all(root);
  int files = 0, mismatches = 0;
  for (const auto& name : builtin_names()) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      ExperimentConfig cfg;
      cfg.problem = name;
      cfg.seed = 7;
      cfg.workers = rep == 0 ? 1 : 3;
      cfg.output = (root / (name + "_" + std::to_string(rep))).string();
      run(cfg);
      dirs.push_back(cfg.output);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      const fs::path other = dirs[1] / e.path().filename();
      if (!fs::exists(other) || stable_bytes(e.path()) != stable_bytes(other)) ++mismatches;
    }
  }
  fs::remove_all(root);
  o.pass = mismatches == 0 && files > 0;
  o.detail = std::to_string(files) + " files compared, " + std::to_string(mismatches) +
             " mismatches";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ill-posed closed form", closed_form},
      {"ill-posed convergence dichotomy", dichotomy},
      {"minimum-norm limit", min_norm},
      {"Poisson collocation", poisson},
      {"Condition (I) slopes", condition_I},
      {"Condition (II) report", condition_II},
      {"solver oracle equivalence", equivalence},
      {"prox optimality", prox_suite},
      {"representer verification", representer},
      {"model-class trend", model_class},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
