#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "genlearn/error.hpp"
#include "genlearn/experiments.hpp"
#include "genlearn/plot.hpp"

using namespace genlearn;

namespace {

enum Exit { ok = 0, config_error = 2, solver_error = 3, io_failure = 4 };

void apply_env_seed(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("GENLEARN_SEED")) {
    try {
      cfg.seed = std::stoull(s);
    } catch (const std::exception&) {
      throw invalid_input(std::string("GENLEARN_SEED is not an integer: ") + s);
    }
  }
}

void report_bundle(const OutputBundle& out) {
  for (const auto& f : out.files) std::cout << f << "\n";
  std::cout << "verdict: " << out.verdict.value("verdict", std::string("?")) << "\n";
}

int cmd_solve(const std::string& dataset, double lambda, const std::string& method,
              const std::string& config, const std::string& out) {
  const GeneralizedDataset ds = load_dataset(dataset);
  SolverConfig cfg;
  if (!config.empty()) cfg = solver_config_from_json(read_json(config), cfg);
  cfg.lambda = lambda;
  if (!method.empty()) cfg.method = method_from_string(method);
  if (const char* s = std::getenv("GENLEARN_SEED")) cfg.seed = std::stoull(s);
  const Solution f = solve(ds, cfg);
  const std::string text = to_json(f).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  std::fprintf(stderr, "objective %.12g, norm %.12g, %s\n", f.info.objective,
               f.norm(), f.info.converged ? "converged" : "not converged");
  return ok;
}

int cmd_verify(const std::string& solution, const std::string& dataset, double tol) {
  const Solution f = load_solution(solution);
  const GeneralizedDataset ds = load_dataset(dataset);
  const RepresenterReport r = verify_representer(ds, f, tol);
  std::cout << to_json(r).dump(2) << "\n";
  return r.passed ? ok : solver_error;
}

int cmd_plot(const std::string& csv, const std::string& x, const std::vector<std::string>& y,
             const std::string& log, const std::string& out) {
  PlotOptions opt{x, y, log == "x" || log == "xy", log == "y" || log == "xy", csv};
  int skipped = 0;
  const std::string svg = render_svg(read_file(csv), opt, &skipped);
  if (skipped > 0) std::cerr << "warning: skipped " << skipped << " row(s)\n";
  if (out.empty() || out == "-") {
    std::cout << svg;
  } else {
    write_file(out, svg);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized learning from generalized data"};
  app.require_subcommand(1);

  std::string dataset, solution, method, config_path, out, csv, x, log, name;
  std::string example_out = "out";
  std::vector<std::string> y;
  std::vector<int> ladder;
  std::vector<double> grid;
  double lambda = 1.0, tol = 1e-8, noise = 1.0, exponent = 0.5, scale = 1.0;
  std::uint64_t seed = 0;
  int workers = 1;
  bool no_charts = false;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one regularized problem");
  solve_cmd->add_option("dataset", dataset, "Dataset JSON")->required();
  solve_cmd->add_option("--lambda", lambda, "Regularization weight")->default_val(1.0);
  solve_cmd->add_option("--method", method,
                        "tikhonov|subgradient|prox_grad|douglas_rachford|feature_pnorm|model_class");
  solve_cmd->add_option("--config", config_path, "Solver config JSON");
  solve_cmd->add_option("--out", out, "Output solution JSON (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment config");
  sweep_cmd->add_option("config", config_path, "Experiment JSON")->required();
  sweep_cmd->add_option("--workers", workers, "Parallel sweep cells");
  sweep_cmd->add_option("--out", out, "Output directory override");

  auto* example_cmd = app.add_subcommand("example", "Run a built-in experiment");
  example_cmd->add_option("name", name, "Builtin name")->required();
  example_cmd->add_option("--ladder", ladder, "Sample sizes")->delimiter(',');
  example_cmd->add_option("--seed", seed, "Random seed");
  example_cmd->add_option("--noise", noise, "Noise bound multiplier");
  example_cmd->add_option("--lambda-grid", grid, "Fixed lambda grid")->delimiter(',');
  auto* exp_opt = example_cmd->add_option("--lambda-exponent", exponent, "lambda_n = scale n^-e");
  example_cmd->add_option("--lambda-scale", scale, "Scale of the power rule")->needs(exp_opt);
  example_cmd->add_option("--method", method, "Solver method override");
  example_cmd->add_option("--workers", workers, "Parallel sweep cells");
  example_cmd->add_option("--out", example_out, "Output directory")->capture_default_str();
  example_cmd->add_flag("--no-charts", no_charts, "Skip SVG charts");

  auto* verify_cmd = app.add_subcommand("verify", "Check the representer conditions");
  verify_cmd->add_option("solution", solution, "Solution JSON")->required();
  verify_cmd->add_option("dataset", dataset, "Dataset JSON")->required();
  verify_cmd->add_option("--tol", tol, "Residual tolerance")->default_val(1e-8);

  auto* plot_cmd = app.add_subcommand("plot", "Render CSV columns as SVG");
  plot_cmd->add_option("csv", csv, "CSV file")->required();
  plot_cmd->add_option("--x", x, "x column")->required();
  plot_cmd->add_option("--y", y, "y columns")->required()->delimiter(',');
  plot_cmd->add_option("--log", log, "Log axes")->check(CLI::IsMember({"x", "y", "xy"}));
  plot_cmd->add_option("--out", out, "Output SVG (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*solve_cmd) return cmd_solve(dataset, lambda, method, config_path, out);
    if (*verify_cmd) return cmd_verify(solution, dataset, tol);
    if (*plot_cmd) return cmd_plot(csv, x, y, log, out);
    ExperimentConfig cfg;
    if (*sweep_cmd) {
      cfg = experiment_from_json(read_json(config_path));
      if (sweep_cmd->count("--workers")) cfg.workers = workers;
      if (!out.empty()) cfg.output = out;
    } else {
      cfg.problem = name;
      cfg.ladder = ladder;
      cfg.seed = seed;
      cfg.noise = noise;
      cfg.workers = workers;
      cfg.output = example_out;
      cfg.charts = !no_charts;
      if (!grid.empty()) {
        cfg.lambda_rule = LambdaRule::grid(grid);
      } else if (example_cmd->count("--lambda-exponent")) {
        cfg.lambda_rule = LambdaRule::power(exponent, scale);
      }
      if (!method.empty()) cfg.solver = json{{"method", method}};
      cfg.validate();
    }
    apply_env_seed(cfg);
    report_bundle(run(cfg));
    return ok;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const numerical_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return solver_error;
  } catch (const convergence_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return solver_error;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  }
}
