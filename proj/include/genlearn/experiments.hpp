#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genlearn/diagnostics.hpp"
#include "genlearn/io.hpp"

namespace genlearn {

// First `count` Halton points in [0,1]^dims; bases are the first `dims`
// primes and the index starts at 1.
std::vector<Point> halton(int count, int dims);

// n points equally spaced by arc length on the boundary of [0,1]^2,
// counterclockwise from (0,0).
std::vector<Point> boundary_grid(int n);

// A built-in experiment: the staged problem plus its default solve setup
// and the extra ground truth the diagnostics can use.
struct BuiltinProblem {
  std::string name;
  ProblemSequence sequence;
  SolverConfig solver;
  LambdaRule lambda_rule;
  std::optional<ModelClass> model;           // set for network experiments
  std::vector<Solution> condition_I_tests;   // test functions for Condition (I)
  std::vector<std::string> condition_I_ids;
  std::vector<Solution> min_norm_candidates; // minimizers of the expected risk
  std::vector<double> theta_grid{0.5, 1.0, 2.0};
};

struct BuiltinOptions {
  std::vector<int> ladder;  // empty: the builtin's default ladder
  std::uint64_t seed = 0;
  double noise = 1.0;       // Example 6.1 noise bound zeta_n = noise / n
};

std::vector<std::string> builtin_names();
BuiltinProblem make_builtin(const std::string& name, const BuiltinOptions& opt = {});

struct ExperimentConfig {
  std::string problem;  // builtin name
  std::string dataset;  // or a dataset JSON path
  std::vector<int> ladder;
  std::optional<LambdaRule> lambda_rule;
  std::optional<json> solver;  // overrides on top of the builtin defaults
  std::string output = "out";
  std::uint64_t seed = 0;
  double noise = 1.0;
  int workers = 1;
  bool charts = true;

  void validate() const;
};

ExperimentConfig experiment_from_json(const json& j);
LambdaRule lambda_rule_from_json(const json& j);

struct OutputBundle {
  std::string directory;
  std::vector<std::string> files;
  SweepResult sweep;
  json verdict;
};

// Builds the sequence, runs the sweep and writes the bundle: sweep.csv,
// verdict.json, one solution JSON per cell, condition_I.csv when the
// problem has an expected-risk oracle and test functions, and SVG charts.
OutputBundle run(const ExperimentConfig& cfg);

}  // namespace genlearn
