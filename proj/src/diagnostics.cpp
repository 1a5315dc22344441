#include "genlearn/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Functional> default_battery(int dims) {
  std::vector<Point> pts;
  if (dims == 1) {
    pts = tensor_grid(16, 1);
  } else if (dims == 2) {
    pts = tensor_grid(4, 2);
  } else {
    pts = tensor_grid(2, dims);
    pts.resize(std::min<std::size_t>(16, pts.size()));
  }
  std::vector<Functional> out;
  for (auto& p : pts) out.push_back(Functional::point(std::move(p)));
  return out;
}

TrendSummary summarize(const std::string& metric, const std::vector<double>& n,
                       const std::vector<double>& values) {
  TrendSummary t{metric, kNaN, "undefined"};
  if (values.empty()) return t;
  double largest = 0.0;
  for (double v : values) largest = std::max(largest, std::abs(v));
  if (largest <= 1e-12) {
    t.status = "zero";
    return t;
  }
  t.slope = loglog_slope(n, values);
  t.status = trend_status(t.slope);
  return t;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double weakstar_gap(const Solution& f_ref, const Solution& f,
                    const std::vector<Functional>& battery) {
  double gap = 0.0;
  for (const auto& xi : battery) {
    gap = std::max(gap, std::abs(f_ref.apply(xi) - f.apply(xi)));
  }
  return gap;
}

double weakstar_gap(const Solution& f_ref, const Solution& f,
                    const FunctionalSet& battery) {
  return weakstar_gap(f_ref, f, battery.members());
}

void ProblemSequence::validate() const {
  if (ladder.empty()) throw invalid_input("sequence: empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) {
      throw invalid_input("sequence: ladder must be strictly increasing");
    }
  }
  if (!generate) throw invalid_input("sequence: no dataset generator");
}

LambdaRule LambdaRule::grid(std::vector<double> values) {
  if (values.empty()) throw invalid_input("lambda rule: empty grid");
  for (double v : values) {
    if (!(v > 0.0)) throw invalid_input("lambda rule: values must be > 0");
  }
  LambdaRule r;
  r.kind = Kind::grid;
  r.values = std::move(values);
  return r;
}

LambdaRule LambdaRule::power(double exponent, double scale) {
  if (!(scale > 0.0)) throw invalid_input("lambda rule: scale must be > 0");
  LambdaRule r;
  r.kind = Kind::power;
  r.exponent = exponent;
  r.scale = scale;
  return r;
}

LambdaRule LambdaRule::adaptive() {
  LambdaRule r;
  r.kind = Kind::adaptive;
  return r;
}

std::string trend_status(double slope) {
  if (std::isnan(slope)) return "undefined";
  if (slope < -0.1) return "converging";
  if (slope > 0.1) return "diverging";
  return "flat";
}

SweepResult convergence_sweep(const ProblemSequence& seq, const LambdaRule& rule,
                              const SolverConfig& cfg, int workers,
                              const CellSolver& solver) {
  seq.validate();
  if (seq.ladder.size() < 3) {
    throw invalid_input("convergence_sweep: ladder needs at least 3 stages");
  }
  const CellSolver solve_cell =
      solver ? solver : CellSolver([](const GeneralizedDataset& ds,
                                      const SolverConfig& c) { return solve(ds, c); });

  std::vector<GeneralizedDataset> data;
  for (int n : seq.ladder) {
    data.push_back(seq.generate(n));
    data.back().stage = n;
  }

  // (stage index, lambda, series index) per cell, ordered by (n, lambda).
  struct Cell {
    std::size_t stage;
    double lambda;
    std::size_t series;
  };
  std::vector<Cell> cells;
  std::vector<std::string> labels;
  switch (rule.kind) {
    case LambdaRule::Kind::grid: {
      std::vector<double> values = rule.values;
      std::sort(values.begin(), values.end());
      for (double v : values) labels.push_back("lambda=" + format_double(v));
      for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < values.size(); ++j) {
          cells.push_back({i, values[j], j});
        }
      }
      break;
    }
    case LambdaRule::Kind::power:
      labels.push_back("lambda=" + format_double(rule.scale) + "*n^-" +
                       format_double(rule.exponent));
      for (std::size_t i = 0; i < data.size(); ++i) {
        cells.push_back(
            {i, rule.scale * std::pow(double(seq.ladder[i]), -rule.exponent), 0});
      }
      break;
    case LambdaRule::Kind::adaptive: {
      if (!seq.reference) {
        throw invalid_input("convergence_sweep: the adaptive rule needs f0");
      }
      const LambdaSchedule s = adaptive_lambda(data, *seq.reference);
      labels.push_back("lambda=adaptive");
      for (std::size_t i = 0; i < data.size(); ++i) cells.push_back({i, s.lambda[i], 0});
      break;
    }
  }

  SweepResult result;
  result.records.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const Cell& cell = cells[c];
      const GeneralizedDataset& ds = data[cell.stage];
      SweepRecord& rec = result.records[c];
      rec.n = seq.ladder[cell.stage];
      rec.lambda = cell.lambda;
      SolverConfig cc = cfg;
      cc.lambda = cell.lambda;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Solution f = solve_cell(ds, cc);
        rec.empirical_risk = empirical_risk(ds, f);
        if (seq.oracle) {
          try {
            rec.expected_risk = expected_risk(*seq.oracle, f);
          } catch (const numerical_error& e) {
            rec.expected_risk = e.partial_value;
          }
        }
        rec.norm = f.norm();
        rec.converged = f.info.converged;
        rec.solution = std::move(f);
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.converged = false;
        rec.empirical_risk = rec.norm = kNaN;
      }
      rec.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    }
  };
  const int threads = std::max(1, std::min<int>(workers, cells.size()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const int dims = data.front().functionals().front().dimension();
  const std::vector<Functional> extra = default_battery(dims);
  double ref_risk = kNaN;
  if (seq.reference && seq.oracle) ref_risk = expected_risk(*seq.oracle, *seq.reference);

  for (std::size_t s = 0; s < labels.size(); ++s) {
    // Without f0 the last solved cell of the series stands in for the limit.
    const Solution* ref = seq.reference ? &*seq.reference : nullptr;
    if (!ref) {
      for (std::size_t c = cells.size(); c-- > 0;) {
        if (cells[c].series == s && result.records[c].solution) {
          ref = &*result.records[c].solution;
          break;
        }
      }
      if (s == 0) {
        result.notes.push_back(
            "no reference solution: gaps are measured against the last cell");
      }
    }
    std::vector<double> ns, gaps, norm_gaps, risk_gaps, ratios;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].series != s) continue;
      SweepRecord& rec = result.records[c];
      if (!rec.solution || !ref) {
        rec.weakstar_gap = rec.gap_over_lambda = kNaN;
        continue;
      }
      std::vector<Functional> battery = seq.battery;
      if (battery.empty()) {
        battery = data[cells[c].stage].functionals();
        battery.insert(battery.end(), extra.begin(), extra.end());
      }
      rec.weakstar_gap = weakstar_gap(*ref, *rec.solution, battery);
      rec.gap_over_lambda = rec.weakstar_gap / rec.lambda;
      if (ref == &*rec.solution) continue;
      ns.push_back(rec.n);
      gaps.push_back(rec.weakstar_gap);
      ratios.push_back(rec.gap_over_lambda);
      if (seq.reference && std::isfinite(seq.reference->norm())) {
        norm_gaps.push_back(std::abs(rec.norm - seq.reference->norm()));
      }
      if (std::isfinite(ref_risk) && std::isfinite(rec.expected_risk)) {
        risk_gaps.push_back(std::abs(rec.expected_risk - ref_risk));
      }
    }
    SeriesVerdict v;
    v.label = labels[s];
    v.trends.push_back(summarize("weakstar_gap", ns, gaps));
    if (norm_gaps.size() == ns.size() && !ns.empty()) {
      v.trends.push_back(summarize("norm_gap", ns, norm_gaps));
    }
    if (risk_gaps.size() == ns.size() && !ns.empty()) {
      v.trends.push_back(summarize("risk_gap", ns, risk_gaps));
    }
    v.trends.push_back(summarize("gap_over_lambda", ns, ratios));
    bool diverging = false, converging = false, unsettled = false;
    // gap/lambda is reported but does not vote.
    for (const auto& t : v.trends) {
      if (t.metric == "gap_over_lambda") continue;
      if (t.status == "diverging") diverging = true;
      if (t.status == "converging") converging = true;
      if (t.status == "flat") unsettled = true;
    }
    v.verdict = diverging                  ? "diverging"
                : converging && !unsettled ? "converging"
                                           : "inconclusive";
    result.series.push_back(std::move(v));
  }
  bool any_conv = false, any_div = false;
  for (const auto& v : result.series) {
    any_conv |= v.verdict == "converging";
    any_div |= v.verdict == "diverging";
  }
  result.verdict = any_conv ? "converging" : any_div ? "diverging" : "inconclusive";
  return result;
}

std::string to_csv(const std::vector<SweepRecord>& records,
                   bool include_wall_time) {
  std::ostringstream os;
  os << "n,lambda,emp_risk,exp_risk,norm,weakstar_gap,gap_over_lambda";
  if (include_wall_time) os << ",wall_time";
  os << ",converged\n";
  for (const auto& r : records) {
    os << r.n << ',' << format_double(r.lambda) << ','
       << format_double(r.empirical_risk) << ',' << format_double(r.expected_risk)
       << ',' << format_double(r.norm) << ',' << format_double(r.weakstar_gap)
       << ',' << format_double(r.gap_over_lambda);
    if (include_wall_time) os << ',' << format_double(r.wall_time);
    os << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

MinNormReport min_norm_check(const std::vector<SweepRecord>& records,
                             const std::vector<Solution>& candidates,
                             const ExpectedRiskOracle& oracle, double tol,
                             double risk_tol) {
  if (candidates.empty()) throw invalid_input("min_norm_check: no candidates");
  // Limit: largest n, then smallest lambda, among converged cells.
  const SweepRecord* limit = nullptr;
  for (const auto& r : records) {
    if (!r.converged || !r.solution) continue;
    if (!limit || r.n > limit->n || (r.n == limit->n && r.lambda < limit->lambda)) {
      limit = &r;
    }
  }
  if (!limit) throw invalid_input("min_norm_check: no converged records");
  MinNormReport rep;
  rep.limit_norm = limit->solution->norm();
  rep.limit_risk = expected_risk(oracle, *limit->solution);
  double best_risk = rep.limit_risk;
  for (const auto& c : candidates) {
    rep.candidate_norms.push_back(c.norm());
    rep.candidate_risks.push_back(expected_risk(oracle, c));
    best_risk = std::min(best_risk, rep.candidate_risks.back());
  }
  rep.min_candidate_norm = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const bool ok = rep.candidate_risks[i] <= best_risk + risk_tol * (1.0 + best_risk);
    rep.admitted.push_back(ok);
    if (ok) rep.min_candidate_norm = std::min(rep.min_candidate_norm, rep.candidate_norms[i]);
  }
  rep.passed = rep.limit_risk <= best_risk + tol * (1.0 + best_risk) &&
               rep.limit_norm <= rep.min_candidate_norm + tol;
  return rep;
}

double multiloss_lipschitz(const GeneralizedDataset& ds, double theta) {
  if (!(theta > 0.0)) throw invalid_input("lipschitz: theta must be > 0");
  double total = 0.0;
  for (const auto& b : ds.blocks) {
    const Eigen::VectorXd w = b.sample_weights();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < b.y.size(); ++k) {
      worst = std::max(worst, local_lipschitz(Loss{b.loss, w[k]}, theta,
                                              std::abs(b.y[k])));
    }
    total += b.rho * worst;
  }
  return total;
}

ConditionIIReport condition_II_report(const ProblemSequence& seq,
                                      const std::vector<double>& theta_grid,
                                      double eps) {
  seq.validate();
  if (seq.ladder.size() < 2) {
    throw invalid_input("condition_II_report: ladder needs at least 2 stages");
  }
  if (!(eps > 0.0)) throw invalid_input("condition_II_report: eps must be > 0");
  ConditionIIReport rep;
  rep.eps = eps;
  std::vector<Functional> accumulated;
  std::vector<double> ns, sups, sizes;
  std::vector<std::vector<double>> lips(theta_grid.size());
  std::optional<KernelSpec> spec;
  double sup = 0.0;
  for (int n : seq.ladder) {
    const GeneralizedDataset ds = seq.generate(n);
    spec = ds.kernel;
    for (const auto& xi : ds.functionals()) {
      sup = std::max(sup, dual_norm(ds.kernel, xi));
      accumulated.push_back(xi);
    }
    const int size = epsilon_net_size(FunctionalSet(ds.kernel, accumulated), eps);
    rep.nets.push_back({n, accumulated.size(), size, sup});
    ns.push_back(n);
    sups.push_back(sup);
    sizes.push_back(size);
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
      lips[t].push_back(multiloss_lipschitz(ds, theta_grid[t]));
    }
  }
  rep.dual_norm_slope = loglog_slope(ns, sups);
  rep.net_slope = loglog_slope(ns, sizes);
  if (rep.dual_norm_slope > 0.1) rep.flags.push_back("dual norms grow along the ladder");
  if (rep.net_slope > 0.5) rep.flags.push_back("eps-net size grows along the ladder");
  for (std::size_t t = 0; t < theta_grid.size(); ++t) {
    LipschitzRow row{theta_grid[t], lips[t], loglog_slope(ns, lips[t]), true};
    if (row.slope > 0.1) {
      row.uniform = false;
      rep.flags.push_back("Lipschitz constant grows at theta=" +
                          format_double(theta_grid[t]));
    }
    rep.lipschitz.push_back(std::move(row));
  }
  rep.passed = rep.flags.empty();
  return rep;
}

}  // namespace genlearn
