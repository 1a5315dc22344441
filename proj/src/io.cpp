#include "genlearn/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// NaN and infinities are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Eigen::VectorXd vec_from(const json& j, const char* what) {
  if (!j.is_array()) throw invalid_input(std::string(what) + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw invalid_input(std::string(what) + ": expected numbers");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

std::vector<Point> points_from(const json& j, const char* what) {
  if (!j.is_array()) throw invalid_input(std::string(what) + ": expected an array");
  std::vector<Point> pts;
  for (const auto& p : j) pts.push_back(vec_from(p, what));
  return pts;
}

json points(const std::vector<Point>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec(p));
  return a;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw invalid_input(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

json to_json(const KernelSpec& spec) {
  json j{{"type", to_string(spec.type)}};
  switch (spec.type) {
    case KernelType::gaussian: j["theta"] = spec.theta; break;
    case KernelType::sobolev_matern:
      j["theta"] = spec.theta;
      j["j"] = spec.j;
      break;
    default: break;
  }
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  const std::string type = field(j, "type").get<std::string>();
  KernelSpec spec;
  if (type == "gaussian") {
    spec = KernelSpec::gaussian(j.value("theta", 1.0));
  } else if (type == "min") {
    spec = KernelSpec::min_kernel();
  } else if (type == "sobolev" || type == "sobolev_matern") {
    spec = KernelSpec::sobolev_matern(j.value("theta", 1.0), j.value("j", 4));
  } else if (type == "linear") {
    spec = KernelSpec::linear();
  } else {
    throw invalid_input("unknown kernel type '" + type + "'");
  }
  return spec;
}

json to_json(const Functional& xi) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointEval>) {
          return {{"type", "point"}, {"x", vec(v.x)}};
        } else if constexpr (std::is_same_v<T, OpEval>) {
          return {{"type", "op"}, {"op", to_string(v.op)}, {"x", vec(v.x)}};
        } else {
          return {{"type", "quadrature"},
                  {"nodes", points(v.nodes)},
                  {"weights", v.weights}};
        }
      },
      xi.value());
}

Functional functional_from_json(const json& j) {
  const std::string type = field(j, "type").get<std::string>();
  if (type == "point") return Functional::point(vec_from(field(j, "x"), "x"));
  if (type == "op") {
    const std::string op = field(j, "op").get<std::string>();
    if (op != "laplacian") throw invalid_input("unknown operator '" + op + "'");
    return Functional::op(DiffOp::laplacian, vec_from(field(j, "x"), "x"));
  }
  if (type == "quadrature") {
    const Eigen::VectorXd w = vec_from(field(j, "weights"), "weights");
    return Functional::quadrature(points_from(field(j, "nodes"), "nodes"),
                                  std::vector<double>(w.data(), w.data() + w.size()));
  }
  throw invalid_input("unknown functional type '" + type + "'");
}

json to_json(const GeneralizedDataset& ds) {
  json blocks = json::array();
  for (const auto& b : ds.blocks) {
    json fs = json::array();
    for (const auto& xi : b.functionals) fs.push_back(to_json(xi));
    json loss{{"loss", to_string(b.loss)}};
    if (b.weights.size() != 0) loss["weights"] = vec(b.weights);
    blocks.push_back({{"functionals", fs}, {"y", vec(b.y)}, {"loss", loss}, {"rho", b.rho}});
  }
  json j{{"kernel", to_json(ds.kernel)}, {"blocks", blocks}};
  if (ds.stage != 0) j["stage"] = ds.stage;
  return j;
}

GeneralizedDataset dataset_from_json(const json& j) {
  try {
    GeneralizedDataset ds;
    ds.kernel = kernel_from_json(field(j, "kernel"));
    ds.stage = j.value("stage", 0);
    for (const auto& bj : field(j, "blocks")) {
      DataBlock b;
      for (const auto& fj : field(bj, "functionals")) {
        b.functionals.push_back(functional_from_json(fj));
      }
      b.y = vec_from(field(bj, "y"), "y");
      const json& loss = field(bj, "loss");
      if (loss.is_string()) {
        b.loss = loss_kind_from_string(loss.get<std::string>());
      } else {
        b.loss = loss_kind_from_string(field(loss, "loss").get<std::string>());
        if (loss.contains("weights")) b.weights = vec_from(loss["weights"], "weights");
      }
      b.rho = bj.value("rho", 1.0);
      ds.blocks.push_back(std::move(b));
    }
    if (ds.blocks.empty()) throw invalid_input("dataset JSON: no blocks");
    ds.validate();
    return ds;
  } catch (const json::exception& e) {
    throw invalid_input(std::string("dataset JSON: ") + e.what());
  }
}

json to_json(const Solution& f) {
  json j;
  if (const auto* r = f.as_representer()) {
    json basis = json::array();
    for (const auto& xi : r->basis) basis.push_back(to_json(xi));
    j = {{"representation", "representer"},
         {"kernel", to_json(r->kernel)},
         {"basis", basis},
         {"coefficients", vec(r->coefficients)}};
  } else if (const auto* fe = f.as_features()) {
    j = {{"representation", "features"},
         {"kernel", to_json(fe->features->spec())},
         {"nodes", points(fe->features->nodes())},
         {"m", fe->features->size()},
         {"weights", vec(fe->weights)},
         {"p", fe->p}};
  } else if (const auto* nw = f.as_network()) {
    const auto& w = nw->network.widths();
    j = {{"representation", "network"},
         {"widths", std::vector<int>(w.begin(), w.end() - 1)},
         {"params", vec(nw->params)},
         {"grid", points(nw->grid)}};
  } else {
    throw capability_error("reference functions are not serializable");
  }
  j["norm"] = num(f.norm());
  j["method"] = f.info.method;
  j["lambda"] = num(f.info.lambda);
  j["objective"] = num(f.info.objective);
  j["iterations"] = f.info.iterations;
  j["converged"] = f.info.converged;
  j["warnings"] = f.info.warnings;
  return j;
}

Solution solution_from_json(const json& j) {
  try {
    const std::string rep = field(j, "representation").get<std::string>();
    std::optional<Solution> f;
    if (rep == "representer") {
      std::vector<Functional> basis;
      for (const auto& b : field(j, "basis")) basis.push_back(functional_from_json(b));
      f = Solution::representer(kernel_from_json(field(j, "kernel")), std::move(basis),
                                vec_from(field(j, "coefficients"), "coefficients"));
    } else if (rep == "features") {
      auto map = std::make_shared<const FeatureMap>(
          kernel_from_json(field(j, "kernel")), points_from(field(j, "nodes"), "nodes"),
          field(j, "m").get<int>());
      f = Solution::features(std::move(map), vec_from(field(j, "weights"), "weights"),
                             field(j, "p").get<double>());
    } else if (rep == "network") {
      SigmoidNetwork net(field(j, "widths").get<std::vector<int>>());
      const Eigen::VectorXd params = vec_from(field(j, "params"), "params");
      if (params.size() != net.parameter_count()) {
        throw invalid_input("network: parameter count does not match widths");
      }
      f = Solution::network(std::move(net), params, points_from(field(j, "grid"), "grid"));
    } else {
      throw invalid_input("unknown representation '" + rep + "'");
    }
    f->info.method = j.value("method", std::string());
    const auto& lam = j.value("lambda", json(nullptr));
    if (lam.is_number()) f->info.lambda = lam.get<double>();
    const auto& obj = j.value("objective", json(nullptr));
    if (obj.is_number()) f->info.objective = obj.get<double>();
    f->info.iterations = j.value("iterations", 0);
    f->info.converged = j.value("converged", true);
    f->info.warnings = j.value("warnings", std::vector<std::string>{});
    return *f;
  } catch (const json::exception& e) {
    throw invalid_input(std::string("solution JSON: ") + e.what());
  }
}

json to_json(const SolverConfig& cfg) {
  json reg{{"type", cfg.regularizer.kind == RegularizerKind::linear      ? "linear"
                    : cfg.regularizer.kind == RegularizerKind::quadratic ? "quadratic"
                                                                         : "power"}};
  if (cfg.regularizer.kind == RegularizerKind::power) reg["p"] = cfg.regularizer.p;
  return {{"lambda", cfg.lambda},       {"regularizer", reg},
          {"method", to_string(cfg.method)}, {"tol", cfg.tol},
          {"max_iter", cfg.max_iter},   {"seed", cfg.seed},
          {"dr_theta", cfg.dr_theta},   {"dr_sigma", cfg.dr_sigma},
          {"p", cfg.p},                 {"feature_count", cfg.feature_count}};
}

SolverConfig solver_config_from_json(const json& j, SolverConfig base) {
  try {
    if (!j.is_object()) throw invalid_input("solver config must be an object");
    base.lambda = j.value("lambda", base.lambda);
    if (j.contains("regularizer")) {
      const json& r = j["regularizer"];
      const std::string type =
          r.is_string() ? r.get<std::string>() : field(r, "type").get<std::string>();
      if (type == "linear") {
        base.regularizer = Regularizer::linear();
      } else if (type == "quadratic") {
        base.regularizer = Regularizer::quadratic();
      } else if (type == "power") {
        base.regularizer = Regularizer::power(r.is_object() ? r.value("p", 1.5) : 1.5);
      } else {
        throw invalid_input("unknown regularizer '" + type + "'");
      }
    }
    if (j.contains("method")) base.method = method_from_string(j["method"].get<std::string>());
    base.tol = j.value("tol", base.tol);
    base.max_iter = j.value("max_iter", base.max_iter);
    base.seed = j.value("seed", base.seed);
    base.dr_theta = j.value("dr_theta", base.dr_theta);
    base.dr_sigma = j.value("dr_sigma", base.dr_sigma);
    base.p = j.value("p", base.p);
    base.feature_count = j.value("feature_count", base.feature_count);
    return base;
  } catch (const json::exception& e) {
    throw invalid_input(std::string("solver config: ") + e.what());
  }
}

json to_json(const RepresenterReport& r) {
  return {{"c_hat", vec(r.c_hat)},
          {"residual", num(r.residual)},
          {"condition_i_gap", num(r.condition_i_gap)},
          {"condition_ii_gap", num(r.condition_ii_gap)},
          {"passed", r.passed}};
}

json to_json(const MinNormReport& r) {
  json cands = json::array();
  for (std::size_t i = 0; i < r.candidate_norms.size(); ++i) {
    cands.push_back({{"norm", num(r.candidate_norms[i])},
                     {"risk", num(r.candidate_risks[i])},
                     {"admitted", static_cast<bool>(r.admitted[i])}});
  }
  return {{"limit_norm", num(r.limit_norm)},
          {"limit_risk", num(r.limit_risk)},
          {"min_candidate_norm", num(r.min_candidate_norm)},
          {"candidates", cands},
          {"passed", r.passed}};
}

json to_json(const ConditionIIReport& r) {
  json nets = json::array();
  for (const auto& n : r.nets) {
    nets.push_back({{"n", n.n},
                    {"accumulated", n.accumulated},
                    {"net_size", n.net_size},
                    {"dual_norm_sup", num(n.dual_norm_sup)}});
  }
  json lips = json::array();
  for (const auto& l : r.lipschitz) {
    lips.push_back({{"theta", l.theta},
                    {"per_stage", l.per_stage},
                    {"slope", num(l.slope)},
                    {"uniform", l.uniform}});
  }
  return {{"eps", r.eps},
          {"nets", nets},
          {"lipschitz", lips},
          {"dual_norm_slope", num(r.dual_norm_slope)},
          {"net_slope", num(r.net_slope)},
          {"flags", r.flags},
          {"passed", r.passed}};
}

json verdict_json(const SweepResult& r) {
  json series = json::array();
  for (const auto& s : r.series) {
    json trends = json::array();
    for (const auto& t : s.trends) {
      trends.push_back({{"metric", t.metric}, {"slope", num(t.slope)}, {"status", t.status}});
    }
    series.push_back({{"label", s.label}, {"trends", trends}, {"verdict", s.verdict}});
  }
  json errors = json::array();
  for (const auto& rec : r.records) {
    if (!rec.error.empty()) {
      errors.push_back({{"n", rec.n}, {"lambda", rec.lambda}, {"error", rec.error}});
    }
  }
  return {{"verdict", r.verdict}, {"series", series}, {"cell_errors", errors},
          {"notes", r.notes}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw io_error("failed writing '" + path + "'");
}

json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw invalid_input("'" + path + "': " + e.what());
  }
}

GeneralizedDataset load_dataset(const std::string& path) {
  return dataset_from_json(read_json(path));
}

Solution load_solution(const std::string& path) {
  return solution_from_json(read_json(path));
}

}  // namespace genlearn
