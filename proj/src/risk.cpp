#include "genlearn/risk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
  bool exhausted = false;
};

double simpson_step(SimpsonState& st, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= st.max_depth) {
    st.exhausted = true;
    return left + right + delta / 15.0;
  }
  if (depth >= 4 && std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

// Composite Gauss-Legendre on `panels` equal panels of [a, b].
double composite_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels, const std::vector<double>& nodes,
                       const std::vector<double>& weights) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      sum += 0.5 * h * weights[i] * f(lo + 0.5 * h * (nodes[i] + 1.0));
    }
  }
  return sum;
}

double composite_gauss_2d(const std::function<double(const Point&)>& f,
                          int panels, const std::vector<double>& nodes,
                          const std::vector<double>& weights) {
  const double h = 1.0 / panels;
  double sum = 0.0;
  Point x(2);
  for (int px = 0; px < panels; ++px) {
    for (int py = 0; py < panels; ++py) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          x[0] = (px + 0.5 * (nodes[i] + 1.0)) * h;
          x[1] = (py + 0.5 * (nodes[j] + 1.0)) * h;
          sum += 0.25 * h * h * weights[i] * weights[j] * f(x);
        }
      }
    }
  }
  return sum;
}

double poisson_risk(const PoissonResidualOracle& o, const Solution& f) {
  std::vector<double> nodes, weights;
  gauss_legendre(6, nodes, weights);
  auto interior = [&](const Point& x) {
    const double r = f.apply(Functional::op(DiffOp::laplacian, x)) - o.h(x);
    return r * r;
  };
  auto boundary = [&](int panels) {
    double sum = 0.0;
    for (int edge = 0; edge < 4; ++edge) {
      auto on_edge = [&](double s) {
        Point z(2);
        switch (edge) {
          case 0: z << s, 0.0; break;
          case 1: z << 1.0, s; break;
          case 2: z << 1.0 - s, 1.0; break;
          default: z << 0.0, 1.0 - s; break;
        }
        const double r = f.evaluate(z) - o.g(z);
        return r * r;
      };
      sum += composite_gauss(on_edge, 0.0, 1.0, panels, nodes, weights);
    }
    return sum;
  };
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int panels = 2; panels <= 64; panels *= 2) {
    const double value = 0.5 * composite_gauss_2d(interior, panels, nodes, weights) +
                         0.5 * boundary(panels);
    if (std::isfinite(prev) &&
        std::abs(value - prev) <= 1e-6 * std::max(std::abs(value), 1e-300)) {
      return value;
    }
    if (std::isfinite(prev) && std::abs(value) < 1e-24 && std::abs(prev) < 1e-24) {
      return value;
    }
    prev = value;
  }
  throw numerical_error("expected_risk: poisson quadrature did not converge",
                        prev);
}

}  // namespace

double empirical_risk(const GeneralizedDataset& ds, const Solution& f) {
  const auto xis = ds.functionals();
  for (const auto& xi : xis) check_compatible(ds.kernel, xi);
  if (const auto* r = f.as_representer(); r && !(r->kernel == ds.kernel)) {
    throw invalid_input("empirical_risk: solution kernel differs from dataset");
  }
  return ds.multiloss().value(ds.outputs(), f.apply(xis));
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  SimpsonState st{f, max_depth};
  // Coarse estimate for the absolute target.
  const double scale = std::max(std::abs(whole), 1e-300);
  const double value =
      simpson_step(st, a, b, fa, fm, fb, whole, rel_tol * scale, 0);
  if (st.exhausted && std::abs(value) > 1e-14) {
    throw numerical_error("adaptive_simpson: maximum depth reached", value);
  }
  return value;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double expected_risk(const ExpectedRiskOracle& oracle, const Solution& f) {
  return std::visit(
      [&f](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, WeightedL1Oracle>) {
          Point x(1);
          auto integrand = [&](double s) {
            x[0] = s;
            return std::abs(f.evaluate(x) - o.target(s)) * o.weight(s);
          };
          return adaptive_simpson(integrand, o.a, o.b, 1e-6);
        } else if constexpr (std::is_same_v<T, PoissonResidualOracle>) {
          return poisson_risk(o, f);
        } else {
          const Eigen::VectorXd v =
              euclidean_coordinates(f, static_cast<int>(o.A.cols()));
          return (o.A * v - o.b).squaredNorm();
        }
      },
      oracle);
}

double loglog_slope(const std::vector<double>& n,
                    const std::vector<double>& values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size() && i < values.size(); ++i) {
    if (values[i] > 0.0 && n[i] > 0.0 && std::isfinite(values[i])) {
      lx.push_back(std::log(n[i]));
      ly.push_back(std::log(values[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

ConditionITable condition_I_check(const ExpectedRiskOracle& oracle,
                                  const std::vector<GeneralizedDataset>& seq,
                                  const std::vector<Solution>& test_fs,
                                  const std::vector<std::string>& f_ids) {
  if (seq.empty() || test_fs.empty()) {
    throw invalid_input("condition_I_check: need datasets and test functions");
  }
  ConditionITable table;
  for (std::size_t i = 0; i < test_fs.size(); ++i) {
    const std::string id =
        i < f_ids.size() ? f_ids[i] : "f" + std::to_string(i);
    table.f_ids.push_back(id);
    const double full = expected_risk(oracle, test_fs[i]);
    std::vector<double> ns, gaps;
    for (const auto& ds : seq) {
      const double gap = std::abs(full - empirical_risk(ds, test_fs[i]));
      table.rows.push_back({id, ds.stage, gap});
      ns.push_back(ds.stage);
      gaps.push_back(gap);
    }
    table.slopes.push_back(loglog_slope(ns, gaps));
  }
  return table;
}

std::string to_csv(const ConditionITable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "f_id,n,gap,slope\n";
  for (const auto& row : table.rows) {
    double slope = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < table.f_ids.size(); ++i) {
      if (table.f_ids[i] == row.f_id) slope = table.slopes[i];
    }
    os << row.f_id << ',' << row.n << ',' << row.gap << ',';
    if (std::isfinite(slope)) {
      os << slope;
    } else {
      os << "undefined";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace genlearn
