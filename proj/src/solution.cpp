#include "genlearn/solution.hpp"

#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {

Solution Solution::representer(KernelSpec kernel, std::vector<Functional> basis,
                               Eigen::VectorXd coefficients) {
  const Eigen::MatrixXd g = gram(kernel, basis);
  return representer(kernel, std::move(basis), std::move(coefficients), g);
}

Solution Solution::representer(KernelSpec kernel, std::vector<Functional> basis,
                               Eigen::VectorXd coefficients,
                               const Eigen::MatrixXd& basis_gram) {
  if (static_cast<Eigen::Index>(basis.size()) != coefficients.size() ||
      basis_gram.rows() != coefficients.size()) {
    throw invalid_input("representer: basis / coefficient size mismatch");
  }
  const double sq = coefficients.dot(basis_gram * coefficients);
  return Solution(RepresenterExpansion{kernel, std::move(basis),
                                       std::move(coefficients)},
                  std::sqrt(std::max(0.0, sq)));
}

Solution Solution::features(std::shared_ptr<const FeatureMap> map,
                            Eigen::VectorXd weights, double p) {
  if (!map || weights.size() != map->size()) {
    throw invalid_input("features: weight count must match the feature map");
  }
  if (!(p >= 1.0)) throw invalid_input("features: p must be >= 1");
  const double norm = std::pow(weights.array().abs().pow(p).sum(), 1.0 / p);
  return Solution(FeatureExpansion{std::move(map), std::move(weights), p}, norm);
}

Solution Solution::network(SigmoidNetwork net, Eigen::VectorXd params,
                           std::vector<Point> grid) {
  if (params.size() != net.parameter_count()) {
    throw invalid_input("network: parameter count mismatch");
  }
  const double norm = network_sup_norm(net, params, grid);
  return Solution(NetworkExpansion{std::move(net), std::move(params),
                                   std::move(grid)},
                  norm);
}

Solution Solution::reference(ReferenceFunction f) {
  const double norm = f.norm;
  return Solution(std::move(f), norm);
}

std::string Solution::kind() const {
  switch (rep_.index()) {
    case 0: return "representer";
    case 1: return "features";
    case 2: return "network";
    default: return "reference";
  }
}

double Solution::apply(const Functional& xi) const {
  return std::visit(
      [&xi](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RepresenterExpansion>) {
          double sum = 0.0;
          for (std::size_t j = 0; j < r.basis.size(); ++j) {
            if (r.coefficients[j] != 0.0) {
              sum += r.coefficients[j] * pairing(r.kernel, xi, r.basis[j]);
            }
          }
          return sum;
        } else if constexpr (std::is_same_v<T, FeatureExpansion>) {
          return r.features->apply(xi).dot(r.weights);
        } else if constexpr (std::is_same_v<T, NetworkExpansion>) {
          double sum = 0.0;
          for (const auto& a : xi.atoms()) {
            if (a.op != DiffOp::identity) {
              throw capability_error("network solutions support point and "
                                     "quadrature functionals only");
            }
            sum += a.weight * r.network.evaluate(r.params, a.x);
          }
          return sum;
        } else {
          double sum = 0.0;
          for (const auto& a : xi.atoms()) {
            if (a.op == DiffOp::identity) {
              sum += a.weight * r.value(a.x);
            } else {
              if (!r.laplacian) {
                throw capability_error("reference '" + r.name +
                                       "' has no laplacian");
              }
              sum += a.weight * r.laplacian(a.x);
            }
          }
          return sum;
        }
      },
      rep_);
}

Eigen::VectorXd Solution::apply(const std::vector<Functional>& xis) const {
  if (const auto* r = as_representer()) {
    return cross_gram(r->kernel, xis, r->basis) * r->coefficients;
  }
  Eigen::VectorXd out(xis.size());
  for (std::size_t i = 0; i < xis.size(); ++i) out[i] = apply(xis[i]);
  return out;
}

double apply(const KernelSpec& spec, const Functional& xi, const Solution& f) {
  check_compatible(spec, xi);
  if (const auto* r = f.as_representer()) {
    if (!(r->kernel == spec)) {
      throw invalid_input("apply: solution kernel differs from the data kernel");
    }
  }
  return f.apply(xi);
}

Solution zero_solution(const KernelSpec& spec, std::vector<Functional> basis) {
  const Eigen::Index n = basis.size();
  return Solution::representer(spec, std::move(basis), Eigen::VectorXd::Zero(n),
                               Eigen::MatrixXd::Zero(n, n));
}

Eigen::VectorXd euclidean_coordinates(const Solution& f, int dims) {
  Eigen::VectorXd out(dims);
  for (int i = 0; i < dims; ++i) {
    out[i] = f.evaluate(Eigen::VectorXd::Unit(dims, i));
  }
  return out;
}

double network_sup_norm(const SigmoidNetwork& net, const Eigen::VectorXd& params,
                        const std::vector<Point>& grid) {
  double m = 0.0;
  for (const auto& x : grid) m = std::max(m, std::abs(net.evaluate(params, x)));
  return m;
}

}  // namespace genlearn
