#include "genlearn/functional.hpp"

#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {

Functional::Functional(Variant v) : value_(std::move(v)) {
  std::visit(
      [this](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PointEval>) {
          atoms_.push_back({1.0, DiffOp::identity, f.x});
        } else if constexpr (std::is_same_v<T, OpEval>) {
          atoms_.push_back({1.0, f.op, f.x});
        } else {
          for (std::size_t i = 0; i < f.nodes.size(); ++i) {
            atoms_.push_back({f.weights[i], DiffOp::identity, f.nodes[i]});
          }
        }
      },
      value_);
  const int d = atoms_.front().x.size();
  for (const auto& a : atoms_) {
    if (a.x.size() != d || d == 0) {
      throw invalid_input("functional: inconsistent point dimensions");
    }
    if (!a.x.allFinite() || !std::isfinite(a.weight)) {
      throw invalid_input("functional: non-finite point or weight");
    }
  }
}

Functional Functional::point(Point x) { return Functional(PointEval{std::move(x)}); }

Functional Functional::op(DiffOp op, Point x) {
  return Functional(OpEval{op, std::move(x)});
}

Functional Functional::quadrature(std::vector<Point> nodes,
                                  std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw invalid_input("quadrature: nodes and weights must be nonempty and "
                        "of equal length");
  }
  return Functional(Quadrature{std::move(nodes), std::move(weights)});
}

int Functional::dimension() const { return atoms_.front().x.size(); }

bool Functional::uses(DiffOp op) const {
  for (const auto& a : atoms_) {
    if (a.op == op) return true;
  }
  return false;
}

void check_compatible(const KernelSpec& spec, const Functional& xi) {
  if (xi.uses(DiffOp::laplacian) && !supports(spec, DiffOp::laplacian)) {
    throw capability_error("functional uses the laplacian, unsupported by the " +
                           to_string(spec.type) + " kernel");
  }
}

double pairing(const KernelSpec& spec, const Functional& xi,
               const Functional& eta) {
  double sum = 0.0;
  for (const auto& a : xi.atoms()) {
    for (const auto& b : eta.atoms()) {
      sum += a.weight * b.weight * eval_op_kernel(spec, a.op, a.x, b.op, b.x);
    }
  }
  return sum;
}

Eigen::MatrixXd gram(const KernelSpec& spec,
                     const std::vector<Functional>& functionals) {
  const auto n = static_cast<Eigen::Index>(functionals.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = pairing(spec, functionals[i], functionals[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const std::vector<Functional>& rows,
                           const std::vector<Functional>& cols) {
  Eigen::MatrixXd g(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      g(i, j) = pairing(spec, rows[i], cols[j]);
    }
  }
  return g;
}

double dual_norm(const KernelSpec& spec, const Functional& xi) {
  return std::sqrt(std::max(0.0, pairing(spec, xi, xi)));
}

double dual_distance(const KernelSpec& spec, const Functional& a,
                     const Functional& b) {
  const double sq = pairing(spec, a, a) - 2.0 * pairing(spec, a, b) +
                    pairing(spec, b, b);
  return std::sqrt(std::max(0.0, sq));
}

FunctionalSet::FunctionalSet(KernelSpec spec, std::vector<Functional> members)
    : spec_(spec), members_(std::move(members)) {
  if (members_.empty()) throw invalid_input("functional set must be nonempty");
  for (const auto& m : members_) check_compatible(spec_, m);
}

int epsilon_net_size(const FunctionalSet& set, double eps) {
  if (!(eps > 0.0)) throw invalid_input("epsilon_net_size: eps must be > 0");
  const auto& members = set.members();
  const std::size_t n = members.size();
  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) {
    self[i] = pairing(set.spec(), members[i], members[i]);
  }
  auto distance = [&](std::size_t i, std::size_t c) {
    const double sq =
        self[i] - 2.0 * pairing(set.spec(), members[i], members[c]) + self[c];
    return std::sqrt(std::max(0.0, sq));
  };
  std::vector<double> nearest(n);
  std::size_t center = 0;
  int count = 1;
  for (std::size_t i = 0; i < n; ++i) nearest[i] = distance(i, center);
  while (true) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    if (nearest[far] <= eps) break;
    center = far;
    ++count;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], distance(i, center));
    }
  }
  return count;
}

}  // namespace genlearn
