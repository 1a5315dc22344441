#include "genlearn/nystrom.hpp"

#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {

FeatureMap::FeatureMap(KernelSpec spec, std::vector<Point> nodes, int m)
    : spec_(spec), nodes_(std::move(nodes)) {
  const int n = static_cast<int>(nodes_.size());
  if (m < 1 || m > n) {
    throw invalid_input("nystrom_features: need 1 <= m <= node count");
  }
  std::vector<Functional> evals;
  evals.reserve(n);
  for (const auto& x : nodes_) evals.push_back(Functional::point(x));
  const Eigen::MatrixXd g = gram(spec_, evals);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) {
    throw numerical_error("nystrom_features: eigendecomposition failed");
  }
  // Eigen returns ascending order.
  const double trace = g.trace();
  eigenvalues_.resize(m);
  feature_coeffs_ = Eigen::MatrixXd::Zero(n, m);
  eigenfunction_coeffs_ = Eigen::MatrixXd::Zero(n, m);
  for (int k = 0; k < m; ++k) {
    const int src = n - 1 - k;
    const double lam = eig.eigenvalues()[src];
    eigenvalues_[k] = lam / n;
    if (lam > 1e-13 * trace) {
      const Eigen::VectorXd u = eig.eigenvectors().col(src);
      feature_coeffs_.col(k) = u / std::sqrt(lam);
      eigenfunction_coeffs_.col(k) = u * (std::sqrt(double(n)) / lam);
    }
  }
}

Eigen::VectorXd FeatureMap::eigenfunctions(const Point& x) const {
  Eigen::VectorXd kx(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    kx[i] = eval_kernel(spec_, x, nodes_[i]);
  }
  return eigenfunction_coeffs_.transpose() * kx;
}

Eigen::VectorXd FeatureMap::features(const Point& x) const {
  return apply(Functional::point(x));
}

Eigen::VectorXd FeatureMap::apply(const Functional& xi) const {
  check_compatible(spec_, xi);
  Eigen::VectorXd kx = Eigen::VectorXd::Zero(nodes_.size());
  for (const auto& a : xi.atoms()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      kx[i] += a.weight *
               eval_op_kernel(spec_, a.op, a.x, DiffOp::identity, nodes_[i]);
    }
  }
  return feature_coeffs_.transpose() * kx;
}

FeatureMap nystrom_features(const KernelSpec& spec, std::vector<Point> nodes,
                            int m) {
  return FeatureMap(spec, std::move(nodes), m);
}

}  // namespace genlearn
