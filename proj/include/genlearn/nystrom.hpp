#pragma once

#include <Eigen/Dense>
#include <vector>

#include "genlearn/functional.hpp"
#include "genlearn/kernel.hpp"

namespace genlearn {

// Truncated Mercer expansion of K under the uniform measure on a node set,
// extended off the nodes by the Nyström formula. Eigenvalues are those of
// the integral operator (Gram eigenvalues / node count); feature k is
// psi_k = sqrt(eigenvalue_k) * phi_k.
class FeatureMap {
 public:
  FeatureMap(KernelSpec spec, std::vector<Point> nodes, int m);

  const KernelSpec& spec() const { return spec_; }
  const std::vector<Point>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }

  // Nonincreasing operator eigenvalues.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  // phi_k(x) for every retained k.
  Eigen::VectorXd eigenfunctions(const Point& x) const;

  // psi_k(x) for every retained k.
  Eigen::VectorXd features(const Point& x) const;

  // xi(psi_k) for every retained k.
  Eigen::VectorXd apply(const Functional& xi) const;

 private:
  KernelSpec spec_;
  std::vector<Point> nodes_;
  Eigen::VectorXd eigenvalues_;
  // Column k holds u_k / sqrt(gram eigenvalue k), zero for eigenvalues
  // below the numerical rank.
  Eigen::MatrixXd feature_coeffs_;
  Eigen::MatrixXd eigenfunction_coeffs_;
};

FeatureMap nystrom_features(const KernelSpec& spec, std::vector<Point> nodes,
                            int m);

}  // namespace genlearn
