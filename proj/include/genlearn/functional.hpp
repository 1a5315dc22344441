#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "genlearn/kernel.hpp"

namespace genlearn {

struct PointEval {
  Point x;
  bool operator==(const PointEval& o) const { return x == o.x; }
};

struct OpEval {
  DiffOp op = DiffOp::laplacian;
  Point x;
  bool operator==(const OpEval& o) const { return op == o.op && x == o.x; }
};

// sum_i weights[i] f(nodes[i]); integral data with the density folded into
// the weights.
struct Quadrature {
  std::vector<Point> nodes;
  std::vector<double> weights;
  bool operator==(const Quadrature&) const = default;
};

// One weighted term w * (op f)(x) of a functional.
struct Atom {
  double weight;
  DiffOp op;
  Point x;
};

// A generalized datum: a bounded linear functional on the function space.
class Functional {
 public:
  using Variant = std::variant<PointEval, OpEval, Quadrature>;

  static Functional point(Point x);
  static Functional op(DiffOp op, Point x);
  static Functional quadrature(std::vector<Point> nodes,
                               std::vector<double> weights);

  const Variant& value() const { return value_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  int dimension() const;
  bool uses(DiffOp op) const;

  bool operator==(const Functional& o) const { return value_ == o.value_; }

 private:
  explicit Functional(Variant v);
  Variant value_;
  std::vector<Atom> atoms_;
};

// Throws capability_error / invalid_input if `xi` cannot be paired with K.
void check_compatible(const KernelSpec& spec, const Functional& xi);

// <xi, eta>_* : xi applied to the Riesz representer of eta.
double pairing(const KernelSpec& spec, const Functional& xi,
               const Functional& eta);

// G[i][j] = <xi_i, xi_j>_*. Every entry is computed independently.
Eigen::MatrixXd gram(const KernelSpec& spec,
                     const std::vector<Functional>& functionals);

// G[i][j] = <rows_i, cols_j>_*.
Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const std::vector<Functional>& rows,
                           const std::vector<Functional>& cols);

double dual_norm(const KernelSpec& spec, const Functional& xi);

double dual_distance(const KernelSpec& spec, const Functional& a,
                     const Functional& b);

// Immutable, nonempty collection of functionals admitted against one kernel.
class FunctionalSet {
 public:
  FunctionalSet(KernelSpec spec, std::vector<Functional> members);

  const KernelSpec& spec() const { return spec_; }
  const std::vector<Functional>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  KernelSpec spec_;
  std::vector<Functional> members_;
};

// Size of the greedy farthest-point eps-cover under the dual metric. The
// first center is member 0; ties go to the lowest index.
int epsilon_net_size(const FunctionalSet& set, double eps);

}  // namespace genlearn
