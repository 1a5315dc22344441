#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace genlearn {

enum class LossKind { square, absolute, hinge };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

// A scalar loss t -> loss(y, t), scaled by a nonnegative sample weight.
//   square:   w (t - y)^2
//   absolute: w |t - y|
//   hinge:    w max(0, 1 - y t)
struct Loss {
  LossKind kind = LossKind::square;
  double weight = 1.0;
};

// Closed interval [lo, hi].
struct Interval {
  double lo;
  double hi;

  bool contains(double v, double tol = 0.0) const {
    return v >= lo - tol && v <= hi + tol;
  }
  // Midpoint, or zero when zero lies inside.
  double pick() const;
};

double loss_value(const Loss& loss, double y, double t);

// Full subdifferential of t -> loss(y, t).
Interval subgradient(const Loss& loss, double y, double t);

// argmin_t loss(y, t) + (t - v)^2 / (2 step).
double prox(const Loss& loss, double y, double v, double step);

// Lipschitz constant of t -> loss(y, t) on [-theta, theta], uniform over
// |y| <= y_bound.
double local_lipschitz(const Loss& loss, double theta, double y_bound);

// One block of a multi-loss: samples [begin, end) share a loss kind and a
// block weight rho; per-sample weights scale the loss.
struct LossBlock {
  LossKind kind;
  double rho;
  Eigen::Index begin;
  Eigen::Index end;
  Eigen::VectorXd weights;  // length end - begin

  Eigen::Index count() const { return end - begin; }
};

// L(y, t) = sum_j rho_j / N_j sum_{k in block j} loss_j(y_k, t_k).
class MultiLoss {
 public:
  explicit MultiLoss(std::vector<LossBlock> blocks);

  const std::vector<LossBlock>& blocks() const { return blocks_; }
  Eigen::Index size() const { return size_; }

  double value(const Eigen::VectorXd& y, const Eigen::VectorXd& t) const;

  // Effective per-sample loss for sample k: the base loss with weight
  // rho_j w_k / N_j.
  Loss sample_loss(Eigen::Index k) const;
  std::vector<Loss> sample_losses() const;

  bool all_of(LossKind kind) const;

 private:
  std::vector<LossBlock> blocks_;
  Eigen::Index size_ = 0;
};

}  // namespace genlearn
