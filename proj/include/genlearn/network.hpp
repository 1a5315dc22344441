#pragma once

#include <Eigen/Dense>
#include <vector>

#include "genlearn/kernel.hpp"

namespace genlearn {

// Fully connected network with logistic sigmoid hidden layers and an affine
// scalar output. Parameters are stored flat, layer by layer: the weight
// matrix row-major, then the bias.
class SigmoidNetwork {
 public:
  // widths = {input_dim, hidden_1, ..., hidden_L}; the output width is 1.
  explicit SigmoidNetwork(std::vector<int> widths);

  const std::vector<int>& widths() const { return widths_; }
  int input_dim() const { return widths_.front(); }
  Eigen::Index parameter_count() const { return count_; }

  double evaluate(const Eigen::VectorXd& params, const Point& x) const;

  // Output value; writes d(output)/d(params) into `grad`.
  double evaluate_with_gradient(const Eigen::VectorXd& params, const Point& x,
                                Eigen::VectorXd& grad) const;

 private:
  std::vector<int> widths_;  // includes the final output width 1
  Eigen::Index count_ = 0;
};

// One hidden layer sized so the parameter count is as close to `m` as
// possible without exceeding it: (d + 2) h + 1 <= m.
SigmoidNetwork network_for_budget(int input_dim, int m);

}  // namespace genlearn
