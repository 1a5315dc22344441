#include "genlearn/network.hpp"

#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

SigmoidNetwork::SigmoidNetwork(std::vector<int> widths)
    : widths_(std::move(widths)) {
  if (widths_.empty()) throw invalid_input("network: need an input width");
  for (int w : widths_) {
    if (w < 1) throw invalid_input("network: widths must be positive");
  }
  widths_.push_back(1);
  for (std::size_t l = 1; l < widths_.size(); ++l) {
    count_ += static_cast<Eigen::Index>(widths_[l]) * (widths_[l - 1] + 1);
  }
}

double SigmoidNetwork::evaluate(const Eigen::VectorXd& params,
                                const Point& x) const {
  Eigen::VectorXd a = x;
  Eigen::Index at = 0;
  for (std::size_t l = 1; l < widths_.size(); ++l) {
    const int out = widths_[l], in = widths_[l - 1];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        w(params.data() + at, out, in);
    at += out * in;
    Eigen::VectorXd z = w * a + params.segment(at, out);
    at += out;
    if (l + 1 < widths_.size()) z = z.unaryExpr(&sigmoid);
    a = std::move(z);
  }
  return a[0];
}

double SigmoidNetwork::evaluate_with_gradient(const Eigen::VectorXd& params,
                                              const Point& x,
                                              Eigen::VectorXd& grad) const {
  const std::size_t layers = widths_.size() - 1;
  std::vector<Eigen::VectorXd> acts{x};
  std::vector<Eigen::Index> offsets;
  Eigen::Index at = 0;
  for (std::size_t l = 1; l <= layers; ++l) {
    const int out = widths_[l], in = widths_[l - 1];
    offsets.push_back(at);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        w(params.data() + at, out, in);
    Eigen::VectorXd z = w * acts.back() + params.segment(at + out * in, out);
    at += out * (in + 1);
    if (l < layers) z = z.unaryExpr(&sigmoid);
    acts.push_back(std::move(z));
  }
  grad = Eigen::VectorXd::Zero(count_);
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);  // d out / d z_last
  for (std::size_t l = layers; l >= 1; --l) {
    const int out = widths_[l], in = widths_[l - 1];
    const Eigen::Index off = offsets[l - 1];
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>
        gw(grad.data() + off, out, in);
    gw = delta * acts[l - 1].transpose();
    grad.segment(off + out * in, out) = delta;
    if (l == 1) break;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        w(params.data() + off, out, in);
    const Eigen::VectorXd& prev = acts[l - 1];  // sigmoid outputs
    delta = (w.transpose() * delta).cwiseProduct(
        prev.cwiseProduct((1.0 - prev.array()).matrix()));
  }
  return acts.back()[0];
}

SigmoidNetwork network_for_budget(int input_dim, int m) {
  const int hidden = (m - 1) / (input_dim + 2);
  if (hidden < 1) {
    throw invalid_input("network_for_budget: budget too small for one unit");
  }
  return SigmoidNetwork({input_dim, hidden});
}

}  // namespace genlearn
