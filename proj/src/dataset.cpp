#include "genlearn/dataset.hpp"

#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {

Eigen::VectorXd DataBlock::sample_weights() const {
  if (weights.size() == 0) return Eigen::VectorXd::Ones(functionals.size());
  return weights;
}

void GeneralizedDataset::validate() const {
  kernel.validate();
  for (const auto& b : blocks) {
    if (b.functionals.empty() ||
        static_cast<Eigen::Index>(b.functionals.size()) != b.y.size()) {
      throw invalid_input("dataset: each block needs as many outputs as "
                          "functionals (and at least one)");
    }
    if (b.weights.size() != 0 && b.weights.size() != b.y.size()) {
      throw invalid_input("dataset: weights length must match outputs");
    }
    if (b.weights.size() != 0 && (b.weights.array() < 0.0).any()) {
      throw invalid_input("dataset: weights must be nonnegative");
    }
    if (!(b.rho > 0.0) || !std::isfinite(b.rho)) {
      throw invalid_input("dataset: rho must be positive");
    }
    if (!b.y.allFinite()) throw invalid_input("dataset: non-finite output");
    for (const auto& f : b.functionals) check_compatible(kernel, f);
  }
}

Eigen::Index GeneralizedDataset::size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.y.size();
  return n;
}

std::vector<Functional> GeneralizedDataset::functionals() const {
  std::vector<Functional> out;
  out.reserve(size());
  for (const auto& b : blocks) {
    out.insert(out.end(), b.functionals.begin(), b.functionals.end());
  }
  return out;
}

Eigen::VectorXd GeneralizedDataset::outputs() const {
  Eigen::VectorXd y(size());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    y.segment(at, b.y.size()) = b.y;
    at += b.y.size();
  }
  return y;
}

MultiLoss GeneralizedDataset::multiloss() const {
  std::vector<LossBlock> lb;
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    lb.push_back({b.loss, b.rho, at, at + b.y.size(), b.sample_weights()});
    at += b.y.size();
  }
  return MultiLoss(std::move(lb));
}

bool GeneralizedDataset::all_square() const {
  for (const auto& b : blocks) {
    if (b.loss != LossKind::square) return false;
  }
  return true;
}

GeneralizedDataset merge(const GeneralizedDataset& a,
                         const GeneralizedDataset& b) {
  if (!(a.kernel == b.kernel)) {
    throw invalid_input("merge: datasets use different kernels");
  }
  GeneralizedDataset out = a;
  out.blocks.insert(out.blocks.end(), b.blocks.begin(), b.blocks.end());
  return out;
}

}  // namespace genlearn
