#pragma once

#include <Eigen/Dense>
#include <vector>

#include "genlearn/functional.hpp"
#include "genlearn/kernel.hpp"
#include "genlearn/loss.hpp"

namespace genlearn {

// (functional, output) pairs sharing one loss and block weight.
struct DataBlock {
  std::vector<Functional> functionals;
  Eigen::VectorXd y;
  LossKind loss = LossKind::square;
  Eigen::VectorXd weights;  // per-sample; empty means all ones
  double rho = 1.0;

  Eigen::VectorXd sample_weights() const;
};

// Generalized data (xi_n, y_n) for one stage n of a data sequence.
struct GeneralizedDataset {
  KernelSpec kernel;
  std::vector<DataBlock> blocks;
  int stage = 0;

  // Throws invalid_input / capability_error on malformed blocks.
  void validate() const;

  Eigen::Index size() const;
  std::vector<Functional> functionals() const;
  Eigen::VectorXd outputs() const;
  MultiLoss multiloss() const;
  bool all_square() const;
};

// Blocks of `a` followed by blocks of `b`; both must share the kernel.
GeneralizedDataset merge(const GeneralizedDataset& a,
                         const GeneralizedDataset& b);

}  // namespace genlearn
