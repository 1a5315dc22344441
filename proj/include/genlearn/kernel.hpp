#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace genlearn {

using Point = Eigen::VectorXd;

enum class KernelType {
  gaussian,        // exp(-theta^2 |x - z|^2)
  min,             // prod_i min(x_i, z_i)
  sobolev_matern,  // (theta r)^{j-1} K_{j-1}(theta r)
  linear,          // x . z, the Euclidean realization of R^d
};

struct KernelSpec {
  KernelType type = KernelType::gaussian;
  double theta = 1.0;
  int j = 4;

  static KernelSpec gaussian(double theta);
  static KernelSpec min_kernel();
  static KernelSpec sobolev_matern(double theta, int j);
  static KernelSpec linear();

  // Throws invalid_input when theta <= 0 or j < 4.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

std::string to_string(KernelType type);

enum class DiffOp { identity, laplacian };

std::string to_string(DiffOp op);

// Whether K admits `op` in each argument.
bool supports(const KernelSpec& spec, DiffOp op);

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& z);

// (opL acting on the first argument)(opR acting on the second argument) K(x, z).
// Laplacians are evaluated in closed form; no finite differences.
double eval_op_kernel(const KernelSpec& spec, DiffOp op_left, const Point& x,
                      DiffOp op_right, const Point& z);

// Equally spaced tensor grid with `per_dim` points per axis on [lo, hi]^dims,
// endpoints included.
std::vector<Point> tensor_grid(int per_dim, int dims, double lo = 0.0,
                               double hi = 1.0);

}  // namespace genlearn
