#include <doctest.h>

#include <cmath>

#include "genlearn/error.hpp"
#include "genlearn/functional.hpp"
#include "genlearn/solution.hpp"
#include "oracles.hpp"

using namespace genlearn;

namespace {
Point p1(double x) { return Point::Constant(1, x); }
Point p2(double a, double b) { return Eigen::Vector2d(a, b); }
}  // namespace

TEST_CASE("gram of duplicated point evaluations") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const Eigen::MatrixXd g = gram(k, {Functional::point(p1(0.2)), Functional::point(p1(0.2))});
  CHECK(g.isApprox(Eigen::MatrixXd::Ones(2, 2)));
}

TEST_CASE("min kernel gram") {
  const Eigen::MatrixXd g = gram(KernelSpec::min_kernel(),
                                 {Functional::point(p2(0.5, 0.5)), Functional::point(p2(1, 1))});
  Eigen::Matrix2d want;
  want << 0.25, 0.25, 0.25, 1.0;
  CHECK(g.isApprox(want));
}

TEST_CASE("mixed Laplacian gram matches finite differences") {
  const KernelSpec k = KernelSpec::sobolev_matern(1.0, 4);
  const Functional a = Functional::op(DiffOp::laplacian, p2(0.3, 0.4));
  const Functional b = Functional::op(DiffOp::laplacian, p2(0.6, 0.7));
  const Functional c = Functional::point(p2(0.0, 0.5));
  const Eigen::MatrixXd g = gram(k, {a, b, c});
  CHECK(g.isApprox(g.transpose()));
  auto lap_b = [&](const Eigen::VectorXd& x) {
    return eval_op_kernel(k, DiffOp::identity, x, DiffOp::laplacian, p2(0.6, 0.7));
  };
  CHECK(std::abs(g(0, 1) - oracle::fd_laplacian(lap_b, p2(0.3, 0.4), 1e-3)) <= 1e-4);
  auto pt_c = [&](const Eigen::VectorXd& x) { return eval_kernel(k, x, p2(0.0, 0.5)); };
  CHECK(std::abs(g(0, 2) - oracle::fd_laplacian(pt_c, p2(0.3, 0.4))) <= 1e-4);
}

TEST_CASE("pairing applies functionals to representers") {
  const KernelSpec k = KernelSpec::gaussian(1.5);
  const Solution f = Solution::representer(k, {Functional::point(p1(0.7))}, Eigen::VectorXd::Ones(1));
  CHECK(f.evaluate(p1(0.2)) == doctest::Approx(eval_kernel(k, p1(0.2), p1(0.7))));
  CHECK(f.apply(Functional::quadrature({p1(0.2)}, {0.3})) ==
        doctest::Approx(0.3 * f.evaluate(p1(0.2))));

  const KernelSpec s = KernelSpec::sobolev_matern(1.0, 4);
  Eigen::VectorXd c(2);
  c << 0.7, -1.2;
  const Solution g = Solution::representer(
      s, {Functional::point(p2(0.2, 0.3)), Functional::op(DiffOp::laplacian, p2(0.8, 0.6))}, c);
  auto values = [&](const Eigen::VectorXd& x) { return g.evaluate(x); };
  CHECK(g.apply(Functional::op(DiffOp::laplacian, p2(0.5, 0.5))) ==
        doctest::Approx(oracle::fd_laplacian(values, p2(0.5, 0.5), 1e-3)).epsilon(1e-5));
}

TEST_CASE("dual norms") {
  CHECK(dual_norm(KernelSpec::gaussian(2.0), Functional::point(p1(0.4))) == doctest::Approx(1.0));
  CHECK(dual_norm(KernelSpec::min_kernel(), Functional::point(p2(1, 1))) == doctest::Approx(1.0));
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const Functional q = Functional::quadrature({p1(0.1), p1(0.9)}, {0.5, 0.5});
  double brute = 0.0;
  for (double a : {0.1, 0.9})
    for (double b : {0.1, 0.9}) brute += 0.25 * eval_kernel(k, p1(a), p1(b));
  CHECK(dual_norm(k, q) == doctest::Approx(std::sqrt(brute)));
}

TEST_CASE("dual distances") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const Functional x0 = Functional::point(p1(0.0));
  CHECK(dual_distance(k, x0, x0) == 0.0);
  const double d = dual_distance(k, x0, Functional::point(p1(0.001)));
  CHECK(d == doctest::Approx(std::sqrt(2.0 - 2.0 * std::exp(-1e-6))));
  CHECK(d <= 0.01);
  double previous = INFINITY;
  for (double z = 1.0; z > 0.0; z -= 0.05) {
    const double dz = dual_distance(k, x0, Functional::point(p1(z)));
    CHECK(dz <= previous);
    previous = dz;
  }
}

TEST_CASE("epsilon nets") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  CHECK(epsilon_net_size(FunctionalSet(k, {Functional::point(p1(0.5))}), 0.01) == 1);
  CHECK(epsilon_net_size(FunctionalSet(k, std::vector<Functional>(5, Functional::point(p1(0.5)))),
                         0.01) == 1);
  std::vector<Functional> grid1000, grid2000;
  for (int i = 0; i < 1000; ++i) grid1000.push_back(Functional::point(p1(i / 999.0)));
  for (int i = 0; i < 2000; ++i) grid2000.push_back(Functional::point(p1(i / 1999.0)));
  CHECK(epsilon_net_size(FunctionalSet(k, grid1000), 0.1) ==
        epsilon_net_size(FunctionalSet(k, grid2000), 0.1));
}

TEST_CASE("compatibility checks") {
  CHECK_THROWS_AS(check_compatible(KernelSpec::min_kernel(),
                                   Functional::op(DiffOp::laplacian, p2(0.5, 0.5))),
                  capability_error);
  CHECK_THROWS(Functional::quadrature({p1(0.1)}, {0.5, 0.5}));
  CHECK_THROWS(FunctionalSet(KernelSpec::gaussian(1.0), {}));
}
