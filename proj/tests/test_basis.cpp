#include "doctest.h"

#include <Eigen/Dense>

#include "minsnap/basis.hpp"
#include "oracles.hpp"

using minsnap::basis_derivative_matrix;
using minsnap::cost_gram;
using minsnap::endpoint_map;
using minsnap::scaling_block;

namespace {

Eigen::MatrixXd matrix4(std::initializer_list<double> vals) {
  Eigen::MatrixXd m(4, 4);
  int i = 0;
  for (double v : vals) {
    m(i / 4, i % 4) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("monomial derivative rows at fixed points") {
  Eigen::MatrixXd w0 = basis_derivative_matrix(0.0, 2);
  Eigen::MatrixXd expect0(2, 4);
  expect0 << 1, 0, 0, 0, 0, 1, 0, 0;
  CHECK((w0 - expect0).norm() == doctest::Approx(0.0));

  Eigen::MatrixXd w1 = basis_derivative_matrix(1.0, 2);
  Eigen::MatrixXd expect1(2, 4);
  expect1 << 1, 1, 1, 1, 0, 1, 2, 3;
  CHECK((w1 - expect1).norm() == doctest::Approx(0.0));

  Eigen::MatrixXd wm1 = basis_derivative_matrix(-1.0, 2);
  Eigen::MatrixXd expectm1(2, 4);
  expectm1 << 1, -1, 1, -1, 0, 1, -2, 3;
  CHECK((wm1 - expectm1).norm() == doctest::Approx(0.0));
}

TEST_CASE("derivative rows agree with polynomial calculus") {
  for (int k = 1; k <= 6; ++k) {
    for (double rho : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
      Eigen::MatrixXd w = basis_derivative_matrix(rho, k);
      for (int j = 0; j < 2 * k; ++j) {
        const oracle::Poly mono = oracle::Poly::monomial(j);
        for (int q = 0; q < k; ++q) {
          CHECK(w(q, j) == doctest::Approx(mono.derivative(q).eval(rho)).epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("endpoint map values and invertibility") {
  Eigen::MatrixXd v1 = endpoint_map(1);
  Eigen::MatrixXd expect1(2, 2);
  expect1 << 1, -1, 1, 1;
  CHECK((v1 - expect1).norm() == doctest::Approx(0.0));

  Eigen::MatrixXd v2 = endpoint_map(2);
  CHECK((v2 - matrix4({1, -1, 1, -1, 0, 1, -2, 3, 1, 1, 1, 1, 0, 1, 2, 3})).norm() ==
        doctest::Approx(0.0));

  for (int k = 1; k <= 6; ++k) {
    CHECK(std::abs(endpoint_map(k).determinant()) > 1e-12);
  }
}

TEST_CASE("endpoint map stacks derivative values of arbitrary coefficients") {
  minsnap::Rng rng(7);
  for (int k = 1; k <= 6; ++k) {
    Eigen::VectorXd coeffs(2 * k);
    for (int j = 0; j < 2 * k; ++j) coeffs(j) = rng.uniform(-2.0, 2.0);
    oracle::Poly p;
    p.c.assign(coeffs.data(), coeffs.data() + coeffs.size());
    const Eigen::VectorXd stacked = endpoint_map(k) * coeffs;
    for (int q = 0; q < k; ++q) {
      CHECK(stacked(q) == doctest::Approx(p.derivative(q).eval(-1.0)).epsilon(1e-12));
      CHECK(stacked(k + q) == doctest::Approx(p.derivative(q).eval(1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cost gram closed form") {
  Eigen::MatrixXd h2 = cost_gram(2);
  CHECK((h2 - matrix4({0, 0, 0, 0, 0, 2, 0, 2, 0, 0, 8.0 / 3.0, 0, 0, 2, 0, 18.0 / 5.0})).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));

  for (int k = 2; k <= 6; ++k) {
    Eigen::MatrixXd h = cost_gram(k);
    CHECK(h.topRows(k - 1).norm() == 0.0);
    CHECK(h.leftCols(k - 1).norm() == 0.0);
    CHECK((h - h.transpose()).norm() == 0.0);
  }
}

TEST_CASE("cost gram equals quadrature of its integrand") {
  for (int k = 1; k <= 6; ++k) {
    Eigen::MatrixXd h = cost_gram(k);
    for (int i = 0; i < 2 * k; ++i) {
      for (int j = 0; j < 2 * k; ++j) {
        const oracle::Poly integrand =
            oracle::Poly::monomial(i).derivative(k - 1) * oracle::Poly::monomial(j).derivative(k - 1);
        const double exact = integrand.integrate(-1.0, 1.0);
        CHECK(std::abs(h(i, j) - exact) < 1e-12);
        if (k == 5) {
          const double quad =
              oracle::adaptive_simpson([&](double r) { return integrand.eval(r); }, -1.0, 1.0);
          CHECK(std::abs(h(i, j) - quad) < 1e-12 * std::max(1.0, std::abs(h(i, j))));
        }
      }
    }
  }
}

TEST_CASE("scaling block diagonal") {
  CHECK((scaling_block(1.0, 3) - Eigen::VectorXd::Ones(6)).norm() == 0.0);

  Eigen::VectorXd s = scaling_block(0.5, 2);
  Eigen::VectorXd expect(4);
  expect << 1, 2, 1, 2;
  CHECK((s - expect).norm() == 0.0);

  Eigen::VectorXd s3 = scaling_block(2.0, 3);
  Eigen::VectorXd expect3(6);
  expect3 << 1, 0.5, 0.25, 1, 0.5, 0.25;
  CHECK((s3 - expect3).norm() == 0.0);

  CHECK_THROWS_AS(scaling_block(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(scaling_block(-1.0, 2), std::invalid_argument);
}
