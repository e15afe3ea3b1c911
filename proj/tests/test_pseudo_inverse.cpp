#include <random>

#include "doctest.h"
#include "sensorimotor/errors.hpp"
#include "sensorimotor/pseudo_inverse.hpp"

using Eigen::MatrixXd;
using sensorimotor::pseudo_inverse;

namespace {

double rel_inf(const MatrixXd& residual, const MatrixXd& ref) {
  const double scale = ref.size() ? ref.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  return residual.cwiseAbs().rowwise().sum().maxCoeff() / std::max(1.0, scale);
}

}  // namespace

TEST_CASE("pseudo_inverse: identity") {
  const MatrixXd i3 = MatrixXd::Identity(3, 3);
  CHECK((pseudo_inverse(i3) - i3).norm() < 1e-15);
}

TEST_CASE("pseudo_inverse: zero singular value is dropped") {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = 2.0;
  const MatrixXd g = pseudo_inverse(a);
  CHECK(g(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g(0, 1) == 0.0);
  CHECK(g(1, 0) == 0.0);
  CHECK(g(1, 1) == 0.0);
}

TEST_CASE("pseudo_inverse: all-ones 2x2") {
  const MatrixXd a = MatrixXd::Ones(2, 2);
  const MatrixXd g = pseudo_inverse(a);
  CHECK((g - MatrixXd::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rel_inf(a * g * a - a, a) < 1e-12);
  CHECK(rel_inf(g * a * g - g, g) < 1e-12);
}

TEST_CASE("pseudo_inverse: shapes and errors") {
  const MatrixXd a = MatrixXd::Random(4, 7);
  CHECK(pseudo_inverse(a).rows() == 7);
  CHECK(pseudo_inverse(a).cols() == 4);
  CHECK_THROWS_AS(pseudo_inverse(a, -1.0), sensorimotor::UsageError);
  MatrixXd bad = a;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(pseudo_inverse(bad), sensorimotor::NumericError);
  CHECK(pseudo_inverse(MatrixXd::Zero(3, 2)).isZero());
}

TEST_CASE("pseudo_inverse: Penrose conditions on random and rank-deficient matrices") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> rows_d(1, 20), cols_d(1, 30);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = rows_d(rng), c = cols_d(rng);
    const int full = std::min(r, c);
    const int rank = trial % 3 == 0 ? std::max(1, full / 3) : full;
    MatrixXd left(r, rank), right(rank, c);
    for (auto& v : left.reshaped()) v = n(rng);
    for (auto& v : right.reshaped()) v = n(rng);
    const MatrixXd a = left * right;
    const MatrixXd g = pseudo_inverse(a);
    CAPTURE(trial);
    CHECK(rel_inf(a * g * a - a, a) < 1e-8);
    CHECK(rel_inf(g * a * g - g, g) < 1e-8);
    CHECK(rel_inf((a * g).transpose() - a * g, a * g) < 1e-8);
    CHECK(rel_inf((g * a).transpose() - g * a, g * a) < 1e-8);
  }
}

TEST_CASE("pseudo_inverse: float scalar") {
  const Eigen::MatrixXf a = Eigen::MatrixXf::Identity(2, 2) * 4.0f;
  CHECK(pseudo_inverse(a)(0, 0) == doctest::Approx(0.25f));
}
