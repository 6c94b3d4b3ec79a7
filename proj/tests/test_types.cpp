#include <doctest.h>

#include "conerepair/types.hpp"
#include "test_util.hpp"

using namespace conerepair;
using conerepair::testing::Rng;

TEST_CASE("sparse matrix canonicalization sums duplicates") {
  SparseMatrix A(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, -1.0}});
  REQUIRE(A.entries().size() == 2);
  CHECK(A.entries()[0].value == 3.0);
  CHECK(A.to_dense()(0, 0) == 3.0);
}

TEST_CASE("sparse matrix rejects out-of-range indices") {
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
}

TEST_CASE("sparse products match dense oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    SparseMatrix A = testing::random_sparse(rng, 20, 20);
    Eigen::MatrixXd D = A.to_dense();
    Vector x = testing::random_vector(rng, 20);
    Vector y = testing::random_vector(rng, 20);
    CHECK((A.multiply(x) - D * x).norm() <= 1e-12 * (1.0 + (D * x).norm()));
    CHECK((A.multiply_transpose(y) - D.transpose() * y).norm() <=
          1e-12 * (1.0 + (D.transpose() * y).norm()));
    CHECK((Eigen::MatrixXd(A.to_csc()) - D).norm() == 0.0);
  }
}

TEST_CASE("cone descriptor rejects empty blocks") {
  ConeDescriptor cones;
  CHECK_THROWS_AS(cones.append(ConeKind::Soc, 0), std::invalid_argument);
}

TEST_CASE("materialize at zero and nonzero parameters") {
  SparseMatrix A0(1, 1, {{0, 0, 1.0}});
  SparseMatrix A1(1, 1, {{0, 0, 2.0}});
  ConeDescriptor cones;
  cones.append(ConeKind::NonNeg, 1);
  ParamIncrement inc{A1, Vector::Zero(1), Vector::Zero(1)};
  ParamConeProgram pcp(A0, Vector::Zero(1), Vector::Zero(1), cones, {inc});

  auto at0 = pcp.materialize(Vector::Zero(1));
  CHECK(at0.A.to_dense()(0, 0) == 1.0);
  auto at3 = pcp.materialize(Vector::Constant(1, 3.0));
  CHECK(at3.A.to_dense()(0, 0) == 7.0);
}

TEST_CASE("materialize rejects wrong theta length") {
  SparseMatrix A0(1, 1, {{0, 0, 1.0}});
  ConeDescriptor cones;
  cones.append(ConeKind::NonNeg, 1);
  ParamConeProgram pcp(A0, Vector::Zero(1), Vector::Zero(1), cones, {});
  CHECK_THROWS_AS(pcp.materialize(Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("materialize is affine in theta") {
  Rng rng(11);
  const Index m = 6, n = 5, k = 3;
  SparseMatrix A0 = testing::random_sparse(rng, m, n);
  ConeDescriptor cones;
  cones.append(ConeKind::NonNeg, m);
  std::vector<ParamIncrement> incs;
  for (Index i = 0; i < k; ++i) {
    incs.push_back({testing::random_sparse(rng, m, n, 0.3),
                    testing::random_vector(rng, m),
                    testing::random_vector(rng, n)});
  }
  ParamConeProgram pcp(A0, testing::random_vector(rng, m),
                       testing::random_vector(rng, n), cones, incs);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = unif(rng);
    Vector t1 = testing::random_vector(rng, k);
    Vector t2 = testing::random_vector(rng, k);
    auto blend = pcp.materialize(alpha * t1 + (1 - alpha) * t2);
    auto m1 = pcp.materialize(t1);
    auto m2 = pcp.materialize(t2);
    Eigen::MatrixXd lhs = blend.A.to_dense();
    Eigen::MatrixXd rhs = alpha * m1.A.to_dense() + (1 - alpha) * m2.A.to_dense();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((blend.b - alpha * m1.b - (1 - alpha) * m2.b).norm() <= 1e-12);
    CHECK((blend.c - alpha * m1.c - (1 - alpha) * m2.c).norm() <= 1e-12);
  }
}

TEST_CASE("dimension-inconsistent increments rejected") {
  SparseMatrix A0(2, 2, {{0, 0, 1.0}});
  ConeDescriptor cones;
  cones.append(ConeKind::NonNeg, 2);
  ParamIncrement bad{SparseMatrix(3, 2), Vector::Zero(2), Vector::Zero(2)};
  CHECK_THROWS_AS(
      ParamConeProgram(A0, Vector::Zero(2), Vector::Zero(2), cones, {bad}),
      std::invalid_argument);
}
