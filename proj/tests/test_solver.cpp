#include <doctest.h>

#include "conerepair/solver.hpp"
#include "test_util.hpp"

using namespace conerepair;
using conerepair::testing::Rng;

namespace {

ConeDescriptor single(ConeKind kind, Index dim) {
  ConeDescriptor cones;
  cones.append(kind, dim);
  return cones;
}

// minimize x s.t. x >= 1 in standard form.
struct Lp1D {
  SparseMatrix A{1, 1, {{0, 0, -1.0}}};
  Vector b = Vector::Constant(1, -1.0);
  Vector c = Vector::Constant(1, 1.0);
  ConeDescriptor cones = single(ConeKind::NonNeg, 1);
};

}  // namespace

TEST_CASE("1-D LP: minimize x subject to x >= 1") {
  Lp1D lp;
  Solution sol = solve(lp.A, lp.b, lp.c, lp.cones);
  REQUIRE(sol.status == SolveStatus::Solved);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(lp.c.dot(sol.x) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("equality-only problem: minimize 0 subject to x = 1") {
  SparseMatrix A(1, 1, {{0, 0, 1.0}});
  Solution sol = solve(A, Vector::Constant(1, 1.0), Vector::Zero(1),
                       single(ConeKind::Zero, 1));
  REQUIRE(sol.status == SolveStatus::Solved);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("small socp with binding linear cap") {
  // minimize -t s.t. ||(u, v)|| <= t, u = 1, v = 1, t <= 2.
  // Variables (t, u, v). At the optimum t = 2 (the cap binds since
  // ||(1,1)|| = sqrt(2) < 2), objective -2.
  SparseMatrix A(6, 3);
  Vector b = Vector::Zero(6);
  // u = 1, v = 1 (zero cone rows)
  A.add_entry(0, 1, 1.0);
  b[0] = 1.0;
  A.add_entry(1, 2, 1.0);
  b[1] = 1.0;
  // t <= 2 (nonneg row)
  A.add_entry(2, 0, 1.0);
  b[2] = 2.0;
  // soc row: slack = (t, u, v)
  A.add_entry(3, 0, -1.0);
  A.add_entry(4, 1, -1.0);
  A.add_entry(5, 2, -1.0);
  A.canonicalize();
  ConeDescriptor cones;
  cones.append(ConeKind::Zero, 2);
  cones.append(ConeKind::NonNeg, 1);
  cones.append(ConeKind::Soc, 3);
  Vector c(3);
  c << -1.0, 0.0, 0.0;

  Solution sol = solve(A, b, c, cones);
  REQUIRE(sol.status == SolveStatus::Solved);
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(c.dot(sol.x) == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("residuals of exact, zero, and perturbed candidates") {
  Lp1D lp;
  Solution exact;
  exact.x = Vector::Constant(1, 1.0);
  exact.y = Vector::Constant(1, 1.0);  // dual: -y + 1 = 0
  exact.s = Vector::Zero(1);
  Residuals r = residuals(lp.A, lp.b, lp.c, lp.cones, exact);
  CHECK(r.primal <= 1e-12);
  CHECK(r.dual <= 1e-12);
  CHECK(r.gap <= 1e-12);

  Solution zeros;
  zeros.x = Vector::Zero(1);
  zeros.y = Vector::Zero(1);
  zeros.s = Vector::Zero(1);
  Residuals rz = residuals(lp.A, lp.b, lp.c, lp.cones, zeros);
  CHECK(rz.primal == doctest::Approx(1.0));
  CHECK(rz.dual == doctest::Approx(1.0));
  CHECK(rz.gap == doctest::Approx(0.0));

  // Random perturbations match a dense brute-force evaluation.
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Solution cand = exact;
    cand.x += testing::random_vector(rng, 1, 0.1);
    cand.y += testing::random_vector(rng, 1, 0.1);
    cand.s += testing::random_vector(rng, 1, 0.1);
    Residuals rr = residuals(lp.A, lp.b, lp.c, lp.cones, cand);
    Eigen::MatrixXd D = lp.A.to_dense();
    CHECK(rr.primal ==
          doctest::Approx((D * cand.x + cand.s - lp.b).norm()));
    CHECK(rr.dual ==
          doctest::Approx((D.transpose() * cand.y + lp.c).norm()));
    CHECK(rr.gap ==
          doctest::Approx(std::abs(lp.c.dot(cand.x) + lp.b.dot(cand.y))));
  }
}

TEST_CASE("residuals rejects mismatched candidate") {
  Lp1D lp;
  Solution bad;
  bad.x = Vector::Zero(2);
  bad.y = Vector::Zero(1);
  bad.s = Vector::Zero(1);
  CHECK_THROWS_AS(residuals(lp.A, lp.b, lp.c, lp.cones, bad),
                  std::invalid_argument);
}

TEST_CASE("random feasible-by-construction instances solve to tolerance") {
  Rng rng(42);
  SolverSettings settings;
  settings.eps_abs = 1e-9;
  settings.eps_rel = 1e-9;
  int solved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = testing::random_feasible_instance(rng, 12, 8);
    Solution sol = solve(inst.A, inst.b, inst.c, inst.cones, settings);
    REQUIRE(sol.status == SolveStatus::Solved);
    // Objective matches the duality-consistent optimal value.
    const double opt = inst.c.dot(inst.x_hat);
    const double got = inst.c.dot(sol.x);
    CHECK(std::abs(got - opt) <= 1e-5 * (1.0 + std::abs(opt)));
    ++solved;
  }
  CHECK(solved == 25);
}

TEST_CASE("warm start reuses most of the work") {
  Rng rng(99);
  auto inst = testing::random_feasible_instance(rng, 20, 14);
  SolverSettings settings;
  OperatorSplittingSolver solver;
  Solution cold =
      solver.solve(inst.A, inst.b, inst.c, inst.cones, settings, nullptr);
  REQUIRE(cold.status == SolveStatus::Solved);
  Solution warm =
      solver.solve(inst.A, inst.b, inst.c, inst.cones, settings, &cold);
  REQUIRE(warm.status == SolveStatus::Solved);
  CHECK(warm.iters <= cold.iters / 10);
}

TEST_CASE("infeasible instance yields a certificate") {
  // x >= 1 and x <= 0 simultaneously.
  SparseMatrix A(2, 1, {{0, 0, -1.0}, {1, 0, 1.0}});
  Vector b(2);
  b << -1.0, 0.0;
  SolverSettings settings;
  settings.eps_infeas = 1e-7;
  Solution sol =
      solve(A, b, Vector::Zero(1), single(ConeKind::NonNeg, 2), settings);
  REQUIRE(sol.status == SolveStatus::InfeasibleCert);
  // Certificate: A^T y ~ 0, y in K*, b^T y = -1.
  CHECK(A.multiply_transpose(sol.y).norm() <= 1e-6);
  CHECK(b.dot(sol.y) == doctest::Approx(-1.0));
  CHECK(sol.y.minCoeff() >= -1e-9);
}

TEST_CASE("unbounded instance yields a certificate") {
  // minimize -x s.t. x >= 0.
  SparseMatrix A(1, 1, {{0, 0, -1.0}});
  SolverSettings settings;
  settings.eps_infeas = 1e-7;
  Solution sol = solve(A, Vector::Zero(1), Vector::Constant(1, -1.0),
                       single(ConeKind::NonNeg, 1), settings);
  REQUIRE(sol.status == SolveStatus::UnboundedCert);
  CHECK(Vector::Constant(1, -1.0).dot(sol.x) == doctest::Approx(-1.0));
  CHECK((A.multiply(sol.x) + sol.s).norm() <= 1e-6);
}

TEST_CASE("structurally invalid input rejected") {
  Lp1D lp;
  CHECK_THROWS_AS(solve(lp.A, Vector::Zero(2), lp.c, lp.cones),
                  std::invalid_argument);
  ConeDescriptor wrong = single(ConeKind::NonNeg, 2);
  CHECK_THROWS_AS(solve(lp.A, lp.b, lp.c, wrong), std::invalid_argument);
  SolverSettings bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(solve(lp.A, lp.b, lp.c, lp.cones, bad),
                  std::invalid_argument);
}
