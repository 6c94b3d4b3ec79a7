#include <doctest.h>

#include <sstream>

#include "conerepair/embedding.hpp"
#include "conerepair/generators.hpp"
#include "conerepair/problem_io.hpp"
#include "test_util.hpp"

using namespace conerepair;

TEST_CASE("spacecraft generator dimensions match the discretization") {
  ProblemFile pf = gen_spacecraft();
  const Index H = 11;  // T/h + 1
  CHECK(pf.pcp.n() == 10 * H);
  CHECK(pf.pcp.m() == 6 * (H - 1) + 12 + (H + 1) + 4 * H + 3 * H);
  CHECK(pf.pcp.num_params() == 4);
  CHECK(pf.theta0.size() == 4);
  CHECK(pf.regularizer.eval(pf.theta0) == doctest::Approx(0.0));
  // Mass and gimbal parameters enter A; fuel and thrust enter b.
  CHECK(!pf.pcp.increments()[0].A.entries().empty());
  CHECK(!pf.pcp.increments()[3].A.entries().empty());
  CHECK(pf.pcp.increments()[1].A.entries().empty());
  CHECK(pf.pcp.increments()[2].A.entries().empty());
}

TEST_CASE("spacecraft instance is infeasible at the initial parameters") {
  ProblemFile pf = gen_spacecraft();
  SolverSettings settings;
  settings.eps_abs = 1e-8;
  settings.eps_rel = 1e-8;
  EmbeddingWitness w = eval_tstar(pf.pcp, pf.theta0, settings);
  CHECK(w.tstar > 1e-3);
}

TEST_CASE("spacecraft file round-trips through the text format") {
  ProblemFile pf = gen_spacecraft();
  std::istringstream in(serialize_problem(pf));
  ProblemFile back = parse_problem(in);
  CHECK(back.pcp.n() == pf.pcp.n());
  CHECK(back.pcp.m() == pf.pcp.m());
  CHECK(back.theta0 == pf.theta0);
  CHECK(serialize_problem(back) == serialize_problem(pf));
}

TEST_CASE("arbitrage generator encodes theta = vec(R) into A and c") {
  Eigen::MatrixXd R0 = arbitrage_example_matrix();
  ProblemFile pf = gen_arbitrage(R0);
  CHECK(pf.pcp.n() == 3);
  CHECK(pf.pcp.m() == 8);
  CHECK(pf.pcp.num_params() == 15);

  auto data = pf.pcp.materialize(pf.theta0);
  Eigen::MatrixXd A = data.A.to_dense();
  CHECK(A.topRows(5).isApprox(-R0));
  CHECK(data.c.isApprox(-(R0.transpose() * Eigen::VectorXd::Ones(5))));
}

TEST_CASE("arbitrage direction from the horse race instance") {
  Eigen::MatrixXd R0 = arbitrage_example_matrix();
  // The printed direction is rounded to two decimals; the exact min of R0 w
  // over these values is -8e-4, so the floor absorbs that rounding.
  Eigen::Vector3d w(0.71, 0.62, 0.33);
  Eigen::VectorXd ret = R0 * w;
  CHECK(ret.minCoeff() >= -1e-2);
  CHECK(ret.sum() > 0.0);
}

TEST_CASE("repair size at the reference repaired return matrix") {
  Eigen::MatrixXd R0 = arbitrage_example_matrix();
  Eigen::MatrixXd Rf(5, 3);
  Rf << 0.05, 1.71, -0.9,
        0.08, 0.42, -1.09,
        0.18, -0.31, 1.27,
        0.81, -1.22, 0.27,
        -0.97, 0.17, 2.37;
  // The quoted value 0.142 is the max absolute column sum of the elementwise
  // relative change; the elementwise-l1 sum at the same point is 0.385.
  Eigen::MatrixXd M = ((Rf - R0).array() / R0.array()).abs();
  CHECK(std::abs(M.colwise().sum().maxCoeff() - 0.142) <= 0.005);
}

TEST_CASE("arbitrage instance is unsolvable (unbounded)") {
  ProblemFile pf = gen_arbitrage(arbitrage_example_matrix());
  SolverSettings settings;
  EmbeddingWitness w = eval_tstar(pf.pcp, pf.theta0, settings);
  CHECK(w.tstar > 1e-4);

  // The direct solve detects the unbounded direction.
  auto data = pf.pcp.materialize(pf.theta0);
  SolverSettings cert;
  cert.eps_infeas = 1e-7;
  Solution sol = solve(data.A, data.b, data.c, pf.pcp.cones(), cert);
  CHECK(sol.status == SolveStatus::UnboundedCert);
}

TEST_CASE("identity-like payoff matrix has arbitrage") {
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(3, 3, 1e-3);
  R.diagonal().setOnes();
  ProblemFile pf = gen_arbitrage(R);
  EmbeddingWitness w = eval_tstar(pf.pcp, pf.theta0, SolverSettings{});
  CHECK(w.tstar > 1e-5);
}

TEST_CASE("zero entries in R0 are rejected with the entry named") {
  Eigen::MatrixXd R = arbitrage_example_matrix();
  R(2, 1) = 0.0;
  try {
    gen_arbitrage(R);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("(2, 1)") != std::string::npos);
  }
}
