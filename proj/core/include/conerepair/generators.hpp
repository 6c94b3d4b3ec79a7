#ifndef CONEREPAIR_GENERATORS_HPP_
#define CONEREPAIR_GENERATORS_HPP_

#include <Eigen/Core>

#include "conerepair/problem_io.hpp"

namespace conerepair {

// Discretized powered-landing feasibility problem with a gimbaled thruster.
// Parameters theta = (mass, fuel budget, thrust limit, gimbal tangent); mass
// and the gimbal tangent enter the constraint matrix, the fuel and thrust
// limits enter the right-hand side, all affinely.
struct SpacecraftParams {
  double T = 10.0;
  double h = 1.0;
  double g = 9.8;
  Eigen::Vector3d x_init{10.0, 10.0, 50.0};
  Eigen::Vector3d v_init{10.0, -10.0, -10.0};
  double gamma = 1.0;
  // theta0 = (m, M_fuel, F_max, alpha)
  Vector theta0 = (Vector(4) << 12.0, 200.0, 50.0, 0.5).finished();
  double mass_lower_bound = 9.0;
};

ProblemFile gen_spacecraft(const SpacecraftParams& params = {});

// Arbitrage detection LP for a return matrix R (outcomes x wagers):
// maximize 1^T R w over w >= 0, R w >= 0; unbounded exactly when an arbitrage
// opportunity exists. theta = vec(R), row-major; the metric is the
// elementwise relative change from R0, so R0 must have no zero entries.
ProblemFile gen_arbitrage(const Eigen::MatrixXd& R0);

// Return matrix of the 5-outcome, 3-wager horse race instance.
Eigen::MatrixXd arbitrage_example_matrix();

}  // namespace conerepair

#endif  // CONEREPAIR_GENERATORS_HPP_
