#ifndef CONEREPAIR_REPAIR_HPP_
#define CONEREPAIR_REPAIR_HPP_

#include "conerepair/embedding.hpp"
#include "conerepair/regularizer.hpp"

namespace conerepair {

struct RepairSettings {
  double lambda0 = 1.0;
  double alpha0 = 1.0;
  Index n_iter = 500;
  double eps_out = 1e-5;
  double eps_in = 1e-6;
  double lambda_decay = 0.5;
  double alpha_up = 1.2;
  double alpha_down = 0.5;
  SolverSettings solver;

  void validate() const;
};

enum class RepairStatus { Repaired, MaxIters, Stalled };

const char* to_string(RepairStatus status);

struct TraceEntry {
  Index iter;
  double lambda;
  double alpha;
  double tstar;
  double r_value;
  bool accepted;
};

struct RepairResult {
  Vector theta_final;
  std::vector<TraceEntry> trace;
  RepairStatus status = RepairStatus::MaxIters;
  double tstar_final = 0.0;
  double r_final = 0.0;
  Index embedding_solves = 0;
};

// Penalty method with a proximal-gradient inner loop: minimizes
// lambda * r(theta) + t*(theta) with lambda decreased whenever the inner
// stopping criterion fires on an accepted step, until t* <= eps_out.
RepairResult repair(const ParamConeProgram& pcp, const Regularizer& r,
                    const Vector& theta0, const RepairSettings& settings = {});

// Exact convex repair for the constant-A case: minimizes r(theta) subject to
// existence of a primal-dual pair for (A, b(theta), c(theta)) with the slack
// in the eps-shrunk cone (second-order blocks shrunk toward the interior by
// margin eps; polyhedral blocks unshrunk, where strong duality always holds).
Vector exact_repair_affine(const ParamConeProgram& pcp, const Regularizer& r,
                           double eps, const SolverSettings& settings = {});

// Geometric eps-schedule driver: returns (eps, theta, r(theta)) per step.
struct ExactRepairPoint {
  double eps;
  Vector theta;
  double r_value;
};
std::vector<ExactRepairPoint> exact_repair_schedule(
    const ParamConeProgram& pcp, const Regularizer& r,
    const std::vector<double>& eps_values, const SolverSettings& settings = {});

}  // namespace conerepair

#endif  // CONEREPAIR_REPAIR_HPP_
