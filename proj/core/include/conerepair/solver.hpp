#ifndef CONEREPAIR_SOLVER_HPP_
#define CONEREPAIR_SOLVER_HPP_

#include <memory>
#include <optional>

#include "conerepair/cones.hpp"
#include "conerepair/types.hpp"

namespace conerepair {

struct SolverSettings {
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  Index max_iters = 100000;
  bool scaling_enabled = true;
  // Certificate detection tolerance (normalized certificates).
  double eps_infeas = 1e-9;
};

enum class SolveStatus {
  Solved,
  Inaccurate,
  MaxIters,
  InfeasibleCert,
  UnboundedCert,
};

const char* to_string(SolveStatus status);

struct Solution {
  Vector x;
  Vector y;
  Vector s;
  SolveStatus status = SolveStatus::MaxIters;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  Index iters = 0;
};

// Unnormalized residual norms of the optimality conditions:
//   (||A x + s - b||, ||A^T y + c||, |c^T x + b^T y|).
struct Residuals {
  double primal;
  double dual;
  double gap;
};

Residuals residuals(const SparseMatrix& A, const Vector& b, const Vector& c,
                    const ConeDescriptor& cones, const Solution& candidate);

// Backend interface. The embedding and repair modules depend only on this;
// a conforming external conic solver may be substituted.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual Solution solve(const SparseMatrix& A, const Vector& b,
                         const Vector& c, const ConeDescriptor& cones,
                         const SolverSettings& settings,
                         const Solution* warm) = 0;
};

// Reference first-order solver: operator splitting on the homogeneous
// self-dual embedding, with Ruiz equilibration and a cached sparse
// quasi-definite factorization reused while the pattern of A is unchanged.
class OperatorSplittingSolver final : public SolverBackend {
 public:
  OperatorSplittingSolver();
  ~OperatorSplittingSolver() override;
  OperatorSplittingSolver(OperatorSplittingSolver&&) noexcept;
  OperatorSplittingSolver& operator=(OperatorSplittingSolver&&) noexcept;

  Solution solve(const SparseMatrix& A, const Vector& b, const Vector& c,
                 const ConeDescriptor& cones, const SolverSettings& settings,
                 const Solution* warm) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Candidate refinement: accelerated projected gradient on half the squared
// joint optimality residual over x free, s in K, y in K*. Monotone in the
// residual norm, so it can only improve a candidate; used to polish
// first-order solutions whose tail convergence has stalled.
void refine_candidate(const SparseMatrix& A, const Vector& b, const Vector& c,
                      const ConeDescriptor& cones, Solution& sol, Index iters);

// One-shot convenience wrapper around a fresh OperatorSplittingSolver.
Solution solve(const SparseMatrix& A, const Vector& b, const Vector& c,
               const ConeDescriptor& cones,
               const SolverSettings& settings = {},
               const Solution* warm = nullptr);

}  // namespace conerepair

#endif  // CONEREPAIR_SOLVER_HPP_
