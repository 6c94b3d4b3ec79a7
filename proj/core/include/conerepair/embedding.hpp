#ifndef CONEREPAIR_EMBEDDING_HPP_
#define CONEREPAIR_EMBEDDING_HPP_

#include "conerepair/solver.hpp"
#include "conerepair/types.hpp"

namespace conerepair {

// Optimal point of the primal-dual embedding at one theta. tstar is the
// Euclidean norm of the joint optimality residual
//   N = (A x + s - b, A^T y + c, c^T x + b^T y)
// evaluated at the witness; it is zero exactly when the problem is solvable.
struct EmbeddingWitness {
  double tstar = 0.0;
  Vector x;
  Vector y;
  Vector s;
  SolveStatus solver_status = SolveStatus::MaxIters;
  Index solver_iters = 0;
};

struct EmbeddingData {
  SparseMatrix A;
  Vector b;
  Vector c;
  ConeDescriptor cones;
};

// Standard-form cone program whose optimal value is t*: variables
// z = (t, x, y, s), one second-order block of dim m+n+2 for the norm
// constraint, the original cone blocks for s, and the dual blocks for y
// (duals of Zero blocks are free and produce no rows).
EmbeddingData build_embedding(const SparseMatrix& A, const Vector& b,
                              const Vector& c, const ConeDescriptor& cones);

// Below this value of t* the normalized residual direction is numerically
// meaningless and grad_tstar refuses; callers treat such theta as solved.
inline constexpr double kGradZeroThreshold = 1e-9;

// Envelope-theorem gradient of t* with respect to theta, evaluated at the
// witness. Requires witness.tstar > kGradZeroThreshold.
Vector grad_tstar(const ParamConeProgram& pcp, const Vector& theta,
                  const EmbeddingWitness& witness);

// Evaluates t*(theta) by building and solving the embedding. Holds the
// backend and the previous embedding solution for warm starting; concurrent
// evaluation at different theta requires separate instances.
class EmbeddingSolver {
 public:
  EmbeddingSolver(const ParamConeProgram& pcp, SolverSettings settings);

  EmbeddingWitness eval(const Vector& theta, bool warm_start = true);

  const SolverSettings& settings() const { return settings_; }

 private:
  const ParamConeProgram& pcp_;
  SolverSettings settings_;
  OperatorSplittingSolver backend_;
  Solution last_;
  bool have_last_ = false;
};

// One-shot evaluation with a fresh (cold started) solver.
EmbeddingWitness eval_tstar(const ParamConeProgram& pcp, const Vector& theta,
                            const SolverSettings& settings = {});

}  // namespace conerepair

#endif  // CONEREPAIR_EMBEDDING_HPP_
