#include "conerepair/embedding.hpp"

#include <cmath>

namespace conerepair {

EmbeddingData build_embedding(const SparseMatrix& A, const Vector& b,
                              const Vector& c, const ConeDescriptor& cones) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (b.size() != m || c.size() != n || cones.total_dim() != m) {
    throw std::invalid_argument("build_embedding: dimension mismatch");
  }

  // Variables z = (t, x, y, s).
  const Index off_t = 0;
  const Index off_x = 1;
  const Index off_y = 1 + n;
  const Index off_s = 1 + n + m;
  const Index ne = 1 + n + 2 * m;

  EmbeddingData out;
  SparseMatrix Ae(0, ne);  // rows appended below; resized at the end
  std::vector<Triplet> entries;
  std::vector<double> rhs;
  ConeDescriptor cones_e;
  Index row = 0;

  // Norm constraint: slack = (t, Ax + s - b, A^T y + c, c^T x + b^T y)
  // in a second-order block of dim m + n + 2. Standard form slack is
  // b_e - A_e z, so entries carry a minus sign.
  entries.push_back({row, off_t, -1.0});
  rhs.push_back(0.0);
  ++row;
  const Index res_p = row;  // rows for Ax + s - b
  for (Index i = 0; i < m; ++i) {
    entries.push_back({res_p + i, off_s + i, -1.0});
    rhs.push_back(-b[i]);
  }
  row += m;
  const Index res_d = row;  // rows for A^T y + c
  for (Index j = 0; j < n; ++j) {
    rhs.push_back(c[j]);
  }
  row += n;
  for (const Triplet& t : A.entries()) {
    entries.push_back({res_p + t.row, off_x + t.col, -t.value});
    entries.push_back({res_d + t.col, off_y + t.row, -t.value});
  }
  const Index res_g = row;  // gap row c^T x + b^T y
  for (Index j = 0; j < n; ++j) {
    if (c[j] != 0.0) entries.push_back({res_g, off_x + j, -c[j]});
  }
  for (Index i = 0; i < m; ++i) {
    if (b[i] != 0.0) entries.push_back({res_g, off_y + i, -b[i]});
  }
  rhs.push_back(0.0);
  ++row;
  cones_e.append(ConeKind::Soc, m + n + 2);

  // s in K, blockwise (Zero blocks kept as Zero rows).
  Index off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    for (Index i = 0; i < blk.dim; ++i) {
      entries.push_back({row + i, off_s + off + i, -1.0});
      rhs.push_back(0.0);
    }
    cones_e.append(blk.kind, blk.dim);
    row += blk.dim;
    off += blk.dim;
  }

  // y in K*: duals of Zero blocks are free (no rows); NonNeg and Soc are
  // self-dual.
  off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    if (blk.kind != ConeKind::Zero) {
      for (Index i = 0; i < blk.dim; ++i) {
        entries.push_back({row + i, off_y + off + i, -1.0});
        rhs.push_back(0.0);
      }
      cones_e.append(blk.kind, blk.dim);
      row += blk.dim;
    }
    off += blk.dim;
  }

  out.A = SparseMatrix(row, ne, std::move(entries));
  out.b = Eigen::Map<const Vector>(rhs.data(), static_cast<Index>(rhs.size()));
  out.c = Vector::Zero(ne);
  out.c[off_t] = 1.0;
  out.cones = std::move(cones_e);
  return out;
}

namespace {

// Joint optimality residual N at a candidate witness, in exact data space.
Vector residual_vector(const SparseMatrix& A, const Vector& b, const Vector& c,
                       const EmbeddingWitness& w) {
  const Index m = A.rows();
  const Index n = A.cols();
  Vector N(m + n + 1);
  N.head(m) = A.multiply(w.x) + w.s - b;
  N.segment(m, n) = A.multiply_transpose(w.y) + c;
  N[m + n] = c.dot(w.x) + b.dot(w.y);
  return N;
}

EmbeddingWitness extract_witness(const Solution& sol, Index n, Index m,
                                 const SparseMatrix& A, const Vector& b,
                                 const Vector& c, const ConeDescriptor& cones) {
  EmbeddingWitness w;
  w.solver_status = sol.status;
  w.solver_iters = sol.iters;

  // Refine the witness in exact data space: t* is the norm of the joint
  // residual at a feasible witness, so driving the residual down with the
  // projected-gradient polish tightens the reported value directly.
  Solution cand;
  cand.x = sol.x.segment(1, n);
  cand.y = sol.x.segment(1 + n, m);
  cand.s = sol.x.segment(1 + n + m, m);

  // The polish converges linearly once the active faces are identified, so
  // keep refining in blocks while the residual norm still moves. At a
  // genuinely unsolvable theta the norm flattens at t* > 0 after one block;
  // near a solvable theta the extra blocks drive it to solver-grade zero.
  auto norm_N = [&] {
    return std::sqrt(cand.primal_residual * cand.primal_residual +
                     cand.dual_residual * cand.dual_residual +
                     cand.gap * cand.gap);
  };
  refine_candidate(A, b, c, cones, cand, 1500);
  double prev = norm_N();
  constexpr Index kBlock = 5000;
  constexpr Index kBudget = 500000;
  for (Index used = 1500; used < kBudget && prev > 1e-8; used += kBlock) {
    refine_candidate(A, b, c, cones, cand, kBlock);
    const double cur = norm_N();
    if (cur > 0.99 * prev) break;
    prev = cur;
  }

  w.x = std::move(cand.x);
  w.y = std::move(cand.y);
  w.s = std::move(cand.s);
  w.tstar = residual_vector(A, b, c, w).norm();
  return w;
}

// The always-feasible starting point: (x, y, s) = 0, t = ||(b, c)||.
Solution feasible_start(const EmbeddingData& emb, const Vector& b,
                        const Vector& c) {
  Solution start;
  start.x = Vector::Zero(emb.A.cols());
  start.x[0] = std::sqrt(b.squaredNorm() + c.squaredNorm());
  start.y = Vector::Zero(emb.A.rows());
  start.s = emb.b - emb.A.multiply(start.x);
  return start;
}

}  // namespace

Vector grad_tstar(const ParamConeProgram& pcp, const Vector& theta,
                  const EmbeddingWitness& witness) {
  if (theta.size() != pcp.num_params()) {
    throw std::invalid_argument("grad_tstar: theta length mismatch");
  }
  if (!(witness.tstar > kGradZeroThreshold)) {
    throw DegenerateGradientError(
        "grad_tstar: t* = " + std::to_string(witness.tstar) +
        " is below the degeneracy threshold; treat theta as solved");
  }
  const auto data = pcp.materialize(theta);
  const Index m = pcp.m();
  const Index n = pcp.n();

  Vector N = residual_vector(data.A, data.b, data.c, witness);
  const Vector u = N / N.norm();
  const auto u1 = u.head(m);
  const auto u2 = u.segment(m, n);
  const double u3 = u[m + n];

  // Envelope theorem: the feasible set of the embedding does not depend on
  // theta, so dt*/dtheta_i = <G_A, A_i> + <g_b, b_i> + <g_c, c_i> with
  //   G_A = u1 x^T + y u2^T,  g_b = -u1 + u3 y,  g_c = u2 + u3 x.
  const Vector g_b = -u1 + u3 * witness.y;
  const Vector g_c = u2 + u3 * witness.x;

  Vector grad(pcp.num_params());
  for (Index i = 0; i < pcp.num_params(); ++i) {
    const ParamIncrement& inc = pcp.increments()[i];
    double g = 0.0;
    for (const Triplet& t : inc.A.entries()) {
      g += t.value *
           (u1[t.row] * witness.x[t.col] + witness.y[t.row] * u2[t.col]);
    }
    g += g_b.dot(inc.b);
    g += g_c.dot(inc.c);
    grad[i] = g;
  }
  return grad;
}

EmbeddingSolver::EmbeddingSolver(const ParamConeProgram& pcp,
                                 SolverSettings settings)
    : pcp_(pcp), settings_(settings) {}

EmbeddingWitness EmbeddingSolver::eval(const Vector& theta, bool warm_start) {
  const auto data = pcp_.materialize(theta);
  const EmbeddingData emb =
      build_embedding(data.A, data.b, data.c, pcp_.cones());

  const Solution* warm = nullptr;
  Solution start;
  if (warm_start && have_last_) {
    warm = &last_;
  } else {
    start = feasible_start(emb, data.b, data.c);
    warm = &start;
  }
  // Any solver status is usable here: the witness is re-projected and
  // refined in exact data space below, so the reported t* stays a valid
  // upper bound; solver_status records the quality of the underlying solve.
  Solution sol =
      backend_.solve(emb.A, emb.b, emb.c, emb.cones, settings_, warm);
  last_ = sol;
  have_last_ = true;
  return extract_witness(sol, pcp_.n(), pcp_.m(), data.A, data.b, data.c,
                         pcp_.cones());
}

EmbeddingWitness eval_tstar(const ParamConeProgram& pcp, const Vector& theta,
                            const SolverSettings& settings) {
  EmbeddingSolver solver(pcp, settings);
  return solver.eval(theta, /*warm_start=*/false);
}

}  // namespace conerepair
