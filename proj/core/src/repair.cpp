#include "conerepair/repair.hpp"

#include <cmath>

namespace conerepair {

const char* to_string(RepairStatus status) {
  switch (status) {
    case RepairStatus::Repaired: return "REPAIRED";
    case RepairStatus::MaxIters: return "MAX_ITERS";
    case RepairStatus::Stalled: return "STALLED";
  }
  return "UNKNOWN";
}

void RepairSettings::validate() const {
  if (lambda0 <= 0 || alpha0 <= 0 || n_iter < 1 || eps_out <= 0 ||
      eps_in <= 0) {
    throw std::invalid_argument("repair settings: nonpositive tolerance");
  }
  if (lambda_decay <= 0 || lambda_decay >= 1 || alpha_up < 1 ||
      alpha_down <= 0 || alpha_down >= 1) {
    throw std::invalid_argument("repair settings: update factors out of range");
  }
}

namespace {

constexpr Index kMaxConsecutiveRejects = 50;
constexpr double kMinStep = 1e-12;

}  // namespace

RepairResult repair(const ParamConeProgram& pcp, const Regularizer& r,
                    const Vector& theta0, const RepairSettings& settings) {
  settings.validate();
  if (theta0.size() != pcp.num_params()) {
    throw std::invalid_argument("repair: theta0 length mismatch");
  }
  const double r0 = r.eval(theta0);
  if (!std::isfinite(r0)) {
    throw std::invalid_argument(
        "repair: theta0 violates the regularizer's hard constraints");
  }

  EmbeddingSolver emb(pcp, settings.solver);
  RepairResult res;

  Vector theta = theta0;
  double lambda = settings.lambda0;
  double alpha = settings.alpha0;

  EmbeddingWitness w = emb.eval(theta);
  ++res.embedding_solves;
  double r_cur = r0;
  res.trace.push_back({0, lambda, alpha, w.tstar, r_cur, true});

  if (w.tstar <= settings.eps_out) {
    res.theta_final = theta;
    res.status = RepairStatus::Repaired;
    res.tstar_final = w.tstar;
    res.r_final = r_cur;
    return res;
  }

  Vector g;
  if (w.tstar > kGradZeroThreshold) {
    g = grad_tstar(pcp, theta, w);
  } else {
    res.theta_final = theta;
    res.status = RepairStatus::Stalled;
    res.tstar_final = w.tstar;
    res.r_final = r_cur;
    return res;
  }

  Index consecutive_rejects = 0;
  res.status = RepairStatus::MaxIters;

  for (Index iter = 1; iter <= settings.n_iter; ++iter) {
    const double merit_cur = lambda * r_cur + w.tstar;

    const Vector theta_half = theta - alpha * g;
    const Vector theta_tent = r.prox(alpha * lambda, theta_half);
    EmbeddingWitness w_tent = emb.eval(theta_tent);
    ++res.embedding_solves;
    const double r_tent = r.eval(theta_tent);
    const double merit_tent = lambda * r_tent + w_tent.tstar;

    bool accepted = false;
    if (merit_tent < merit_cur) {
      accepted = true;
      Vector g_new = Vector::Zero(theta.size());
      if (w_tent.tstar > kGradZeroThreshold) {
        g_new = grad_tstar(pcp, theta_tent, w_tent);
      }
      const double inner =
          ((theta - theta_tent) / alpha + (g_new - g)).norm();
      theta = theta_tent;
      w = w_tent;
      g = std::move(g_new);
      r_cur = r_tent;
      alpha *= settings.alpha_up;
      if (inner <= settings.eps_in) {
        lambda *= settings.lambda_decay;
      }
      consecutive_rejects = 0;
    } else {
      alpha *= settings.alpha_down;
      ++consecutive_rejects;
    }

    res.trace.push_back({iter, lambda, alpha, w.tstar, r_cur, accepted});

    if (w.tstar <= settings.eps_out) {
      res.status = RepairStatus::Repaired;
      break;
    }
    if (consecutive_rejects >= kMaxConsecutiveRejects || alpha < kMinStep) {
      res.status = RepairStatus::Stalled;
      break;
    }
  }

  res.theta_final = theta;
  res.tstar_final = w.tstar;
  res.r_final = r_cur;
  return res;
}

namespace {

// Row-building helper for the exact-repair cone program.
struct ProgramBuilder {
  std::vector<Triplet> entries;
  std::vector<double> rhs;
  ConeDescriptor cones;
  Index row = 0;

  void add(Index r, Index col, double value) {
    entries.push_back({row + r, col, value});
  }
  void finish_block(ConeKind kind, Index dim, const Vector& b_block) {
    for (Index i = 0; i < dim; ++i) rhs.push_back(b_block[i]);
    cones.append(kind, dim);
    row += dim;
  }
};

}  // namespace

Vector exact_repair_affine(const ParamConeProgram& pcp, const Regularizer& r,
                           double eps, const SolverSettings& settings) {
  if (!pcp.constant_A()) {
    throw UnsupportedError(
        "exact_repair_affine requires A constant in theta (all A increments "
        "empty)");
  }
  if (eps < 0) {
    throw std::invalid_argument("exact_repair_affine: eps must be >= 0");
  }
  const Index k = pcp.num_params();
  const Index n = pcp.n();
  const Index m = pcp.m();
  if (r.dim() != k) {
    throw std::invalid_argument("exact_repair_affine: regularizer dim != k");
  }

  // Variables z = (theta, x, y, s, aux); aux holds epigraph variables for the
  // distance atoms of r.
  const Index off_theta = 0;
  const Index off_x = k;
  const Index off_y = k + n;
  const Index off_s = k + n + m;
  Index nz = k + n + 2 * m;

  struct AuxTerm {
    AtomKind kind;
    Index coord;
    double weight;
    double center;
    Index var;  // aux variable index
  };
  std::vector<AuxTerm> aux_terms;
  std::vector<std::pair<Index, std::pair<double, double>>> box_rows;
  for (const RegAtom& atom : r.atoms()) {
    for (std::size_t i = 0; i < atom.coords.size(); ++i) {
      const auto idx = static_cast<Index>(i);
      if (atom.kind == AtomKind::BoxIndicator) {
        box_rows.push_back(
            {atom.coords[i], {atom.lower[idx], atom.upper[idx]}});
      } else {
        aux_terms.push_back({atom.kind, atom.coords[i], atom.weights[idx],
                             atom.centers[idx], nz});
        ++nz;
      }
    }
  }

  ProgramBuilder pb;

  // Primal feasibility: A x + s - sum_i theta_i b_i = b0 (Zero rows).
  for (const Triplet& t : pcp.A0().entries()) {
    pb.add(t.row, off_x + t.col, t.value);
  }
  for (Index i = 0; i < m; ++i) pb.add(i, off_s + i, 1.0);
  for (Index p = 0; p < k; ++p) {
    const Vector& bp = pcp.increments()[p].b;
    for (Index i = 0; i < m; ++i) {
      if (bp[i] != 0.0) pb.add(i, off_theta + p, -bp[i]);
    }
  }
  pb.finish_block(ConeKind::Zero, m, pcp.b0());

  // Dual feasibility: A^T y + sum_i theta_i c_i = -c0 (Zero rows).
  for (const Triplet& t : pcp.A0().entries()) {
    pb.add(t.col, off_y + t.row, t.value);
  }
  for (Index p = 0; p < k; ++p) {
    const Vector& cp = pcp.increments()[p].c;
    for (Index j = 0; j < n; ++j) {
      if (cp[j] != 0.0) pb.add(j, off_theta + p, cp[j]);
    }
  }
  pb.finish_block(ConeKind::Zero, n, -pcp.c0());

  // s in K_eps: second-order blocks shrunk by eps, polyhedral blocks exact.
  Index off = 0;
  for (const ConeBlock& blk : pcp.cones().blocks()) {
    Vector b_block = Vector::Zero(blk.dim);
    for (Index i = 0; i < blk.dim; ++i) {
      pb.add(i, off_s + off + i, -1.0);
    }
    if (blk.kind == ConeKind::Soc) {
      b_block[0] = -eps;  // slack = (s_t - eps, s_rest)
    }
    pb.finish_block(blk.kind, blk.dim, b_block);
    off += blk.dim;
  }

  // y in K*: duals of Zero blocks are free.
  off = 0;
  for (const ConeBlock& blk : pcp.cones().blocks()) {
    if (blk.kind != ConeKind::Zero) {
      for (Index i = 0; i < blk.dim; ++i) {
        pb.add(i, off_y + off + i, -1.0);
      }
      pb.finish_block(blk.kind, blk.dim, Vector::Zero(blk.dim));
    }
    off += blk.dim;
  }

  // Epigraphs of the distance atoms.
  for (const AuxTerm& t : aux_terms) {
    if (t.kind == AtomKind::ScaledL1) {
      // u >= theta - mu and u >= mu - theta.
      pb.add(0, t.var, -1.0);
      pb.add(0, off_theta + t.coord, 1.0);
      pb.add(1, t.var, -1.0);
      pb.add(1, off_theta + t.coord, -1.0);
      Vector b2(2);
      b2 << t.center, -t.center;
      pb.finish_block(ConeKind::NonNeg, 2, b2);
    } else {
      // (theta - mu)^2 <= v as ||(2(theta - mu), 1 - v)|| <= 1 + v.
      pb.add(0, t.var, -1.0);
      pb.add(1, off_theta + t.coord, -2.0);
      pb.add(2, t.var, 1.0);
      Vector b3(3);
      b3 << 1.0, -2.0 * t.center, 1.0;
      pb.finish_block(ConeKind::Soc, 3, b3);
    }
  }

  // Box bounds on theta.
  for (const auto& [coord, bounds] : box_rows) {
    const auto [lo, hi] = bounds;
    if (std::isfinite(lo)) {
      pb.add(0, off_theta + coord, -1.0);
      Vector b1(1);
      b1 << -lo;
      pb.finish_block(ConeKind::NonNeg, 1, b1);
    }
    if (std::isfinite(hi)) {
      pb.add(0, off_theta + coord, 1.0);
      Vector b1(1);
      b1 << hi;
      pb.finish_block(ConeKind::NonNeg, 1, b1);
    }
  }

  SparseMatrix A(pb.row, nz, std::move(pb.entries));
  Vector b =
      Eigen::Map<const Vector>(pb.rhs.data(), static_cast<Index>(pb.rhs.size()));
  Vector c = Vector::Zero(nz);
  for (const AuxTerm& t : aux_terms) c[t.var] = t.weight;

  Solution sol = solve(A, b, c, pb.cones, settings);
  if (sol.status == SolveStatus::InfeasibleCert) {
    throw NumericalError(
        "exact repair problem is infeasible for eps = " + std::to_string(eps) +
        "; try a smaller interior margin");
  }
  if (sol.status != SolveStatus::Solved &&
      sol.status != SolveStatus::Inaccurate) {
    throw NumericalError(std::string("exact repair solve failed: ") +
                         to_string(sol.status));
  }
  return sol.x.head(k);
}

std::vector<ExactRepairPoint> exact_repair_schedule(
    const ParamConeProgram& pcp, const Regularizer& r,
    const std::vector<double>& eps_values, const SolverSettings& settings) {
  std::vector<ExactRepairPoint> out;
  out.reserve(eps_values.size());
  for (double eps : eps_values) {
    Vector theta = exact_repair_affine(pcp, r, eps, settings);
    out.push_back({eps, theta, r.eval(theta)});
  }
  return out;
}

}  // namespace conerepair
