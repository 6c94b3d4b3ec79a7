#include "conerepair/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

namespace conerepair {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "SOLVED";
    case SolveStatus::Inaccurate: return "INACCURATE";
    case SolveStatus::MaxIters: return "MAX_ITERS";
    case SolveStatus::InfeasibleCert: return "INFEASIBLE_CERT";
    case SolveStatus::UnboundedCert: return "UNBOUNDED_CERT";
  }
  return "UNKNOWN";
}

Residuals residuals(const SparseMatrix& A, const Vector& b, const Vector& c,
                    const ConeDescriptor& cones, const Solution& candidate) {
  if (b.size() != A.rows() || c.size() != A.cols() ||
      cones.total_dim() != A.rows()) {
    throw std::invalid_argument("residuals: dimension mismatch in problem data");
  }
  if (candidate.x.size() != A.cols() || candidate.y.size() != A.rows() ||
      candidate.s.size() != A.rows()) {
    throw std::invalid_argument("residuals: candidate dimension mismatch");
  }
  Residuals r;
  r.primal = (A.multiply(candidate.x) + candidate.s - b).norm();
  r.dual = (A.multiply_transpose(candidate.y) + c).norm();
  r.gap = std::abs(c.dot(candidate.x) + b.dot(candidate.y));
  return r;
}

namespace {

constexpr double kOverRelax = 1.5;
constexpr Index kCheckInterval = 40;
// Anderson acceleration on the splitting fixed-point map. The plain step is
// averaged, so its residual never increases; an accelerated candidate is kept
// only when its residual does not exceed the current one, which keeps the
// scheme globally safe.
constexpr Index kAaMemory = 10;
constexpr Index kAaCooldown = 10;

struct Scaling {
  Vector d;        // row scaling, length m, uniform per cone block
  Vector e;        // column scaling, length n
  double beta = 1.0;   // b scaling
  double gamma = 1.0;  // c scaling
};

// Ruiz equilibration on the triplets of A. Rows inside one cone block share a
// common factor so that cone membership is preserved under scaling.
Scaling equilibrate(const SparseMatrix& A, const Vector& b, const Vector& c,
                    const ConeDescriptor& cones, bool enabled) {
  const Index m = A.rows();
  const Index n = A.cols();
  Scaling sc;
  sc.d = Vector::Ones(m);
  sc.e = Vector::Ones(n);
  if (!enabled) return sc;

  for (int pass = 0; pass < 10; ++pass) {
    Vector row_max = Vector::Zero(m);
    Vector col_max = Vector::Zero(n);
    for (const Triplet& t : A.entries()) {
      const double v = std::abs(sc.d[t.row] * t.value * sc.e[t.col]);
      row_max[t.row] = std::max(row_max[t.row], v);
      col_max[t.col] = std::max(col_max[t.col], v);
    }
    Index off = 0;
    for (const ConeBlock& blk : cones.blocks()) {
      const double blk_max = blk.dim > 0
          ? row_max.segment(off, blk.dim).maxCoeff() : 0.0;
      for (Index i = 0; i < blk.dim; ++i) {
        row_max[off + i] = blk_max;
      }
      off += blk.dim;
    }
    for (Index i = 0; i < m; ++i) {
      if (row_max[i] > 1e-12) sc.d[i] /= std::sqrt(row_max[i]);
    }
    for (Index j = 0; j < n; ++j) {
      if (col_max[j] > 1e-12) sc.e[j] /= std::sqrt(col_max[j]);
    }
  }

  // Balance the norms of b and c against the average scaled row/col norms.
  Vector col_norm2 = Vector::Zero(n);
  Vector row_norm2 = Vector::Zero(m);
  for (const Triplet& t : A.entries()) {
    const double v = sc.d[t.row] * t.value * sc.e[t.col];
    col_norm2[t.col] += v * v;
    row_norm2[t.row] += v * v;
  }
  const double mean_col = n > 0 ? col_norm2.cwiseSqrt().mean() : 1.0;
  const double mean_row = m > 0 ? row_norm2.cwiseSqrt().mean() : 1.0;
  const double nb = (sc.d.asDiagonal() * b).norm();
  const double nc = (sc.e.asDiagonal() * c).norm();
  if (nb > 1e-12 && mean_col > 1e-12) sc.beta = mean_col / nb;
  if (nc > 1e-12 && mean_row > 1e-12) sc.gamma = mean_row / nc;
  return sc;
}

}  // namespace

struct OperatorSplittingSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  Eigen::SparseMatrix<double> kkt;
  Index cached_n = -1;
  Index cached_m = -1;
  std::vector<Index> cached_pattern;  // (row, col) pairs of A, canonical order

  bool pattern_matches(const SparseMatrix& A) const {
    if (A.rows() != cached_m || A.cols() != cached_n) return false;
    if (cached_pattern.size() != 2 * A.entries().size()) return false;
    std::size_t i = 0;
    for (const Triplet& t : A.entries()) {
      if (cached_pattern[i] != t.row || cached_pattern[i + 1] != t.col) {
        return false;
      }
      i += 2;
    }
    return true;
  }

  void store_pattern(const SparseMatrix& A) {
    cached_m = A.rows();
    cached_n = A.cols();
    cached_pattern.clear();
    cached_pattern.reserve(2 * A.entries().size());
    for (const Triplet& t : A.entries()) {
      cached_pattern.push_back(t.row);
      cached_pattern.push_back(t.col);
    }
  }
};

OperatorSplittingSolver::OperatorSplittingSolver()
    : impl_(std::make_unique<Impl>()) {}
OperatorSplittingSolver::~OperatorSplittingSolver() = default;
OperatorSplittingSolver::OperatorSplittingSolver(
    OperatorSplittingSolver&&) noexcept = default;
OperatorSplittingSolver& OperatorSplittingSolver::operator=(
    OperatorSplittingSolver&&) noexcept = default;

Solution OperatorSplittingSolver::solve(const SparseMatrix& A, const Vector& b,
                                        const Vector& c,
                                        const ConeDescriptor& cones,
                                        const SolverSettings& settings,
                                        const Solution* warm) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (b.size() != m || c.size() != n) {
    throw std::invalid_argument("solve: b/c dimension mismatch");
  }
  if (cones.total_dim() != m) {
    throw std::invalid_argument("solve: cone dimension != m");
  }
  if (settings.eps_abs <= 0 || settings.eps_rel <= 0 ||
      settings.max_iters < 1) {
    throw std::invalid_argument("solve: invalid settings");
  }

  const Scaling sc =
      equilibrate(A, b, c, cones, settings.scaling_enabled);

  // Scaled data: Ah = D A E, bh = beta*D*b, ch = gamma*E*c.
  SparseMatrix Ah = A;
  {
    std::vector<Triplet> scaled = A.entries();
    for (Triplet& t : scaled) {
      t.value *= sc.d[t.row] * sc.e[t.col];
    }
    Ah = SparseMatrix(m, n, std::move(scaled));
  }
  const Vector bh = sc.beta * (sc.d.asDiagonal() * b);
  const Vector ch = sc.gamma * (sc.e.asDiagonal() * c);

  // Quasi-definite KKT matrix [[I, Ah^T], [Ah, -I]], factored once per
  // sparsity pattern (symbolic) and once per value change (numeric).
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.entries().size() + m + n);
    for (Index j = 0; j < n; ++j) trips.emplace_back(j, j, 1.0);
    for (Index i = 0; i < m; ++i) {
      trips.emplace_back(static_cast<int>(n + i), static_cast<int>(n + i),
                         -1.0);
    }
    for (const Triplet& t : Ah.entries()) {
      trips.emplace_back(static_cast<int>(n + t.row), static_cast<int>(t.col),
                         t.value);
      trips.emplace_back(static_cast<int>(t.col), static_cast<int>(n + t.row),
                         t.value);
    }
    Eigen::SparseMatrix<double> kkt(static_cast<int>(n + m),
                                    static_cast<int>(n + m));
    kkt.setFromTriplets(trips.begin(), trips.end());
    kkt.makeCompressed();
    if (!impl_->analyzed || !impl_->pattern_matches(A)) {
      impl_->ldlt.analyzePattern(kkt);
      impl_->store_pattern(A);
      impl_->analyzed = true;
    }
    impl_->ldlt.factorize(kkt);
    if (impl_->ldlt.info() != Eigen::Success) {
      throw NumericalError("quasi-definite factorization failed");
    }
  }

  // Solve M z = (w_x, w_y) with M = [[I, Ah^T], [-Ah, I]] via the symmetric
  // system [[I, Ah^T], [Ah, -I]] (z_x, q) = (w_x - Ah^T w_y, 0), z_y = q+w_y.
  auto solve_M = [&](const Vector& wx, const Vector& wy) {
    Vector rhs(n + m);
    rhs.head(n) = wx - Ah.multiply_transpose(wy);
    rhs.tail(m).setZero();
    Vector z = impl_->ldlt.solve(rhs);
    Vector zx = z.head(n);
    Vector zy = z.tail(m) + wy;
    return std::make_pair(std::move(zx), std::move(zy));
  };

  Vector h(n + m);
  h.head(n) = ch;
  h.tail(m) = bh;
  Vector hhat(n + m);
  {
    auto [zx, zy] = solve_M(ch, bh);
    hhat.head(n) = zx;
    hhat.tail(m) = zy;
  }
  const double h_dot_hhat = h.dot(hhat);

  // Homogeneous self-dual embedding iterate: u = (x, y, tau), v = (0, s,
  // kappa), packed as z = (ux, uy, utau, vs, vkappa).
  const Index nm = n + m;
  const Index N = n + 2 * m + 2;
  Vector z0 = Vector::Zero(N);
  z0[nm] = 1.0;      // tau
  z0[N - 1] = 1.0;   // kappa
  {
    Vector ux = Vector::Zero(n);
    Vector uy = Vector::Zero(m);
    double utau = 1.0;
    Vector vs = Vector::Zero(m);
    double vkappa = 1.0;
    if (warm != nullptr) {
      if (warm->x.size() != n || warm->y.size() != m || warm->s.size() != m) {
        throw std::invalid_argument("solve: warm-start dimension mismatch");
      }
      ux = sc.beta * warm->x.cwiseQuotient(sc.e);
      uy = sc.gamma * warm->y.cwiseQuotient(sc.d);
      vs = sc.beta * (sc.d.asDiagonal() * warm->s);
      vkappa = 0.0;
    }
    z0.head(n) = ux;
    z0.segment(n, m) = uy;
    z0[nm] = utau;
    z0.segment(nm + 1, m) = vs;
    z0[N - 1] = vkappa;
  }

  const double norm_b = b.norm();
  const double norm_c = c.norm();

  Solution sol;
  sol.status = SolveStatus::MaxIters;

  auto finalize_residuals = [&](Solution& out) {
    out.primal_residual = (A.multiply(out.x) + out.s - b).norm();
    out.dual_residual = (A.multiply_transpose(out.y) + c).norm();
    out.gap = std::abs(c.dot(out.x) + b.dot(out.y));
  };

  double best_score = std::numeric_limits<double>::infinity();
  Solution best;

  // One over-relaxed splitting step on the packed state.
  auto dr_step = [&](const Vector& zin) {
    const Vector ux = zin.head(n);
    const Vector uy = zin.segment(n, m);
    const double utau = zin[nm];
    const Vector vs = zin.segment(nm + 1, m);
    const double vkappa = zin[N - 1];

    const Vector wx = ux;
    const Vector wy = uy + vs;
    const double wtau = utau + vkappa;

    // utilde = (I + Q)^{-1} w via the cached factorization and a rank-one
    // correction (matrix inversion lemma on the tau row/column).
    auto [px, py] = solve_M(wx - wtau * ch, wy - wtau * bh);
    Vector p(n + m);
    p.head(n) = px;
    p.tail(m) = py;
    const double corr = h.dot(p) / (1.0 + h_dot_hhat);
    const Vector zt = p - corr * hhat;
    const double zttau = wtau + ch.dot(zt.head(n)) + bh.dot(zt.tail(m));

    // Over-relaxation, then u = Pi_C(r - v) with C = R^n x K* x R_+ and
    // v = v - r + u.
    const Vector rx = kOverRelax * zt.head(n) + (1.0 - kOverRelax) * ux;
    const Vector ry = kOverRelax * zt.tail(m) + (1.0 - kOverRelax) * uy;
    const double rtau = kOverRelax * zttau + (1.0 - kOverRelax) * utau;

    Vector out(N);
    out.head(n) = rx;  // free block, v component stays zero
    Vector ynew = ry - vs;
    project_dual_cone_inplace(ynew, cones);
    out.segment(nm + 1, m) = vs + ynew - ry;
    out.segment(n, m) = ynew;
    const double taunew = std::max(rtau - vkappa, 0.0);
    out[N - 1] = vkappa + taunew - rtau;
    out[nm] = taunew;
    return out;
  };

  Vector zcur = z0;
  Vector gmap = dr_step(zcur);
  Vector fres = gmap - zcur;

  Eigen::MatrixXd aa_df(N, kAaMemory), aa_dg(N, kAaMemory);
  Index aa_cols = 0;
  Index aa_head = 0;
  Index aa_cooldown = 0;
  Vector f_prev, g_prev;
  bool have_prev = false;

  for (Index iter = 0; iter <= settings.max_iters; ++iter) {
    const Vector ux = zcur.head(n);
    const Vector uy = zcur.segment(n, m);
    const double utau = zcur[nm];
    const Vector vs = zcur.segment(nm + 1, m);

    // Convergence / certificate checks on unscaled quantities.
    if (iter % kCheckInterval == 0 || iter == settings.max_iters) {
      if (!zcur.allFinite()) {
        throw NumericalError("non-finite iterates at iteration " +
                             std::to_string(iter));
      }
      if (utau > 1e-12) {
        Solution cand;
        cand.x = (sc.e.asDiagonal() * ux) / (utau * sc.beta);
        cand.y = (sc.d.asDiagonal() * uy) / (utau * sc.gamma);
        cand.s = vs.cwiseQuotient(sc.d) / (utau * sc.beta);
        cand.iters = iter;
        finalize_residuals(cand);
        const double ctx = c.dot(cand.x);
        const double bty = b.dot(cand.y);
        const double tol_p = settings.eps_abs + settings.eps_rel * norm_b;
        const double tol_d = settings.eps_abs + settings.eps_rel * norm_c;
        const double tol_g = settings.eps_abs +
                             settings.eps_rel * (std::abs(ctx) + std::abs(bty));
        const double score =
            cand.primal_residual / (1.0 + norm_b) +
            cand.dual_residual / (1.0 + norm_c) +
            cand.gap / (1.0 + std::abs(ctx) + std::abs(bty));
        if (score < best_score) {
          best_score = score;
          best = cand;
        }
        if (cand.primal_residual <= tol_p && cand.dual_residual <= tol_d &&
            cand.gap <= tol_g) {
          cand.status = SolveStatus::Solved;
          return cand;
        }
      }
      // Certificate detection. Directions are certificates of the original
      // (unscaled) problem after undoing the equilibration.
      {
        Vector xdir = sc.e.asDiagonal() * ux;
        Vector sdir = vs.cwiseQuotient(sc.d);
        const double ctx = c.dot(xdir);
        if (ctx < -1e-12) {
          const double unb = (A.multiply(xdir) + sdir).norm() *
                             std::max(norm_c, 1.0) / (-ctx);
          if (unb <= settings.eps_infeas) {
            sol.x = xdir / (-ctx);
            sol.s = sdir / (-ctx);
            sol.y = Vector::Zero(m);
            sol.status = SolveStatus::UnboundedCert;
            sol.iters = iter;
            finalize_residuals(sol);
            return sol;
          }
        }
        Vector ydir = sc.d.asDiagonal() * uy;
        const double bty = b.dot(ydir);
        if (bty < -1e-12) {
          const double inf = A.multiply_transpose(ydir).norm() *
                             std::max(norm_b, 1.0) / (-bty);
          if (inf <= settings.eps_infeas) {
            sol.y = ydir / (-bty);
            sol.x = Vector::Zero(n);
            sol.s = Vector::Zero(m);
            sol.status = SolveStatus::InfeasibleCert;
            sol.iters = iter;
            finalize_residuals(sol);
            return sol;
          }
        }
      }
      if (iter == settings.max_iters) break;
    }

    // Push the latest trajectory difference into the acceleration memory.
    if (have_prev) {
      aa_df.col(aa_head) = fres - f_prev;
      aa_dg.col(aa_head) = gmap - g_prev;
      aa_head = (aa_head + 1) % kAaMemory;
      aa_cols = std::min(aa_cols + 1, kAaMemory);
    }
    f_prev = fres;
    g_prev = gmap;
    have_prev = true;

    bool advanced = false;
    if (aa_cols > 0 && aa_cooldown == 0) {
      const auto F = aa_df.leftCols(aa_cols);
      Eigen::MatrixXd gram = F.transpose() * F;
      gram.diagonal().array() += 1e-12 * (1.0 + gram.trace());
      const Vector gammas = gram.ldlt().solve(F.transpose() * fres);
      if (gammas.allFinite()) {
        const Vector zcand = gmap - aa_dg.leftCols(aa_cols) * gammas;
        Vector gcand = dr_step(zcand);
        Vector fcand = gcand - zcand;
        // Safeguard: the plain step never increases the residual, so only a
        // candidate that also does not increase it is kept.
        if (fcand.allFinite() && fcand.norm() <= fres.norm()) {
          zcur = zcand;
          gmap = std::move(gcand);
          fres = std::move(fcand);
          advanced = true;
        } else {
          aa_cols = 0;
          have_prev = false;
          aa_cooldown = kAaCooldown;
        }
      }
    }
    if (!advanced) {
      zcur = gmap;
      gmap = dr_step(zcur);
      fres = gmap - zcur;
      if (aa_cooldown > 0) --aa_cooldown;
    }
  }

  // Out of iterations: polish and report the best candidate seen.
  if (best_score < std::numeric_limits<double>::infinity()) {
    sol = best;
    sol.iters = settings.max_iters;
    refine_candidate(A, b, c, cones, sol, 1500);
    const double ctx = c.dot(sol.x);
    const double bty = b.dot(sol.y);
    if (sol.primal_residual <= settings.eps_abs + settings.eps_rel * norm_b &&
        sol.dual_residual <= settings.eps_abs + settings.eps_rel * norm_c &&
        sol.gap <= settings.eps_abs +
                       settings.eps_rel * (std::abs(ctx) + std::abs(bty))) {
      sol.status = SolveStatus::Solved;
      return sol;
    }
    const double rel = sol.primal_residual / (1.0 + norm_b) +
                       sol.dual_residual / (1.0 + norm_c) +
                       sol.gap / (1.0 + std::abs(ctx) + std::abs(bty));
    sol.status = rel <= 1e-4 ? SolveStatus::Inaccurate : SolveStatus::MaxIters;
  } else {
    sol.x = Vector::Zero(n);
    sol.y = Vector::Zero(m);
    sol.s = Vector::Zero(m);
    sol.iters = settings.max_iters;
    finalize_residuals(sol);
  }
  return sol;
}

void refine_candidate(const SparseMatrix& A, const Vector& b, const Vector& c,
                      const ConeDescriptor& cones, Solution& sol, Index iters) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (sol.x.size() != n || sol.y.size() != m || sol.s.size() != m) {
    throw std::invalid_argument("refine_candidate: dimension mismatch");
  }

  // f(x, y, s) = 1/2 ||(Ax + s - b, A^T y + c, c^T x + b^T y)||^2, minimized
  // over the product R^n x K* x K by FISTA with function-value restarts.
  auto value = [&](const Vector& x, const Vector& y, const Vector& s) {
    const Vector rp = A.multiply(x) + s - b;
    const Vector rd = A.multiply_transpose(y) + c;
    const double rg = c.dot(x) + b.dot(y);
    return 0.5 * (rp.squaredNorm() + rd.squaredNorm() + rg * rg);
  };

  // Lipschitz constant of the gradient by power iteration on J^T J, where J
  // is the (constant) Jacobian of the residual map.
  double lip = 0.0;
  {
    Vector vx = Vector::Ones(n) / std::sqrt(static_cast<double>(n + 2 * m));
    Vector vy = Vector::Constant(m, 1.0) / std::sqrt(
        static_cast<double>(std::max<Index>(n + 2 * m, 1)));
    Vector vs = vy;
    for (int it = 0; it < 50; ++it) {
      const Vector rp = A.multiply(vx) + vs;
      const Vector rd = A.multiply_transpose(vy);
      const double rg = c.dot(vx) + b.dot(vy);
      Vector gx = A.multiply_transpose(rp) + rg * c;
      Vector gy = A.multiply(rd) + rg * b;
      Vector gs = rp;
      const double nrm = std::sqrt(gx.squaredNorm() + gy.squaredNorm() +
                                   gs.squaredNorm());
      if (nrm < 1e-300) return;
      lip = nrm;
      vx = gx / nrm;
      vy = gy / nrm;
      vs = gs / nrm;
    }
    lip *= 1.05;  // safety margin on the estimate
  }
  if (!(lip > 0.0)) return;
  const double step = 1.0 / lip;

  Vector x = sol.x;
  Vector y = project_dual_cone(sol.y, cones);
  Vector s = project_cone(sol.s, cones);
  Vector mx = x, my = y, ms = s;  // momentum point
  double f_cur = value(x, y, s);
  double f_best = f_cur;
  Vector bx = x, by = y, bs = s;
  double t_mom = 1.0;

  for (Index it = 0; it < iters; ++it) {
    const Vector rp = A.multiply(mx) + ms - b;
    const Vector rd = A.multiply_transpose(my) + c;
    const double rg = c.dot(mx) + b.dot(my);
    Vector nx = mx - step * (A.multiply_transpose(rp) + rg * c);
    Vector ny = my - step * (A.multiply(rd) + rg * b);
    Vector ns = ms - step * rp;
    project_dual_cone_inplace(ny, cones);
    project_cone_inplace(ns, cones);

    const double f_new = value(nx, ny, ns);
    if (f_new > f_cur) {
      // Restart the momentum from the last accepted point.
      t_mom = 1.0;
      mx = x;
      my = y;
      ms = s;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    const double mom = (t_mom - 1.0) / t_next;
    mx = nx + mom * (nx - x);
    my = ny + mom * (ny - y);
    ms = ns + mom * (ns - s);
    t_mom = t_next;
    x = nx;
    y = ny;
    s = ns;
    f_cur = f_new;
    if (f_cur < f_best) {
      f_best = f_cur;
      bx = x;
      by = y;
      bs = s;
    }
    if (f_best <= 1e-30) break;
  }

  sol.x = bx;
  sol.y = by;
  sol.s = bs;
  sol.primal_residual = (A.multiply(sol.x) + sol.s - b).norm();
  sol.dual_residual = (A.multiply_transpose(sol.y) + c).norm();
  sol.gap = std::abs(c.dot(sol.x) + b.dot(sol.y));
}

Solution solve(const SparseMatrix& A, const Vector& b, const Vector& c,
               const ConeDescriptor& cones, const SolverSettings& settings,
               const Solution* warm) {
  OperatorSplittingSolver solver;
  return solver.solve(A, b, c, cones, settings, warm);
}

}  // namespace conerepair
