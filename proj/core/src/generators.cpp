#include "conerepair/generators.hpp"

#include <cmath>

namespace conerepair {

ProblemFile gen_spacecraft(const SpacecraftParams& params) {
  const double h = params.h;
  if (h <= 0 || params.T <= 0) {
    throw std::invalid_argument("gen_spacecraft: T and h must be positive");
  }
  const Index H = static_cast<Index>(std::llround(params.T / h)) + 1;
  if (H < 2) {
    throw std::invalid_argument("gen_spacecraft: need at least two stages");
  }
  if (params.theta0.size() != 4) {
    throw std::invalid_argument("gen_spacecraft: theta0 must have length 4");
  }

  // Variables z = (x[3H], v[3H], f[3H], sigma[H]); sigma_k is the epigraph of
  // ||f_k||, shared by the thrust-limit and fuel constraints.
  const Index n = 10 * H;
  auto xi = [H](Index k, Index d) { return 3 * (k - 1) + d; };
  auto vi = [H](Index k, Index d) { return 3 * H + 3 * (k - 1) + d; };
  auto fi = [H](Index k, Index d) { return 6 * H + 3 * (k - 1) + d; };
  auto si = [H](Index k) { return 9 * H + (k - 1); };

  const Index n_zero = 6 * (H - 1) + 12;
  const Index n_nonneg = H + 1;
  const Index m = n_zero + n_nonneg + 4 * H + 3 * H;

  SparseMatrix A0(m, n);
  Vector b0 = Vector::Zero(m);
  ParamIncrement inc_mass{SparseMatrix(m, n), Vector::Zero(m),
                          Vector::Zero(n)};
  ParamIncrement inc_fuel{SparseMatrix(m, n), Vector::Zero(m),
                          Vector::Zero(n)};
  ParamIncrement inc_thrust{SparseMatrix(m, n), Vector::Zero(m),
                            Vector::Zero(n)};
  ParamIncrement inc_gimbal{SparseMatrix(m, n), Vector::Zero(m),
                            Vector::Zero(n)};

  Index row = 0;
  // Position dynamics (trapezoidal): x_{k+1} = x_k + (h/2)(v_{k+1} + v_k).
  for (Index k = 1; k < H; ++k) {
    for (Index d = 0; d < 3; ++d) {
      A0.add_entry(row, xi(k + 1, d), 1.0);
      A0.add_entry(row, xi(k, d), -1.0);
      A0.add_entry(row, vi(k + 1, d), -h / 2.0);
      A0.add_entry(row, vi(k, d), -h / 2.0);
      ++row;
    }
  }
  // Velocity dynamics: m v_{k+1} = m v_k + h f_k - h g e3. The mass scales
  // the velocity difference and enters A affinely; the gravity impulse is a
  // constant right-hand side. (Scaling gravity by the mass as well would make
  // the landing impossible within the thrust limits of interest: the vertical
  // impulse m |dv| + m g T would exceed T * F_max for every mass allowed by
  // the metric.)
  for (Index k = 1; k < H; ++k) {
    for (Index d = 0; d < 3; ++d) {
      inc_mass.A.add_entry(row, vi(k + 1, d), 1.0);
      inc_mass.A.add_entry(row, vi(k, d), -1.0);
      A0.add_entry(row, fi(k, d), -h);
      if (d == 2) b0[row] = -h * params.g;
      ++row;
    }
  }
  // Boundary conditions.
  for (Index d = 0; d < 3; ++d) {
    A0.add_entry(row, xi(1, d), 1.0);
    b0[row] = params.x_init[d];
    ++row;
  }
  for (Index d = 0; d < 3; ++d) {
    A0.add_entry(row, vi(1, d), 1.0);
    b0[row] = params.v_init[d];
    ++row;
  }
  for (Index d = 0; d < 3; ++d) {
    A0.add_entry(row, xi(H, d), 1.0);
    ++row;
  }
  for (Index d = 0; d < 3; ++d) {
    A0.add_entry(row, vi(H, d), 1.0);
    ++row;
  }

  // Thrust limit per stage: sigma_k <= F_max.
  for (Index k = 1; k <= H; ++k) {
    A0.add_entry(row, si(k), 1.0);
    inc_thrust.b[row] = 1.0;
    ++row;
  }
  // Fuel budget: sum_k h*gamma*sigma_k <= M_fuel.
  for (Index k = 1; k <= H; ++k) {
    A0.add_entry(row, si(k), h * params.gamma);
  }
  inc_fuel.b[row] = 1.0;
  ++row;

  // ||f_k|| <= sigma_k, slack (sigma_k, f_k).
  for (Index k = 1; k <= H; ++k) {
    A0.add_entry(row, si(k), -1.0);
    ++row;
    for (Index d = 0; d < 3; ++d) {
      A0.add_entry(row, fi(k, d), -1.0);
      ++row;
    }
  }
  // Gimbal: alpha ||(f_k1, f_k2)|| <= f_k3, slack (f_k3, alpha f_k1,
  // alpha f_k2); alpha enters A.
  for (Index k = 1; k <= H; ++k) {
    A0.add_entry(row, fi(k, 2), -1.0);
    ++row;
    for (Index d = 0; d < 2; ++d) {
      inc_gimbal.A.add_entry(row, fi(k, d), -1.0);
      ++row;
    }
  }
  if (row != m) {
    throw std::logic_error("gen_spacecraft: row count mismatch");
  }

  ConeDescriptor cones;
  cones.append(ConeKind::Zero, n_zero);
  cones.append(ConeKind::NonNeg, n_nonneg);
  for (Index k = 1; k <= H; ++k) cones.append(ConeKind::Soc, 4);
  for (Index k = 1; k <= H; ++k) cones.append(ConeKind::Soc, 3);

  A0.canonicalize();
  inc_mass.A.canonicalize();
  inc_gimbal.A.canonicalize();

  ProblemFile out;
  out.pcp = ParamConeProgram(
      std::move(A0), std::move(b0), Vector::Zero(n), std::move(cones),
      {std::move(inc_mass), std::move(inc_fuel), std::move(inc_thrust),
       std::move(inc_gimbal)});
  out.theta0 = params.theta0;

  // Relative change in each parameter, with the mass bounded below.
  RegAtom dist;
  dist.kind = AtomKind::ScaledL1;
  dist.coords = {0, 1, 2, 3};
  dist.weights = params.theta0.cwiseAbs().cwiseInverse();
  dist.centers = params.theta0;
  RegAtom box;
  box.kind = AtomKind::BoxIndicator;
  box.coords = {0};
  box.lower = Vector::Constant(1, params.mass_lower_bound);
  box.upper = Vector::Constant(1, std::numeric_limits<double>::infinity());
  out.regularizer = Regularizer(4, {std::move(dist), std::move(box)});
  return out;
}

ProblemFile gen_arbitrage(const Eigen::MatrixXd& R0) {
  const Index outcomes = R0.rows();
  const Index wagers = R0.cols();
  if (outcomes < 1 || wagers < 1) {
    throw std::invalid_argument("gen_arbitrage: empty return matrix");
  }
  for (Index i = 0; i < outcomes; ++i) {
    for (Index j = 0; j < wagers; ++j) {
      if (R0(i, j) == 0.0) {
        throw std::invalid_argument(
            "gen_arbitrage: R0 entry (" + std::to_string(i) + ", " +
            std::to_string(j) +
            ") is zero; the relative-change metric divides by it");
      }
    }
  }

  // Standard form of: minimize -1^T R w over R w >= 0, w >= 0, with
  // theta = vec(R) row-major entering A and c affinely.
  const Index n = wagers;
  const Index m = outcomes + wagers;
  const Index k = outcomes * wagers;

  SparseMatrix A0(m, n);
  for (Index j = 0; j < wagers; ++j) {
    A0.add_entry(outcomes + j, j, -1.0);  // slack = w_j >= 0
  }
  A0.canonicalize();

  std::vector<ParamIncrement> increments;
  increments.reserve(k);
  for (Index i = 0; i < outcomes; ++i) {
    for (Index j = 0; j < wagers; ++j) {
      ParamIncrement inc{SparseMatrix(m, n), Vector::Zero(m), Vector::Zero(n)};
      inc.A.add_entry(i, j, -1.0);  // slack row i gains R_ij w_j
      inc.c[j] = -1.0;              // objective -sum_i R_ij per wager
      increments.push_back(std::move(inc));
    }
  }

  ConeDescriptor cones;
  cones.append(ConeKind::NonNeg, m);

  ProblemFile out;
  out.pcp = ParamConeProgram(std::move(A0), Vector::Zero(m), Vector::Zero(n),
                             std::move(cones), std::move(increments));
  out.theta0 = Vector(k);
  for (Index i = 0; i < outcomes; ++i) {
    for (Index j = 0; j < wagers; ++j) {
      out.theta0[i * wagers + j] = R0(i, j);
    }
  }
  out.regularizer = Regularizer::relative_l1(out.theta0);
  return out;
}

Eigen::MatrixXd arbitrage_example_matrix() {
  Eigen::MatrixXd R0(5, 3);
  R0 << 0.05, 1.74, -0.88,
        0.08, 0.45, -1.02,
        0.18, -0.31, 1.29,
        0.9, -1.17, 0.27,
        -0.93, 0.17, 2.39;
  return R0;
}

}  // namespace conerepair
