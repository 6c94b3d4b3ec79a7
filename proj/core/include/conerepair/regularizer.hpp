#ifndef CONEREPAIR_REGULARIZER_HPP_
#define CONEREPAIR_REGULARIZER_HPP_

#include <limits>
#include <vector>

#include "conerepair/types.hpp"

namespace conerepair {

enum class AtomKind { ScaledL1, ScaledL2Sq, BoxIndicator };

// One atom of a sum-composed performance metric. Atoms act coordinatewise on
// a subset of theta:
//   ScaledL1:     sum_i w_i |theta_i - mu_i|
//   ScaledL2Sq:   sum_i w_i (theta_i - mu_i)^2
//   BoxIndicator: 0 if lower <= theta <= upper on the listed coordinates,
//                 +inf otherwise
struct RegAtom {
  AtomKind kind;
  std::vector<Index> coords;
  Vector weights;  // > 0 where applied (distance atoms)
  Vector centers;  // distance atoms
  Vector lower;    // box
  Vector upper;    // box
};

// Convex performance metric r(theta) as a sum of atoms, with closed-form
// proximal operator for separable compositions (at most one distance atom per
// coordinate, plus box constraints).
class Regularizer {
 public:
  Regularizer(Index dim, std::vector<RegAtom> atoms);

  Index dim() const { return dim_; }
  const std::vector<RegAtom>& atoms() const { return atoms_; }

  // Value of r; +inf exactly when a box bound is violated.
  double eval(const Vector& theta) const;

  // prox_{scale * r}(theta_tilde), scale > 0. Exact for separable trees:
  // soft-threshold / quadratic shrink toward the center, then clip to the box.
  Vector prox(double scale, const Vector& theta_tilde) const;

  // Convenience builders.
  static Regularizer scaled_l1(const Vector& weights, const Vector& center);
  static Regularizer l2_distance_sq(const Vector& center);
  // Relative-change metric sum_i |theta_i - theta0_i| / |theta0_i|; every
  // theta0 entry must be nonzero.
  static Regularizer relative_l1(const Vector& theta0);

 private:
  Index dim_;
  std::vector<RegAtom> atoms_;

  // Flattened per-coordinate view used by prox.
  struct CoordProx {
    bool has_l1 = false;
    bool has_l2 = false;
    double weight = 0.0;
    double center = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
  };
  std::vector<CoordProx> coord_;
};

}  // namespace conerepair

#endif  // CONEREPAIR_REGULARIZER_HPP_
