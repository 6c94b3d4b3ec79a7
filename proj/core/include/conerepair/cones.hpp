#ifndef CONEREPAIR_CONES_HPP_
#define CONEREPAIR_CONES_HPP_

#include "conerepair/types.hpp"

namespace conerepair {

// Euclidean projection onto K, blockwise:
//   Zero   -> 0
//   NonNeg -> max(v, 0)
//   Soc    -> (t, x) unchanged if ||x|| <= t, 0 if ||x|| <= -t,
//             else ((t + ||x||)/2) * (1, x/||x||)
Vector project_cone(const Vector& v, const ConeDescriptor& cones);

// Projection onto the dual cone K*: dual of Zero is free space (identity),
// NonNeg and Soc are self-dual.
Vector project_dual_cone(const Vector& v, const ConeDescriptor& cones);

// In-place blockwise projections on a pre-sized segment.
void project_cone_inplace(Eigen::Ref<Vector> v, const ConeDescriptor& cones);
void project_dual_cone_inplace(Eigen::Ref<Vector> v,
                               const ConeDescriptor& cones);

// Membership test with absolute tolerance (default matched to reporting
// tolerance 1e-8).
bool in_cone(const Vector& v, const ConeDescriptor& cones, double tol = 1e-8);
bool in_dual_cone(const Vector& v, const ConeDescriptor& cones,
                  double tol = 1e-8);

}  // namespace conerepair

#endif  // CONEREPAIR_CONES_HPP_
