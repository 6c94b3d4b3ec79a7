#include "conerepair/cones.hpp"

#include <cmath>

namespace conerepair {

namespace {

void check_length(const Vector& v, const ConeDescriptor& cones) {
  if (v.size() != cones.total_dim()) {
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " != cone dimension " +
                                std::to_string(cones.total_dim()));
  }
}

void project_soc(Eigen::Ref<Vector> seg) {
  const Index d = seg.size();
  const double t = seg[0];
  const double nx = d > 1 ? seg.tail(d - 1).norm() : 0.0;
  if (nx <= t) {
    return;
  }
  if (nx <= -t) {
    // Includes x = 0, t < 0: the limit of the scaling branch is 0.
    seg.setZero();
    return;
  }
  const double scale = (t + nx) / 2.0;
  seg.tail(d - 1) *= scale / nx;
  seg[0] = scale;
}

}  // namespace

void project_cone_inplace(Eigen::Ref<Vector> v, const ConeDescriptor& cones) {
  Index off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    auto seg = v.segment(off, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero:
        seg.setZero();
        break;
      case ConeKind::NonNeg:
        seg = seg.cwiseMax(0.0);
        break;
      case ConeKind::Soc:
        project_soc(seg);
        break;
    }
    off += blk.dim;
  }
}

void project_dual_cone_inplace(Eigen::Ref<Vector> v,
                               const ConeDescriptor& cones) {
  Index off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    auto seg = v.segment(off, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero:
        break;  // dual of {0} is free space
      case ConeKind::NonNeg:
        seg = seg.cwiseMax(0.0);
        break;
      case ConeKind::Soc:
        project_soc(seg);
        break;
    }
    off += blk.dim;
  }
}

Vector project_cone(const Vector& v, const ConeDescriptor& cones) {
  check_length(v, cones);
  Vector out = v;
  project_cone_inplace(out, cones);
  return out;
}

Vector project_dual_cone(const Vector& v, const ConeDescriptor& cones) {
  check_length(v, cones);
  Vector out = v;
  project_dual_cone_inplace(out, cones);
  return out;
}

bool in_cone(const Vector& v, const ConeDescriptor& cones, double tol) {
  check_length(v, cones);
  Index off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    auto seg = v.segment(off, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero:
        if (seg.cwiseAbs().maxCoeff() > tol) return false;
        break;
      case ConeKind::NonNeg:
        if (seg.minCoeff() < -tol) return false;
        break;
      case ConeKind::Soc:
        if (blk.dim > 1 && seg.tail(blk.dim - 1).norm() > seg[0] + tol) {
          return false;
        }
        if (blk.dim == 1 && seg[0] < -tol) return false;
        break;
    }
    off += blk.dim;
  }
  return true;
}

bool in_dual_cone(const Vector& v, const ConeDescriptor& cones, double tol) {
  check_length(v, cones);
  Index off = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    auto seg = v.segment(off, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero:
        break;
      case ConeKind::NonNeg:
        if (seg.minCoeff() < -tol) return false;
        break;
      case ConeKind::Soc:
        if (blk.dim > 1 && seg.tail(blk.dim - 1).norm() > seg[0] + tol) {
          return false;
        }
        if (blk.dim == 1 && seg[0] < -tol) return false;
        break;
    }
    off += blk.dim;
  }
  return true;
}

}  // namespace conerepair
