#include "conerepair/regularizer.hpp"

#include <algorithm>
#include <cmath>

namespace conerepair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_atom(const RegAtom& atom, Index dim) {
  const auto count = static_cast<Index>(atom.coords.size());
  for (Index c : atom.coords) {
    if (c < 0 || c >= dim) {
      throw std::invalid_argument("regularizer atom coordinate out of range");
    }
  }
  switch (atom.kind) {
    case AtomKind::ScaledL1:
    case AtomKind::ScaledL2Sq:
      if (atom.weights.size() != count || atom.centers.size() != count) {
        throw std::invalid_argument("distance atom weights/centers mismatch");
      }
      if (count > 0 && atom.weights.minCoeff() <= 0.0) {
        throw std::invalid_argument("distance atom weights must be positive");
      }
      break;
    case AtomKind::BoxIndicator:
      if (atom.lower.size() != count || atom.upper.size() != count) {
        throw std::invalid_argument("box atom bounds mismatch");
      }
      for (Index i = 0; i < count; ++i) {
        if (atom.lower[i] > atom.upper[i]) {
          throw std::invalid_argument("box atom has lower > upper");
        }
      }
      break;
  }
}

}  // namespace

Regularizer::Regularizer(Index dim, std::vector<RegAtom> atoms)
    : dim_(dim), atoms_(std::move(atoms)), coord_(dim) {
  for (const RegAtom& atom : atoms_) {
    validate_atom(atom, dim_);
    for (std::size_t i = 0; i < atom.coords.size(); ++i) {
      CoordProx& cp = coord_[atom.coords[i]];
      switch (atom.kind) {
        case AtomKind::ScaledL1:
        case AtomKind::ScaledL2Sq:
          if (cp.has_l1 || cp.has_l2) {
            throw UnsupportedError(
                "no closed-form prox registered for compositions with more "
                "than one distance atom per coordinate");
          }
          cp.has_l1 = atom.kind == AtomKind::ScaledL1;
          cp.has_l2 = atom.kind == AtomKind::ScaledL2Sq;
          cp.weight = atom.weights[static_cast<Index>(i)];
          cp.center = atom.centers[static_cast<Index>(i)];
          break;
        case AtomKind::BoxIndicator:
          cp.lower = std::max(cp.lower, atom.lower[static_cast<Index>(i)]);
          cp.upper = std::min(cp.upper, atom.upper[static_cast<Index>(i)]);
          if (cp.lower > cp.upper) {
            throw std::invalid_argument("box atoms have empty intersection");
          }
          break;
      }
    }
  }
}

double Regularizer::eval(const Vector& theta) const {
  if (theta.size() != dim_) {
    throw std::invalid_argument("regularizer eval: theta length mismatch");
  }
  double value = 0.0;
  for (const RegAtom& atom : atoms_) {
    for (std::size_t i = 0; i < atom.coords.size(); ++i) {
      const double t = theta[atom.coords[i]];
      const auto idx = static_cast<Index>(i);
      switch (atom.kind) {
        case AtomKind::ScaledL1:
          value += atom.weights[idx] * std::abs(t - atom.centers[idx]);
          break;
        case AtomKind::ScaledL2Sq: {
          const double d = t - atom.centers[idx];
          value += atom.weights[idx] * d * d;
          break;
        }
        case AtomKind::BoxIndicator:
          if (t < atom.lower[idx] || t > atom.upper[idx]) return kInf;
          break;
      }
    }
  }
  return value;
}

Vector Regularizer::prox(double scale, const Vector& theta_tilde) const {
  if (scale <= 0.0) {
    throw std::invalid_argument("prox scale must be positive");
  }
  if (theta_tilde.size() != dim_) {
    throw std::invalid_argument("prox: theta length mismatch");
  }
  Vector out(dim_);
  for (Index i = 0; i < dim_; ++i) {
    const CoordProx& cp = coord_[i];
    double t = theta_tilde[i];
    if (cp.has_l1) {
      // Soft-threshold toward the center by scale * weight.
      const double thr = scale * cp.weight;
      const double d = t - cp.center;
      t = cp.center + std::copysign(std::max(std::abs(d) - thr, 0.0), d);
    } else if (cp.has_l2) {
      // argmin_t scale*w*(t - mu)^2 + (t - v)^2 / 2
      t = (t + 2.0 * scale * cp.weight * cp.center) /
          (1.0 + 2.0 * scale * cp.weight);
    }
    // Clip after the distance step; in one dimension the prox of
    // (distance atom + interval indicator) is the clipped distance prox.
    out[i] = std::clamp(t, cp.lower, cp.upper);
  }
  return out;
}

Regularizer Regularizer::scaled_l1(const Vector& weights,
                                   const Vector& center) {
  RegAtom atom;
  atom.kind = AtomKind::ScaledL1;
  atom.coords.resize(weights.size());
  for (Index i = 0; i < weights.size(); ++i) atom.coords[i] = i;
  atom.weights = weights;
  atom.centers = center;
  return Regularizer(weights.size(), {std::move(atom)});
}

Regularizer Regularizer::l2_distance_sq(const Vector& center) {
  RegAtom atom;
  atom.kind = AtomKind::ScaledL2Sq;
  atom.coords.resize(center.size());
  for (Index i = 0; i < center.size(); ++i) atom.coords[i] = i;
  atom.weights = Vector::Ones(center.size());
  atom.centers = center;
  return Regularizer(center.size(), {std::move(atom)});
}

Regularizer Regularizer::relative_l1(const Vector& theta0) {
  for (Index i = 0; i < theta0.size(); ++i) {
    if (theta0[i] == 0.0) {
      throw std::invalid_argument(
          "relative_l1: theta0 entry " + std::to_string(i) +
          " is zero; supply absolute weights for this coordinate instead");
    }
  }
  return scaled_l1(theta0.cwiseAbs().cwiseInverse(), theta0);
}

}  // namespace conerepair
