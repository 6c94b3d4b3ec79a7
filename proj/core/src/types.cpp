#include "conerepair/types.hpp"

#include <algorithm>
#include <cmath>

namespace conerepair {

namespace {

void check_index(Index value, Index bound, const char* what) {
  if (value < 0 || value >= bound) {
    throw std::invalid_argument(std::string(what) + " index out of range: " +
                                std::to_string(value) + " not in [0, " +
                                std::to_string(bound) + ")");
  }
}

}  // namespace

SparseMatrix::SparseMatrix(Index nrows, Index ncols,
                           std::vector<Triplet> entries)
    : nrows_(nrows), ncols_(ncols), entries_(std::move(entries)),
      canonical_(false) {
  if (nrows < 0 || ncols < 0) {
    throw std::invalid_argument("negative matrix dimension");
  }
  for (const Triplet& t : entries_) {
    check_index(t.row, nrows_, "row");
    check_index(t.col, ncols_, "col");
  }
  canonicalize();
}

void SparseMatrix::add_entry(Index row, Index col, double value) {
  check_index(row, nrows_, "row");
  check_index(col, ncols_, "col");
  entries_.push_back({row, col, value});
  canonical_ = false;
}

void SparseMatrix::canonicalize() {
  if (canonical_) return;
  std::sort(entries_.begin(), entries_.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.col != b.col ? a.col < b.col : a.row < b.row;
            });
  std::vector<Triplet> merged;
  merged.reserve(entries_.size());
  for (const Triplet& t : entries_) {
    if (!merged.empty() && merged.back().row == t.row &&
        merged.back().col == t.col) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  entries_ = std::move(merged);
  canonical_ = true;
}

Vector SparseMatrix::multiply(const Vector& x) const {
  if (x.size() != ncols_) {
    throw std::invalid_argument("matvec: size " + std::to_string(x.size()) +
                                " != ncols " + std::to_string(ncols_));
  }
  Vector out = Vector::Zero(nrows_);
  for (const Triplet& t : entries_) {
    out[t.row] += t.value * x[t.col];
  }
  return out;
}

Vector SparseMatrix::multiply_transpose(const Vector& y) const {
  if (y.size() != nrows_) {
    throw std::invalid_argument("matvec^T: size " + std::to_string(y.size()) +
                                " != nrows " + std::to_string(nrows_));
  }
  Vector out = Vector::Zero(ncols_);
  for (const Triplet& t : entries_) {
    out[t.col] += t.value * y[t.row];
  }
  return out;
}

Eigen::SparseMatrix<double> SparseMatrix::to_csc() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries_.size());
  for (const Triplet& t : entries_) {
    trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col),
                       t.value);
  }
  Eigen::SparseMatrix<double> out(static_cast<int>(nrows_),
                                  static_cast<int>(ncols_));
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> flipped;
  flipped.reserve(entries_.size());
  for (const Triplet& t : entries_) {
    flipped.push_back({t.col, t.row, t.value});
  }
  return SparseMatrix(ncols_, nrows_, std::move(flipped));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nrows_, ncols_);
  for (const Triplet& t : entries_) {
    out(t.row, t.col) += t.value;
  }
  return out;
}

void SparseMatrix::axpy(double alpha, const SparseMatrix& other) {
  if (other.nrows_ != nrows_ || other.ncols_ != ncols_) {
    throw std::invalid_argument("axpy: dimension mismatch");
  }
  for (const Triplet& t : other.entries_) {
    entries_.push_back({t.row, t.col, alpha * t.value});
  }
  canonical_ = false;
  canonicalize();
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
  if (nrows_ != other.nrows_ || ncols_ != other.ncols_) return false;
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Triplet& a = entries_[i];
    const Triplet& b = other.entries_[i];
    if (a.row != b.row || a.col != b.col || a.value != b.value) return false;
  }
  return true;
}

ConeDescriptor::ConeDescriptor(std::vector<ConeBlock> blocks) {
  for (const ConeBlock& blk : blocks) {
    append(blk.kind, blk.dim);
  }
}

void ConeDescriptor::append(ConeKind kind, Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("cone block dim must be >= 1, got " +
                                std::to_string(dim));
  }
  blocks_.push_back({kind, dim});
  total_dim_ += dim;
}

bool ConeDescriptor::operator==(const ConeDescriptor& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].kind != other.blocks_[i].kind ||
        blocks_[i].dim != other.blocks_[i].dim) {
      return false;
    }
  }
  return true;
}

ParamConeProgram::ParamConeProgram(SparseMatrix A0, Vector b0, Vector c0,
                                   ConeDescriptor cones,
                                   std::vector<ParamIncrement> increments)
    : A0_(std::move(A0)), b0_(std::move(b0)), c0_(std::move(c0)),
      cones_(std::move(cones)), increments_(std::move(increments)) {
  const Index m = A0_.rows();
  const Index n = A0_.cols();
  if (b0_.size() != m || c0_.size() != n) {
    throw std::invalid_argument("base triple dimensions inconsistent");
  }
  if (cones_.total_dim() != m) {
    throw std::invalid_argument("cone dimension " +
                                std::to_string(cones_.total_dim()) +
                                " != m = " + std::to_string(m));
  }
  for (std::size_t i = 0; i < increments_.size(); ++i) {
    ParamIncrement& inc = increments_[i];
    if (inc.A.rows() == 0 && inc.A.cols() == 0) {
      inc.A = SparseMatrix(m, n);
    }
    if (inc.b.size() == 0) inc.b = Vector::Zero(m);
    if (inc.c.size() == 0) inc.c = Vector::Zero(n);
    if (inc.A.rows() != m || inc.A.cols() != n || inc.b.size() != m ||
        inc.c.size() != n) {
      throw std::invalid_argument("parameter increment " + std::to_string(i) +
                                  " dimension-inconsistent with base triple");
    }
  }
}

bool ParamConeProgram::constant_A() const {
  for (const ParamIncrement& inc : increments_) {
    if (!inc.A.entries().empty()) return false;
  }
  return true;
}

ParamConeProgram::Materialized ParamConeProgram::materialize(
    const Vector& theta) const {
  if (theta.size() != num_params()) {
    throw std::invalid_argument("theta length " + std::to_string(theta.size()) +
                                " != k = " + std::to_string(num_params()));
  }
  Materialized out{A0_, b0_, c0_};
  for (Index i = 0; i < num_params(); ++i) {
    const ParamIncrement& inc = increments_[i];
    // Increments with coefficient 0 are still merged so the sparsity pattern
    // is the union of patterns, independent of theta.
    out.A.axpy(theta[i], inc.A);
    out.b += theta[i] * inc.b;
    out.c += theta[i] * inc.c;
  }
  return out;
}

}  // namespace conerepair
