#ifndef CONEREPAIR_TYPES_HPP_
#define CONEREPAIR_TYPES_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conerepair {

using Vector = Eigen::VectorXd;
using Index = std::int64_t;

// Thrown when iterates become non-finite or a factorization fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a gradient is requested at a point where the certificate value
// is numerically zero and the normalized residual direction is meaningless.
class DegenerateGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for regularizer compositions with no registered closed-form prox and
// for exact repair on problems whose constraint matrix depends on theta.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Sparse matrix in canonical triplet form: entries sorted column-major with
// duplicates summed. A compressed-column view is built on demand for the
// solver's factorization path.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index nrows, Index ncols) : nrows_(nrows), ncols_(ncols) {}
  SparseMatrix(Index nrows, Index ncols, std::vector<Triplet> entries);

  Index rows() const { return nrows_; }
  Index cols() const { return ncols_; }
  const std::vector<Triplet>& entries() const { return entries_; }

  void add_entry(Index row, Index col, double value);
  // Sorts column-major and sums duplicates. Idempotent.
  void canonicalize();

  Vector multiply(const Vector& x) const;            // A*x
  Vector multiply_transpose(const Vector& y) const;  // A^T*y

  // Compressed-column copy for factorization; entries must be canonical.
  Eigen::SparseMatrix<double> to_csc() const;

  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  // this += alpha * other (patterns are merged, result re-canonicalized)
  void axpy(double alpha, const SparseMatrix& other);

  bool operator==(const SparseMatrix& other) const;

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Triplet> entries_;
  bool canonical_ = true;
};

enum class ConeKind { Zero, NonNeg, Soc };

struct ConeBlock {
  ConeKind kind;
  Index dim;
};

// Ordered cone blocks partitioning the slack dimension m.
class ConeDescriptor {
 public:
  ConeDescriptor() = default;
  explicit ConeDescriptor(std::vector<ConeBlock> blocks);

  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  Index total_dim() const { return total_dim_; }

  void append(ConeKind kind, Index dim);

  bool operator==(const ConeDescriptor& other) const;

 private:
  std::vector<ConeBlock> blocks_;
  Index total_dim_ = 0;
};

// Cone program data (A, b, c) as an affine function of a parameter vector:
//   A(theta) = A0 + sum_i theta_i * A_i, likewise b and c.
struct ParamIncrement {
  SparseMatrix A;  // m x n, may be empty-pattern
  Vector b;        // length m
  Vector c;        // length n
};

class ParamConeProgram {
 public:
  ParamConeProgram() = default;
  ParamConeProgram(SparseMatrix A0, Vector b0, Vector c0, ConeDescriptor cones,
                   std::vector<ParamIncrement> increments);

  Index n() const { return A0_.cols(); }
  Index m() const { return A0_.rows(); }
  Index num_params() const { return static_cast<Index>(increments_.size()); }

  const SparseMatrix& A0() const { return A0_; }
  const Vector& b0() const { return b0_; }
  const Vector& c0() const { return c0_; }
  const ConeDescriptor& cones() const { return cones_; }
  const std::vector<ParamIncrement>& increments() const { return increments_; }

  // True when every A_i increment has an empty pattern, i.e. A is constant in
  // theta and the exact convex repair formulation applies.
  bool constant_A() const;

  struct Materialized {
    SparseMatrix A;
    Vector b;
    Vector c;
  };
  Materialized materialize(const Vector& theta) const;

 private:
  SparseMatrix A0_;
  Vector b0_;
  Vector c0_;
  ConeDescriptor cones_;
  std::vector<ParamIncrement> increments_;
};

}  // namespace conerepair

#endif  // CONEREPAIR_TYPES_HPP_
