#pragma once

#include <Eigen/Dense>

namespace lcprod {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// x -> matrix * x + shift, from R^in_dim() into R^out_dim().
class AffineMap {
 public:
  AffineMap(MatrixXd matrix, VectorXd shift);

  static AffineMap identity(Index n);

  const MatrixXd& matrix() const { return matrix_; }
  const VectorXd& shift() const { return shift_; }
  Index in_dim() const { return matrix_.cols(); }
  Index out_dim() const { return matrix_.rows(); }

  VectorXd operator()(const VectorXd& x) const { return matrix_ * x + shift_; }

  bool has_full_column_rank() const;
  // outer(this(x))
  AffineMap then(const AffineMap& outer) const;
  // x -> -(matrix * x + shift)
  AffineMap negated() const;

 private:
  MatrixXd matrix_;
  VectorXd shift_;
};

// Affine subspace H = L + h with an orthonormal basis for L and the unique
// offset h orthogonal to L. H contains the origin exactly when h = 0.
struct SupportDecomposition {
  MatrixXd basis;  // ambient_dim x dim L, orthonormal columns
  VectorXd offset;

  static constexpr double kTolerance = 1e-10;

  // Canonical decomposition of span(spanning) + point; spanning must have
  // full column rank.
  static SupportDecomposition canonical(const MatrixXd& spanning,
                                        const VectorXd& point);
  // Image of an injective affine map.
  static SupportDecomposition of(const AffineMap& map);

  Index ambient_dim() const { return offset.size(); }
  Index linear_dim() const { return basis.cols(); }
  bool passes_through_origin(double tol = kTolerance) const {
    return offset.norm() <= tol;
  }
  VectorXd project(const VectorXd& x) const;
  double distance(const VectorXd& x) const { return (x - project(x)).norm(); }
};

}  // namespace lcprod
