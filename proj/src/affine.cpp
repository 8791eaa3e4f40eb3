#include "lcprod/affine.hpp"

#include <utility>

#include "lcprod/error.hpp"

namespace lcprod {

namespace {

Index numerical_rank(const MatrixXd& m) {
  if (m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank();
}

}  // namespace

AffineMap::AffineMap(MatrixXd matrix, VectorXd shift)
    : matrix_(std::move(matrix)), shift_(std::move(shift)) {
  if (matrix_.rows() != shift_.size()) {
    throw Error(ErrorCode::InvalidEmbedding,
                "affine map shift length must equal the matrix row count");
  }
  if (!matrix_.allFinite() || !shift_.allFinite()) {
    throw Error(ErrorCode::InvalidEmbedding, "affine map must be finite");
  }
}

AffineMap AffineMap::identity(Index n) {
  return AffineMap(MatrixXd::Identity(n, n), VectorXd::Zero(n));
}

bool AffineMap::has_full_column_rank() const {
  return matrix_.cols() <= matrix_.rows() &&
         numerical_rank(matrix_) == matrix_.cols();
}

AffineMap AffineMap::then(const AffineMap& outer) const {
  if (outer.in_dim() != out_dim()) {
    throw Error(ErrorCode::InvalidEmbedding,
                "cannot compose: map input dimension " +
                    std::to_string(outer.in_dim()) + " != measure dimension " +
                    std::to_string(out_dim()));
  }
  return AffineMap(outer.matrix_ * matrix_, outer.matrix_ * shift_ + outer.shift_);
}

AffineMap AffineMap::negated() const { return AffineMap(-matrix_, -shift_); }

SupportDecomposition SupportDecomposition::canonical(const MatrixXd& spanning,
                                                     const VectorXd& point) {
  const Index n = point.size();
  const Index r = spanning.cols();
  SupportDecomposition s;
  if (r == 0) {
    s.basis = MatrixXd(n, 0);
  } else {
    Eigen::HouseholderQR<MatrixXd> qr(spanning);
    s.basis = qr.householderQ() * MatrixXd::Identity(n, r);
  }
  s.offset = point - s.basis * (s.basis.transpose() * point);
  return s;
}

SupportDecomposition SupportDecomposition::of(const AffineMap& map) {
  return canonical(map.matrix(), map.shift());
}

VectorXd SupportDecomposition::project(const VectorXd& x) const {
  const VectorXd rel = x - offset;
  return offset + basis * (basis.transpose() * rel);
}

}  // namespace lcprod
