#include "lcprod/product_measure.hpp"

#include <utility>

#include "lcprod/error.hpp"

namespace lcprod {

ProductMeasure::ProductMeasure(std::shared_ptr<const BlockRule> rule)
    : rule_(std::move(rule)), memo_(std::make_shared<Memo>()) {}

const BlockMeasure& ProductMeasure::block(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::ShapeError, "block indices start at 1");
  std::lock_guard lock(memo_->mutex);
  auto& slot = memo_->blocks[k];
  if (!slot) slot = std::make_unique<const BlockMeasure>(rule_->block(k));
  return *slot;
}

Index ProductMeasure::cum_dim(std::size_t n) const {
  Index total = 0;
  for (std::size_t k = 1; k <= n; ++k) total += rule_->dim(k);
  return total;
}

ProductMeasure ProductMeasure::reflected() const {
  return ProductMeasure(reflected_rule(rule_));
}

ProductMeasure make_product(std::shared_ptr<const BlockRule> rule) {
  return ProductMeasure(std::move(rule));
}

ProductMeasure make_product(std::string_view rule_text) {
  return ProductMeasure(parse_block_rule(rule_text));
}

TruncatedPoint sample_point(const ProductMeasure& mu, std::size_t depth,
                            std::uint64_t seed) {
  if (depth == 0) throw Error(ErrorCode::InsufficientDepth, "depth must be >= 1");
  TruncatedPoint point;
  point.seed = seed;
  extend_point(mu, point, depth);
  return point;
}

void extend_point(const ProductMeasure& mu, TruncatedPoint& point, std::size_t depth) {
  point.coords.reserve(depth);
  for (std::size_t k = point.depth() + 1; k <= depth; ++k) {
    const BlockMeasure& b = mu.block(k);
    Rng rng(derive_seed(point.seed, k));
    VectorXd x(b.dim());
    b.draw(rng, x);
    point.coords.push_back(std::move(x));
  }
}

SupportDecomposition prefix_support(const ProductMeasure& mu, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InsufficientDepth, "prefix length must be >= 1");
  Index ambient = 0;
  Index linear = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    ambient += mu.block(k).support().ambient_dim();
    linear += mu.block(k).support().linear_dim();
  }
  SupportDecomposition s;
  s.basis = MatrixXd::Zero(ambient, linear);
  s.offset = VectorXd::Zero(ambient);
  Index row = 0;
  Index col = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const SupportDecomposition& b = mu.block(k).support();
    s.basis.block(row, col, b.ambient_dim(), b.linear_dim()) = b.basis;
    s.offset.segment(row, b.ambient_dim()) = b.offset;
    row += b.ambient_dim();
    col += b.linear_dim();
  }
  s.offset -= s.basis * (s.basis.transpose() * s.offset);
  return s;
}

}  // namespace lcprod
