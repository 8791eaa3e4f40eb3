#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include "lcprod/block_rule.hpp"

namespace lcprod {

// mu = mu_1 x mu_2 x ... on R^inf = prod R^{m_k}. Blocks are produced lazily
// by the rule and memoized; copies share the memo.
class ProductMeasure {
 public:
  explicit ProductMeasure(std::shared_ptr<const BlockRule> rule);

  // 1-based.
  const BlockMeasure& block(std::size_t k) const;
  Index dim(std::size_t k) const { return rule_->dim(k); }
  // m~_n = m_1 + ... + m_n
  Index cum_dim(std::size_t n) const;

  double mean_pairing(std::size_t k, const VectorXd& a) const {
    return rule_->mean_pairing(k, a);
  }
  double variance_pairing(std::size_t k, const VectorXd& a) const {
    return rule_->variance_pairing(k, a);
  }

  // Image under x -> -x, block by block.
  ProductMeasure reflected() const;

  const std::shared_ptr<const BlockRule>& rule() const { return rule_; }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<std::size_t, std::unique_ptr<const BlockMeasure>> blocks;
  };

  std::shared_ptr<const BlockRule> rule_;
  std::shared_ptr<Memo> memo_;
};

ProductMeasure make_product(std::shared_ptr<const BlockRule> rule);
ProductMeasure make_product(std::string_view rule_text);

// Finite shadow of a point of R^inf: coordinates of blocks 1..depth(). Block
// k is drawn from its own stream seeded with derive_seed(seed, k), so
// extending a point never changes the blocks already drawn.
struct TruncatedPoint {
  std::vector<VectorXd> coords;
  std::uint64_t seed = 0;

  std::size_t depth() const { return coords.size(); }
  // 1-based block access.
  const VectorXd& block(std::size_t k) const { return coords[k - 1]; }
};

TruncatedPoint sample_point(const ProductMeasure& mu, std::size_t depth,
                            std::uint64_t seed);
void extend_point(const ProductMeasure& mu, TruncatedPoint& point,
                  std::size_t depth);

// Support of mu~_n in R^{m~_n}: direct sum of the block linear parts, offset
// the concatenated block offsets re-projected orthogonally to that sum.
SupportDecomposition prefix_support(const ProductMeasure& mu, std::size_t n);

}  // namespace lcprod
