#pragma once

#include <memory>
#include <vector>

#include "lcprod/affine.hpp"
#include "lcprod/potential.hpp"
#include "lcprod/rng.hpp"

namespace lcprod {

// One factor mu_k of the product: the pushforward of exp(-V) under an
// injective affine embedding into R^dim. Immutable once built.
class BlockMeasure {
 public:
  Index dim() const { return embedding_.out_dim(); }
  const ConvexPotential& potential() const { return potential_; }
  const AffineMap& embedding() const { return embedding_; }
  const SupportDecomposition& support() const { return support_; }
  const VectorXd& mean() const { return mean_; }
  const MatrixXd& covariance() const { return covariance_; }

  // One draw; `out` must have length dim().
  void draw(Rng& rng, Eigen::Ref<VectorXd> out) const;

 private:
  BlockMeasure(ConvexPotential potential, AffineMap embedding,
               std::shared_ptr<const DomainSampler> sampler,
               const VectorXd& domain_mean, const MatrixXd& domain_cov);

  friend BlockMeasure make_block(ConvexPotential, AffineMap);
  friend BlockMeasure reflect(const BlockMeasure&);
  friend BlockMeasure embed_affine(const BlockMeasure&, const AffineMap&);

  ConvexPotential potential_;
  AffineMap embedding_;
  SupportDecomposition support_;
  VectorXd mean_;
  MatrixXd covariance_;
  // Kept in domain coordinates so reflection and re-embedding reuse it.
  VectorXd domain_mean_;
  MatrixXd domain_cov_;
  std::shared_ptr<const DomainSampler> sampler_;
};

BlockMeasure make_block(ConvexPotential potential, AffineMap embedding);
BlockMeasure make_block(ConvexPotential potential);
// Degenerate block concentrated at `at`.
BlockMeasure make_point_mass(const VectorXd& at);

std::vector<VectorXd> sample_block(const BlockMeasure& measure, Rng& rng,
                                   std::size_t count);

// Image under x -> -x.
BlockMeasure reflect(const BlockMeasure& measure);

// Pushforward under `map`; the composed embedding must stay injective.
BlockMeasure embed_affine(const BlockMeasure& measure, const AffineMap& map);

}  // namespace lcprod
