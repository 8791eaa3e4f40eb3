#include "lcprod/block_measure.hpp"

#include <utility>

#include "lcprod/error.hpp"

namespace lcprod {

BlockMeasure::BlockMeasure(ConvexPotential potential, AffineMap embedding,
                           std::shared_ptr<const DomainSampler> sampler,
                           const VectorXd& domain_mean, const MatrixXd& domain_cov)
    : potential_(std::move(potential)),
      embedding_(std::move(embedding)),
      support_(SupportDecomposition::of(embedding_)),
      mean_(embedding_(domain_mean)),
      covariance_(embedding_.matrix() * domain_cov * embedding_.matrix().transpose()),
      domain_mean_(domain_mean),
      domain_cov_(domain_cov),
      sampler_(std::move(sampler)) {}

void BlockMeasure::draw(Rng& rng, Eigen::Ref<VectorXd> out) const {
  const Index d = embedding_.in_dim();
  if (d == 0) {
    out = embedding_.shift();
    return;
  }
  VectorXd t(d);
  sampler_->draw(rng, t);
  out = embedding_.matrix() * t + embedding_.shift();
}

BlockMeasure make_block(ConvexPotential potential, AffineMap embedding) {
  if (embedding.in_dim() != potential.domain_dim()) {
    throw Error(ErrorCode::InvalidEmbedding,
                "embedding takes " + std::to_string(embedding.in_dim()) +
                    " inputs but the potential lives in dimension " +
                    std::to_string(potential.domain_dim()));
  }
  if (embedding.out_dim() == 0) {
    throw Error(ErrorCode::InvalidEmbedding, "block dimension must be positive");
  }
  if (!embedding.has_full_column_rank()) {
    throw Error(ErrorCode::InvalidEmbedding,
                "embedding matrix must have full column rank");
  }
  auto sampler = std::make_shared<const DomainSampler>(potential);
  const DomainMoments moments = domain_moments(potential);
  return BlockMeasure(std::move(potential), std::move(embedding), std::move(sampler),
                      moments.mean, moments.covariance);
}

BlockMeasure make_block(ConvexPotential potential) {
  const Index d = potential.domain_dim();
  return make_block(std::move(potential), AffineMap::identity(d));
}

BlockMeasure make_point_mass(const VectorXd& at) {
  return make_block(ConvexPotential::point_mass(), AffineMap(MatrixXd(at.size(), 0), at));
}

std::vector<VectorXd> sample_block(const BlockMeasure& measure, Rng& rng,
                                   std::size_t count) {
  std::vector<VectorXd> out(count, VectorXd(measure.dim()));
  for (auto& x : out) measure.draw(rng, x);
  return out;
}

BlockMeasure reflect(const BlockMeasure& measure) {
  return BlockMeasure(measure.potential_, measure.embedding_.negated(),
                      measure.sampler_, measure.domain_mean_, measure.domain_cov_);
}

BlockMeasure embed_affine(const BlockMeasure& measure, const AffineMap& map) {
  AffineMap composed = measure.embedding_.then(map);
  if (!composed.has_full_column_rank()) {
    throw Error(ErrorCode::InvalidEmbedding,
                "map collapses the block's support; composed embedding is "
                "rank deficient");
  }
  return BlockMeasure(measure.potential_, std::move(composed), measure.sampler_,
                      measure.domain_mean_, measure.domain_cov_);
}

}  // namespace lcprod
