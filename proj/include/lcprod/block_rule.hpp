#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lcprod/block_measure.hpp"

namespace lcprod {

struct Term;

// Generator of the factor measures mu_k, k = 1, 2, ... Implementations must be
// pure: block(k) always describes the same measure.
class BlockRule {
 public:
  virtual ~BlockRule() = default;

  // Throws Error(InvalidPotential, ..., k) when the rule is invalid at k.
  virtual BlockMeasure block(std::size_t k) const = 0;
  virtual Index dim(std::size_t k) const = 0;

  // <a, mean_k> and <a, Cov_k a>. Rule families override these with
  // closed forms so long tail sums never build block measures.
  virtual double mean_pairing(std::size_t k, const VectorXd& a) const;
  virtual double variance_pairing(std::size_t k, const VectorXd& a) const;

  virtual std::string describe() const = 0;
};

std::shared_ptr<const BlockRule> reflected_rule(std::shared_ptr<const BlockRule> rule);

// Explicit finite list of blocks for k = 1..blocks.size(), then `tail` for the
// rest (the tail sees the global block index).
std::shared_ptr<const BlockRule> explicit_rule(std::vector<BlockMeasure> blocks,
                                               std::shared_ptr<const BlockRule> tail);

// Rule text, e.g.
//   gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))
//   uniform(halfwidth=const(1))
//   tilt(slope=const(-1), box=[-1, 1])
//   laplace(center=const(0), rate=const(1))
//   point(at=const(1))
//   explicit(blocks=[block(potential=quadratic(center=[0], precision=[[1]]),
//                          matrix=[[1], [-1]], shift=[0, 1])],
//            tail=gaussian(mean=const(0), sd=geom(1, 0.5)))
// Scalar families take an optional dim=m for m iid coordinates per block.
std::shared_ptr<const BlockRule> parse_block_rule(std::string_view text);
std::shared_ptr<const BlockRule> block_rule_from_term(const Term& term);

// Potential terms used inside explicit blocks:
//   quadratic(center=[..], precision=[[..]]), linear_tilt(slope=[..], lo=[..],
//   hi=[..]), uniform_box(lo=[..], hi=[..]), scaled_abs(center=[..],
//   rates=[..])
ConvexPotential potential_from_term(const Term& term);
// block(potential=P[, matrix=[[..]], shift=[..]]) or point(at=[..]).
BlockMeasure block_from_term(const Term& term);

}  // namespace lcprod
