#include "lcprod/block_rule.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "lcprod/error.hpp"
#include "lcprod/rule_syntax.hpp"
#include "lcprod/sequence.hpp"

namespace lcprod {

double BlockRule::mean_pairing(std::size_t k, const VectorXd& a) const {
  return a.dot(block(k).mean());
}

double BlockRule::variance_pairing(std::size_t k, const VectorXd& a) const {
  return a.dot(block(k).covariance() * a);
}

namespace {

[[noreturn]] void invalid_at(std::size_t k, const std::string& what) {
  throw Error(ErrorCode::InvalidPotential,
              "block " + std::to_string(k) + ": " + what, k);
}

template <class F>
BlockMeasure build_at(std::size_t k, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.block()) throw;
    throw Error(e.code(), "block " + std::to_string(k) + ": " + e.what(), k);
  }
}

enum class Sign { Any, NonNegative, Positive };

// Pairings only need a finite non-negative scale (deep geometric scales may
// underflow to 0); building the block itself needs a positive one.
double checked(std::size_t k, double value, const char* what, Sign sign) {
  const bool ok = std::isfinite(value) && (sign == Sign::Any ||
                                           (sign == Sign::NonNegative && value >= 0) ||
                                           (sign == Sign::Positive && value > 0));
  if (!ok) {
    const char* req = sign == Sign::Any           ? " must be finite"
                      : sign == Sign::NonNegative ? " must be finite and non-negative"
                                                  : " must be finite and positive";
    invalid_at(k, std::string(what) + " = " + std::to_string(value) + req);
  }
  return value;
}

// Families whose blocks are m iid copies of a one-dimensional factor.
class ScalarFamilyRule : public BlockRule {
 public:
  ScalarFamilyRule(Index dim, std::string text) : dim_(dim), text_(std::move(text)) {}

  Index dim(std::size_t) const override { return dim_; }
  std::string describe() const override { return text_; }

  double mean_pairing(std::size_t k, const VectorXd& a) const override {
    return coordinate_moments(k).first * a.sum();
  }
  double variance_pairing(std::size_t k, const VectorXd& a) const override {
    return coordinate_moments(k).second * a.squaredNorm();
  }

 protected:
  virtual std::pair<double, double> coordinate_moments(std::size_t k) const = 0;

  Index dim_;
  std::string text_;
};

class GaussianRule final : public ScalarFamilyRule {
 public:
  GaussianRule(Sequence mean, Sequence sd, Index dim, std::string text)
      : ScalarFamilyRule(dim, std::move(text)), mean_(mean), sd_(sd) {}

  BlockMeasure block(std::size_t k) const override {
    checked(k, sd_(k), "sd", Sign::Positive);
    const auto [m, var] = coordinate_moments(k);
    return build_at(k, [&, m = m, var = var] {
      return make_block(ConvexPotential::quadratic(
          VectorXd::Constant(dim_, m), MatrixXd::Identity(dim_, dim_) / var));
    });
  }

 protected:
  std::pair<double, double> coordinate_moments(std::size_t k) const override {
    const double sd = checked(k, sd_(k), "sd", Sign::NonNegative);
    return {checked(k, mean_(k), "mean", Sign::Any), sd * sd};
  }

 private:
  Sequence mean_;
  Sequence sd_;
};

class UniformRule final : public ScalarFamilyRule {
 public:
  UniformRule(Sequence halfwidth, Sequence center, Index dim, std::string text)
      : ScalarFamilyRule(dim, std::move(text)), halfwidth_(halfwidth), center_(center) {}

  BlockMeasure block(std::size_t k) const override {
    const double w = checked(k, halfwidth_(k), "halfwidth", Sign::Positive);
    const double c = checked(k, center_(k), "center", Sign::Any);
    return build_at(k, [&] {
      return make_block(ConvexPotential::uniform(
          Box{VectorXd::Constant(dim_, c - w), VectorXd::Constant(dim_, c + w)}));
    });
  }

 protected:
  std::pair<double, double> coordinate_moments(std::size_t k) const override {
    const double w = checked(k, halfwidth_(k), "halfwidth", Sign::NonNegative);
    return {checked(k, center_(k), "center", Sign::Any), w * w / 3.0};
  }

 private:
  Sequence halfwidth_;
  Sequence center_;
};

class TiltRule final : public ScalarFamilyRule {
 public:
  TiltRule(Sequence slope, double lo, double hi, Index dim, std::string text)
      : ScalarFamilyRule(dim, std::move(text)), slope_(slope), lo_(lo), hi_(hi) {}

  BlockMeasure block(std::size_t k) const override {
    const double s = checked(k, slope_(k), "slope", Sign::Any);
    return build_at(k, [&] { return make_block(potential(s)); });
  }

 protected:
  // Quadrature moments, memoized by slope value.
  std::pair<double, double> coordinate_moments(std::size_t k) const override {
    const double s = checked(k, slope_(k), "slope", Sign::Any);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(s);
    if (it == cache_.end()) {
      const ConvexPotential p = ConvexPotential::linear_tilt(
          VectorXd::Constant(1, s), Box{VectorXd::Constant(1, lo_), VectorXd::Constant(1, hi_)});
      const DomainMoments m = domain_moments(p);
      it = cache_.emplace(s, std::pair{m.mean[0], m.covariance(0, 0)}).first;
    }
    return it->second;
  }

 private:
  ConvexPotential potential(double s) const {
    return ConvexPotential::linear_tilt(
        VectorXd::Constant(dim_, s),
        Box{VectorXd::Constant(dim_, lo_), VectorXd::Constant(dim_, hi_)});
  }

  Sequence slope_;
  double lo_;
  double hi_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::pair<double, double>> cache_;
};

class LaplaceRule final : public ScalarFamilyRule {
 public:
  LaplaceRule(Sequence center, Sequence rate, Index dim, std::string text)
      : ScalarFamilyRule(dim, std::move(text)), center_(center), rate_(rate) {}

  BlockMeasure block(std::size_t k) const override {
    const double c = checked(k, center_(k), "center", Sign::Any);
    const double r = checked(k, rate_(k), "rate", Sign::Positive);
    return build_at(k, [&] {
      return make_block(ConvexPotential::scaled_abs(VectorXd::Constant(dim_, c),
                                                    VectorXd::Constant(dim_, r)));
    });
  }

 protected:
  std::pair<double, double> coordinate_moments(std::size_t k) const override {
    const double r = checked(k, rate_(k), "rate", Sign::Positive);
    return {checked(k, center_(k), "center", Sign::Any), 2.0 / (r * r)};
  }

 private:
  Sequence center_;
  Sequence rate_;
};

class PointRule final : public ScalarFamilyRule {
 public:
  PointRule(Sequence at, Index dim, std::string text)
      : ScalarFamilyRule(dim, std::move(text)), at_(at) {}

  BlockMeasure block(std::size_t k) const override {
    const double h = checked(k, at_(k), "at", Sign::Any);
    return make_point_mass(VectorXd::Constant(dim_, h));
  }

 protected:
  std::pair<double, double> coordinate_moments(std::size_t k) const override {
    return {checked(k, at_(k), "at", Sign::Any), 0.0};
  }

 private:
  Sequence at_;
};

class ExplicitRule final : public BlockRule {
 public:
  ExplicitRule(std::vector<BlockMeasure> blocks, std::shared_ptr<const BlockRule> tail,
               std::string text)
      : blocks_(std::move(blocks)), tail_(std::move(tail)), text_(std::move(text)) {}

  BlockMeasure block(std::size_t k) const override {
    return k <= blocks_.size() ? blocks_[k - 1] : tail_->block(k);
  }
  Index dim(std::size_t k) const override {
    return k <= blocks_.size() ? blocks_[k - 1].dim() : tail_->dim(k);
  }
  double mean_pairing(std::size_t k, const VectorXd& a) const override {
    return k <= blocks_.size() ? a.dot(blocks_[k - 1].mean()) : tail_->mean_pairing(k, a);
  }
  double variance_pairing(std::size_t k, const VectorXd& a) const override {
    return k <= blocks_.size() ? a.dot(blocks_[k - 1].covariance() * a)
                               : tail_->variance_pairing(k, a);
  }
  std::string describe() const override { return text_; }

 private:
  std::vector<BlockMeasure> blocks_;
  std::shared_ptr<const BlockRule> tail_;
  std::string text_;
};

class ReflectedRule final : public BlockRule {
 public:
  explicit ReflectedRule(std::shared_ptr<const BlockRule> inner) : inner_(std::move(inner)) {}

  BlockMeasure block(std::size_t k) const override { return reflect(inner_->block(k)); }
  Index dim(std::size_t k) const override { return inner_->dim(k); }
  double mean_pairing(std::size_t k, const VectorXd& a) const override {
    return -inner_->mean_pairing(k, a);
  }
  double variance_pairing(std::size_t k, const VectorXd& a) const override {
    return inner_->variance_pairing(k, a);
  }
  std::string describe() const override { return "reflected(" + inner_->describe() + ")"; }

 private:
  std::shared_ptr<const BlockRule> inner_;
};

Index dim_arg(const Term& t) {
  const Term* d = t.arg("dim");
  if (!d) return 1;
  const std::size_t m = d->as_count();
  if (m == 0) throw Error(ErrorCode::ParseError, "dim must be >= 1");
  return static_cast<Index>(m);
}

Sequence seq_arg(const Term& t, std::string_view key, std::size_t index) {
  return Sequence::from_term(t.require(key, index));
}

Box box_from(const Term& t, std::string_view lo_key, std::string_view hi_key) {
  return Box{t.require(lo_key).as_vector(), t.require(hi_key).as_vector()};
}

}  // namespace

std::shared_ptr<const BlockRule> reflected_rule(std::shared_ptr<const BlockRule> rule) {
  return std::make_shared<ReflectedRule>(std::move(rule));
}

std::shared_ptr<const BlockRule> explicit_rule(std::vector<BlockMeasure> blocks,
                                               std::shared_ptr<const BlockRule> tail) {
  std::string text = "explicit(" + std::to_string(blocks.size()) +
                     " blocks, tail=" + tail->describe() + ")";
  return std::make_shared<ExplicitRule>(std::move(blocks), std::move(tail), std::move(text));
}

ConvexPotential potential_from_term(const Term& t) {
  if (t.is_call("quadratic")) {
    t.expect_args({"center", "precision"}, 0);
    const VectorXd center = t.require("center").as_vector();
    const Term& p = t.require("precision");
    MatrixXd precision = p.kind == Term::Kind::Number
                             ? MatrixXd::Identity(center.size(), center.size()) * p.number
                             : p.as_matrix();
    return ConvexPotential::quadratic(center, std::move(precision));
  }
  if (t.is_call("linear_tilt")) {
    t.expect_args({"slope", "lo", "hi"}, 0);
    return ConvexPotential::linear_tilt(t.require("slope").as_vector(), box_from(t, "lo", "hi"));
  }
  if (t.is_call("uniform_box")) {
    t.expect_args({"lo", "hi"}, 0);
    return ConvexPotential::uniform(box_from(t, "lo", "hi"));
  }
  if (t.is_call("scaled_abs")) {
    t.expect_args({"center", "rates"}, 0);
    return ConvexPotential::scaled_abs(t.require("center").as_vector(),
                                       t.require("rates").as_vector());
  }
  throw Error(ErrorCode::ParseError,
              "unknown potential '" + t.to_string() + "' at offset " + std::to_string(t.offset));
}

BlockMeasure block_from_term(const Term& t) {
  if (t.is_call("point")) {
    t.expect_args({"at"}, 1);
    return make_point_mass(t.require("at", 0).as_vector());
  }
  if (!t.is_call("block")) return make_block(potential_from_term(t));
  t.expect_args({"potential", "matrix", "shift"}, 0);
  ConvexPotential potential = potential_from_term(t.require("potential"));
  const Index d = potential.domain_dim();
  const Term* matrix = t.arg("matrix");
  const Term* shift = t.arg("shift");
  if (!matrix && !shift) return make_block(std::move(potential));
  MatrixXd m = matrix ? matrix->as_matrix(d) : MatrixXd::Identity(d, d);
  VectorXd s = shift ? shift->as_vector() : VectorXd::Zero(m.rows());
  return make_block(std::move(potential), AffineMap(std::move(m), std::move(s)));
}

std::shared_ptr<const BlockRule> block_rule_from_term(const Term& t) {
  const std::string text = t.to_string();
  if (t.is_call("gaussian")) {
    t.expect_args({"mean", "sd", "dim"}, 0);
    return std::make_shared<GaussianRule>(seq_arg(t, "mean", 0), seq_arg(t, "sd", 1),
                                          dim_arg(t), text);
  }
  if (t.is_call("uniform")) {
    t.expect_args({"halfwidth", "center", "dim"}, 0);
    const Term* c = t.arg("center");
    return std::make_shared<UniformRule>(seq_arg(t, "halfwidth", 0),
                                         c ? Sequence::from_term(*c) : Sequence::constant(0.0),
                                         dim_arg(t), text);
  }
  if (t.is_call("tilt")) {
    t.expect_args({"slope", "box", "dim"}, 0);
    const VectorXd box = t.require("box").as_vector();
    if (box.size() != 2 || !(box[0] < box[1])) {
      throw Error(ErrorCode::ParseError, "tilt box must be [lo, hi] with lo < hi");
    }
    return std::make_shared<TiltRule>(seq_arg(t, "slope", 0), box[0], box[1], dim_arg(t), text);
  }
  if (t.is_call("laplace") || t.is_call("scaled_abs")) {
    t.expect_args({"center", "rate", "dim"}, 0);
    return std::make_shared<LaplaceRule>(seq_arg(t, "center", 0), seq_arg(t, "rate", 1),
                                         dim_arg(t), text);
  }
  if (t.is_call("point")) {
    t.expect_args({"at", "dim"}, 0);
    return std::make_shared<PointRule>(seq_arg(t, "at", 0), dim_arg(t), text);
  }
  if (t.is_call("explicit")) {
    t.expect_args({"blocks", "tail"}, 0);
    const Term& list = t.require("blocks");
    if (list.kind != Term::Kind::List) {
      throw Error(ErrorCode::ParseError, "explicit blocks must be a list");
    }
    const Term* tail = t.arg("tail");
    if (!tail) {
      throw Error(ErrorCode::ParseError, "explicit block list needs a tail rule");
    }
    std::vector<BlockMeasure> blocks;
    for (std::size_t i = 0; i < list.positional.size(); ++i) {
      blocks.push_back(build_at(i + 1, [&] { return block_from_term(list.positional[i]); }));
    }
    return std::make_shared<ExplicitRule>(std::move(blocks), block_rule_from_term(*tail), text);
  }
  throw Error(ErrorCode::ParseError,
              "unknown measure rule '" + t.name + "' at offset " + std::to_string(t.offset));
}

std::shared_ptr<const BlockRule> parse_block_rule(std::string_view text) {
  return block_rule_from_term(parse_term(text));
}

}  // namespace lcprod
