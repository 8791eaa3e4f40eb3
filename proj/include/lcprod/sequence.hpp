#pragma once

#include <cstddef>
#include <string>

namespace lcprod {

struct Term;

// Closed-form real sequence indexed by the block number k >= 1:
//   const(c)   -> c
//   geom(a, r) -> a * r^k
//   pow(a, p)  -> a * k^p
class Sequence {
 public:
  enum class Kind { Const, Geom, Pow };

  static Sequence constant(double c) { return Sequence(Kind::Const, c, 0.0); }
  static Sequence geom(double a, double r) { return Sequence(Kind::Geom, a, r); }
  static Sequence power(double a, double p) { return Sequence(Kind::Pow, a, p); }
  static Sequence from_term(const Term& term);

  double operator()(std::size_t k) const;
  Kind kind() const { return kind_; }
  std::string to_string() const;

  bool operator==(const Sequence&) const = default;

 private:
  Sequence(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

}  // namespace lcprod
