#include "lcprod/sequence.hpp"

#include <cmath>
#include <sstream>

#include "lcprod/error.hpp"
#include "lcprod/rule_syntax.hpp"

namespace lcprod {

Sequence Sequence::from_term(const Term& term) {
  if (term.kind == Term::Kind::Number) return constant(term.number);
  if (term.is_call("const")) {
    term.expect_args({"c"}, 1);
    return constant(term.require("c", 0).as_number());
  }
  if (term.is_call("geom")) {
    term.expect_args({"a", "r"}, 2);
    return geom(term.require("a", 0).as_number(), term.require("r", 1).as_number());
  }
  if (term.is_call("pow")) {
    term.expect_args({"a", "p"}, 2);
    return power(term.require("a", 0).as_number(), term.require("p", 1).as_number());
  }
  throw Error(ErrorCode::ParseError,
              "expected const(c), geom(a, r) or pow(a, p) at offset " +
                  std::to_string(term.offset) + ", got '" + term.to_string() + "'");
}

double Sequence::operator()(std::size_t k) const {
  const double kk = static_cast<double>(k);
  switch (kind_) {
    case Kind::Const: return a_;
    case Kind::Geom: return a_ * std::pow(b_, kk);
    case Kind::Pow: return a_ * std::pow(kk, b_);
  }
  return a_;
}

std::string Sequence::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Const: os << "const(" << a_ << ")"; break;
    case Kind::Geom: os << "geom(" << a_ << ", " << b_ << ")"; break;
    case Kind::Pow: os << "pow(" << a_ << ", " << b_ << ")"; break;
  }
  return os.str();
}

}  // namespace lcprod
