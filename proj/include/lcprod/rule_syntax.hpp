#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lcprod {

// Parsed form of the rule language shared by measure and coefficient rules:
//
//   term  := number | name | name '(' args? ')' | '[' (term (',' term)*)? ']'
//   args  := arg (',' arg)*
//   arg   := name '=' term | term
//
// Interpretation of a term (which names exist, what arguments they take) is
// left to the rule builders.
struct Term {
  enum class Kind { Number, Name, Call, List };

  Kind kind = Kind::Number;
  double number = 0.0;
  std::string name;
  std::vector<Term> positional;  // call arguments or list items
  std::vector<std::pair<std::string, Term>> named;
  std::size_t offset = 0;  // position in the source text

  bool is_call(std::string_view head) const {
    return kind == Kind::Call && name == head;
  }
  // Named argument, or the positional argument at `index` when absent.
  const Term* arg(std::string_view key, std::size_t index = SIZE_MAX) const;
  const Term& require(std::string_view key, std::size_t index = SIZE_MAX) const;

  double as_number() const;
  std::size_t as_count() const;
  Eigen::VectorXd as_vector() const;
  // Nested list of rows.
  Eigen::MatrixXd as_matrix(Eigen::Index cols_if_empty = 0) const;

  // Rejects named arguments outside `allowed`.
  void expect_args(std::initializer_list<std::string_view> allowed,
                   std::size_t max_positional) const;

  std::string to_string() const;
};

Term parse_term(std::string_view text);

}  // namespace lcprod
