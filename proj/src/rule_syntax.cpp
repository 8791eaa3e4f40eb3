#include "lcprod/rule_syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "lcprod/error.hpp"

namespace lcprod {

namespace {

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::ParseError, what + " at offset " + std::to_string(offset));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse_all() {
    Term t = parse();
    skip_space();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing input");
    return t;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(pos_, std::string("expected '") + c + "'");
  }

  static bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Term parse() {
    skip_space();
    Term t;
    t.offset = pos_;
    if (pos_ >= text_.size()) fail(pos_, "unexpected end of rule");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      t.kind = Term::Kind::List;
      if (!accept(']')) {
        do {
          t.positional.push_back(parse());
        } while (accept(','));
        expect(']');
      }
      return t;
    }
    if (name_start(c)) {
      t.name = read_name();
      if (accept('(')) {
        t.kind = Term::Kind::Call;
        if (!accept(')')) {
          do {
            parse_arg(t);
          } while (accept(','));
          expect(')');
        }
      } else {
        t.kind = Term::Kind::Name;
      }
      return t;
    }
    t.kind = Term::Kind::Number;
    std::size_t start = pos_;
    if (text_[start] == '+') ++start;
    const char* first = text_.data() + start;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, t.number);
    if (ec != std::errc() || ptr == first) fail(pos_, "expected a number, name or list");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return t;
  }

  void parse_arg(Term& call) {
    skip_space();
    const std::size_t save = pos_;
    if (pos_ < text_.size() && name_start(text_[pos_])) {
      std::string key = read_name();
      if (accept('=')) {
        for (const auto& [k, v] : call.named) {
          if (k == key) fail(save, "argument '" + key + "' given twice");
        }
        call.named.emplace_back(std::move(key), parse());
        return;
      }
      pos_ = save;
    }
    if (!call.named.empty()) fail(save, "positional argument after named argument");
    call.positional.push_back(parse());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).parse_all(); }

const Term* Term::arg(std::string_view key, std::size_t index) const {
  for (const auto& [k, v] : named) {
    if (k == key) return &v;
  }
  if (index < positional.size()) return &positional[index];
  return nullptr;
}

const Term& Term::require(std::string_view key, std::size_t index) const {
  if (const Term* t = arg(key, index)) return *t;
  fail(offset, "'" + name + "' is missing argument '" + std::string(key) + "'");
}

double Term::as_number() const {
  if (kind != Kind::Number) fail(offset, "expected a number, got '" + to_string() + "'");
  return number;
}

std::size_t Term::as_count() const {
  const double v = as_number();
  if (v < 0 || v != std::floor(v)) fail(offset, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

Eigen::VectorXd Term::as_vector() const {
  if (kind == Kind::Number) return Eigen::VectorXd::Constant(1, number);
  if (kind != Kind::List) fail(offset, "expected a list of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(positional.size()));
  for (std::size_t i = 0; i < positional.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = positional[i].as_number();
  }
  return v;
}

Eigen::MatrixXd Term::as_matrix(Eigen::Index cols_if_empty) const {
  if (kind != Kind::List) fail(offset, "expected a list of rows");
  if (positional.empty()) return Eigen::MatrixXd(0, cols_if_empty);
  const auto rows = static_cast<Eigen::Index>(positional.size());
  const Eigen::Index cols = positional.front().as_vector().size();
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row_term = positional[static_cast<std::size_t>(r)];
    const Eigen::VectorXd row = row_term.as_vector();
    if (row.size() != cols) fail(row_term.offset, "ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

void Term::expect_args(std::initializer_list<std::string_view> allowed,
                       std::size_t max_positional) const {
  if (positional.size() > max_positional) {
    fail(offset, "too many positional arguments to '" + name + "'");
  }
  for (const auto& [k, v] : named) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail(v.offset, "unknown argument '" + k + "' to '" + name + "'");
    }
  }
}

std::string Term::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Number: os << number; break;
    case Kind::Name: os << name; break;
    case Kind::List: {
      os << '[';
      for (std::size_t i = 0; i < positional.size(); ++i) {
        if (i) os << ", ";
        os << positional[i].to_string();
      }
      os << ']';
      break;
    }
    case Kind::Call: {
      os << name << '(';
      bool first = true;
      for (const auto& p : positional) {
        if (!first) os << ", ";
        os << p.to_string();
        first = false;
      }
      for (const auto& [k, v] : named) {
        if (!first) os << ", ";
        os << k << '=' << v.to_string();
        first = false;
      }
      os << ')';
      break;
    }
  }
  return os.str();
}

}  // namespace lcprod
