#pragma once

// Parser for expressions over named algebra elements, U and U*.
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := primary ('^' uint | "'")*
//   primary:= identifier | 'U' | number ['i'] | '(' expr ')'
//
// A postfix "'" is the adjoint.  Negative powers are rejected; write U'^k.

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isoalg/errors.hpp"
#include "isoalg/linalg.hpp"

namespace isoalg {

using GeneratorTable = std::map<std::string, ComplexMatrix, std::less<>>;

struct Expression {
  enum class Kind { Generator, U, Scalar, Sum, Product, Adjoint };

  Kind kind = Kind::Scalar;
  std::string name;          // Generator
  ComplexMatrix value;       // Generator
  Complex scalar{1.0, 0.0};  // Scalar
  std::vector<Expression> children;
  std::size_t position = 0;

  static Expression generator(std::string name, ComplexMatrix m, std::size_t pos) {
    Expression e;
    e.kind = Kind::Generator;
    e.name = std::move(name);
    e.value = std::move(m);
    e.position = pos;
    return e;
  }
  static Expression unitary_symbol(std::size_t pos) {
    Expression e;
    e.kind = Kind::U;
    e.position = pos;
    return e;
  }
  static Expression constant(Complex c, std::size_t pos) {
    Expression e;
    e.kind = Kind::Scalar;
    e.scalar = c;
    e.position = pos;
    return e;
  }
  static Expression node(Kind kind, std::vector<Expression> children, std::size_t pos) {
    Expression e;
    e.kind = kind;
    e.children = std::move(children);
    e.position = pos;
    return e;
  }
};

inline std::string to_string(const Expression& e) {
  switch (e.kind) {
    case Expression::Kind::Generator:
      return e.name;
    case Expression::Kind::U:
      return "U";
    case Expression::Kind::Scalar: {
      std::string s = "(" + std::to_string(e.scalar.real());
      if (e.scalar.imag() != 0.0) s += (e.scalar.imag() < 0 ? "" : "+") + std::to_string(e.scalar.imag()) + "i";
      return s + ")";
    }
    case Expression::Kind::Adjoint:
      return "adjoint(" + to_string(e.children.front()) + ")";
    case Expression::Kind::Sum:
    case Expression::Kind::Product: {
      std::string s = e.kind == Expression::Kind::Sum ? "sum(" : "product(";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) s += ", ";
        s += to_string(e.children[i]);
      }
      return s + ")";
    }
  }
  return {};
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const GeneratorTable& table) : text_(text), table_(table) {}

  Expression parse() {
    Expression e = expr();
    skip_space();
    if (pos_ != text_.size()) throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  static Expression negate(Expression e, std::size_t pos) {
    std::vector<Expression> kids;
    kids.push_back(Expression::constant(-1.0, pos));
    kids.push_back(std::move(e));
    return Expression::node(Expression::Kind::Product, std::move(kids), pos);
  }

  Expression expr() {
    const std::size_t start = (skip_space(), pos_);
    std::vector<Expression> terms;
    bool negative = false;
    if (accept('-')) negative = true;
    else accept('+');
    Expression first = term();
    terms.push_back(negative ? negate(std::move(first), start) : std::move(first));
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') break;
      const std::size_t at = pos_++;
      Expression t = term();
      terms.push_back(c == '-' ? negate(std::move(t), at) : std::move(t));
    }
    if (terms.size() == 1) return std::move(terms.front());
    return Expression::node(Expression::Kind::Sum, std::move(terms), start);
  }

  Expression term() {
    const std::size_t start = (skip_space(), pos_);
    std::vector<Expression> factors;
    factors.push_back(factor());
    while (accept('*')) factors.push_back(factor());
    if (factors.size() == 1) return std::move(factors.front());
    return Expression::node(Expression::Kind::Product, std::move(factors), start);
  }

  Expression factor() {
    const std::size_t start = (skip_space(), pos_);
    Expression base = primary();
    for (;;) {
      if (accept('^')) {
        base = power(std::move(base), start);
      } else if (accept('\'')) {
        std::vector<Expression> kids;
        kids.push_back(std::move(base));
        base = Expression::node(Expression::Kind::Adjoint, std::move(kids), start);
      } else {
        return base;
      }
    }
  }

  Expression power(Expression base, std::size_t start) {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw SyntaxError("expected a non-negative integer exponent", at);
    }
    std::size_t k = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      k = k * 10 + static_cast<std::size_t>(text_[pos_] - '0');
      if (k > 4096) throw SyntaxError("exponent too large", at);
      ++pos_;
    }
    if (k == 0) return Expression::constant(1.0, start);
    if (k == 1) return base;
    std::vector<Expression> copies(k, base);
    return Expression::node(Expression::Kind::Product, std::move(copies), start);
  }

  Expression primary() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression inner = expr();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (name == "U") return Expression::unitary_symbol(start);
      auto it = table_.find(name);
      if (it == table_.end()) throw UnknownGenerator(name, start);
      return Expression::generator(name, it->second, start);
    }
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expression number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(literal, &used);
      if (used != literal.size()) throw SyntaxError("malformed number", start);
    } catch (const std::logic_error&) {
      throw SyntaxError("malformed number '" + literal + "'", start);
    }
    if (pos_ < text_.size() && text_[pos_] == 'i' &&
        (pos_ + 1 == text_.size() || !(std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '_'))) {
      ++pos_;
      return Expression::constant(Complex(0.0, value), start);
    }
    return Expression::constant(Complex(value, 0.0), start);
  }

  std::string_view text_;
  const GeneratorTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`, resolving identifiers against `table`.
inline Expression parse(std::string_view text, const GeneratorTable& table) {
  return detail::Parser(text, table).parse();
}

}  // namespace isoalg
