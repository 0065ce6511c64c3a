#pragma once

// Text syntax for order terms.
//
//   expr   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := 'w' | 'eta' | 'zeta' | NAT | '(' expr ')'
//           | 'rev(' expr ')' | 'z^(' expr ')' | 'w^(' expr ')' ['*' NAT]
//
// A * B is B copies of A, so w*2 is omega*2. '*' binds tighter than '+' and
// both associate to the left. 'zeta' is z^(1); w^(e)*m is the ordinal
// omega^e * m written out as a term, which needs e to be a finite ordinal.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "linord/classify.hpp"
#include "linord/term.hpp"

namespace linord {

struct Diagnostic {
  std::string message;
  std::size_t begin = 0;  // byte offsets into the input, [begin, end)
  std::size_t end = 0;

  [[nodiscard]] std::string render(std::string_view text) const {
    std::string out = "error at " + std::to_string(begin) + ".." + std::to_string(end) + ": " + message + "\n";
    out += "  " + std::string(text) + "\n  " + std::string(begin, ' ') + std::string(std::max<std::size_t>(1, end - begin), '^');
    return out;
  }
};

using ParseResult = std::variant<OrderTerm, Diagnostic>;

namespace detail {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  ParseResult run() {
    try {
      skip();
      if (pos_ == text_.size()) return Diagnostic{"empty expression", 0, 0};
      OrderTerm t = expr();
      skip();
      if (pos_ != text_.size()) fail("unexpected input", pos_, pos_ + 1);
      return t;
    } catch (const Diagnostic& d) {
      return d;
    }
  }

 private:
  [[noreturn]] void fail(std::string msg, std::size_t b, std::size_t e) {
    throw Diagnostic{std::move(msg), b, std::min(e, text_.size())};
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'", pos_, pos_ + 1);
  }

  bool word(std::string_view w) {
    skip();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t after = pos_ + w.size();
    if (after < text_.size() && std::isalnum(static_cast<unsigned char>(text_[after]))) return false;
    pos_ = after;
    return true;
  }

  /// A natural number; zero is rejected since every term is non-empty.
  std::uint64_t nat() {
    skip();
    const std::size_t b = pos_;
    std::uint64_t n = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const auto d = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (n > (UINT64_MAX - d) / 10) fail("number too large", b, pos_ + 1);
      n = n * 10 + d;
      ++pos_;
    }
    if (pos_ == b) fail("expected a number", b, b + 1);
    if (n == 0) fail("zero denotes the empty order", b, pos_);
    return n;
  }

  OrderTerm expr() {
    std::vector<OrderTerm> parts{term()};
    while (eat('+')) parts.push_back(term());
    return parts.size() == 1 ? parts.front() : OrderTerm::sum(std::move(parts));
  }

  OrderTerm term() {
    OrderTerm t = factor();
    while (eat('*')) t = OrderTerm::prod(t, factor());
    return t;
  }

  OrderTerm group() {
    expect('(');
    skip();
    if (pos_ < text_.size() && text_[pos_] == ')') fail("empty expression", pos_, pos_ + 1);
    OrderTerm t = expr();
    expect(')');
    return t;
  }

  OrderTerm factor() {
    skip();
    const std::size_t b = pos_;
    if (pos_ == text_.size()) fail("unexpected end of input", b, b);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return OrderTerm::fin(nat());
    if (c == '(') return group();
    if (word("eta")) return OrderTerm::eta();
    if (word("zeta")) return OrderTerm::zeta_pow(OrderTerm::fin(1));
    if (word("rev")) return OrderTerm::rev(group());
    if (text_.substr(pos_, 2) == "z^") {
      pos_ += 2;
      return OrderTerm::zeta_pow(group());
    }
    if (text_.substr(pos_, 2) == "w^") {
      pos_ += 2;
      const OrderTerm e = group();
      const std::size_t e_end = pos_;
      const auto exponent = ordinal_value(e);
      if (!exponent) fail("exponent of w^ must be a well-order", b, e_end);
      if (!exponent->is_finite()) fail("exponent of w^ must be finite", b, e_end);
      std::uint64_t m = 1;
      const std::size_t save = pos_;
      if (eat('*')) {
        skip();
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          m = nat();
        else
          pos_ = save;
      }
      return cnf_to_term(Cnf::omega_pow(*exponent, m));
    }
    if (word("w")) return OrderTerm::omega();
    std::size_t e = pos_;
    while (e < text_.size() && std::isalnum(static_cast<unsigned char>(text_[e]))) ++e;
    fail("unknown token", b, std::max(e, b + 1));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParseResult parse_term(std::string_view text) { return detail::TermParser(text).run(); }

/// parse_term for callers that treat a diagnostic as an error.
inline OrderTerm parse_term_or_throw(std::string_view text) {
  auto r = parse_term(text);
  if (auto* d = std::get_if<Diagnostic>(&r)) throw std::invalid_argument(d->render(text));
  return std::get<OrderTerm>(r);
}

}  // namespace linord
