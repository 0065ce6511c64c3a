#pragma once

// Syntax trees denoting countable linear orders.
//
//   fin(n)        the n-chain (n >= 1)
//   omega()       the naturals
//   eta()         the rationals
//   rev(t)        the reverse order
//   sum(ts)       left-to-right concatenation of at least two parts
//   prod(l, k)    copies of l indexed by k (ordinal-style product, so
//                 prod(omega, fin(2)) is omega*2)
//   zeta_pow(k)   finite-support functions k -> Z
//
// Terms are immutable and share structure; copying is cheap.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace linord {

enum class TermKind { Fin, Omega, Eta, Rev, Sum, Prod, ZetaPow };

class OrderTerm {
 public:
  static OrderTerm fin(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("fin: the empty order is not a term");
    return OrderTerm(TermKind::Fin, n, {});
  }
  static OrderTerm omega() { return OrderTerm(TermKind::Omega, 0, {}); }
  static OrderTerm eta() { return OrderTerm(TermKind::Eta, 0, {}); }
  static OrderTerm rev(OrderTerm t) { return OrderTerm(TermKind::Rev, 0, {std::move(t)}); }
  static OrderTerm sum(std::vector<OrderTerm> parts) {
    if (parts.size() < 2) throw std::invalid_argument("sum: needs at least two parts");
    return OrderTerm(TermKind::Sum, 0, std::move(parts));
  }
  static OrderTerm prod(OrderTerm left, OrderTerm right) {
    return OrderTerm(TermKind::Prod, 0, {std::move(left), std::move(right)});
  }
  static OrderTerm zeta_pow(OrderTerm exponent) {
    return OrderTerm(TermKind::ZetaPow, 0, {std::move(exponent)});
  }

  [[nodiscard]] TermKind kind() const { return node_->kind; }
  /// Chain length of a Fin term.
  [[nodiscard]] std::uint64_t size() const { return node_->n; }
  [[nodiscard]] const std::vector<OrderTerm>& children() const { return node_->children; }
  [[nodiscard]] const OrderTerm& child(std::size_t i = 0) const { return node_->children.at(i); }
  // Prod accessors: left factor is the repeated block, right factor the index order.
  [[nodiscard]] const OrderTerm& left() const { return child(0); }
  [[nodiscard]] const OrderTerm& right() const { return child(1); }

  [[nodiscard]] bool is(TermKind k) const { return kind() == k; }
  [[nodiscard]] bool is_rev_omega() const {
    return is(TermKind::Rev) && child().is(TermKind::Omega);
  }

  friend bool operator==(const OrderTerm& a, const OrderTerm& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.node_->n == b.node_->n &&
           a.node_->children == b.node_->children;
  }

  /// Number of constructor nodes.
  [[nodiscard]] std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& c : children()) n += c.node_count();
    return n;
  }

 private:
  struct Node {
    TermKind kind;
    std::uint64_t n;
    std::vector<OrderTerm> children;
  };

  OrderTerm(TermKind k, std::uint64_t n, std::vector<OrderTerm> children)
      : node_(std::make_shared<const Node>(Node{k, n, std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline std::string print_expr(const OrderTerm& t);

inline std::string print_factor(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin: return std::to_string(t.size());
    case TermKind::Omega: return "w";
    case TermKind::Eta: return "eta";
    case TermKind::Rev: return "rev(" + print_expr(t.child()) + ")";
    case TermKind::ZetaPow: return "z^(" + print_expr(t.child()) + ")";
    case TermKind::Sum:
    case TermKind::Prod: return "(" + print_expr(t) + ")";
  }
  return {};
}

inline std::string print_term(const OrderTerm& t) {
  if (t.is(TermKind::Prod)) {
    const auto& l = t.left();
    std::string lhs = l.is(TermKind::Prod) ? print_term(l) : print_factor(l);
    return lhs + " * " + print_factor(t.right());
  }
  return print_factor(t);
}

inline std::string print_expr(const OrderTerm& t) {
  if (!t.is(TermKind::Sum)) return print_term(t);
  std::string out;
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (i > 0) out += " + ";
    const auto& p = t.children()[i];
    out += p.is(TermKind::Sum) ? "(" + print_expr(p) + ")" : print_term(p);
  }
  return out;
}

}  // namespace detail

/// Canonical text in the expression grammar accepted by parse_term.
inline std::string print(const OrderTerm& t) { return detail::print_expr(t); }

/// Structural debug form, e.g. Sum(Omega, Fin(1)).
inline std::string describe(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin: return "Fin(" + std::to_string(t.size()) + ")";
    case TermKind::Omega: return "Omega";
    case TermKind::Eta: return "Eta";
    case TermKind::Rev: return "Rev(" + describe(t.child()) + ")";
    case TermKind::ZetaPow: return "ZetaPow(" + describe(t.child()) + ")";
    case TermKind::Prod: return "Prod(" + describe(t.left()) + "," + describe(t.right()) + ")";
    case TermKind::Sum: {
      std::string s = "Sum(";
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (i > 0) s += ",";
        s += describe(t.children()[i]);
      }
      return s + ")";
    }
  }
  return {};
}

/// Push reversal down to Omega leaves. The result is order-isomorphic.
inline OrderTerm rev_push(const OrderTerm& t);

namespace detail {

inline OrderTerm reversed(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin:
    case TermKind::Eta: return t;
    case TermKind::Omega: return OrderTerm::rev(t);
    case TermKind::Rev: return rev_push(t.child());
    case TermKind::Sum: {
      std::vector<OrderTerm> parts;
      for (auto it = t.children().rbegin(); it != t.children().rend(); ++it)
        parts.push_back(reversed(*it));
      return OrderTerm::sum(std::move(parts));
    }
    case TermKind::Prod: return OrderTerm::prod(reversed(t.left()), reversed(t.right()));
    // phi -> -phi is an anti-isomorphism of Z^K onto itself.
    case TermKind::ZetaPow: return t;
  }
  return t;
}

}  // namespace detail

inline OrderTerm rev_push(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin:
    case TermKind::Omega:
    case TermKind::Eta:
    case TermKind::ZetaPow: return t;
    case TermKind::Rev: return detail::reversed(t.child());
    case TermKind::Sum: {
      std::vector<OrderTerm> parts;
      for (const auto& p : t.children()) parts.push_back(rev_push(p));
      return OrderTerm::sum(std::move(parts));
    }
    case TermKind::Prod: return OrderTerm::prod(rev_push(t.left()), rev_push(t.right()));
  }
  return t;
}

}  // namespace linord
