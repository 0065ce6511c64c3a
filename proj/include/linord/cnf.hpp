#pragma once

// Hereditary Cantor normal form for ordinals below epsilon_0.
//
// An ordinal is a list of (exponent, coefficient) terms with strictly
// decreasing exponents and positive coefficients; the empty list is 0.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linord {

class Cnf {
 public:
  struct Term;

  Cnf() = default;

  static Cnf zero() { return {}; }
  static Cnf finite(std::uint64_t n);
  static Cnf omega() { return omega_pow(finite(1)); }
  /// omega^e * c
  static Cnf omega_pow(Cnf e, std::uint64_t c = 1);
  /// Build from terms, validating the normal-form invariant.
  static Cnf from_terms(std::vector<Term> terms);

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_finite() const;
  /// Value when finite; throws otherwise.
  [[nodiscard]] std::uint64_t finite_value() const;
  [[nodiscard]] bool is_successor() const;
  [[nodiscard]] bool is_limit() const { return !is_zero() && !is_successor(); }
  /// Exactly one term: omega^a * m.
  [[nodiscard]] bool single_term() const { return terms_.size() == 1; }
  /// Exponent of the leading term; 0 for the ordinal 0.
  [[nodiscard]] Cnf degree() const;
  [[nodiscard]] Cnf predecessor() const;

  friend std::strong_ordering operator<=>(const Cnf& a, const Cnf& b);
  friend bool operator==(const Cnf& a, const Cnf& b) { return (a <=> b) == 0; }

  friend Cnf operator+(const Cnf& a, const Cnf& b);
  friend Cnf operator*(const Cnf& a, const Cnf& b);

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

struct Cnf::Term {
  Cnf exponent;
  std::uint64_t coefficient = 1;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("CNF coefficient overflow");
  return r;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("CNF coefficient overflow");
  return r;
}

}  // namespace detail

inline Cnf Cnf::finite(std::uint64_t n) {
  Cnf c;
  if (n > 0) c.terms_.push_back(Term{Cnf{}, n});
  return c;
}

inline Cnf Cnf::omega_pow(Cnf e, std::uint64_t c) {
  Cnf r;
  if (c > 0) r.terms_.push_back(Term{std::move(e), c});
  return r;
}

inline Cnf Cnf::from_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0) throw std::invalid_argument("CNF: zero coefficient");
    if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent))
      throw std::invalid_argument("CNF: exponents must strictly decrease");
  }
  Cnf c;
  c.terms_ = std::move(terms);
  return c;
}

inline bool Cnf::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline std::uint64_t Cnf::finite_value() const {
  if (!is_finite()) throw std::domain_error("CNF: not a finite ordinal");
  return terms_.empty() ? 0 : terms_[0].coefficient;
}

inline bool Cnf::is_successor() const {
  return !terms_.empty() && terms_.back().exponent.is_zero();
}

inline Cnf Cnf::degree() const { return terms_.empty() ? Cnf{} : terms_.front().exponent; }

inline Cnf Cnf::predecessor() const {
  if (!is_successor()) throw std::domain_error("CNF: predecessor of a non-successor");
  Cnf r = *this;
  if (--r.terms_.back().coefficient == 0) r.terms_.pop_back();
  return r;
}

inline std::strong_ordering operator<=>(const Cnf& a, const Cnf& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.terms_[i].exponent <=> b.terms_[i].exponent; c != 0) return c;
    if (auto c = a.terms_[i].coefficient <=> b.terms_[i].coefficient; c != 0) return c;
  }
  return a.terms_.size() <=> b.terms_.size();
}

inline Cnf operator+(const Cnf& a, const Cnf& b) {
  if (b.is_zero()) return a;
  const Cnf& lead = b.terms_.front().exponent;
  Cnf r;
  std::uint64_t carried = 0;
  for (const auto& t : a.terms_) {
    auto c = t.exponent <=> lead;
    if (c > 0)
      r.terms_.push_back(t);
    else if (c == 0)
      carried = t.coefficient;
    else
      break;
  }
  for (std::size_t i = 0; i < b.terms_.size(); ++i) {
    Cnf::Term t = b.terms_[i];
    if (i == 0) t.coefficient = detail::checked_add(t.coefficient, carried);
    r.terms_.push_back(std::move(t));
  }
  return r;
}

inline Cnf operator*(const Cnf& a, const Cnf& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const Cnf& lead = a.terms_.front().exponent;
  Cnf r;
  for (const auto& t : b.terms_) {
    Cnf piece;
    if (t.exponent.is_zero()) {
      // a * n = omega^lead * (a0 * n) + tail(a)
      piece = a;
      piece.terms_.front().coefficient =
          detail::checked_mul(piece.terms_.front().coefficient, t.coefficient);
    } else {
      piece = Cnf::omega_pow(lead + t.exponent, t.coefficient);
    }
    r = r + piece;
  }
  return r;
}

inline std::string Cnf::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i > 0) out += "+";
    if (t.exponent.is_zero()) {
      out += std::to_string(t.coefficient);
      continue;
    }
    out += "w";
    if (!(t.exponent == Cnf::finite(1))) {
      if (t.exponent.is_finite())
        out += "^" + t.exponent.to_string();
      else
        out += "^(" + t.exponent.to_string() + ")";
    }
    if (t.coefficient != 1) out += "*" + std::to_string(t.coefficient);
  }
  return out;
}

/// The unique r with a + r = b; requires a <= b.
inline Cnf left_subtract(const Cnf& a, const Cnf& b) {
  if (b < a) throw std::domain_error("left_subtract: a > b");
  const auto& at = a.terms();
  const auto& bt = b.terms();
  std::size_t i = 0;
  while (i < at.size() && i < bt.size() && at[i].exponent == bt[i].exponent &&
         at[i].coefficient == bt[i].coefficient)
    ++i;
  if (i == bt.size()) return {};
  std::vector<Cnf::Term> rest;
  if (i < at.size() && at[i].exponent == bt[i].exponent) {
    // Same exponent, b has the larger coefficient.
    rest.push_back(Cnf::Term{bt[i].exponent, bt[i].coefficient - at[i].coefficient});
    ++i;
  }
  for (; i < bt.size(); ++i) rest.push_back(bt[i]);
  return Cnf::from_terms(std::move(rest));
}

/// Left division: the unique (q, r) with p = a*q + r and r < a. Requires a > 0.
inline std::pair<Cnf, Cnf> left_divide(const Cnf& a, const Cnf& p) {
  if (a.is_zero()) throw std::domain_error("left_divide: division by zero");
  if (p < a) return {Cnf{}, p};
  const Cnf e = a.degree();
  const std::uint64_t a0 = a.terms().front().coefficient;
  const Cnf a_tail = left_subtract(Cnf::omega_pow(e, a0), a);
  std::vector<Cnf::Term> q;
  const auto& pt = p.terms();
  std::size_t i = 0;
  for (; i < pt.size() && pt[i].exponent > e; ++i)
    q.push_back(Cnf::Term{left_subtract(e, pt[i].exponent), pt[i].coefficient});
  if (i < pt.size() && pt[i].exponent == e) {
    std::uint64_t n = pt[i].coefficient / a0;
    if (n > 0 && pt[i].coefficient % a0 == 0) {
      std::vector<Cnf::Term> prest(pt.begin() + static_cast<std::ptrdiff_t>(i) + 1, pt.end());
      if (Cnf::from_terms(std::move(prest)) < a_tail) --n;
    }
    if (n > 0) q.push_back(Cnf::Term{Cnf{}, n});
  }
  Cnf qc = Cnf::from_terms(std::move(q));
  Cnf r = left_subtract(a * qc, p);
  return {qc, r};
}

/// Standard fundamental sequence of a limit ordinal: for lambda = g + omega^(b+1),
/// lambda[n] = g + omega^b * n; for lambda = g + omega^mu with mu a limit,
/// lambda[n] = g + omega^(mu[n]).
inline Cnf fundamental(const Cnf& lambda, std::uint64_t n) {
  if (!lambda.is_limit()) throw std::domain_error("fundamental: not a limit ordinal");
  std::vector<Cnf::Term> head = lambda.terms();
  Cnf::Term last = head.back();
  head.pop_back();
  if (last.coefficient > 1) head.push_back(Cnf::Term{last.exponent, last.coefficient - 1});
  Cnf g = Cnf::from_terms(std::move(head));
  if (last.exponent.is_successor()) return g + Cnf::omega_pow(last.exponent.predecessor(), n);
  return g + Cnf::omega_pow(fundamental(last.exponent, n));
}

}  // namespace linord
