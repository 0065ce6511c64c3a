#pragma once

// Structural classification of order terms and their ordinal values.

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "linord/cnf.hpp"
#include "linord/term.hpp"

namespace linord {

struct Classification {
  bool scattered = false;
  bool well_order = false;
  bool rev_well_order = false;
  bool has_min = false;
  bool has_max = false;
  bool scattered_init = false;
  bool scattered_final = false;
  /// Upper bound on the Hausdorff rank; absent iff not scattered.
  std::optional<Cnf> rank_upper;

  friend bool operator==(const Classification&, const Classification&) = default;
};

inline std::optional<Cnf> ordinal_value(const OrderTerm& t);

namespace detail {

inline Classification classify_normal(const OrderTerm& t) {
  Classification c;
  switch (t.kind()) {
    case TermKind::Fin:
      c = {true, true, true, true, true, true, true,
           Cnf::finite(t.size() == 1 ? 0 : 1)};
      return c;
    case TermKind::Omega:
      c = {true, true, false, true, false, true, true, Cnf::finite(1)};
      return c;
    case TermKind::Rev:
      // Normal form: only Rev(Omega) reaches here.
      c = {true, false, true, false, true, true, true, Cnf::finite(1)};
      return c;
    case TermKind::Eta:
      return c;
    case TermKind::ZetaPow: {
      auto exp = ordinal_value(t.child());
      if (exp) {
        c.scattered = c.scattered_init = c.scattered_final = true;
        c.rank_upper = *exp * Cnf::finite(2) + Cnf::finite(2);
      }
      return c;
    }
    case TermKind::Sum: {
      std::vector<Classification> parts;
      for (const auto& p : t.children()) parts.push_back(classify_normal(p));
      c.scattered = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.scattered; });
      c.well_order = std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.well_order; });
      c.rev_well_order =
          std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.rev_well_order; });
      c.has_min = parts.front().has_min;
      c.has_max = parts.back().has_max;
      c.scattered_init = c.scattered || parts.front().scattered_init;
      c.scattered_final = c.scattered || parts.back().scattered_final;
      if (c.scattered) {
        Cnf top;
        for (const auto& p : parts) top = std::max(top, *p.rank_upper);
        c.rank_upper = top + Cnf::finite(1);
      }
      return c;
    }
    case TermKind::Prod: {
      const Classification l = classify_normal(t.left());
      const Classification k = classify_normal(t.right());
      c.scattered = l.scattered && k.scattered;
      c.well_order = l.well_order && k.well_order;
      c.rev_well_order = l.rev_well_order && k.rev_well_order;
      c.has_min = l.has_min && k.has_min;
      c.has_max = l.has_max && k.has_max;
      c.scattered_init =
          c.scattered || (k.has_min ? l.scattered_init : (l.scattered && k.scattered_init));
      c.scattered_final =
          c.scattered || (k.has_max ? l.scattered_final : (l.scattered && k.scattered_final));
      if (c.scattered) c.rank_upper = *l.rank_upper + *k.rank_upper;
      return c;
    }
  }
  return c;
}

inline std::optional<Cnf> ordinal_value_normal(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin: return Cnf::finite(t.size());
    case TermKind::Omega: return Cnf::omega();
    case TermKind::Sum: {
      Cnf total;
      for (const auto& p : t.children()) {
        auto v = ordinal_value_normal(p);
        if (!v) return std::nullopt;
        total = total + *v;
      }
      return total;
    }
    case TermKind::Prod: {
      auto l = ordinal_value_normal(t.left());
      if (!l) return std::nullopt;
      auto k = ordinal_value_normal(t.right());
      if (!k) return std::nullopt;
      return *l * *k;
    }
    default: return std::nullopt;
  }
}

}  // namespace detail

inline Classification classify(const OrderTerm& t) { return detail::classify_normal(rev_push(t)); }

/// The ordinal denoted by t, present iff t denotes a well-order.
inline std::optional<Cnf> ordinal_value(const OrderTerm& t) {
  return detail::ordinal_value_normal(rev_push(t));
}

/// A term denoting the ordinal c. Terms have no constructor for omega^omega,
/// so every exponent of c must be finite.
inline OrderTerm cnf_to_term(const Cnf& c) {
  if (c.is_zero()) throw std::invalid_argument("cnf_to_term: the empty order is not a term");
  std::vector<OrderTerm> parts;
  for (const auto& t : c.terms()) {
    if (!t.exponent.is_finite())
      throw std::domain_error("cnf_to_term: exponent " + t.exponent.to_string() +
                              " is not representable");
    const std::uint64_t e = t.exponent.finite_value();
    if (e == 0) {
      parts.push_back(OrderTerm::fin(t.coefficient));
      continue;
    }
    OrderTerm p = OrderTerm::omega();
    for (std::uint64_t i = 1; i < e; ++i) p = OrderTerm::prod(p, OrderTerm::omega());
    if (t.coefficient > 1) p = OrderTerm::prod(p, OrderTerm::fin(t.coefficient));
    parts.push_back(p);
  }
  if (parts.size() == 1) return parts.front();
  return OrderTerm::sum(std::move(parts));
}

}  // namespace linord
