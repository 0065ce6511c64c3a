#pragma once

// Realizing order terms as coded orders, plus term-level utilities built on
// the realization: streams, truncations, dense witnesses and ordinal
// positions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linord/classify.hpp"
#include "linord/coded_order.hpp"
#include "linord/term.hpp"

namespace linord {

inline CodedOrder realize(const OrderTerm& t) {
  switch (t.kind()) {
    case TermKind::Fin: return fin_order(t.size());
    case TermKind::Omega: return omega_order();
    case TermKind::Eta: return eta_order();
    case TermKind::Rev: return rev_order(realize(t.child()));
    case TermKind::Sum: {
      std::vector<CodedOrder> parts;
      for (const auto& p : t.children()) parts.push_back(realize(p));
      return sum_order(std::move(parts));
    }
    case TermKind::Prod: return prod_order(realize(t.left()), realize(t.right()));
    case TermKind::ZetaPow: return zeta_pow_order(realize(t.child()));
  }
  throw std::logic_error("realize: unknown term kind");
}

struct Streams {
  std::optional<CodeStream> cofinal;
  std::optional<CodeStream> coinitial;
};

inline Streams streams(const OrderTerm& t) {
  const CodedOrder o = realize(t);
  return {o.cofinal(), o.coinitial()};
}

/// The first n codes of realize(t), ordered by the realized order.
inline FinOrder truncate(const OrderTerm& t, std::size_t n) {
  const CodedOrder o = realize(t);
  return FinOrder(o.sorted(o.first(n)));
}

namespace detail {

/// n codes strictly decreasing in realize(t), or in its reverse when
/// `flipped`. Requires that orientation not to be a well-order.
inline std::vector<Code> descending(const OrderTerm& t, std::size_t n, bool flipped) {
  const auto well_ordered = [](const OrderTerm& s, bool f) {
    const Classification c = classify(s);
    return f ? c.rev_well_order : c.well_order;
  };
  std::vector<Code> out;
  switch (t.kind()) {
    case TermKind::Fin: break;
    case TermKind::Omega:
      if (flipped)
        for (std::size_t i = 0; i < n; ++i) out.push_back(i);
      break;
    case TermKind::Eta: {
      const CodedOrder e = eta_order();
      auto s = flipped ? e.cofinal() : e.coinitial();
      for (std::size_t i = 0; i < n; ++i) out.push_back((*s)(i));
      break;
    }
    case TermKind::Rev: return descending(t.child(), n, !flipped);
    case TermKind::Sum:
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (well_ordered(t.children()[i], flipped)) continue;
        for (Code x : descending(t.children()[i], n, flipped)) out.push_back(pair(i, x));
        break;
      }
      break;
    case TermKind::Prod: {
      const Code l0 = realize(t.left()).first(1).front();
      if (!well_ordered(t.right(), flipped)) {
        for (Code k : descending(t.right(), n, flipped)) out.push_back(pair(k, l0));
      } else {
        const Code k0 = realize(t.right()).first(1).front();
        for (Code l : descending(t.left(), n, flipped)) out.push_back(pair(k0, l));
      }
      break;
    }
    case TermKind::ZetaPow: {
      const Code p = realize(t.child()).first(1).front();
      const std::int64_t sign = flipped ? 1 : -1;
      for (std::size_t i = 0; i < n; ++i)
        out.push_back(ZetaNode::encode({p}, {sign * static_cast<std::int64_t>(i + 1)}));
      break;
    }
  }
  if (out.size() != n) throw std::logic_error("descending: orientation is well-ordered");
  return out;
}

/// n codes strictly decreasing in `order`, preferring small codes: the
/// longest decreasing run inside a growing prefix of the enumeration.
inline std::optional<std::vector<Code>> small_descending(const CodedOrder& order, std::size_t n) {
  for (std::size_t m = 64; m <= 4096; m *= 4) {
    const auto xs = order.first(m);
    // Patience sorting: tails[j] ends a decreasing run of length j + 1.
    std::vector<std::size_t> tails;
    std::vector<std::size_t> prev(xs.size(), SIZE_MAX);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto it = std::partition_point(tails.begin(), tails.end(), [&](std::size_t j) {
        return order.less(xs[i], xs[j]);
      });
      if (it != tails.begin()) prev[i] = *(it - 1);
      if (it == tails.end())
        tails.push_back(i);
      else
        *it = i;
      if (tails.size() == n) {
        std::vector<Code> out(n);
        for (std::size_t k = n, j = tails.back(); k-- > 0; j = prev[j]) out[k] = xs[j];
        return out;
      }
    }
    if (xs.size() < m) break;
  }
  return std::nullopt;
}

inline std::vector<std::string> dyadic_strings(std::size_t depth) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].size() + 1 < depth) {
      out.push_back(out[i] + "0");
      out.push_back(out[i] + "1");
    }
  return out;
}

inline std::vector<Code> dense_codes(const OrderTerm& t, std::size_t depth, bool flipped) {
  std::vector<Code> out;
  switch (t.kind()) {
    case TermKind::Eta:
      for (auto s : dyadic_strings(depth)) {
        if (flipped)
          for (char& c : s) c = c == '0' ? '1' : '0';
        out.push_back(EtaNode::code_of(s));
      }
      return out;
    case TermKind::Rev: return dense_codes(t.child(), depth, !flipped);
    case TermKind::Sum:
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (classify(t.children()[i]).scattered) continue;
        for (Code x : dense_codes(t.children()[i], depth, flipped)) out.push_back(pair(i, x));
        return out;
      }
      break;
    case TermKind::Prod:
      if (!classify(t.left()).scattered) {
        const Code k0 = realize(t.right()).first(1).front();
        for (Code l : dense_codes(t.left(), depth, flipped)) out.push_back(pair(k0, l));
      } else {
        const Code l0 = realize(t.left()).first(1).front();
        for (Code k : dense_codes(t.right(), depth, flipped)) out.push_back(pair(k, l0));
      }
      return out;
    case TermKind::ZetaPow: {
      // Along a descending sequence e0 > e1 > ..., string s becomes the
      // function with value +-1 at e_i according to bit i.
      auto e = small_descending(realize(t.child()), depth);
      if (!e) e = descending(t.child(), depth, false);
      const std::int64_t up = flipped ? -1 : 1;
      for (const auto& s : dyadic_strings(depth)) {
        std::vector<Code> points;
        std::vector<std::int64_t> values;
        for (std::size_t i = 0; i < s.size(); ++i) {
          points.push_back((*e)[i]);
          values.push_back(s[i] == '1' ? up : -up);
        }
        out.push_back(ZetaNode::encode(points, values));
      }
      return out;
    }
    default: break;
  }
  throw std::logic_error("dense_codes: term is scattered");
}

}  // namespace detail

/// 2^depth - 1 codes of realize(t) forming a copy of the depth-limited dyadic
/// tree, listed in increasing order; absent when t is scattered.
inline std::optional<std::vector<Code>> dense_witness(const OrderTerm& t, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("dense_witness: depth must be positive");
  if (classify(t).scattered) return std::nullopt;
  return realize(t).sorted(detail::dense_codes(t, depth, false));
}

/// Position of a code in a well-ordered term's realization.
inline Cnf ordinal_position(const OrderTerm& t, Code c) {
  switch (t.kind()) {
    case TermKind::Fin:
    case TermKind::Omega: return Cnf::finite(static_cast<std::uint64_t>(c));
    case TermKind::Rev:
      if (t.child().is(TermKind::Fin))
        return Cnf::finite(t.child().size() - 1 - static_cast<std::uint64_t>(c));
      break;
    case TermKind::Sum: {
      auto [i, x] = unpair(c);
      Cnf before;
      for (std::size_t j = 0; j < i; ++j) before = before + *ordinal_value(t.children()[j]);
      return before + ordinal_position(t.children()[static_cast<std::size_t>(i)], x);
    }
    case TermKind::Prod: {
      auto [k, l] = unpair(c);
      return *ordinal_value(t.left()) * ordinal_position(t.right(), k) +
             ordinal_position(t.left(), l);
    }
    default: break;
  }
  throw std::domain_error("ordinal_position: " + describe(t) + " is not handled");
}

/// Inverse of ordinal_position.
inline Code code_at_position(const OrderTerm& t, const Cnf& alpha) {
  switch (t.kind()) {
    case TermKind::Fin:
    case TermKind::Omega:
      if (alpha.is_finite() && (t.is(TermKind::Omega) || alpha.finite_value() < t.size()))
        return alpha.finite_value();
      break;
    case TermKind::Rev:
      if (t.child().is(TermKind::Fin) && alpha.is_finite() && alpha.finite_value() < t.child().size())
        return t.child().size() - 1 - alpha.finite_value();
      break;
    case TermKind::Sum: {
      Cnf rest = alpha;
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        const Cnf v = *ordinal_value(t.children()[i]);
        if (rest < v) return pair(i, code_at_position(t.children()[i], rest));
        rest = left_subtract(v, rest);
      }
      break;
    }
    case TermKind::Prod: {
      auto [q, r] = left_divide(*ordinal_value(t.left()), alpha);
      return pair(code_at_position(t.right(), q), code_at_position(t.left(), r));
    }
    default: break;
  }
  throw std::out_of_range("code_at_position: " + alpha.to_string() + " outside " + describe(t));
}

}  // namespace linord
