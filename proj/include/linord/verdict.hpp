#pragma once

// Sound, syntax-directed strong-surjectivity calculus and the hardness
// reduction maps.
//
// Rules are tried in order; the first that fires decides:
//   N1  non-scattered: yes iff no scattered initial or final segment
//   S1  well-order: yes iff the CNF has a single term omega^a * m
//   S2  reverse well-order: dual of S1
//   S3  minimum without being a well-order (or the dual) -> no
//   S4  zeta power with well-ordered exponent -> yes
//   S5  product: both factors yes -> yes; scattered left factor and
//       right factor no -> no (retried once on the right-associated product)
//   S6  reversed indecomposable multiple followed by an indecomposable multiple -> yes
//   S7  unknown
// Trace entries are "RULE" at the root and "RULE@path" below it, where path
// lists child indices separated by dots.

#include <stdexcept>
#include <string>
#include <vector>

#include "linord/classify.hpp"

namespace linord {

enum class Outcome { Yes, No, Unknown };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Yes: return "yes";
    case Outcome::No: return "no";
    case Outcome::Unknown: return "unknown";
  }
  return "";
}

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  std::vector<std::string> rule_trace;
};

namespace detail {

class VerdictEngine {
 public:
  Outcome run(const OrderTerm& t, const std::string& path) {
    const Classification c = classify_normal(t);
    auto note = [&](const std::string& rule) {
      trace.push_back(path.empty() ? rule : rule + "@" + path);
    };
    auto sub = [&](const char* idx) { return path.empty() ? std::string(idx) : path + "." + idx; };

    if (!c.scattered) {
      if (c.scattered_init) {
        note("N1:scatteredInit");
        return Outcome::No;
      }
      if (c.scattered_final) {
        note("N1:scatteredFinal");
        return Outcome::No;
      }
      note("N1");
      return Outcome::Yes;
    }
    if (c.well_order) {
      note("S1");
      return ordinal_value_normal(t)->single_term() ? Outcome::Yes : Outcome::No;
    }
    if (c.rev_well_order) {
      note("S2");
      auto v = ordinal_value(OrderTerm::rev(t));
      return v->single_term() ? Outcome::Yes : Outcome::No;
    }
    if ((c.has_min && !c.well_order) || (c.has_max && !c.rev_well_order)) {
      note("S3");
      return Outcome::No;
    }
    if (t.is(TermKind::ZetaPow) && ordinal_value(t.child())) {
      note("S4");
      return Outcome::Yes;
    }
    if (t.is(TermKind::Prod)) {
      if (auto o = product_rule(t, sub("0"), sub("1")); o != Outcome::Unknown) {
        note("S5");
        return o;
      }
      if (t.left().is(TermKind::Prod)) {
        // (AB)C and A(BC) are isomorphic; "0.1*1" names the product of
        // subterms 0.1 and 1.
        const OrderTerm& a = t.left().left();
        const OrderTerm& b = t.left().right();
        if (auto o = product_rule(OrderTerm::prod(a, OrderTerm::prod(b, t.right())), sub("0.0"),
                                  sub("0.1*1"));
            o != Outcome::Unknown) {
          note("S5:assoc");
          return o;
        }
      }
    }
    if (t.is(TermKind::Sum) && t.children().size() == 2) {
      const Classification first = classify_normal(t.child(0));
      const Classification second = classify_normal(t.child(1));
      if (first.rev_well_order && second.well_order &&
          ordinal_value(OrderTerm::rev(t.child(0)))->single_term() &&
          ordinal_value_normal(t.child(1))->single_term()) {
        note("S6");
        return Outcome::Yes;
      }
    }
    note("S7");
    return Outcome::Unknown;
  }

  std::vector<std::string> trace;

 private:
  Outcome product_rule(const OrderTerm& t, const std::string& lpath, const std::string& kpath) {
    const Outcome l = run(t.left(), lpath);
    const Outcome k = run(t.right(), kpath);
    if (l == Outcome::Yes && k == Outcome::Yes) return Outcome::Yes;
    if (k == Outcome::No && classify_normal(t.left()).scattered) return Outcome::No;
    return Outcome::Unknown;
  }
};

}  // namespace detail

inline Verdict sts_verdict(const OrderTerm& t) {
  detail::VerdictEngine engine;
  Verdict v;
  v.outcome = engine.run(rev_push(t), "");
  v.rule_trace = std::move(engine.trace);
  return v;
}

enum class ReduceKind { WellOrder, NonScattered, Main };

/// wo: (1+L)w; nonscat: eta + Lw; main: z^K (1+L) w with args (K, L).
inline OrderTerm reduce(ReduceKind kind, const std::vector<OrderTerm>& args) {
  const std::size_t want = kind == ReduceKind::Main ? 2 : 1;
  if (args.size() != want)
    throw std::invalid_argument("reduce: expected " + std::to_string(want) + " argument(s)");
  const auto one_plus = [](const OrderTerm& l) { return OrderTerm::sum({OrderTerm::fin(1), l}); };
  switch (kind) {
    case ReduceKind::WellOrder: return OrderTerm::prod(one_plus(args[0]), OrderTerm::omega());
    case ReduceKind::NonScattered:
      return OrderTerm::sum({OrderTerm::eta(), OrderTerm::prod(args[0], OrderTerm::omega())});
    case ReduceKind::Main:
      return OrderTerm::prod(OrderTerm::prod(OrderTerm::zeta_pow(args[0]), one_plus(args[1])),
                             OrderTerm::omega());
  }
  return args[0];
}

}  // namespace linord
