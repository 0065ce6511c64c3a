#pragma once

// Executable order-preserving surjections between coded orders: witnesses,
// clamps, definition by pieces, family mashing and the constructions built
// on them, plus a finitary checker.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linord/classify.hpp"
#include "linord/coded_order.hpp"
#include "linord/finite_oracle.hpp"
#include "linord/realize.hpp"

namespace linord {

/// A surjection source ->> target given by a total map on source codes.
struct EpiWitness {
  CodedOrder source;
  CodedOrder target;
  std::function<Code(Code)> map;
  /// Preimage of a target code as a suborder of source, when known.
  std::function<CodedOrder(Code)> fiber;
  std::vector<std::string> provenance;

  Code operator()(Code x) const { return map(x); }
  [[nodiscard]] bool has_fibers() const { return static_cast<bool>(fiber); }
};

namespace detail {

template <class Key, class Value>
std::function<Value(Key)> memoize(std::function<Value(Key)> f) {
  struct State {
    std::mutex mu;
    std::map<Key, Value> cache;
  };
  auto state = std::make_shared<State>();
  return [f = std::move(f), state](Key k) -> Value {
    {
      std::lock_guard lock(state->mu);
      auto it = state->cache.find(k);
      if (it != state->cache.end()) return it->second;
    }
    Value v = f(k);
    std::lock_guard lock(state->mu);
    return state->cache.emplace(k, std::move(v)).first->second;
  };
}

inline void require_member(const CodedOrder& o, Code c, const std::string& what) {
  if (!o.contains(c)) throw std::invalid_argument(what + ": " + to_string(c) + " is not a member of " + o.name());
}

inline std::vector<std::string> with_step(std::vector<std::string> trace, std::string step) {
  trace.push_back(std::move(step));
  return trace;
}

/// Any member of a non-empty order, preferring its minimum.
inline Code some_member(const CodedOrder& o) {
  if (auto m = o.min()) return *m;
  if (auto m = o.max()) return *m;
  auto xs = o.first(1);
  if (xs.empty()) throw std::invalid_argument("empty order " + o.name());
  return xs.front();
}

/// Entries of s strictly beyond floor, in the direction of s.
inline CodeStream stream_beyond(const CodedOrder& o, const CodeStream& s, Code floor) {
  const bool up = s.direction == Direction::Increasing;
  std::uint64_t offset = 0;
  while (up ? o.leq(s(offset), floor) : o.leq(floor, s(offset))) {
    if (++offset > (1u << 20)) throw std::runtime_error("stream does not pass " + to_string(floor));
  }
  return CodeStream{[s, offset](std::uint64_t i) { return s(i + offset); }, s.direction};
}

/// Enumerates the codes pair(a, x) for x in inner.
inline std::function<void(Code, std::vector<Code>&)> fibre_collect(const CodedOrder& inner, Code a) {
  return [inner, a](Code bound, std::vector<Code>& out) {
    const auto top = max_second(a, bound);
    if (!top) return;
    for (Code x : inner.members_upto(*top)) out.push_back(pair(a, x));
  };
}

}  // namespace detail

inline CodedOrder point_order(const CodedOrder& base, Code c) {
  RestrictInfo info;
  info.name = "Point";
  info.pred = [c](Code x) { return x == c; };
  info.min = c;
  info.max = c;
  info.convex = true;
  info.size = 1;
  info.locally_finite = true;
  return restrict_order(base, std::move(info));
}

// ---------------------------------------------------------------------------
// Basic witnesses

inline EpiWitness identity_epi(const CodedOrder& k) {
  EpiWitness w{k, k, [](Code x) { return x; }, nullptr, {"identity(" + k.name() + ")"}};
  w.fiber = [k](Code y) { return point_order(k, y); };
  return w;
}

inline EpiWitness constant_epi(const CodedOrder& source, const CodedOrder& target, Code value) {
  detail::require_member(target, value, "constant_epi");
  if (target.size() != std::optional<std::uint64_t>(1))
    throw std::invalid_argument("constant_epi: target must be a singleton");
  return {source, target, [value](Code) { return value; }, [source](Code) { return source; },
          {"constant(" + to_string(value) + ")"}};
}

/// A map between finite orders given on ranks.
inline EpiWitness finite_epi(const FinOrder& source, const FinOrder& target, const FinMap& m) {
  if (m.size() != source.size() || !is_epi(m, target.size()))
    throw std::invalid_argument("finite_epi: not an epimorphism");
  const CodedOrder src = finite_order(source);
  EpiWitness w{src, finite_order(target),
               [source, target, m](Code x) { return target.at(m.at(*source.rank(x))); },
               nullptr,
               {"finite(" + std::to_string(source.size()) + "->" + std::to_string(target.size()) + ")"}};
  w.fiber = [source, target, m](Code y) {
    const std::size_t r = *target.rank(y);
    std::vector<Code> pre;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] == r) pre.push_back(source.at(i));
    return finite_order(FinOrder(std::move(pre)));
  };
  return w;
}

/// The rank collapse of an n-chain onto an m-chain: the first m - 1 ranks
/// are kept, the rest go to the top.
inline FinMap rank_collapse(std::size_t n, std::size_t m) {
  if (m == 0 || m > n) throw std::invalid_argument("rank_collapse: need 1 <= m <= n");
  FinMap out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(i, m - 1);
  return out;
}

/// omega ->> omega collapsing [0, c] to 0.
inline EpiWitness omega_collapse(std::uint64_t c) {
  const CodedOrder w = omega_order();
  EpiWitness e{w, w, [c](Code x) { return x <= c ? Code{0} : x - c; }, nullptr,
               {"omega-collapse(" + std::to_string(c) + ")"}};
  e.fiber = [w, c](Code y) { return y == 0 ? interval(w, 0, c) : point_order(w, y + c); };
  return e;
}

/// b after a.
inline EpiWitness compose(const EpiWitness& a, const EpiWitness& b) {
  auto trace = a.provenance;
  trace.insert(trace.end(), b.provenance.begin(), b.provenance.end());
  return {a.source, b.target, [f = a.map, g = b.map](Code x) { return g(f(x)); }, nullptr,
          detail::with_step(std::move(trace), "compose")};
}

/// The same map viewed between the given (reversed) carriers.
inline EpiWitness reversed_epi(const EpiWitness& w, CodedOrder source, CodedOrder target) {
  EpiWitness r{std::move(source), std::move(target), w.map, nullptr,
               detail::with_step(w.provenance, "reverse")};
  if (w.fiber)
    r.fiber = [f = w.fiber](Code y) { return rev_order(f(y)); };
  return r;
}

// ---------------------------------------------------------------------------
// Clamps

/// sigma^l: values above l become l; onto (<-, l].
inline EpiWitness clamp_above(const EpiWitness& s, Code l) {
  detail::require_member(s.target, l, "clamp_above");
  const CodedOrder t = s.target;
  return {s.source, ray_to(t, l),
          [f = s.map, t, l](Code x) {
            const Code y = f(x);
            return t.leq(y, l) ? y : l;
          },
          nullptr, detail::with_step(s.provenance, "clamp^" + to_string(l))};
}

/// sigma_l: values below l become l; onto [l, ->).
inline EpiWitness clamp_below(const EpiWitness& s, Code l) {
  detail::require_member(s.target, l, "clamp_below");
  const CodedOrder t = s.target;
  return {s.source, ray_from(t, l),
          [f = s.map, t, l](Code x) {
            const Code y = f(x);
            return t.leq(l, y) ? y : l;
          },
          nullptr, detail::with_step(s.provenance, "clamp_" + to_string(l))};
}

/// sigma_l^l2: onto [l, l2].
inline EpiWitness clamp_between(const EpiWitness& s, Code l, Code l2) {
  detail::require_member(s.target, l, "clamp_between");
  detail::require_member(s.target, l2, "clamp_between");
  const CodedOrder t = s.target;
  if (!t.leq(l, l2)) throw std::invalid_argument("clamp_between: bounds out of order");
  return {s.source, interval(t, l, l2),
          [f = s.map, t, l, l2](Code x) {
            const Code y = f(x);
            if (t.less(y, l)) return l;
            if (t.less(l2, y)) return l2;
            return y;
          },
          nullptr, detail::with_step(s.provenance, "clamp_" + to_string(l) + "^" + to_string(l2))};
}

inline EpiWitness clamp_ops(const EpiWitness& s, std::optional<Code> lo, std::optional<Code> hi) {
  if (lo && hi) return clamp_between(s, *lo, *hi);
  if (lo) return clamp_below(s, *lo);
  if (hi) return clamp_above(s, *hi);
  return s;
}

// ---------------------------------------------------------------------------
// Prefix checking

struct CheckReport {
  enum class Verdict { Pass, Fail, Inconclusive };
  std::uint64_t pairs_checked = 0;
  std::vector<std::pair<Code, Code>> monotone_violations;
  std::vector<Code> range_violations;
  std::uint64_t targets_covered = 0;
  std::vector<Code> targets_missed;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

inline const char* to_string(CheckReport::Verdict v) {
  switch (v) {
    case CheckReport::Verdict::Pass: return "pass";
    case CheckReport::Verdict::Fail: return "fail";
    case CheckReport::Verdict::Inconclusive: return "inconclusive";
  }
  return "";
}

/// Monotonicity on all pairs of the first n source codes, and a preimage
/// search for each of the first n target codes among the first `bound`
/// source codes.
inline CheckReport check_epi_on_prefix(const EpiWitness& w, std::size_t n, std::size_t bound) {
  if (n == 0 || bound == 0) throw std::invalid_argument("check_epi_on_prefix: n and bound must be positive");
  CheckReport r;
  bool cut_short = false;
  std::vector<Code> xs, ys;
  try {
    xs = w.source.first(n);
    for (Code x : xs) ys.push_back(w.map(x));
  } catch (const std::overflow_error& e) {
    r.note = std::string("code range exhausted: ") + e.what();
    r.verdict = CheckReport::Verdict::Inconclusive;
    return r;
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!w.target.contains(ys[i])) r.range_violations.push_back(xs[i]);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      ++r.pairs_checked;
      const bool up = w.source.leq(xs[i], xs[j]);
      const bool ok = up ? w.target.leq(ys[i], ys[j]) : w.target.leq(ys[j], ys[i]);
      if (!ok) r.monotone_violations.emplace_back(xs[i], xs[j]);
    }

  std::vector<Code> targets;
  try {
    targets = w.target.first(n);
  } catch (const std::overflow_error& e) {
    cut_short = true;
    r.note = std::string("target enumeration cut short: ") + e.what();
  }
  std::unordered_set<Code, CodeHash> want(targets.begin(), targets.end());
  std::size_t scanned = 0;
  for (std::size_t m = std::min<std::size_t>(bound, std::max<std::size_t>(n, 256));; m = std::min(bound, m * 4)) {
    std::vector<Code> src;
    try {
      src = w.source.first(m);
    } catch (const std::overflow_error& e) {
      cut_short = true;
      r.note = std::string("source enumeration cut short: ") + e.what();
      break;
    }
    for (; scanned < src.size() && !want.empty(); ++scanned) {
      try {
        want.erase(w.map(src[scanned]));
      } catch (const std::overflow_error&) {
        cut_short = true;
      }
    }
    if (want.empty() || m >= bound || src.size() < m) break;
  }
  for (Code t : targets)
    if (want.count(t)) r.targets_missed.push_back(t);
  r.targets_covered = targets.size() - r.targets_missed.size();

  if (!r.monotone_violations.empty() || !r.range_violations.empty() || !r.targets_missed.empty())
    r.verdict = CheckReport::Verdict::Fail;
  else
    r.verdict = cut_short ? CheckReport::Verdict::Inconclusive : CheckReport::Verdict::Pass;
  return r;
}

// ---------------------------------------------------------------------------
// Definition by pieces

/// Where a code sits relative to a family: inside the least piece containing
/// it, or strictly between pieces index and index + 1.
struct Located {
  std::int64_t index = 0;
  bool inside = true;
};

/// Convex pieces (K_i) of a carrier indexed by an interval of Z; an absent
/// bound means the index set is unbounded on that side.
struct Family {
  CodedOrder carrier;
  std::optional<std::int64_t> lo, hi;
  std::function<CodedOrder(std::int64_t)> piece;
  std::function<Located(Code)> locate;
  std::function<bool(std::int64_t)> adjacent;   // K_i, K_{i+1}: nothing strictly between
  std::function<bool(std::int64_t)> connected;  // K_i, K_{i+1}: a shared point

  [[nodiscard]] bool has(std::int64_t i) const { return (!lo || i >= *lo) && (!hi || i <= *hi); }
  [[nodiscard]] bool finite() const { return lo && hi; }
};

/// A covering (L_i) of the target, indexed like the source family.
struct Covering {
  CodedOrder carrier;
  std::function<CodedOrder(std::int64_t)> piece;
  std::function<std::int64_t(Code)> locate;  // some i with y in L_i
};

struct PiecesSpec {
  Family source;
  Covering target;
  /// Validation covers indices within [-window, window] and sample codes.
  std::int64_t window = 6;
  std::size_t sample = 24;
};

using SigmaFn = std::function<EpiWitness(std::int64_t)>;

namespace detail {

/// Up to n members of o; fewer when enumeration hits the code range.
inline std::vector<Code> sample(const CodedOrder& o, std::size_t n) {
  try {
    return o.first(n);
  } catch (const std::overflow_error&) {
    return {};
  }
}

/// Every sampled element of a is <= every sampled element of b.
inline bool pieces_ordered(const CodedOrder& carrier, const CodedOrder& a, const CodedOrder& b, std::size_t s) {
  if (a.max() && b.min()) return carrier.leq(*a.max(), *b.min());
  const auto xs = sample(a, s);
  const auto ys = sample(b, s);
  for (Code x : xs)
    for (Code y : ys)
      if (!carrier.leq(x, y)) return false;
  return true;
}

inline bool shares_point(const CodedOrder& a, const CodedOrder& b) {
  return a.max() && b.min() && *a.max() == *b.min();
}

inline bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

inline bool validate_pieces(const PiecesSpec& spec, const SigmaFn& sigma, std::string* why) {
  const Family& f = spec.source;
  const Covering& c = spec.target;
  const std::size_t s = spec.sample;
  const std::int64_t from = f.lo ? std::max(*f.lo, -spec.window) : -spec.window;
  const std::int64_t to = f.hi ? std::min(*f.hi, spec.window) : spec.window;
  if (f.lo && f.hi && *f.lo > *f.hi) return fail(why, "empty index set");
  if (from > to) return fail(why, "validation window misses the index set");
  const std::string at = " at ";

  // Unboundedness at finite ends of the index set.
  for (auto [end, top] : {std::pair{f.lo, false}, std::pair{f.hi, true}}) {
    if (!end) continue;
    const CodedOrder k = f.piece(*end);
    const CodedOrder l = c.piece(*end);
    const auto k_ext = top ? f.carrier.max() : f.carrier.min();
    const auto p_ext = top ? k.max() : k.min();
    if (k_ext ? !k.contains(*k_ext) : p_ext.has_value())
      return fail(why, "family bounded " + std::string(top ? "above" : "below"));
    const auto l_ext = top ? c.carrier.max() : c.carrier.min();
    const auto q_ext = top ? l.max() : l.min();
    if (l_ext ? !l.contains(*l_ext) : q_ext.has_value())
      return fail(why, "covering bounded " + std::string(top ? "above" : "below"));
  }

  for (std::int64_t i = from; i <= to; ++i) {
    const CodedOrder k = f.piece(i);
    const CodedOrder l = c.piece(i);
    if (k.first(1).empty()) return fail(why, "empty source piece" + at + std::to_string(i));
    if (l.first(1).empty()) return fail(why, "empty target piece" + at + std::to_string(i));
    if (i < to || (f.hi ? i < *f.hi : true)) {
      if (!f.has(i + 1)) continue;
      const CodedOrder k2 = f.piece(i + 1);
      const CodedOrder l2 = c.piece(i + 1);
      if (!pieces_ordered(f.carrier, k, k2, s)) return fail(why, "source pieces out of order" + at + std::to_string(i));
      if (!pieces_ordered(c.carrier, l, l2, s)) return fail(why, "target pieces out of order" + at + std::to_string(i));
      const bool conn = f.connected(i);
      if (conn != shares_point(k, k2)) return fail(why, "wrong connectedness" + at + std::to_string(i));
      if (conn && !f.adjacent(i)) return fail(why, "connected pieces not adjacent" + at + std::to_string(i));
      if (!f.adjacent(i) && !l.max() && !l2.min())
        return fail(why, "gap with no maximum or minimum to absorb it" + at + std::to_string(i));
      if (conn && !shares_point(l, l2)) return fail(why, "target pieces not connected" + at + std::to_string(i));
    }
    // The piece map is an epimorphism K_i ->> L_i, as far as can be checked.
    const EpiWitness sg = sigma(i);
    for (Code x : sample(k, s))
      if (!sg.source.contains(x)) return fail(why, "piece map misses its domain" + at + std::to_string(i));
    for (Code y : sample(l, s))
      if (!sg.target.contains(y)) return fail(why, "piece map target differs" + at + std::to_string(i));
    for (Code y : sample(sg.target, s))
      if (!l.contains(y)) return fail(why, "piece map target differs" + at + std::to_string(i));
    const auto ks = k.size();
    const bool small = ks && *ks <= 64;
    const std::size_t n = small ? static_cast<std::size_t>(*ks) : 12;
    const auto report = check_epi_on_prefix(sg, n, small ? n : 1500);
    // A target missed within a finite search bound proves nothing unless the
    // piece was searched exhaustively.
    if (!report.monotone_violations.empty() || !report.range_violations.empty() ||
        (small && !report.targets_missed.empty()))
      return fail(why, "piece map is not an epimorphism" + at + std::to_string(i));
  }

  // Sampled codes are placed consistently.
  for (Code x : sample(f.carrier, s)) {
    const Located loc = f.locate(x);
    if (!f.has(loc.index)) return fail(why, "code " + to_string(x) + " located outside the family");
    const CodedOrder k = f.piece(loc.index);
    if (loc.inside) {
      if (!k.contains(x)) return fail(why, "code " + to_string(x) + " is not in its piece");
      continue;
    }
    if (!f.has(loc.index + 1)) return fail(why, "code " + to_string(x) + " lies beyond the family");
    const CodedOrder k2 = f.piece(loc.index + 1);
    if (k.contains(x) || k2.contains(x)) return fail(why, "gap code " + to_string(x) + " lies in a piece");
    for (Code a : sample(k, s))
      if (!f.carrier.less(a, x)) return fail(why, "gap code " + to_string(x) + " misplaced");
    for (Code b : sample(k2, s))
      if (!f.carrier.less(x, b)) return fail(why, "gap code " + to_string(x) + " misplaced");
  }
  for (Code y : sample(c.carrier, s)) {
    const std::int64_t i = c.locate(y);
    if (!f.has(i) || !c.piece(i).contains(y)) return fail(why, "target code " + to_string(y) + " uncovered");
  }
  return true;
}

}  // namespace detail

/// The glued map: sigma_i on K_i, and between K_i and K_{i+1} the maximum
/// of L_i or else the minimum of L_{i+1}. Empty when validation fails.
inline std::optional<EpiWitness> def_pieces(const PiecesSpec& spec, SigmaFn sigma, std::string* why = nullptr) {
  sigma = detail::memoize<std::int64_t, EpiWitness>(std::move(sigma));
  if (!detail::validate_pieces(spec, sigma, why)) return std::nullopt;
  const Family f = spec.source;
  const Covering c = spec.target;
  auto map = [f, c, sigma](Code x) -> Code {
    const Located loc = f.locate(x);
    if (loc.inside) {
      const Code y = sigma(loc.index).map(x);
      if (f.has(loc.index + 1) && f.connected(loc.index) && f.piece(loc.index + 1).contains(x)) {
        if (sigma(loc.index + 1).map(x) != y)
          throw std::logic_error("def_pieces: pieces disagree at shared point " + to_string(x));
      }
      return y;
    }
    if (auto top = c.piece(loc.index).max()) return *top;
    if (auto bottom = c.piece(loc.index + 1).min()) return *bottom;
    throw std::logic_error("def_pieces: nothing absorbs gap code " + to_string(x));
  };
  std::string range = (f.lo ? std::to_string(*f.lo) : "-inf") + ".." + (f.hi ? std::to_string(*f.hi) : "inf");
  return EpiWitness{f.carrier, c.carrier, map, nullptr, {"pieces[" + range + "]"}};
}

// ---------------------------------------------------------------------------
// Families with few pieces

namespace detail {

/// Locate among finitely many ordered convex pieces.
inline Located locate_in(const CodedOrder& carrier, const std::vector<CodedOrder>& pieces,
                         const std::vector<Code>& reps, Code x) {
  for (std::size_t p = 0; p < pieces.size(); ++p)
    if (pieces[p].contains(x)) return {static_cast<std::int64_t>(p), true};
  for (std::size_t p = 0; p < pieces.size(); ++p)
    if (carrier.less(x, reps[p])) return {static_cast<std::int64_t>(p) - 1, false};
  return {static_cast<std::int64_t>(pieces.size()) - 1, false};
}

inline bool extrema_adjacent(const CodedOrder& carrier, const CodedOrder& a, const CodedOrder& b) {
  if (!a.max() || !b.min()) return false;
  if (*a.max() == *b.min()) return true;
  const IntervalSize n = carrier.interval_size(*a.max(), *b.min());
  return n.is_finite() && n.count == 2;
}

}  // namespace detail

/// A finite family from explicit pieces. Adjacency is read from extrema
/// unless given.
inline Family finite_family(const CodedOrder& carrier, std::vector<CodedOrder> pieces,
                            std::vector<std::optional<bool>> adjacent = {}) {
  if (pieces.empty()) throw std::invalid_argument("finite_family: no pieces");
  adjacent.resize(pieces.size());
  std::vector<Code> reps;
  for (const auto& p : pieces) reps.push_back(detail::some_member(p));
  std::vector<bool> adj(pieces.size(), false), conn(pieces.size(), false);
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    conn[i] = detail::shares_point(pieces[i], pieces[i + 1]);
    adj[i] = adjacent[i] ? *adjacent[i] : detail::extrema_adjacent(carrier, pieces[i], pieces[i + 1]);
  }
  Family f;
  f.carrier = carrier;
  f.lo = 0;
  f.hi = static_cast<std::int64_t>(pieces.size()) - 1;
  f.piece = [pieces](std::int64_t i) { return pieces.at(static_cast<std::size_t>(i)); };
  f.locate = [carrier, pieces, reps](Code x) { return detail::locate_in(carrier, pieces, reps, x); };
  f.adjacent = [adj](std::int64_t i) { return static_cast<bool>(adj.at(static_cast<std::size_t>(i))); };
  f.connected = [conn](std::int64_t i) { return static_cast<bool>(conn.at(static_cast<std::size_t>(i))); };
  return f;
}

inline Covering finite_covering(const CodedOrder& carrier, std::vector<CodedOrder> pieces) {
  Covering c;
  c.carrier = carrier;
  c.piece = [pieces](std::int64_t i) { return pieces.at(static_cast<std::size_t>(i)); };
  c.locate = [pieces](Code y) -> std::int64_t {
    for (std::size_t p = 0; p < pieces.size(); ++p)
      if (pieces[p].contains(y)) return static_cast<std::int64_t>(p);
    return -1;
  };
  return c;
}

namespace detail {

/// The tail of a monotone stream from its first entry satisfying pred.
inline CodeStream stream_while(const CodeStream& s, std::function<bool(Code)> pred) {
  std::uint64_t offset = 0;
  while (!pred(s(offset)))
    if (++offset > (1u << 20)) throw std::runtime_error("stream never enters the part");
  return CodeStream{[s, offset](std::uint64_t i) { return s(i + offset); }, s.direction};
}

}  // namespace detail

/// A convex run of a carrier cut out by a predicate. Missing extrema, size
/// and streams are filled in from the carrier where possible; a fence is a
/// code just outside the run on that side.
inline CodedOrder convex_part(const CodedOrder& carrier, std::function<bool(Code)> pred,
                              std::optional<Code> min, std::optional<Code> max, std::string name,
                              std::optional<Code> fence_above = std::nullopt,
                              std::optional<Code> fence_below = std::nullopt,
                              std::optional<CodeStream> cofinal = std::nullopt,
                              std::optional<CodeStream> coinitial = std::nullopt) {
  RestrictInfo info;
  info.name = std::move(name);
  info.pred = pred;
  info.convex = true;
  if (!min && carrier.min() && pred(*carrier.min())) min = carrier.min();
  if (!max && carrier.max() && pred(*carrier.max())) max = carrier.max();
  std::optional<std::uint64_t> size;
  const auto span = [&](Code a, Code b, std::uint64_t drop) -> std::optional<std::uint64_t> {
    const IntervalSize n = carrier.interval_size(a, b);
    if (!n.is_finite() || n.count < drop) return std::nullopt;
    return n.count - drop;
  };
  if (min && max)
    size = span(*min, *max, 0);
  else if (min && fence_above)
    size = span(*min, *fence_above, 1);
  else if (max && fence_below)
    size = span(*fence_below, *max, 1);
  if (size) {
    if (*size == 0) throw std::invalid_argument("convex_part: " + info.name + " is empty");
    RestrictInfo probe = info;
    probe.size = size;
    const auto members = carrier.sorted(restrict_order(carrier, probe).first(static_cast<std::size_t>(*size)));
    min = members.front();
    max = members.back();
    info.locally_finite = true;
  } else {
    info.cofinal = cofinal;
    info.coinitial = coinitial;
    if (!max && !cofinal && !fence_above && !carrier.max())
      if (auto s = carrier.cofinal()) info.cofinal = detail::stream_while(*s, pred);
    if (!min && !coinitial && !fence_below && !carrier.min())
      if (auto s = carrier.coinitial()) info.coinitial = detail::stream_while(*s, pred);
  }
  info.min = min;
  info.max = max;
  info.size = size;
  return restrict_order(carrier, std::move(info));
}

/// The pieces instance of a finite fuzz instance, on chains 0..n-1.
inline std::pair<PiecesSpec, SigmaFn> pieces_from_finite(const FinPiecesInstance& in) {
  const CodedOrder k = fin_order(in.k_size);
  const CodedOrder l = fin_order(in.l_size);
  std::vector<CodedOrder> ks, ls;
  for (auto [a, b] : in.k_pieces) ks.push_back(interval(k, a, b));
  for (auto [a, b] : in.l_pieces) ls.push_back(interval(l, a, b));
  PiecesSpec spec{finite_family(k, ks), finite_covering(l, ls)};
  SigmaFn sigma = [in, ks, ls](std::int64_t i) {
    const auto p = static_cast<std::size_t>(i);
    const auto [ka, kb] = in.k_pieces.at(p);
    const auto [la, lb] = in.l_pieces.at(p);
    const FinMap m = in.sigmas.at(p);
    return EpiWitness{ks[p], ls[p],
                      [ka = ka, la = la, m](Code x) {
                        return static_cast<Code>(la + m.at(static_cast<std::size_t>(x) - ka));
                      },
                      nullptr,
                      {"finite-piece(" + std::to_string(kb - ka + 1) + "->" + std::to_string(lb - la + 1) + ")"}};
  };
  return {spec, sigma};
}

/// Rank form of a witness between chains 0..n-1.
inline FinMap as_fin_map(const EpiWitness& w, std::size_t n) {
  FinMap out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::size_t>(w.map(i));
  return out;
}

// ---------------------------------------------------------------------------
// Anchor sequences

/// A strictly increasing sequence (a_i), coinitial and cofinal in an order,
/// indexed by an interval of Z containing 0.
class Anchors {
 public:
  explicit Anchors(CodedOrder o) : o_(std::move(o)) {
    if (auto n = o_.size()) {
      sorted_ = o_.sorted(o_.first(static_cast<std::size_t>(*n)));
      lo = 0;
      hi = static_cast<std::int64_t>(sorted_.size()) - 1;
      return;
    }
    base_ = detail::some_member(o_);
    if (auto m = o_.max()) {
      top_ = *m;
      hi = *m == base_ ? 0 : 1;
    } else {
      auto s = o_.cofinal();
      if (!s) throw std::invalid_argument("Anchors: " + o_.name() + " has no maximum and no cofinal stream");
      up_ = detail::stream_beyond(o_, *s, base_);
    }
    if (o_.min()) {
      lo = 0;
    } else {
      auto s = o_.coinitial();
      if (!s) throw std::invalid_argument("Anchors: " + o_.name() + " has no minimum and no coinitial stream");
      down_ = detail::stream_beyond(o_, *s, base_);
    }
  }

  std::optional<std::int64_t> lo, hi;

  [[nodiscard]] Code at(std::int64_t i) const {
    if ((lo && i < *lo) || (hi && i > *hi)) throw std::out_of_range("Anchors: index out of range");
    if (!sorted_.empty()) return sorted_[static_cast<std::size_t>(i)];
    if (i == 0) return base_;
    if (i > 0) return top_ ? *top_ : (*up_)(static_cast<std::uint64_t>(i - 1));
    return (*down_)(static_cast<std::uint64_t>(-i - 1));
  }

  /// The i with a_i <= x < a_{i+1}; inside when x = a_i.
  [[nodiscard]] Located locate(Code x) const {
    std::int64_t i = 0;
    std::uint64_t steps = 0;
    const auto guard = [&] {
      if (++steps > (1u << 22)) throw std::runtime_error("Anchors: locate gave up on " + to_string(x));
    };
    if (o_.leq(at(0), x)) {
      while ((!hi || i < *hi) && o_.leq(at(i + 1), x)) ++i, guard();
    } else {
      while (o_.less(x, at(i))) --i, guard();
    }
    return {i, at(i) == x};
  }

  [[nodiscard]] const CodedOrder& order() const { return o_; }

 private:
  CodedOrder o_;
  std::vector<Code> sorted_;
  Code base_ = 0;
  std::optional<Code> top_;
  std::optional<CodeStream> up_, down_;
};

// ---------------------------------------------------------------------------
// Family mash

namespace detail {

inline Family reverse_family(const Family& f) {
  Family r;
  r.carrier = rev_order(f.carrier);
  if (f.hi) r.lo = -*f.hi;
  if (f.lo) r.hi = -*f.lo;
  r.piece = [p = f.piece](std::int64_t i) { return rev_order(p(-i)); };
  r.locate = [f](Code x) -> Located {
    const Located loc = f.locate(x);
    if (!loc.inside) return {-loc.index - 1, false};
    if (f.has(loc.index + 1) && f.connected(loc.index) && f.piece(loc.index + 1).contains(x))
      return {-loc.index - 1, true};
    return {-loc.index, true};
  };
  r.adjacent = [a = f.adjacent](std::int64_t i) { return a(-i - 1); };
  r.connected = [c = f.connected](std::int64_t i) { return c(-i - 1); };
  return r;
}

/// Codes strictly below every code of f.piece(i).
inline std::function<bool(Code)> below_piece(const Family& f, std::int64_t i) {
  return [f, i](Code x) { return !f.piece(i).contains(x) && f.locate(x).index < i; };
}

inline std::function<bool(Code)> above_piece(const Family& f, std::int64_t i) {
  return [f, i](Code x) {
    if (f.piece(i).contains(x)) return false;
    const Located loc = f.locate(x);
    return loc.index > i || (loc.index == i && !loc.inside);
  };
}

inline bool part_empty(const Family& f, std::int64_t i, bool below) {
  const auto end = below ? f.carrier.min() : f.carrier.max();
  return end && f.piece(i).contains(*end);
}

inline EpiWitness onto_point(const CodedOrder& source, const CodedOrder& target, Code value) {
  return constant_epi(source, point_order(target, value), value);
}

inline EpiWitness glue_or_throw(const PiecesSpec& spec, SigmaFn sigma, const std::string& step) {
  std::string why;
  auto w = def_pieces(spec, std::move(sigma), &why);
  if (!w) throw std::logic_error("family_mash: " + step + " pieces rejected: " + why);
  w->provenance.insert(w->provenance.begin(), "mash:" + step);
  return *w;
}

}  // namespace detail

/// Given sigma_i : K_i ->> L for a nice family (K_i), an epimorphism K ->> L
/// glued by pieces after the extrema of L.
inline EpiWitness family_mash(const Family& fam, const CodedOrder& L, SigmaFn sigma) {
  if (fam.lo && fam.hi && *fam.lo > *fam.hi) throw std::invalid_argument("family_mash: empty index family");
  sigma = detail::memoize<std::int64_t, EpiWitness>(std::move(sigma));
  const CodedOrder K = fam.carrier;

  if (L.size() == std::optional<std::uint64_t>(1)) {
    auto w = constant_epi(K, L, *L.min());
    w.provenance.insert(w.provenance.begin(), "mash:singleton");
    return w;
  }
  if (fam.lo && fam.hi && *fam.lo == *fam.hi) {
    const EpiWitness s = sigma(*fam.lo);
    return {K, L, s.map, nullptr, detail::with_step(s.provenance, "mash:one-piece")};
  }
  const auto lmin = L.min();
  const auto lmax = L.max();

  if (fam.finite()) {
    // Two ends: (<-, l] from the first piece and [l, ->) from the last.
    const std::int64_t i = *fam.lo, j = *fam.hi;
    const Code l = detail::some_member(L);
    const CodedOrder ki = fam.piece(i), kj = fam.piece(j);
    std::optional<bool> adj;
    if (j == i + 1) adj = fam.adjacent(i);
    Family two = finite_family(K, {ki, kj}, {adj});
    const Located loc_j{1, true};
    two.locate = [fam, i, j, loc_j](Code x) -> Located {
      if (fam.piece(i).contains(x)) return {0, true};
      if (fam.piece(j).contains(x)) return loc_j;
      return {0, false};
    };
    PiecesSpec spec{two, finite_covering(L, {ray_to(L, l), ray_from(L, l)})};
    return detail::glue_or_throw(spec, [sigma, i, j, l](std::int64_t p) {
      return p == 0 ? clamp_above(sigma(i), l) : clamp_below(sigma(j), l);
    }, "finite");
  }

  if (lmin && lmax) {
    // Case 1: a middle piece onto L, everything below to min L, above to max L.
    const std::int64_t i = fam.lo ? *fam.lo + 1 : fam.hi ? *fam.hi - 1 : 0;
    const CodedOrder ki = fam.piece(i);
    std::vector<CodedOrder> ks, ls;
    std::vector<std::optional<bool>> adj;
    const bool has_below = !detail::part_empty(fam, i, true);
    if (has_below) {
      ks.push_back(convex_part(K, detail::below_piece(fam, i), std::nullopt, std::nullopt, "Below", ki.min()));
      ls.push_back(point_order(L, *lmin));
      adj.push_back(true);
    }
    ks.push_back(ki);
    ls.push_back(L);
    adj.push_back(true);
    if (!detail::part_empty(fam, i, false)) {
      ks.push_back(convex_part(K, detail::above_piece(fam, i), std::nullopt, std::nullopt, "Above", std::nullopt, ki.max()));
      ls.push_back(point_order(L, *lmax));
    }
    PiecesSpec spec{finite_family(K, ks, adj), finite_covering(L, ls)};
    const std::size_t mid = has_below ? 1 : 0;
    return detail::glue_or_throw(spec, [=](std::int64_t p) {
      const auto q = static_cast<std::size_t>(p);
      if (q == mid) {
        const EpiWitness s = sigma(i);
        return EpiWitness{ks[q], L, s.map, nullptr, s.provenance};
      }
      return detail::onto_point(ks[q], L, q < mid ? *lmin : *lmax);
    }, "both-extrema");
  }

  if (lmin) {
    // Case 2.
    const Code lhat = *lmin;
    if (fam.hi) {
      const std::int64_t i = *fam.hi;
      if (detail::part_empty(fam, i, true)) {
        const EpiWitness s = sigma(i);
        return {K, L, s.map, nullptr, detail::with_step(s.provenance, "mash:top-piece")};
      }
      const CodedOrder ki = fam.piece(i);
      const CodedOrder below = convex_part(K, detail::below_piece(fam, i), std::nullopt, std::nullopt, "Below", ki.min());
      PiecesSpec spec{finite_family(K, {below, ki}, {true}), finite_covering(L, {point_order(L, lhat), L})};
      return detail::glue_or_throw(spec, [=](std::int64_t p) {
        if (p == 0) return detail::onto_point(below, L, lhat);
        const EpiWitness s = sigma(i);
        return EpiWitness{ki, L, s.map, nullptr, s.provenance};
      }, "min-top-piece");
    }
    auto cof = L.cofinal();
    if (!cof) throw std::invalid_argument("family_mash: " + L.name() + " needs a cofinal stream");
    const CodeStream s = detail::stream_beyond(L, *cof, lhat);
    const std::int64_t i0 = fam.lo ? *fam.lo : 0;
    const CodedOrder k0 = fam.piece(i0);
    const CodedOrder first = detail::part_empty(fam, i0, true) ? k0 : convex_part(
        K, [fam, i0](Code x) { return fam.piece(i0).contains(x) || fam.locate(x).index < i0; }, K.min(),
        k0.max(), "FirstPiece", std::nullopt, std::nullopt, k0.cofinal());
    Family f;
    f.carrier = K;
    f.lo = 0;
    f.piece = [fam, i0, first](std::int64_t n) { return n == 0 ? first : fam.piece(i0 + n); };
    f.locate = [fam, i0](Code x) -> Located {
      const Located loc = fam.locate(x);
      if (loc.index < i0 || fam.piece(i0).contains(x)) return {0, true};
      return {loc.index - i0, loc.inside};
    };
    f.adjacent = [fam, i0](std::int64_t n) { return fam.adjacent(i0 + n); };
    f.connected = [fam, i0](std::int64_t n) { return fam.connected(i0 + n); };
    Covering c;
    c.carrier = L;
    c.piece = [L, lhat, s](std::int64_t n) {
      return n == 0 ? interval(L, lhat, s(0)) : interval(L, s(static_cast<std::uint64_t>(n - 1)), s(static_cast<std::uint64_t>(n)));
    };
    c.locate = [L, s](Code y) -> std::int64_t {
      std::uint64_t n = 0;
      while (L.less(s(n), y))
        if (++n > (1u << 22)) throw std::runtime_error("family_mash: stream does not reach " + to_string(y));
      return static_cast<std::int64_t>(n);
    };
    PiecesSpec spec{f, c};
    return detail::glue_or_throw(spec, [=](std::int64_t n) {
      if (n == 0) {
        const EpiWitness top = clamp_above(sigma(i0), s(0));
        return EpiWitness{first, top.target,
                          [fam, i0, lhat, m = top.map](Code x) { return fam.piece(i0).contains(x) ? m(x) : lhat; },
                          nullptr, top.provenance};
      }
      return clamp_between(sigma(i0 + n), s(static_cast<std::uint64_t>(n - 1)), s(static_cast<std::uint64_t>(n)));
    }, "min-stream");
  }

  if (lmax) {
    // Case 3 mirrors case 2.
    const Family r = detail::reverse_family(fam);
    const CodedOrder rl = rev_order(L);
    EpiWitness w = family_mash(r, rl, [sigma, rl](std::int64_t i) {
      const EpiWitness s = sigma(-i);
      return reversed_epi(s, rev_order(s.source), rev_order(s.target));
    });
    w = reversed_epi(w, K, L);
    w.provenance.push_back("mash:max-mirror");
    return w;
  }

  // Case 4: no extrema; pieces between consecutive anchors of L.
  const auto anchors = std::make_shared<Anchors>(L);
  const auto lo = fam.lo, hi = fam.hi;
  Covering c;
  c.carrier = L;
  c.piece = [L, anchors, lo, hi](std::int64_t i) {
    if (lo && i == *lo) return ray_to(L, anchors->at(i));
    if (hi && i == *hi) return ray_from(L, anchors->at(i));
    if (lo) return interval(L, anchors->at(i - 1), anchors->at(i));
    return interval(L, anchors->at(i), anchors->at(i + 1));
  };
  c.locate = [anchors, lo, hi](Code y) -> std::int64_t {
    const Located a = anchors->locate(y);
    if (lo) return std::max(*lo, a.inside ? a.index : a.index + 1);
    if (hi) return std::min(*hi, a.index);
    return a.index;
  };
  PiecesSpec spec{fam, c};
  return detail::glue_or_throw(spec, [sigma, anchors, lo, hi](std::int64_t i) {
    if (lo && i == *lo) return clamp_above(sigma(i), anchors->at(i));
    if (hi && i == *hi) return clamp_below(sigma(i), anchors->at(i));
    if (lo) return clamp_between(sigma(i), anchors->at(i - 1), anchors->at(i));
    return clamp_between(sigma(i), anchors->at(i), anchors->at(i + 1));
  }, "no-extrema");
}

/// The family mash of a finite fuzz instance, on chains 0..n-1.
inline EpiWitness mash_from_finite(const FinMashInstance& in) {
  const CodedOrder k = fin_order(in.k_size);
  const CodedOrder l = fin_order(in.l_size);
  std::vector<CodedOrder> ks;
  for (auto [a, b] : in.k_pieces) ks.push_back(interval(k, a, b));
  Family f = finite_family(k, ks);
  return family_mash(f, l, [in, ks, l](std::int64_t i) {
    const auto p = static_cast<std::size_t>(i);
    const std::size_t start = in.k_pieces.at(p).first;
    const FinMap m = in.sigmas.at(p);
    return EpiWitness{ks[p], l,
                      [start, m](Code x) { return static_cast<Code>(m.at(static_cast<std::size_t>(x) - start)); },
                      nullptr, {"finite-piece"}};
  });
}

// ---------------------------------------------------------------------------
// Products

/// L*K ->> L, mashing the copies L x {k_i} along anchors of K.
inline EpiWitness lk_onto_l(const CodedOrder& L, const CodedOrder& K) {
  const CodedOrder lk = prod_order(L, K);
  const auto anchors = std::make_shared<Anchors>(K);
  const auto block = [L, lk, anchors](std::int64_t i) {
    const Code k = anchors->at(i);
    RestrictInfo info;
    info.name = "Copy";
    info.pred = [k](Code x) { return unpair(x).first == k; };
    if (auto m = L.min()) info.min = pair(k, *m);
    if (auto m = L.max()) info.max = pair(k, *m);
    const auto lift = [k](const CodeStream& s) {
      return CodeStream{[s, k](std::uint64_t n) { return pair(k, s(n)); }, s.direction};
    };
    if (auto s = L.cofinal()) info.cofinal = lift(*s);
    if (auto s = L.coinitial()) info.coinitial = lift(*s);
    info.convex = true;
    info.size = L.size();
    info.locally_finite = L.locally_finite();
    info.collect = detail::fibre_collect(L, k);
    return restrict_order(lk, std::move(info));
  };
  Family f;
  f.carrier = lk;
  f.lo = anchors->lo;
  f.hi = anchors->hi;
  f.piece = detail::memoize<std::int64_t, CodedOrder>(block);
  f.locate = [anchors](Code x) { return anchors->locate(unpair(x).first); };
  f.adjacent = [K, anchors](std::int64_t i) {
    const IntervalSize n = K.interval_size(anchors->at(i), anchors->at(i + 1));
    return n.is_finite() && n.count == 2;
  };
  f.connected = [](std::int64_t) { return false; };
  EpiWitness w = family_mash(f, L, [f, L](std::int64_t i) {
    return EpiWitness{f.piece(i), L, [](Code x) { return unpair(x).second; }, nullptr, {"copy"}};
  });
  w.provenance.insert(w.provenance.begin(), "lk(" + L.name() + "," + K.name() + ")");
  return w;
}

inline EpiWitness lk_onto_l(const OrderTerm& L, const OrderTerm& K) {
  return lk_onto_l(realize(L), realize(K));
}

/// From phi : M ->> K with fibers, L*M ->> L*K gluing L*M_k ->> L over k.
inline EpiWitness prod_epi(const CodedOrder& L, const EpiWitness& phi) {
  if (!phi.has_fibers()) throw std::invalid_argument("prod_epi: the witness carries no fibers");
  auto per_fiber = detail::memoize<Code, EpiWitness>(
      [L, fiber = phi.fiber](Code k) { return lk_onto_l(L, fiber(k)); });
  EpiWitness w{prod_order(L, phi.source), prod_order(L, phi.target),
               [f = phi.map, per_fiber](Code x) {
                 const Code k = f(unpair(x).first);
                 return pair(k, per_fiber(k).map(x));
               },
               nullptr, detail::with_step(phi.provenance, "prod(" + L.name() + ")")};
  return w;
}

inline EpiWitness prod_epi(const OrderTerm& L, const EpiWitness& phi) { return prod_epi(realize(L), phi); }

// ---------------------------------------------------------------------------
// Reverse ordinal plus ordinal

/// The i-th summand of a sum order, as a suborder of the sum.
inline CodedOrder summand_piece(const CodedOrder& sum, Code i, const CodedOrder& inner) {
  RestrictInfo info;
  info.name = "Summand(" + to_string(i) + ")";
  info.pred = [i](Code x) { return unpair(x).first == i; };
  if (auto v = inner.min()) info.min = pair(i, *v);
  if (auto v = inner.max()) info.max = pair(i, *v);
  const auto lift = [i](const CodeStream& s) {
    return CodeStream{[s, i](std::uint64_t k) { return pair(i, s(k)); }, s.direction};
  };
  if (auto s = inner.cofinal()) info.cofinal = lift(*s);
  if (auto s = inner.coinitial()) info.coinitial = lift(*s);
  info.convex = true;
  info.size = inner.size();
  info.locally_finite = inner.locally_finite();
  info.collect = detail::fibre_collect(inner, i);
  return restrict_order(sum, std::move(info));
}

enum class Side { Left, Right };

/// (w^g n)* + w^d m onto one of its summands: the other summand collapses
/// to the extremum of the chosen one that faces it.
inline EpiWitness revord_plus_ord_epi(const Cnf& g, std::uint64_t n, const Cnf& d, std::uint64_t m, Side side) {
  if (n == 0 || m == 0) throw std::invalid_argument("revord_plus_ord_epi: multiples must be positive");
  const CodedOrder a = rev_order(realize(cnf_to_term(Cnf::omega_pow(g, n))));
  const CodedOrder b = realize(cnf_to_term(Cnf::omega_pow(d, m)));
  const CodedOrder source = sum_order({a, b});
  const CodedOrder target = side == Side::Right ? b : a;
  const CodedOrder pa = summand_piece(source, 0, a), pb = summand_piece(source, 1, b);
  const Code extremum = side == Side::Right ? *b.min() : *a.max();
  const std::vector<CodedOrder> ls = side == Side::Right
                                         ? std::vector<CodedOrder>{point_order(b, extremum), b}
                                         : std::vector<CodedOrder>{a, point_order(a, extremum)};
  PiecesSpec spec{finite_family(source, {pa, pb}, {true}), finite_covering(target, ls)};
  std::string why;
  auto w = def_pieces(spec, [=](std::int64_t p) {
    const bool collapsed = (p == 0) == (side == Side::Right);
    const CodedOrder& piece = p == 0 ? pa : pb;
    if (collapsed) return detail::onto_point(piece, target, extremum);
    return EpiWitness{piece, target, [](Code x) { return unpair(x).second; }, nullptr, {"summand"}};
  }, &why);
  if (!w) throw std::logic_error("revord_plus_ord_epi: " + why);
  w->provenance.insert(w->provenance.begin(),
                       std::string("revord(") + (side == Side::Right ? "right" : "left") + ")");
  return *w;
}

}  // namespace linord
