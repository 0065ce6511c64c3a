#pragma once

// Bounded search for a surjection of K onto L, and a sampled stability test.
//
// Every unbounded search is capped by a step budget. The answer is three-way:
// a witness, a refutation (only when the failure is certain), or exhaustion.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linord/epi.hpp"
#include "linord/finite_oracle.hpp"

namespace linord {

struct SearchResult {
  enum class Status { Found, NotFound, Exhausted };
  Status status = Status::Exhausted;
  std::optional<EpiWitness> witness;
  std::string reason;
  std::uint64_t spent = 0;
};

inline const char* to_string(SearchResult::Status s) {
  switch (s) {
    case SearchResult::Status::Found: return "found";
    case SearchResult::Status::NotFound: return "not-found";
    case SearchResult::Status::Exhausted: return "exhausted";
  }
  return "?";
}

namespace detail {

struct Budget {
  std::uint64_t left;
  std::uint64_t spent = 0;

  bool take(std::uint64_t n = 1) {
    if (left < n) {
      spent += left;
      left = 0;
      return false;
    }
    left -= n;
    spent += n;
    return true;
  }
  /// A sub-budget holding half of what remains.
  Budget half() const { return Budget{left / 2}; }
  void charge(const Budget& child) {
    left -= std::min(left, child.spent);
    spent += child.spent;
  }
};

inline SearchResult found(EpiWitness w, std::string why = {}) {
  return {SearchResult::Status::Found, std::move(w), std::move(why), 0};
}
inline SearchResult not_found(std::string why) { return {SearchResult::Status::NotFound, std::nullopt, std::move(why), 0}; }
inline SearchResult exhausted(std::string why) { return {SearchResult::Status::Exhausted, std::nullopt, std::move(why), 0}; }

inline std::vector<Code> finite_members(const CodedOrder& o) { return o.sorted(o.first(static_cast<std::size_t>(*o.size()))); }

/// Surjection between finite orders: the oracle within its cap, rank collapse beyond.
inline std::optional<EpiWitness> finite_search(const CodedOrder& L, const CodedOrder& K) {
  const auto ls = finite_members(L);
  const auto ks = finite_members(K);
  if (ls.empty() || ks.size() < ls.size()) return std::nullopt;
  FinMap m;
  if (ls.size() <= oracle_cap() && ks.size() <= oracle_cap()) {
    const auto maps = enumerate_maps(FinOrder::chain(ls.size()), FinOrder::chain(ks.size()), MapKind::Epi);
    if (maps.maps.empty()) return std::nullopt;
    m = maps.maps.front();
  } else {
    for (std::size_t i = 0; i < ks.size(); ++i) m.push_back(std::min(i, ls.size() - 1));
  }
  std::map<Code, Code> table;
  for (std::size_t i = 0; i < ks.size(); ++i) table[ks[i]] = ls[m[i]];
  return EpiWitness{K, L, [table](Code x) { return table.at(x); }, nullptr,
                    {"finite-search(" + std::to_string(ks.size()) + "->" + std::to_string(ls.size()) + ")"}};
}

/// The least code above a in the order, scanning codes upward.
inline std::optional<Code> least_above(const CodedOrder& o, Code a, Budget& b) {
  for (Code bound = 64;; bound *= 8) {
    for (Code c : o.members_upto(bound))
      if (o.less(a, c)) return c;
    if (bound >= CodedOrder::kEnumerationLimit || !b.take()) return std::nullopt;
  }
}

inline SearchResult search(const CodedOrder& L, const CodedOrder& K, Budget& b);

/// Whether B surjects onto A, both with extrema lo_a < hi_a and lo_b <= hi_b.
/// Settles size questions directly and recurses on half the budget otherwise.
inline SearchResult interval_search(const CodedOrder& A, IntervalSize sa, const CodedOrder& B, IntervalSize sb,
                                    bool a_nontrivial, const CodedOrder& K, Budget& b) {
  if (sb.kind == IntervalSize::Kind::Finite) {
    if (sa.kind == IntervalSize::Kind::Infinite) return not_found("finite interval onto an infinite one");
    if (sa.kind == IntervalSize::Kind::Unknown && sb.count == 1 && a_nontrivial)
      return not_found("singleton onto a larger interval");
  }
  if (sa.kind == IntervalSize::Kind::Infinite && K.locally_finite())
    return not_found("every interval of the source is finite");
  Budget child = b.half();
  SearchResult r = search(A, B, child);
  b.charge(child);
  return r;
}

/// L with both extrema: the least k (as a natural number) with [min K, k] onto L,
/// extended by sending everything above k to max L.
inline SearchResult two_extrema(const CodedOrder& L, const CodedOrder& K, Budget& b) {
  const Code k0 = *K.min();
  const Code top = *L.max();
  const IntervalSize sl = size_as_interval(L);
  bool all_refuted = true;
  // Candidates in natural-number order, one band of codes at a time.
  for (Code bound = 64, floor = 0;; floor = bound, bound *= 8) {
    const auto band = K.finite() ? K.first(static_cast<std::size_t>(*K.size())) : K.members_upto(bound);
    for (Code k1 : band) {
      if (!K.finite() && floor > 0 && k1 <= floor) continue;
      if (!b.take()) return exhausted("budget spent on interval candidates");
      const CodedOrder sub = interval(K, k0, k1);
      const SearchResult r =
          interval_search(L, sl, sub, K.interval_size(k0, k1), *L.min() != top, K, b);
      if (r.status == SearchResult::Status::Found) {
        const EpiWitness inner = *r.witness;
        auto trace = with_step(inner.provenance, "extend-above(" + to_string(k1) + ")");
        return found(EpiWitness{K, L,
                                [K, k1, top, f = inner.map](Code x) { return K.leq(x, k1) ? f(x) : top; },
                                nullptr, std::move(trace)});
      }
      if (r.status == SearchResult::Status::Exhausted) all_refuted = false;
    }
    if (K.finite()) break;
    if (bound >= CodedOrder::kEnumerationLimit) return exhausted("code range exhausted");
  }
  if (all_refuted) return not_found("no interval [min, k] of the source surjects onto the target");
  return exhausted("interval candidates undecided");
}

/// State of the stage loop for L with a minimum and no maximum.
struct Stages {
  CodedOrder L, K;
  std::uint64_t stage_budget;
  std::vector<Code> l;       // canonical sequence of L
  std::vector<Code> kc;      // canonical sequence of K
  std::vector<Code> kl;      // the k_i^L sequence
  std::vector<EpiWitness> sigma;  // sigma[i]: [kl[i], kl[i+1]] onto [l[i], l[i+1]]
  std::mutex mu;

  /// One more stage; Found on success, otherwise the reason it stopped.
  SearchResult extend(Budget& b) {
    const std::size_t i = sigma.size();
    const Code k0 = kc.front();
    while (l.size() < i + 2) {
      const auto nx = least_above(L, l.back(), b);
      if (!nx) return exhausted("canonical sequence of the target not found");
      l.push_back(*nx);
    }
    while (kc.size() < i + 1) {
      const auto nx = least_above(K, kc.back(), b);
      if (!nx) return exhausted("canonical sequence of the source not found");
      kc.push_back(*nx);
    }
    const CodedOrder piece = interval(L, l[i], l[i + 1]);
    const IntervalSize sp = L.interval_size(l[i], l[i + 1]);

    // The least k with [k0, k] onto [l_i, l_{i+1}].
    std::optional<EpiWitness> first;
    Code k = 0;
    bool refuted = true;
    for (Code bound = 64; !first; bound *= 8) {
      for (Code c : K.members_upto(bound)) {
        if (bound > 64 && c <= bound / 8) continue;
        if (!b.take()) return exhausted("budget spent at stage " + std::to_string(i));
        const SearchResult r = interval_search(piece, sp, interval(K, k0, c), K.interval_size(k0, c), true, K, b);
        if (r.status == SearchResult::Status::Found) {
          first = r.witness;
          k = c;
          break;
        }
        if (r.status == SearchResult::Status::Exhausted) refuted = false;
      }
      if (first) break;
      if (refuted && sp.kind == IntervalSize::Kind::Infinite && K.locally_finite())
        return not_found("stage " + std::to_string(i) + ": an infinite piece of the target against a locally finite source");
      if (bound >= CodedOrder::kEnumerationLimit || !b.take())
        return exhausted("no interval found at stage " + std::to_string(i));
    }

    // The least pair (kh, k') above max(kl_i, kc_i) with [k0, k] onto [kh, k'].
    const Code floor = K.leq(kl[i], kc[i]) ? kc[i] : kl[i];
    const CodedOrder head = interval(K, k0, k);
    const IntervalSize sh = K.interval_size(k0, k);
    for (Code bound = 64;; bound *= 8) {
      // pair(x, y) >= (x + y)^2 / 2, so coordinates of codes <= bound are small.
      const auto ms = K.members_upto(isqrt(2 * bound));
      if (ms.size() > 4096) return exhausted("pair search too wide at stage " + std::to_string(i));
      std::vector<std::pair<Code, std::pair<Code, Code>>> cands;
      for (Code x : ms) {
        if (!K.leq(floor, x)) continue;
        for (Code y : ms) {
          if (pair(x, y) > bound) break;
          if (K.less(x, y)) cands.push_back({pair(x, y), {x, y}});
        }
      }
      std::sort(cands.begin(), cands.end());
      for (const auto& [code, xy] : cands) {
        const auto [kh, kp] = xy;
        if (!b.take()) return exhausted("budget spent at stage " + std::to_string(i));
        const SearchResult r = interval_search(head, sh, interval(K, kh, kp), K.interval_size(kh, kp), true, K, b);
        if (r.status != SearchResult::Status::Found) continue;
        // [kl_i, k'] collapses onto [kh, k'], which maps onto [k0, k], then onto the piece.
        const EpiWitness back = *r.witness;
        const EpiWitness onto = *first;
        const Code from = kl[i];
        EpiWitness s{interval(K, from, kp), piece,
                     [order = K, kh, g = back.map, f = onto.map](Code x) { return f(g(order.less(x, kh) ? kh : x)); }, nullptr,
                     {"stage(" + std::to_string(i) + ")"}};
        kl.push_back(kp);
        sigma.push_back(std::move(s));
        return found(sigma.back());
      }
      if (bound >= CodedOrder::kEnumerationLimit || !b.take())
        return exhausted("no pair found at stage " + std::to_string(i));
    }
  }

  Code apply(Code x) {
    std::lock_guard lock(mu);
    while (K.less(kl.back(), x)) {
      Budget b{stage_budget};
      const SearchResult r = extend(b);
      if (r.status != SearchResult::Status::Found)
        throw std::runtime_error("epi_search: stage " + std::to_string(sigma.size()) + " unresolved: " + r.reason);
    }
    // kl is increasing; the first stage whose right end is >= x.
    std::size_t lo = 0, hi = sigma.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (K.leq(x, kl[mid + 1])) hi = mid;
      else lo = mid + 1;
    }
    return sigma[lo](x);
  }
};

inline constexpr std::size_t kEagerStages = 8;

inline SearchResult ray_case(const CodedOrder& L, const CodedOrder& K, Budget& b, std::uint64_t budget) {
  auto st = std::make_shared<Stages>();
  st->L = L;
  st->K = K;
  st->stage_budget = budget;
  st->l = {*L.min()};
  st->kc = {*K.min()};
  st->kl = {*K.min()};
  while (st->sigma.size() < kEagerStages) {
    SearchResult r = st->extend(b);
    if (r.status != SearchResult::Status::Found) return r;
  }
  EpiWitness w{K, L, [st](Code x) { return st->apply(x); }, nullptr,
               {"stages(" + std::to_string(kEagerStages) + " verified)"}};
  return found(std::move(w));
}

inline SearchResult search(const CodedOrder& L, const CodedOrder& K, Budget& b) {
  if (!b.take()) return exhausted("budget spent");
  try {
    if (L.finite() && K.finite()) {
      if (auto w = finite_search(L, K)) return found(*w);
      return not_found("finite source smaller than the target");
    }
    if (L.coinitial()) {
      if (K.min()) return not_found("the source has a minimum and the target has none");
      return exhausted("neither order has a minimum");
    }
    if (!L.min()) return exhausted("minimum of the target not detectable");
    if (K.coinitial()) {
      // Everything below the first member collapses onto min L.
      const Code c = K.first(1).front();
      Budget child = b.half();
      SearchResult r = search(L, ray_from(K, c), child);
      b.charge(child);
      if (r.status != SearchResult::Status::Found) return r;
      const Code bottom = *L.min();
      auto trace = with_step(r.witness->provenance, "extend-below(" + to_string(c) + ")");
      return found(EpiWitness{K, L, [K, c, bottom, f = r.witness->map](Code x) { return K.less(x, c) ? bottom : f(x); },
                              nullptr, std::move(trace)});
    }
    if (!K.min()) return exhausted("minimum of the source not detectable");
    if (L.max()) {
      if (!L.finite() && K.locally_finite()) return not_found("every interval of the source is finite");
      return two_extrema(L, K, b);
    }
    if (L.cofinal()) {
      if (K.max()) return not_found("the source has a maximum and the target has none");
      if (!K.cofinal()) return exhausted("maximum of the source not detectable");
      return ray_case(L, K, b, b.left);
    }
    return exhausted("maximum of the target not detectable");
  } catch (const std::overflow_error& e) {
    return exhausted(std::string("code range exhausted: ") + e.what());
  } catch (const std::length_error& e) {
    return exhausted(std::string("enumeration too large: ") + e.what());
  }
}

}  // namespace detail

/// Looks for a surjection of K onto L within the given number of steps.
inline SearchResult epi_search(const CodedOrder& L, const CodedOrder& K, std::uint64_t budget) {
  detail::Budget b{budget};
  SearchResult r = detail::search(L, K, b);
  r.spent = b.spent;
  return r;
}

struct StableReport {
  enum class Outcome { Pass, Fail, Inconclusive };
  Outcome outcome = Outcome::Inconclusive;
  std::optional<std::array<Code, 3>> triple;  // a0, a1, a for a failure
  std::uint64_t triples_checked = 0;
  std::string reason;
};

inline const char* to_string(StableReport::Outcome o) {
  switch (o) {
    case StableReport::Outcome::Pass: return "pass";
    case StableReport::Outcome::Fail: return "fail";
    case StableReport::Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Tests the interval criterion for stability on the first `budget` codes:
/// every [a0, a1] must be the image of some [b0, b1] lying above a.
inline StableReport stable_check(const CodedOrder& K, std::uint64_t budget) {
  StableReport rep;
  if (K.coinitial()) {
    rep.outcome = StableReport::Outcome::Fail;
    rep.reason = "no minimum";
    return rep;
  }
  if (!K.min()) {
    rep.reason = "minimum not detectable";
    return rep;
  }
  std::vector<Code> codes, pool;
  try {
    codes = K.first(static_cast<std::size_t>(budget));
    pool = K.sorted(K.first(static_cast<std::size_t>(4 * budget)));
  } catch (const std::overflow_error& e) {
    rep.reason = std::string("enumeration failed: ") + e.what();
    return rep;
  }
  bool undecided = false;
  detail::Budget steps{1000 * budget * budget};
  for (Code a : codes) {
    const CodedOrder above = ray_from(K, a);
    const auto rest = above.size();
    const auto from = std::find(pool.begin(), pool.end(), a);
    const bool whole_ray = rest && static_cast<std::uint64_t>(pool.end() - from) == *rest;
    for (Code a0 : codes) {
      for (Code a1 : codes) {
        if (!K.leq(a0, a1)) continue;
        ++rep.triples_checked;
        if (K.leq(a, a0)) continue;  // [a0, a1] itself lies above a
        const CodedOrder target = interval(K, a0, a1);
        const IntervalSize st = K.interval_size(a0, a1);
        bool ok = false, open = false;
        for (auto i = from; i != pool.end() && !ok; ++i) {
          for (auto j = i; j != pool.end(); ++j) {
            if (!steps.take()) {
              rep.reason = "step budget spent";
              return rep;
            }
            const IntervalSize sb = K.interval_size(*i, *j);
            if (st.kind == IntervalSize::Kind::Finite && sb.kind == IntervalSize::Kind::Finite) {
              if (sb.count >= st.count) {
                ok = true;
                break;
              }
              continue;
            }
            detail::Budget b{budget};
            const SearchResult r = detail::interval_search(target, st, interval(K, *i, *j), sb, a0 != a1, K, b);
            if (r.status == SearchResult::Status::Found) {
              ok = true;
              break;
            }
            if (r.status == SearchResult::Status::Exhausted) open = true;
          }
        }
        if (ok) continue;
        if (whole_ray && !open) {
          rep.outcome = StableReport::Outcome::Fail;
          rep.triple = {a0, a1, a};
          rep.reason = "no interval above a surjects onto [a0, a1]";
          return rep;
        }
        undecided = true;
      }
    }
  }
  rep.outcome = undecided ? StableReport::Outcome::Inconclusive : StableReport::Outcome::Pass;
  if (undecided) rep.reason = "some intervals had no preimage among the sampled codes";
  return rep;
}

}  // namespace linord
