// Acceptance checks. With no argument every criterion runs; with a number
// only that one does. Each prints one PASS/FAIL line with its measurements,
// and the exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "linord/linord.hpp"

using namespace linord;
using T = OrderTerm;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
  std::vector<std::string> notes;  // printed under the verdict line
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Result()> run;
};

std::string str(std::size_t n) { return std::to_string(n); }

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Result oracle_counts() {
  Result res;
  std::size_t pairs = 0, bad = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t m = 1; m <= n; ++m) {
      ++pairs;
      const auto epis = enumerate_maps(FinOrder::chain(m), FinOrder::chain(n), MapKind::Epi).count;
      const auto embs = enumerate_maps(FinOrder::chain(m), FinOrder::chain(n), MapKind::Emb).count;
      if (epis != binom(n - 1, m - 1) || embs != binom(n, m)) {
        ++bad;
        res.notes.push_back("mismatch at m=" + str(m) + " n=" + str(n));
      }
    }
  res.ok = bad == 0;
  res.detail = str(pairs) + " (m,n) pairs, " + str(bad) + " mismatches";
  return res;
}

Result ordinal_criterion() {
  Result res;
  std::size_t total = 0, unknown = 0, wrong = 0;
  for (std::uint64_t code = 1; code < 256; ++code) {
    // Base-4 digits of code are the coefficients of w^3, w^2, w, 1.
    Cnf alpha = Cnf::zero();
    int nonzero = 0;
    for (int e = 3; e >= 0; --e) {
      const std::uint64_t c = (code >> (2 * e)) & 3;
      if (c == 0) continue;
      alpha = alpha + Cnf::omega_pow(Cnf::finite(static_cast<std::uint64_t>(e)), c);
      ++nonzero;
    }
    ++total;
    const Outcome v = sts_verdict(cnf_to_term(alpha)).outcome;
    if (v == Outcome::Unknown) ++unknown;
    if ((v == Outcome::Yes) != (nonzero == 1)) {
      ++wrong;
      res.notes.push_back("wrong verdict on " + alpha.to_string());
    }
  }
  res.ok = total == 255 && unknown == 0 && wrong == 0;
  res.detail = str(total) + " ordinals, " + str(wrong) + " wrong, " + str(unknown) + " unknown";
  return res;
}

Result reductions() {
  Result res;
  const auto terms = fixtures::corpus();
  std::size_t checked = 0, unknown = 0, wrong = 0;
  auto tally = [&](Outcome got, bool expected, const std::string& what) {
    ++checked;
    if (got == Outcome::Unknown) ++unknown;
    if (got != (expected ? Outcome::Yes : Outcome::No)) {
      ++wrong;
      res.notes.push_back(what);
    }
  };
  for (const T& l : terms) {
    const auto c = classify(l);
    tally(sts_verdict(reduce(ReduceKind::WellOrder, {l})).outcome, c.well_order, "wo " + describe(l));
    tally(sts_verdict(reduce(ReduceKind::NonScattered, {l})).outcome, !c.scattered, "nonscat " + describe(l));
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const T& k = terms[i];
    const T& l = terms[(i * 37 + 11) % terms.size()];
    const bool expected = !classify(k).well_order || classify(l).well_order;
    tally(sts_verdict(reduce(ReduceKind::Main, {k, l})).outcome, expected, "main " + describe(k) + " / " + describe(l));
  }
  res.ok = terms.size() == 100 && unknown == 0 && wrong == 0;
  res.detail = str(terms.size()) + " terms, " + str(checked) + " verdicts, " + str(wrong) + " wrong, " + str(unknown) +
               " unknown";
  return res;
}

Result pieces_and_mash() {
  Result res;
  constexpr int kEach = 1000;
  std::size_t bad = 0;
  auto in_oracle = [](const EpiWitness& e, std::size_t l_size, std::size_t k_size) {
    const FinMap got = as_fin_map(e, k_size);
    return contains_map(enumerate_maps(FinOrder::chain(l_size), FinOrder::chain(k_size), MapKind::Epi), got);
  };
  FuzzGen pieces_gen(1001);
  for (int i = 0; i < kEach; ++i) {
    const FinPiecesInstance in = pieces_gen.pieces();
    auto [spec, sigma] = pieces_from_finite(in);
    std::string why;
    const auto glued = def_pieces(spec, sigma, &why);
    if (!glued || !in_oracle(*glued, in.l_size, in.k_size)) {
      ++bad;
      res.notes.push_back("def_pieces instance " + str(static_cast<std::size_t>(i)) + " " + why);
    }
  }
  FuzzGen mash_gen(2002);
  for (int i = 0; i < kEach; ++i) {
    const FinMashInstance in = mash_gen.mash();
    if (!in_oracle(mash_from_finite(in), in.l_size, in.k_size)) {
      ++bad;
      res.notes.push_back("family_mash instance " + str(static_cast<std::size_t>(i)));
    }
  }
  res.ok = bad == 0;
  res.detail = str(kEach) + " def_pieces + " + str(kEach) + " family_mash instances, " + str(bad) + " failures";
  return res;
}

// A nudge of x at point p of K by delta, support kept in K-decreasing order.
Code nudge(const CodedOrder& K, Code x, Code p, std::int64_t delta) {
  const auto f = *detail::ZetaNode(K).decode(x);
  std::vector<std::pair<Code, std::int64_t>> pv;
  bool hit = false;
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    std::int64_t v = f.values[i];
    if (f.points[i] == p) {
      v += delta;
      hit = true;
    }
    if (v != 0) pv.emplace_back(f.points[i], v);
  }
  if (!hit) pv.emplace_back(p, delta);
  std::sort(pv.begin(), pv.end(), [&](auto& a, auto& b) { return K.less(b.first, a.first); });
  std::vector<Code> pts;
  std::vector<std::int64_t> vals;
  for (auto& [pt, v] : pv) {
    pts.push_back(pt);
    vals.push_back(v);
  }
  return detail::ZetaNode::encode(pts, vals);
}

// Looks for lo < c < hi among nudges of lo and hi at the first bound points
// of a coinitial stream of K.
bool found_between(const CodedOrder& K, const CodedOrder& z, std::optional<Code> lo, std::optional<Code> hi,
                   std::size_t bound) {
  const CodeStream down = *K.coinitial();
  for (std::uint64_t i = 0; i < bound; ++i)
    for (std::int64_t d : {-1, 1})
      for (auto base : {lo, hi}) {
        if (!base) continue;
        try {
          const Code c = nudge(K, *base, down(i), d);
          if (z.contains(c) && (!lo || z.less(*lo, c)) && (!hi || z.less(c, *hi))) return true;
        } catch (const std::overflow_error&) {
          return false;
        }
      }
  return false;
}

// Sorts zeta^K codes, decoding each once.
std::vector<Code> sorted_zeta(const CodedOrder& K, const std::vector<Code>& codes) {
  const detail::ZetaNode z(K);
  std::vector<std::pair<detail::ZetaNode::Function, Code>> fs;
  for (Code c : codes) fs.emplace_back(*z.decode(c), c);
  std::sort(fs.begin(), fs.end(), [&](const auto& a, const auto& b) {
    return a.second != b.second && z.leq_functions(a.first, b.first);
  });
  std::vector<Code> out;
  for (auto& [f, c] : fs) out.push_back(c);
  return out;
}

Result zeta_laws() {
  Result res;
  const auto exps = fixtures::small_terms(3);
  std::size_t pairs = 0, bad_pairs = 0, beyond_range = 0;
  for (const T& k : exps)
    for (const T& l : exps) {
      ++pairs;
      const CodedOrder K = realize(k), L = realize(l);
      const CodedOrder src = realize(T::zeta_pow(T::sum({k, l})));
      const CodedOrder dst = prod_order(zeta_pow_order(K), zeta_pow_order(L));
      const ZetaSplit sp(K, L);
      bool ok = true;
      std::string why;
      try {
        std::vector<Code> ys;
        const auto xs = sorted_zeta(sum_order({K, L}), src.first(500));
        for (Code x : xs) {
          const auto y = sp.split(x);
          if (!y || !dst.contains(*y) || sp.join(*y) != x) {
            ok = false;
            break;
          }
          ys.push_back(*y);
        }
        for (std::size_t i = 1; ok && i < ys.size(); ++i) ok = dst.less(ys[i - 1], ys[i]);
        if (ok)
          for (Code y : dst.first(500)) {
            std::optional<Code> x;
            try {
              x = sp.join(y);
            } catch (const std::overflow_error&) {
              ++beyond_range;
              continue;
            }
            if (!x || !src.contains(*x) || sp.split(*x) != y) {
              ok = false;
              break;
            }
          }
      } catch (const std::exception& e) {
        ok = false;
        why = std::string(": ") + e.what();
      }
      if (!ok) {
        ++bad_pairs;
        res.notes.push_back("split fails for K=" + describe(k) + " L=" + describe(l) + why);
      }
    }
  const std::vector<T> no_min{T::rev(T::omega()), T::eta(), T::rev(T::eta()),
                              T::sum({T::rev(T::omega()), T::omega()}), T::prod(T::fin(2), T::rev(T::omega()))};
  std::size_t density_bad = 0;
  for (const T& k : no_min) {
    const CodedOrder K = realize(k);
    const CodedOrder z = zeta_pow_order(K);
    const auto xs = z.sorted(z.first(500));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const bool ok = found_between(K, z, std::nullopt, xs[i], 10000) &&
                      found_between(K, z, xs[i], std::nullopt, 10000) &&
                      (i == 0 || found_between(K, z, xs[i - 1], xs[i], 10000));
      if (!ok) {
        ++density_bad;
        res.notes.push_back("density fails for " + describe(k) + " at sample " + str(i));
        break;
      }
    }
  }
  res.ok = bad_pairs == 0 && density_bad == 0;
  res.detail = "split on 500 codes for " + str(pairs) + " exponent pairs (" + str(bad_pairs) + " bad, " +
               str(beyond_range) + " target codes whose join leaves the code range); density on " +
               str(no_min.size()) + " exponents (" + str(density_bad) + " bad), search bound 1e4";
  return res;
}

Result prefix_checks() {
  Result res;
  struct Example {
    std::string name;
    std::function<EpiWitness()> make;
  };
  const std::vector<Example> examples{
      {"lk(w,w)", [] { return lk_onto_l(T::omega(), T::omega()); }},
      {"zeta-seg(0;1,2)", [] { return zeta_segment_epi({Cnf::finite(0)}, Cnf::finite(1), Cnf::finite(2)); }},
      {"zeta-seg(0,1;2,3)",
       [] { return zeta_segment_epi({Cnf::finite(0), Cnf::finite(1)}, Cnf::finite(2), Cnf::finite(3)); }},
      {"revord(1,1;1,1,right)",
       [] { return revord_plus_ord_epi(Cnf::finite(1), 1, Cnf::finite(1), 1, Side::Right); }},
      {"prod(w, omega-collapse(1))", [] { return prod_epi(T::omega(), omega_collapse(1)); }},
  };
  std::size_t passed = 0;
  for (const auto& ex : examples) {
    const CheckReport r = check_epi_on_prefix(ex.make(), 300, 100000);
    const bool ok = r.verdict == CheckReport::Verdict::Pass;
    passed += ok;
    res.notes.push_back(std::string(ok ? "pass " : "FAIL ") + ex.name + ": " + str(r.pairs_checked) + " pairs, " +
                        str(r.monotone_violations.size()) + " monotone and " + str(r.range_violations.size()) +
                        " range violations, " + str(r.targets_missed.size()) + " targets missed" +
                        (r.note.empty() ? "" : " (" + r.note + ")"));
  }
  res.ok = passed == examples.size();
  res.detail = str(passed) + "/" + str(examples.size()) + " witnesses pass at n=300, bound=1e5";
  return res;
}

Result quotients() {
  Result res;
  FuzzGen gen(5005);
  std::size_t bad = 0;
  for (int i = 0; i < 500; ++i) {
    const auto in = gen.quotient();
    const FinMap psi = quotient_epi_fin(in.L, in.K, in.J, in.phi);
    if (!contains_map(enumerate_maps(in.J, in.K, MapKind::Epi), psi)) {
      ++bad;
      res.notes.push_back("instance " + str(static_cast<std::size_t>(i)));
    }
  }
  res.ok = bad == 0;
  res.detail = "500 instances, " + str(bad) + " outside the oracle epi set";
  return res;
}

Result search() {
  Result res;
  std::size_t pairs = 0, bad = 0;
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 1; n <= 6; ++n) {
      ++pairs;
      const SearchResult r = epi_search(fin_order(m), fin_order(n), 10000);
      const bool expected = exists_epi(FinOrder::chain(m), FinOrder::chain(n));
      bool ok = r.status != SearchResult::Status::Exhausted && (r.status == SearchResult::Status::Found) == expected;
      if (ok && r.witness) ok = check_epi_on_prefix(*r.witness, n, 64).verdict == CheckReport::Verdict::Pass;
      if (!ok) {
        ++bad;
        res.notes.push_back("chains m=" + str(m) + " n=" + str(n) + ": " + to_string(r.status));
      }
    }
  const SearchResult r = epi_search(realize(T::sum({T::omega(), T::fin(1)})), realize(T::omega()), 10000);
  const bool refuted = r.status == SearchResult::Status::NotFound && r.spent <= 10000;
  res.ok = bad == 0 && refuted;
  res.detail = str(pairs) + " chain pairs (" + str(bad) + " disagree); (w+1, w): " + to_string(r.status) +
               " after " + str(r.spent) + " of 1e4 steps";
  return res;
}

Result realization_axioms() {
  Result res;
  const auto terms = fixtures::corpus();
  std::size_t axiom_bad = 0, flip_bad = 0, trunc_bad = 0;
  for (const T& t : terms) {
    const CodedOrder o = realize(t);
    const auto xs = o.first(50);
    bool ok = o.finite() || xs.size() == 50;
    for (Code a : xs) {
      ok = ok && o.contains(a) && o.leq(a, a);
      for (Code b : xs) {
        const bool ab = o.leq(a, b), ba = o.leq(b, a);
        ok = ok && (ab || ba) && (a == b || !(ab && ba));
        for (Code c : xs) ok = ok && (!(ab && o.leq(b, c)) || o.leq(a, c));
      }
    }
    if (!ok) {
      ++axiom_bad;
      res.notes.push_back("axioms " + describe(t));
    }
    const CodedOrder r = realize(T::rev(t));
    bool flip = true;
    for (Code a : xs)
      for (Code b : xs) flip = flip && r.leq(a, b) == o.leq(b, a);
    if (!flip) {
      ++flip_bad;
      res.notes.push_back("flip " + describe(t));
    }
    // truncate(t, 20) must match the oracle's suborder of a longer truncation
    // and the rank given by counting smaller codes.
    const auto head = o.first(20);
    const FinOrder f = truncate(t, 20);
    bool trunc = f == induced_suborder(truncate(t, 40), head) && f.size() == head.size();
    for (Code x : head) {
      std::size_t below = 0;
      for (Code y : head) below += o.less(y, x);
      trunc = trunc && f.rank(x) == below;
    }
    if (!trunc) {
      ++trunc_bad;
      res.notes.push_back("truncate " + describe(t));
    }
  }
  res.ok = axiom_bad == 0 && flip_bad == 0 && trunc_bad == 0;
  res.detail = str(terms.size()) + " terms; axioms " + str(axiom_bad) + " bad, flip " + str(flip_bad) +
               " bad, truncation " + str(trunc_bad) + " bad";
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle counting", 5, oracle_counts},
      {2, "ordinal criterion", 1, ordinal_criterion},
      {3, "reduction consistency", 5, reductions},
      {4, "pieces/mash soundness", 30, pieces_and_mash},
      {5, "zeta codec laws", 30, zeta_laws},
      {6, "witness prefix checks", 30, prefix_checks},
      {7, "quotient epis", 30, quotients},
      {8, "epi search", 30, search},
      {9, "realization axioms", 10, realization_axioms},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "usage: %s [criterion 1-%zu]\n", argv[0], all.size());
    return 2;
  }
  bool all_ok = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = r.ok && secs < c.limit_s;
    all_ok = all_ok && ok;
    std::printf("%s %d %s: %s; %.2f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.title, r.detail.c_str(), secs,
                c.limit_s);
    for (const auto& n : r.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
