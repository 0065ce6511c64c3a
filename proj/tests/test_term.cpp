#include <gtest/gtest.h>

#include "corpus.hpp"
#include "linord/classify.hpp"
#include "linord/verdict.hpp"

using namespace linord;
using fixtures::T;

namespace {
const T w = T::omega();
const T e = T::eta();
const T rw = T::rev(T::omega());

Cnf wp(std::uint64_t k, std::uint64_t c = 1) { return Cnf::omega_pow(Cnf::finite(k), c); }

Classification mirrored(Classification c) {
  std::swap(c.has_min, c.has_max);
  std::swap(c.scattered_init, c.scattered_final);
  std::swap(c.well_order, c.rev_well_order);
  return c;
}
}  // namespace

TEST(Term, ConstructionRejectsEmptyOrders) {
  EXPECT_THROW(T::fin(0), std::invalid_argument);
  EXPECT_THROW(T::sum({w}), std::invalid_argument);
}

TEST(Term, DescribeAndPrint) {
  EXPECT_EQ(describe(T::sum({w, T::fin(1)})), "Sum(Omega,Fin(1))");
  EXPECT_EQ(print(T::prod(T::prod(w, w), T::fin(3))), "w * w * 3");
  EXPECT_EQ(print(T::prod(w, T::sum({T::fin(1), w}))), "w * (1 + w)");
  EXPECT_EQ(print(T::sum({T::rev(T::prod(w, T::fin(2))), e})), "rev(w * 2) + eta");
  EXPECT_EQ(print(T::zeta_pow(rw)), "z^(rev(w))");
}

TEST(Term, RevPushRules) {
  EXPECT_EQ(rev_push(T::rev(T::sum({w, T::fin(1)}))), T::sum({T::fin(1), rw}));
  EXPECT_EQ(rev_push(T::rev(T::rev(e))), e);
  EXPECT_EQ(rev_push(T::rev(T::zeta_pow(w))), T::zeta_pow(w));
  EXPECT_EQ(rev_push(T::rev(T::prod(w, T::fin(2)))), T::prod(rw, T::fin(2)));
}

TEST(Term, RevPushLeavesReversalOnlyOnOmega) {
  std::function<bool(const T&)> ok = [&](const T& t) {
    if (t.is(TermKind::Rev) && !t.is_rev_omega()) return false;
    if (t.is(TermKind::ZetaPow)) return true;  // exponents are left alone
    for (const auto& c : t.children())
      if (!ok(c)) return false;
    return true;
  };
  for (const auto& t : fixtures::corpus()) EXPECT_TRUE(ok(rev_push(t))) << describe(t);
}

TEST(Classify, Examples) {
  auto eta = classify(e);
  EXPECT_FALSE(eta.scattered);
  EXPECT_FALSE(eta.has_min);
  EXPECT_FALSE(eta.scattered_init);

  auto succ = classify(T::sum({w, T::fin(1)}));
  EXPECT_TRUE(succ.well_order);
  EXPECT_TRUE(succ.has_max);
  EXPECT_EQ(succ.rank_upper, Cnf::finite(2));

  auto zr = classify(T::zeta_pow(rw));
  EXPECT_FALSE(zr.scattered);
  EXPECT_FALSE(zr.scattered_init);
  EXPECT_FALSE(zr.scattered_final);

  auto ew = classify(T::prod(e, w));
  EXPECT_FALSE(ew.scattered_init);
  EXPECT_FALSE(ew.scattered_final);
}

TEST(Classify, RankBounds) {
  EXPECT_EQ(classify(T::fin(1)).rank_upper, Cnf::finite(0));
  EXPECT_EQ(classify(T::fin(5)).rank_upper, Cnf::finite(1));
  EXPECT_EQ(classify(rw).rank_upper, Cnf::finite(1));
  EXPECT_EQ(classify(T::prod(w, w)).rank_upper, Cnf::finite(2));
  // omega * 2 + 2 for z^w.
  EXPECT_EQ(classify(T::zeta_pow(w)).rank_upper, wp(1, 2) + Cnf::finite(2));
  EXPECT_FALSE(classify(e).rank_upper.has_value());
}

TEST(Classify, InvariantsOnCorpus) {
  for (const auto& t : fixtures::corpus()) {
    const auto c = classify(t);
    if (c.scattered) {
      EXPECT_TRUE(c.scattered_init && c.scattered_final) << describe(t);
      EXPECT_TRUE(c.rank_upper.has_value());
    } else {
      EXPECT_FALSE(c.rank_upper.has_value());
    }
    if (c.well_order) EXPECT_TRUE(c.scattered && c.has_min) << describe(t);
    EXPECT_EQ(classify(T::rev(t)), mirrored(c)) << describe(t);
    EXPECT_EQ(ordinal_value(t).has_value(), c.well_order) << describe(t);
  }
}

TEST(Classify, RankIsMonotoneUnderConstructors) {
  for (const auto& t : fixtures::corpus(200, 3)) {
    const auto c = classify(t);
    if (!c.scattered || !(t.is(TermKind::Sum) || t.is(TermKind::Prod))) continue;
    for (const auto& part : t.children()) EXPECT_LE(*classify(part).rank_upper, *c.rank_upper);
  }
}

TEST(OrdinalValue, Examples) {
  EXPECT_EQ(ordinal_value(T::prod(T::sum({w, T::fin(1)}), w)), wp(2));
  EXPECT_FALSE(ordinal_value(e).has_value());
  EXPECT_EQ(ordinal_value(T::rev(T::fin(3))), Cnf::finite(3));
  EXPECT_EQ(ordinal_value(T::prod(w, T::fin(2))), wp(1, 2));
}

TEST(CnfToTerm, ExamplesAndRoundTrip) {
  EXPECT_EQ(cnf_to_term(Cnf::finite(3)), T::fin(3));
  EXPECT_EQ(cnf_to_term(Cnf::omega()), w);
  EXPECT_EQ(cnf_to_term(wp(1, 2)), T::prod(w, T::fin(2)));
  EXPECT_THROW(cnf_to_term(Cnf::zero()), std::invalid_argument);
  EXPECT_THROW(cnf_to_term(Cnf::omega_pow(Cnf::omega())), std::domain_error);
  fixtures::TermGen gen(5);
  for (int i = 0; i < 500; ++i) {
    const Cnf c = gen.small_cnf();
    if (c.is_zero()) continue;
    EXPECT_EQ(ordinal_value(cnf_to_term(c)), c) << c.to_string();
  }
}

TEST(Verdict, Examples) {
  auto v = sts_verdict(cnf_to_term(wp(2, 3)));
  EXPECT_EQ(v.outcome, Outcome::Yes);
  EXPECT_EQ(v.rule_trace, std::vector<std::string>{"S1"});

  v = sts_verdict(T::sum({w, T::fin(1)}));
  EXPECT_EQ(v.outcome, Outcome::No);
  EXPECT_EQ(v.rule_trace.back(), "S1");

  v = sts_verdict(e);
  EXPECT_EQ(v.outcome, Outcome::Yes);
  EXPECT_EQ(v.rule_trace.back(), "N1");

  v = sts_verdict(T::sum({e, T::prod(w, w)}));
  EXPECT_EQ(v.outcome, Outcome::No);
  EXPECT_EQ(v.rule_trace, std::vector<std::string>{"N1:scatteredFinal"});

  v = sts_verdict(T::sum({T::rev(T::prod(T::prod(w, w), T::fin(1))), w}));
  EXPECT_EQ(v.outcome, Outcome::Yes);
  EXPECT_EQ(v.rule_trace.back(), "S6");

  v = sts_verdict(T::sum({rw, w, rw, w}));
  EXPECT_EQ(v.outcome, Outcome::Unknown);
  EXPECT_EQ(v.rule_trace.back(), "S7");

  v = sts_verdict(T::prod(T::zeta_pow(T::fin(1)), T::fin(2)));
  EXPECT_EQ(v.outcome, Outcome::Yes);
}

TEST(Verdict, UnknownNeverEndsWithADecidingRule) {
  for (const auto& t : fixtures::corpus(300, 9)) {
    const auto v = sts_verdict(t);
    ASSERT_FALSE(v.rule_trace.empty());
    if (v.outcome == Outcome::Unknown) EXPECT_EQ(v.rule_trace.back(), "S7") << describe(t);
  }
}

TEST(Verdict, InvariantUnderReversal) {
  for (const auto& t : fixtures::corpus(300, 21))
    EXPECT_EQ(sts_verdict(t).outcome, sts_verdict(T::rev(t)).outcome) << describe(t);
}

TEST(Verdict, ExtensionalOnOrdinals) {
  fixtures::TermGen gen(31);
  std::vector<std::pair<Cnf, Outcome>> seen;
  for (int i = 0; i < 400; ++i) {
    const T t = gen.ordinal(3);
    const Cnf v = *ordinal_value(t);
    const Outcome o = sts_verdict(t).outcome;
    EXPECT_NE(o, Outcome::Unknown);
    EXPECT_EQ(o == Outcome::Yes, v.single_term()) << describe(t);
    for (const auto& [c, prev] : seen)
      if (c == v) EXPECT_EQ(prev, o);
    seen.emplace_back(v, o);
  }
}

TEST(Reduce, Examples) {
  EXPECT_EQ(reduce(ReduceKind::WellOrder, {w}), T::prod(T::sum({T::fin(1), w}), w));
  EXPECT_EQ(sts_verdict(reduce(ReduceKind::WellOrder, {w})).outcome, Outcome::Yes);
  auto v = sts_verdict(reduce(ReduceKind::WellOrder, {rw}));
  EXPECT_EQ(v.outcome, Outcome::No);
  EXPECT_EQ(v.rule_trace.back(), "S3");
  v = sts_verdict(reduce(ReduceKind::NonScattered, {e}));
  EXPECT_EQ(v.outcome, Outcome::Yes);
  EXPECT_EQ(v.rule_trace.back(), "N1");
  v = sts_verdict(reduce(ReduceKind::Main, {rw, w}));
  EXPECT_EQ(v.outcome, Outcome::Yes);
  EXPECT_EQ(v.rule_trace.back(), "N1");
  EXPECT_THROW(reduce(ReduceKind::Main, {w}), std::invalid_argument);
  EXPECT_THROW(reduce(ReduceKind::WellOrder, {w, w}), std::invalid_argument);
}

TEST(Reduce, VerdictsTrackTheReducedProperty) {
  const auto terms = fixtures::corpus();
  for (const auto& l : terms) {
    const auto c = classify(l);
    auto wo = sts_verdict(reduce(ReduceKind::WellOrder, {l})).outcome;
    EXPECT_EQ(wo, c.well_order ? Outcome::Yes : Outcome::No) << describe(l);
    auto ns = sts_verdict(reduce(ReduceKind::NonScattered, {l})).outcome;
    EXPECT_EQ(ns, c.scattered ? Outcome::No : Outcome::Yes) << describe(l);
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const T& k = terms[i];
    const T& l = terms[(i * 37 + 11) % terms.size()];
    const bool expected = !classify(k).well_order || classify(l).well_order;
    auto o = sts_verdict(reduce(ReduceKind::Main, {k, l})).outcome;
    EXPECT_EQ(o, expected ? Outcome::Yes : Outcome::No) << describe(k) << " / " << describe(l);
  }
}
