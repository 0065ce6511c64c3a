#pragma once

// Decidable linear orders on sets of natural-number codes.
//
// Coding conventions (fixed, bit-exact):
//   Fin(n)      codes 0..n-1, usual order
//   Omega       all codes, usual order
//   Eta         code n is the binary expansion of n+1 without its leading 1,
//               ordered as the in-order traversal of the binary tree
//   Rev(t)      codes of t, comparison flipped
//   Sum(ts)     pair(i, x) with x a code of part i
//   Prod(L, K)  pair(k, l): copies of L indexed by K
//   ZetaPow(K)  pair(seq(points), seq(values)): finite-support functions
//               K -> Z, points strictly K-decreasing, values zigzag-coded
//               and nonzero
//
// Enumeration lists the domain by increasing natural-number value.

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linord/codes.hpp"
#include "linord/fin_order.hpp"

namespace linord {

enum class Direction { Increasing, Decreasing };

/// A strictly monotone sequence of member codes.
struct CodeStream {
  std::function<Code(std::uint64_t)> next;
  Direction direction = Direction::Increasing;

  Code operator()(std::uint64_t i) const { return next(i); }
};

/// Cardinality of an interval, when the carrier can tell.
struct IntervalSize {
  enum class Kind { Finite, Infinite, Unknown };
  Kind kind = Kind::Unknown;
  std::uint64_t count = 0;

  static IntervalSize finite(std::uint64_t n) { return {Kind::Finite, n}; }
  static IntervalSize infinite() { return {Kind::Infinite, 0}; }
  static IntervalSize unknown() { return {Kind::Unknown, 0}; }
  [[nodiscard]] bool is_finite() const { return kind == Kind::Finite; }
  [[nodiscard]] bool is_infinite() const { return kind == Kind::Infinite; }

  friend IntervalSize operator+(IntervalSize a, IntervalSize b) {
    if (a.is_infinite() || b.is_infinite()) return infinite();
    if (!a.is_finite() || !b.is_finite()) return unknown();
    return finite(a.count + b.count);
  }
};

class CodedOrder {
 public:
  class Node {
   public:
    virtual ~Node() = default;
    [[nodiscard]] virtual bool contains(Code c) const = 0;
    /// Comparison of two members.
    [[nodiscard]] virtual bool leq(Code a, Code b) const = 0;
    /// Appends every member <= bound (as natural numbers), in any order.
    virtual void collect(Code bound, std::vector<Code>& out) const = 0;
    /// Number of members; nullopt when infinite.
    [[nodiscard]] virtual std::optional<std::uint64_t> size() const = 0;
    [[nodiscard]] virtual std::optional<Code> min() const { return std::nullopt; }
    [[nodiscard]] virtual std::optional<Code> max() const { return std::nullopt; }
    /// Strictly increasing and cofinal; present iff there is no maximum.
    [[nodiscard]] virtual std::optional<CodeStream> cofinal() const { return std::nullopt; }
    /// Strictly decreasing and coinitial; present iff there is no minimum.
    [[nodiscard]] virtual std::optional<CodeStream> coinitial() const { return std::nullopt; }
    /// Size of [a, b] for members a <= b.
    [[nodiscard]] virtual IntervalSize interval_size(Code, Code) const {
      return IntervalSize::unknown();
    }
    /// Every bounded interval is finite.
    [[nodiscard]] virtual bool locally_finite() const { return false; }
    [[nodiscard]] virtual std::string name() const = 0;
  };

  CodedOrder() = default;
  explicit CodedOrder(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  [[nodiscard]] bool contains(Code c) const { return node_->contains(c); }
  [[nodiscard]] bool leq(Code a, Code b) const { return a == b || node_->leq(a, b); }
  [[nodiscard]] bool less(Code a, Code b) const { return a != b && node_->leq(a, b); }
  [[nodiscard]] std::optional<std::uint64_t> size() const { return node_->size(); }
  [[nodiscard]] bool finite() const { return size().has_value(); }
  [[nodiscard]] std::optional<Code> min() const { return node_->min(); }
  [[nodiscard]] std::optional<Code> max() const { return node_->max(); }
  [[nodiscard]] std::optional<CodeStream> cofinal() const { return node_->cofinal(); }
  [[nodiscard]] std::optional<CodeStream> coinitial() const { return node_->coinitial(); }
  [[nodiscard]] IntervalSize interval_size(Code a, Code b) const {
    if (a == b) return IntervalSize::finite(1);
    if (!node_->leq(a, b)) return IntervalSize::finite(0);
    return node_->interval_size(a, b);
  }
  [[nodiscard]] bool locally_finite() const { return node_->locally_finite(); }
  [[nodiscard]] std::string name() const { return node_->name(); }
  [[nodiscard]] const Node& node() const { return *node_; }

  /// Members <= bound, ascending by natural-number value.
  [[nodiscard]] std::vector<Code> members_upto(Code bound) const {
    std::vector<Code> out;
    node_->collect(bound, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// The first n members in natural-number order (fewer if the domain is
  /// smaller or the search range is exhausted).
  [[nodiscard]] std::vector<Code> first(std::size_t n) const {
    const auto total = size();
    const std::size_t want = total ? std::min<std::uint64_t>(n, *total) : n;
    Code bound = 64;
    while (true) {
      auto m = members_upto(bound);
      if (m.size() >= want) {
        m.resize(want);
        return m;
      }
      if (bound >= kEnumerationLimit) return m;
      bound = std::min<Code>(bound * 8, kEnumerationLimit);
    }
  }

  /// The i-th member in natural-number order.
  [[nodiscard]] Code enumerate(std::size_t i) const {
    auto m = first(i + 1);
    if (m.size() <= i) throw std::out_of_range("enumerate: index beyond domain");
    return m[i];
  }

  /// Members sorted by this order.
  [[nodiscard]] std::vector<Code> sorted(std::vector<Code> codes) const {
    std::sort(codes.begin(), codes.end(), [this](Code a, Code b) { return less(a, b); });
    return codes;
  }

  static constexpr Code kEnumerationLimit = Code{1} << 100;

 private:
  std::shared_ptr<const Node> node_;
};

namespace detail {

inline IntervalSize size_as_interval(const CodedOrder& o) {
  auto s = o.size();
  return s ? IntervalSize::finite(*s) : IntervalSize::infinite();
}

/// Increasing stream i -> f(i + offset) where offset skips entries below floor.
inline CodeStream stream_from(const CodedOrder& order, CodeStream s, Code floor) {
  std::uint64_t offset = 0;
  const bool up = s.direction == Direction::Increasing;
  while (up ? order.less(s(offset), floor) : order.less(floor, s(offset))) ++offset;
  return CodeStream{[s, offset](std::uint64_t i) { return s(i + offset); }, s.direction};
}

class FinNode final : public CodedOrder::Node {
 public:
  explicit FinNode(std::uint64_t n) : n_(n) {}
  bool contains(Code c) const override { return c < n_; }
  bool leq(Code a, Code b) const override { return a <= b; }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (Code c = 0; c < n_ && c <= bound; ++c) out.push_back(c);
  }
  std::optional<std::uint64_t> size() const override { return n_; }
  std::optional<Code> min() const override {
    return n_ ? std::optional<Code>(0) : std::nullopt;
  }
  std::optional<Code> max() const override {
    return n_ ? std::optional<Code>(n_ - 1) : std::nullopt;
  }
  IntervalSize interval_size(Code a, Code b) const override {
    return IntervalSize::finite(static_cast<std::uint64_t>(b - a + 1));
  }
  bool locally_finite() const override { return true; }
  std::string name() const override { return "Fin(" + std::to_string(n_) + ")"; }

 private:
  std::uint64_t n_;
};

class OmegaNode final : public CodedOrder::Node {
 public:
  bool contains(Code) const override { return true; }
  bool leq(Code a, Code b) const override { return a <= b; }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (Code c = 0; c <= bound; ++c) out.push_back(c);
  }
  std::optional<std::uint64_t> size() const override { return std::nullopt; }
  std::optional<Code> min() const override { return Code{0}; }
  std::optional<CodeStream> cofinal() const override {
    return CodeStream{[](std::uint64_t i) { return Code{i}; }, Direction::Increasing};
  }
  IntervalSize interval_size(Code a, Code b) const override {
    return IntervalSize::finite(static_cast<std::uint64_t>(b - a + 1));
  }
  bool locally_finite() const override { return true; }
  std::string name() const override { return "Omega"; }
};

/// Dyadic rationals in (0,1) via the binary tree: code n <-> bit string of n+1
/// minus its leading 1; string s sits at the dyadic value 0.s1.
class EtaNode final : public CodedOrder::Node {
 public:
  static Code key(Code n) {
    const Code v = n + 1;
    int len = -1;
    for (Code t = v; t != 0; t >>= 1) ++len;
    const Code s = v - (Code{1} << len);
    return ((s << 1) | 1) << (110 - len);
  }
  static Code code_of(const std::string& bits) {
    Code v = 1;
    for (char b : bits) v = (v << 1) | (b == '1' ? 1 : 0);
    return v - 1;
  }
  static std::string bits_of(Code n) {
    std::string s;
    for (Code v = n + 1; v > 1; v >>= 1) s.push_back((v & 1) ? '1' : '0');
    return {s.rbegin(), s.rend()};
  }

  bool contains(Code c) const override { return c < kPairArgLimit; }
  bool leq(Code a, Code b) const override { return key(a) <= key(b); }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (Code c = 0; c <= bound; ++c) out.push_back(c);
  }
  std::optional<std::uint64_t> size() const override { return std::nullopt; }
  std::optional<CodeStream> cofinal() const override {
    // "1", "11", "111", ...
    return CodeStream{[](std::uint64_t i) { return checked((Code{2} << (i + 1)) - 2, i); },
                      Direction::Increasing};
  }
  std::optional<CodeStream> coinitial() const override {
    // "0", "00", "000", ...
    return CodeStream{[](std::uint64_t i) { return checked((Code{1} << (i + 1)) - 1, i); },
                      Direction::Decreasing};
  }
  IntervalSize interval_size(Code, Code) const override { return IntervalSize::infinite(); }
  std::string name() const override { return "Eta"; }

 private:
  static Code checked(Code c, std::uint64_t i) {
    if (i >= 61 || c >= kPairArgLimit) throw std::overflow_error("Eta stream: beyond code range");
    return c;
  }
};

class RevNode final : public CodedOrder::Node {
 public:
  explicit RevNode(CodedOrder inner) : inner_(std::move(inner)) {}
  bool contains(Code c) const override { return inner_.contains(c); }
  bool leq(Code a, Code b) const override { return inner_.leq(b, a); }
  void collect(Code bound, std::vector<Code>& out) const override {
    inner_.node().collect(bound, out);
  }
  std::optional<std::uint64_t> size() const override { return inner_.size(); }
  std::optional<Code> min() const override { return inner_.max(); }
  std::optional<Code> max() const override { return inner_.min(); }
  std::optional<CodeStream> cofinal() const override {
    auto s = inner_.coinitial();
    if (s) s->direction = Direction::Increasing;
    return s;
  }
  std::optional<CodeStream> coinitial() const override {
    auto s = inner_.cofinal();
    if (s) s->direction = Direction::Decreasing;
    return s;
  }
  IntervalSize interval_size(Code a, Code b) const override {
    return inner_.interval_size(b, a);
  }
  bool locally_finite() const override { return inner_.locally_finite(); }
  std::string name() const override { return "Rev(" + inner_.name() + ")"; }

 private:
  CodedOrder inner_;
};

class SumNode final : public CodedOrder::Node {
 public:
  explicit SumNode(std::vector<CodedOrder> parts) : parts_(std::move(parts)) {}

  bool contains(Code c) const override {
    auto [i, x] = unpair(c);
    return i < parts_.size() && parts_[static_cast<std::size_t>(i)].contains(x);
  }
  bool leq(Code a, Code b) const override {
    auto [i, x] = unpair(a);
    auto [j, y] = unpair(b);
    if (i != j) return i < j;
    return parts_[static_cast<std::size_t>(i)].leq(x, y);
  }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      auto ms = max_second(i, bound);
      if (!ms) break;
      for (Code x : parts_[i].members_upto(*ms)) out.push_back(pair(i, x));
    }
  }
  std::optional<std::uint64_t> size() const override {
    std::uint64_t total = 0;
    for (const auto& p : parts_) {
      auto s = p.size();
      if (!s) return std::nullopt;
      total += *s;
    }
    return total;
  }
  std::optional<Code> min() const override {
    auto m = parts_.front().min();
    return m ? std::optional<Code>(pair(0, *m)) : std::nullopt;
  }
  std::optional<Code> max() const override {
    auto m = parts_.back().max();
    return m ? std::optional<Code>(pair(parts_.size() - 1, *m)) : std::nullopt;
  }
  std::optional<CodeStream> cofinal() const override {
    auto s = parts_.back().cofinal();
    if (!s) return std::nullopt;
    const Code tag = parts_.size() - 1;
    return CodeStream{[s = *s, tag](std::uint64_t i) { return pair(tag, s(i)); },
                      Direction::Increasing};
  }
  std::optional<CodeStream> coinitial() const override {
    auto s = parts_.front().coinitial();
    if (!s) return std::nullopt;
    return CodeStream{[s = *s](std::uint64_t i) { return pair(0, s(i)); }, Direction::Decreasing};
  }
  IntervalSize interval_size(Code a, Code b) const override {
    auto [i, x] = unpair(a);
    auto [j, y] = unpair(b);
    const auto pi = static_cast<std::size_t>(i);
    const auto pj = static_cast<std::size_t>(j);
    if (pi == pj) return parts_[pi].interval_size(x, y);
    auto tail = parts_[pi].max() ? parts_[pi].interval_size(x, *parts_[pi].max())
                                 : IntervalSize::infinite();
    auto head = parts_[pj].min() ? parts_[pj].interval_size(*parts_[pj].min(), y)
                                 : IntervalSize::infinite();
    IntervalSize total = tail + head;
    for (std::size_t k = pi + 1; k < pj; ++k) total = total + size_as_interval(parts_[k]);
    return total;
  }
  bool locally_finite() const override {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (!parts_[i].locally_finite()) return false;
      if (i + 1 < parts_.size() && !parts_[i].max()) return false;
      if (i > 0 && !parts_[i].min()) return false;
    }
    return true;
  }
  std::string name() const override {
    std::string s = "Sum(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i].name();
    return s + ")";
  }

 private:
  std::vector<CodedOrder> parts_;
};

/// Copies of `left` indexed by `right`; codes pair(k, l).
class ProdNode final : public CodedOrder::Node {
 public:
  ProdNode(CodedOrder left, CodedOrder right) : l_(std::move(left)), k_(std::move(right)) {}

  bool contains(Code c) const override {
    auto [k, l] = unpair(c);
    return k_.contains(k) && l_.contains(l);
  }
  bool leq(Code a, Code b) const override {
    auto [ka, la] = unpair(a);
    auto [kb, lb] = unpair(b);
    if (ka != kb) return k_.leq(ka, kb);
    return l_.leq(la, lb);
  }
  void collect(Code bound, std::vector<Code>& out) const override {
    auto top = max_second(0, bound);
    if (!top) return;
    const auto ls = l_.members_upto(*top);
    // pair(k, l) >= k(k+1)/2, so larger first coordinates cannot fit.
    for (Code k : k_.members_upto(isqrt(2 * bound))) {
      auto ms = max_second(k, bound);
      if (!ms) break;
      for (Code l : ls) {
        if (l > *ms) break;
        out.push_back(pair(k, l));
      }
    }
  }
  std::optional<std::uint64_t> size() const override {
    auto a = l_.size();
    auto b = k_.size();
    if (!a || !b) return std::nullopt;
    return *a * *b;
  }
  std::optional<Code> min() const override {
    auto a = k_.min();
    auto b = l_.min();
    if (!a || !b) return std::nullopt;
    return pair(*a, *b);
  }
  std::optional<Code> max() const override {
    auto a = k_.max();
    auto b = l_.max();
    if (!a || !b) return std::nullopt;
    return pair(*a, *b);
  }
  std::optional<CodeStream> cofinal() const override {
    if (auto ks = k_.cofinal()) {
      const Code fixed = l_.max() ? *l_.max() : l_.first(1).front();
      return CodeStream{[ks = *ks, fixed](std::uint64_t i) { return pair(ks(i), fixed); },
                        Direction::Increasing};
    }
    auto ls = l_.cofinal();
    if (!ls) return std::nullopt;
    const Code top = *k_.max();
    return CodeStream{[ls = *ls, top](std::uint64_t i) { return pair(top, ls(i)); },
                      Direction::Increasing};
  }
  std::optional<CodeStream> coinitial() const override {
    if (auto ks = k_.coinitial()) {
      const Code fixed = l_.min() ? *l_.min() : l_.first(1).front();
      return CodeStream{[ks = *ks, fixed](std::uint64_t i) { return pair(ks(i), fixed); },
                        Direction::Decreasing};
    }
    auto ls = l_.coinitial();
    if (!ls) return std::nullopt;
    const Code bottom = *k_.min();
    return CodeStream{[ls = *ls, bottom](std::uint64_t i) { return pair(bottom, ls(i)); },
                      Direction::Decreasing};
  }
  IntervalSize interval_size(Code a, Code b) const override {
    auto [ka, la] = unpair(a);
    auto [kb, lb] = unpair(b);
    if (ka == kb) return l_.interval_size(la, lb);
    auto tail = l_.max() ? l_.interval_size(la, *l_.max()) : IntervalSize::infinite();
    auto head = l_.min() ? l_.interval_size(*l_.min(), lb) : IntervalSize::infinite();
    IntervalSize between = k_.interval_size(ka, kb);
    IntervalSize middle;
    if (between.is_finite()) {
      const std::uint64_t blocks = between.count - 2;
      if (blocks == 0)
        middle = IntervalSize::finite(0);
      else if (auto ls = l_.size())
        middle = IntervalSize::finite(blocks * *ls);
      else
        middle = IntervalSize::infinite();
    } else {
      middle = between;
    }
    return tail + middle + head;
  }
  bool locally_finite() const override {
    if (l_.finite()) return k_.locally_finite();
    return k_.size() == std::optional<std::uint64_t>(1) && l_.locally_finite();
  }
  std::string name() const override { return "Prod(" + l_.name() + "," + k_.name() + ")"; }

 private:
  CodedOrder l_;
  CodedOrder k_;
};

/// Finite-support functions K -> Z, compared at the K-largest point where
/// they differ. Codes pair(seq(points), seq(values)).
class ZetaNode final : public CodedOrder::Node {
 public:
  explicit ZetaNode(CodedOrder k) : k_(std::move(k)) {}

  struct Function {
    std::vector<Code> points;  // strictly K-decreasing
    std::vector<std::int64_t> values;
  };

  std::optional<Function> decode(Code c) const {
    if (c >= kCodeLimit) return std::nullopt;
    auto [p, v] = unpair(c);
    // A sequence of n distinct elements needs a code of size at least n.
    auto pts = seq_decode_limited(p, kMaxSupport);
    if (!pts) return std::nullopt;
    auto vals = seq_decode_limited(v, kMaxSupport);
    if (!vals || vals->size() != pts->size()) return std::nullopt;
    Function f;
    for (std::size_t i = 0; i < pts->size(); ++i) {
      if ((*vals)[i] == 0 || !k_.contains((*pts)[i])) return std::nullopt;
      if (i > 0 && !k_.less((*pts)[i], (*pts)[i - 1])) return std::nullopt;
      f.values.push_back(zigzag_decode((*vals)[i]));
    }
    f.points = std::move(*pts);
    return f;
  }

  static Code encode(const std::vector<Code>& points, const std::vector<std::int64_t>& values) {
    std::vector<Code> zig;
    zig.reserve(values.size());
    for (auto v : values) zig.push_back(zigzag_encode(v));
    return pair(seq_encode(points), seq_encode(zig));
  }

  /// decode without the membership checks, for codes known to be members.
  static Function decode_member(Code c) {
    auto [p, v] = unpair(c);
    Function f;
    f.points = *seq_decode_limited(p, kMaxSupport);
    const auto vals = *seq_decode_limited(v, kMaxSupport);
    f.values.reserve(vals.size());
    for (Code z : vals) f.values.push_back(zigzag_decode(z));
    return f;
  }

  /// Value of the function at point k.
  static std::int64_t value_at(const Function& f, Code k) {
    for (std::size_t i = 0; i < f.points.size(); ++i)
      if (f.points[i] == k) return f.values[i];
    return 0;
  }

  bool contains(Code c) const override { return decode(c).has_value(); }

  bool leq(Code a, Code b) const override {
    if (a == b) return true;
    return leq_functions(decode_member(a), decode_member(b));
  }

  /// The order on decoded functions.
  bool leq_functions(const Function& f, const Function& g) const {
    const std::size_t common = std::min(f.points.size(), g.points.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (f.points[i] == g.points[i]) {
        if (f.values[i] == g.values[i]) continue;
        return f.values[i] < g.values[i];
      }
      // The larger point is in the support of only one of them.
      if (k_.less(f.points[i], g.points[i])) return g.values[i] > 0;
      return f.values[i] < 0;
    }
    if (f.points.size() < g.points.size()) return g.values[common] > 0;
    if (f.points.size() > g.points.size()) return f.values[common] < 0;
    return true;
  }

  void collect(Code bound, std::vector<Code>& out) const override {
    const Code point_bound = isqrt(2 * bound) + 1;
    const auto ks = k_.members_upto(point_bound);
    for (std::size_t len = 0;; ++len) {
      if (pair(len, 0) > point_bound) break;
      std::vector<Code> point_seqs;
      point_tails(len, *max_second(len, point_bound), std::nullopt, ks, point_seqs);
      for (Code tail : point_seqs) {
        const Code p = pair(len, tail);
        auto vb = max_second(p, bound);
        if (!vb) continue;
        auto lb = max_second(len, *vb);
        if (!lb) continue;
        std::vector<Code> value_seqs;
        value_tails(len, *lb, value_seqs);
        for (Code vt : value_seqs) out.push_back(pair(p, pair(len, vt)));
      }
    }
  }

  std::optional<std::uint64_t> size() const override {
    if (k_.size() == std::optional<std::uint64_t>(0)) return 1;
    return std::nullopt;
  }
  std::optional<Code> min() const override {
    if (k_.size() == std::optional<std::uint64_t>(0)) return Code{0};
    return std::nullopt;
  }
  std::optional<Code> max() const override { return min(); }

  std::optional<CodeStream> cofinal() const override { return stream(+1); }
  std::optional<CodeStream> coinitial() const override { return stream(-1); }

  IntervalSize interval_size(Code a, Code b) const override {
    const Function f = *decode(a);
    const Function g = *decode(b);
    auto top = top_difference(f, g);
    auto lowest = k_.min();
    if (!top || !lowest || *top != *lowest) return IntervalSize::infinite();
    const auto d = value_at(g, *top) - value_at(f, *top);
    return IntervalSize::finite(static_cast<std::uint64_t>(d < 0 ? -d : d) + 1);
  }

  /// The K-largest point where f and g differ.
  std::optional<Code> top_difference(const Function& f, const Function& g) const {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < f.points.size() || j < g.points.size()) {
      if (j == g.points.size() || (i < f.points.size() && k_.less(g.points[j], f.points[i])))
        return f.points[i];
      if (i == f.points.size() || k_.less(f.points[i], g.points[j])) return g.points[j];
      if (f.values[i] != g.values[j]) return f.points[i];
      ++i;
      ++j;
    }
    return std::nullopt;
  }

  bool locally_finite() const override {
    auto s = k_.size();
    return s && *s <= 1;
  }
  std::string name() const override { return "ZetaPow(" + k_.name() + ")"; }
  const CodedOrder& exponent() const { return k_; }

  static constexpr std::size_t kMaxSupport = 64;

 private:
  std::optional<CodeStream> stream(int sign) const {
    const Direction dir = sign > 0 ? Direction::Increasing : Direction::Decreasing;
    if (auto top = k_.max()) {
      return CodeStream{[t = *top, sign](std::uint64_t i) {
                          return encode({t}, {sign * static_cast<std::int64_t>(i + 1)});
                        },
                        dir};
    }
    auto ks = k_.cofinal();
    if (!ks) return std::nullopt;
    return CodeStream{[ks = *ks, sign](std::uint64_t i) { return encode({ks(i)}, {sign}); }, dir};
  }

  // Tails of point sequences: each element is K-below the one before it.
  void point_tails(std::size_t len, Code bound, std::optional<Code> above,
                   const std::vector<Code>& ks, std::vector<Code>& out) const {
    if (len == 0) {
      out.push_back(0);
      return;
    }
    for (Code a : ks) {
      auto rest = max_second(a, bound);
      if (!rest) break;
      if (above && !k_.less(a, *above)) continue;
      std::vector<Code> tails;
      point_tails(len - 1, *rest, a, ks, tails);
      for (Code t : tails) out.push_back(pair(a, t));
    }
  }

  // Tails of nonzero value sequences.
  static void value_tails(std::size_t len, Code bound, std::vector<Code>& out) {
    if (len == 0) {
      out.push_back(0);
      return;
    }
    for (Code a = 1;; ++a) {
      auto rest = max_second(a, bound);
      if (!rest) break;
      std::vector<Code> tails;
      value_tails(len - 1, *rest, tails);
      for (Code t : tails) out.push_back(pair(a, t));
    }
  }

  CodedOrder k_;
};

}  // namespace detail

/// A suborder of a base order cut out by a predicate. Extrema and streams are
/// supplied by the caller since they cannot be computed in general.
struct RestrictInfo {
  std::string name = "Restrict";
  std::function<bool(Code)> pred;
  std::optional<Code> min;
  std::optional<Code> max;
  std::optional<CodeStream> cofinal;
  std::optional<CodeStream> coinitial;
  /// Convex in the base: interval sizes are inherited.
  bool convex = false;
  std::optional<std::uint64_t> size;
  bool locally_finite = false;
  /// Direct enumeration of members <= bound, when cheaper than filtering.
  std::function<void(Code, std::vector<Code>&)> collect;
};

namespace detail {

class RestrictNode final : public CodedOrder::Node {
 public:
  RestrictNode(CodedOrder base, RestrictInfo info) : base_(std::move(base)), info_(std::move(info)) {}

  bool contains(Code c) const override { return base_.contains(c) && info_.pred(c); }
  bool leq(Code a, Code b) const override { return base_.leq(a, b); }
  void collect(Code bound, std::vector<Code>& out) const override {
    if (info_.collect) {
      info_.collect(bound, out);
      return;
    }
    // Enumeration grows the bound eightfold per step; refuse a step whose
    // base scan would be too large.
    if (bound > 4096) {
      std::vector<Code> probe;
      base_.node().collect(bound / 8, probe);
      if (probe.size() > kScanLimit) throw std::overflow_error("restriction scan limit reached in " + info_.name);
    }
    std::vector<Code> all;
    base_.node().collect(bound, all);
    for (Code c : all)
      if (info_.pred(c)) out.push_back(c);
  }
  std::optional<std::uint64_t> size() const override { return info_.size; }
  std::optional<Code> min() const override { return info_.min; }
  std::optional<Code> max() const override { return info_.max; }
  std::optional<CodeStream> cofinal() const override { return info_.cofinal; }
  std::optional<CodeStream> coinitial() const override { return info_.coinitial; }
  IntervalSize interval_size(Code a, Code b) const override {
    return info_.convex ? base_.interval_size(a, b) : IntervalSize::unknown();
  }
  bool locally_finite() const override { return info_.locally_finite; }
  std::string name() const override { return info_.name; }

 private:
  static constexpr std::size_t kScanLimit = std::size_t{1} << 18;
  CodedOrder base_;
  RestrictInfo info_;
};

class FinOrderNode final : public CodedOrder::Node {
 public:
  explicit FinOrderNode(FinOrder f) : f_(std::move(f)) {}
  bool contains(Code c) const override { return f_.contains(c); }
  bool leq(Code a, Code b) const override { return f_.leq(a, b); }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (Code c : f_.labels())
      if (c <= bound) out.push_back(c);
  }
  std::optional<std::uint64_t> size() const override { return f_.size(); }
  std::optional<Code> min() const override {
    return f_.empty() ? std::nullopt : std::optional<Code>(f_.labels().front());
  }
  std::optional<Code> max() const override {
    return f_.empty() ? std::nullopt : std::optional<Code>(f_.labels().back());
  }
  IntervalSize interval_size(Code a, Code b) const override {
    return IntervalSize::finite(*f_.rank(b) - *f_.rank(a) + 1);
  }
  bool locally_finite() const override { return true; }
  std::string name() const override { return "Finite(" + std::to_string(f_.size()) + ")"; }

 private:
  FinOrder f_;
};

/// Sum of blocks indexed by a coded order; codes pair(i, x).
class DependentSumNode final : public CodedOrder::Node {
 public:
  DependentSumNode(CodedOrder index, std::function<CodedOrder(Code)> block, std::string name)
      : index_(std::move(index)), make_(std::move(block)), name_(std::move(name)) {}

  CodedOrder block(Code i) const {
    std::lock_guard lock(mu_);
    auto it = cache_.find(i);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(i, make_(i)).first->second;
  }

  bool contains(Code c) const override {
    auto [i, x] = unpair(c);
    return index_.contains(i) && block(i).contains(x);
  }
  bool leq(Code a, Code b) const override {
    auto [i, x] = unpair(a);
    auto [j, y] = unpair(b);
    if (i != j) return index_.leq(i, j);
    return block(i).leq(x, y);
  }
  void collect(Code bound, std::vector<Code>& out) const override {
    for (Code i : index_.members_upto(isqrt(2 * bound))) {
      auto ms = max_second(i, bound);
      if (!ms) break;
      for (Code x : block(i).members_upto(*ms)) out.push_back(pair(i, x));
    }
  }
  std::optional<std::uint64_t> size() const override {
    auto n = index_.size();
    if (!n) return std::nullopt;
    std::uint64_t total = 0;
    for (Code i : index_.first(*n)) {
      auto s = block(i).size();
      if (!s) return std::nullopt;
      total += *s;
    }
    return total;
  }
  std::optional<Code> min() const override {
    auto i = index_.min();
    if (!i) return std::nullopt;
    auto x = block(*i).min();
    return x ? std::optional<Code>(pair(*i, *x)) : std::nullopt;
  }
  std::optional<Code> max() const override {
    auto i = index_.max();
    if (!i) return std::nullopt;
    auto x = block(*i).max();
    return x ? std::optional<Code>(pair(*i, *x)) : std::nullopt;
  }
  std::optional<CodeStream> cofinal() const override {
    if (auto top = index_.max()) {
      auto s = block(*top).cofinal();
      if (!s) return std::nullopt;
      return CodeStream{[s = *s, t = *top](std::uint64_t n) { return pair(t, s(n)); },
                        Direction::Increasing};
    }
    auto is = index_.cofinal();
    if (!is) return std::nullopt;
    return CodeStream{[this, is = *is](std::uint64_t n) {
                        const Code i = is(n);
                        const CodedOrder b = block(i);
                        return pair(i, b.min() ? *b.min() : b.first(1).front());
                      },
                      Direction::Increasing};
  }
  std::optional<CodeStream> coinitial() const override {
    if (auto bottom = index_.min()) {
      auto s = block(*bottom).coinitial();
      if (!s) return std::nullopt;
      return CodeStream{[s = *s, b = *bottom](std::uint64_t n) { return pair(b, s(n)); },
                        Direction::Decreasing};
    }
    auto is = index_.coinitial();
    if (!is) return std::nullopt;
    return CodeStream{[this, is = *is](std::uint64_t n) {
                        const Code i = is(n);
                        const CodedOrder b = block(i);
                        return pair(i, b.max() ? *b.max() : b.first(1).front());
                      },
                      Direction::Decreasing};
  }
  IntervalSize interval_size(Code a, Code b) const override {
    auto [i, x] = unpair(a);
    auto [j, y] = unpair(b);
    if (i == j) return block(i).interval_size(x, y);
    return IntervalSize::unknown();
  }
  std::string name() const override { return name_; }

 private:
  CodedOrder index_;
  std::function<CodedOrder(Code)> make_;
  std::string name_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Code, CodedOrder, CodeHash> cache_;
};

}  // namespace detail

inline CodedOrder fin_order(std::uint64_t n) {
  return CodedOrder(std::make_shared<detail::FinNode>(n));
}
inline CodedOrder omega_order() { return CodedOrder(std::make_shared<detail::OmegaNode>()); }
inline CodedOrder eta_order() { return CodedOrder(std::make_shared<detail::EtaNode>()); }
inline CodedOrder rev_order(CodedOrder o) {
  return CodedOrder(std::make_shared<detail::RevNode>(std::move(o)));
}
inline CodedOrder sum_order(std::vector<CodedOrder> parts) {
  if (parts.empty()) throw std::invalid_argument("sum_order: no parts");
  return CodedOrder(std::make_shared<detail::SumNode>(std::move(parts)));
}
inline CodedOrder prod_order(CodedOrder left, CodedOrder right) {
  return CodedOrder(std::make_shared<detail::ProdNode>(std::move(left), std::move(right)));
}
inline CodedOrder zeta_pow_order(CodedOrder k) {
  return CodedOrder(std::make_shared<detail::ZetaNode>(std::move(k)));
}
/// The bijection from zeta^(K+L) onto zeta^K * zeta^L sending a function to
/// its restrictions, coded pair(restriction to L, restriction to K).
class ZetaSplit {
 public:
  ZetaSplit(const CodedOrder& K, const CodedOrder& L) : sum_(sum_order({K, L})), k_(K), l_(L) {}

  /// Nullopt when phi is not a member of zeta^(K+L).
  [[nodiscard]] std::optional<Code> split(Code phi) const {
    const auto f = sum_.decode(phi);
    if (!f) return std::nullopt;
    std::vector<Code> pk, pl;
    std::vector<std::int64_t> vk, vl;
    for (std::size_t i = 0; i < f->points.size(); ++i) {
      auto [side, x] = unpair(f->points[i]);
      (side == 0 ? pk : pl).push_back(x);
      (side == 0 ? vk : vl).push_back(f->values[i]);
    }
    return pair(detail::ZetaNode::encode(pl, vl), detail::ZetaNode::encode(pk, vk));
  }

  /// Inverse of split; nullopt when c is not a member of zeta^K * zeta^L.
  [[nodiscard]] std::optional<Code> join(Code c) const {
    if (c >= kCodeLimit) return std::nullopt;
    auto [cl, ck] = unpair(c);
    const auto fl = l_.decode(cl);
    const auto fk = k_.decode(ck);
    if (!fl || !fk) return std::nullopt;
    std::vector<Code> pts;
    std::vector<std::int64_t> vals;
    for (std::size_t i = 0; i < fl->points.size(); ++i) {
      pts.push_back(pair(1, fl->points[i]));
      vals.push_back(fl->values[i]);
    }
    for (std::size_t i = 0; i < fk->points.size(); ++i) {
      pts.push_back(pair(0, fk->points[i]));
      vals.push_back(fk->values[i]);
    }
    return detail::ZetaNode::encode(pts, vals);
  }

 private:
  detail::ZetaNode sum_;
  detail::ZetaNode k_;
  detail::ZetaNode l_;
};

inline std::optional<Code> zeta_split(const CodedOrder& K, const CodedOrder& L, Code phi) {
  return ZetaSplit(K, L).split(phi);
}
inline std::optional<Code> zeta_join(const CodedOrder& K, const CodedOrder& L, Code c) {
  return ZetaSplit(K, L).join(c);
}

inline CodedOrder restrict_order(CodedOrder base, RestrictInfo info) {
  return CodedOrder(std::make_shared<detail::RestrictNode>(std::move(base), std::move(info)));
}
inline CodedOrder finite_order(FinOrder f) {
  return CodedOrder(std::make_shared<detail::FinOrderNode>(std::move(f)));
}
inline CodedOrder dependent_sum_order(CodedOrder index, std::function<CodedOrder(Code)> block,
                                      std::string name = "DependentSum") {
  return CodedOrder(
      std::make_shared<detail::DependentSumNode>(std::move(index), std::move(block), std::move(name)));
}

/// The closed interval [a, b] of base.
inline CodedOrder interval(const CodedOrder& base, Code a, Code b) {
  RestrictInfo info;
  info.name = "Interval";
  info.pred = [base, a, b](Code x) { return base.leq(a, x) && base.leq(x, b); };
  info.min = a;
  info.max = b;
  info.convex = true;
  auto n = base.interval_size(a, b);
  if (n.is_finite()) {
    info.size = n.count;
    info.locally_finite = true;
  }
  return restrict_order(base, std::move(info));
}

/// The final segment [a, ->) of base.
inline CodedOrder ray_from(const CodedOrder& base, Code a) {
  RestrictInfo info;
  info.name = "RayFrom";
  info.pred = [base, a](Code x) { return base.leq(a, x); };
  info.min = a;
  info.max = base.max();
  if (auto s = base.cofinal()) info.cofinal = detail::stream_from(base, *s, a);
  info.convex = true;
  if (info.max) {
    auto n = base.interval_size(a, *info.max);
    if (n.is_finite()) info.size = n.count;
  }
  info.locally_finite = base.locally_finite();
  return restrict_order(base, std::move(info));
}

/// The initial segment (<-, b] of base.
inline CodedOrder ray_to(const CodedOrder& base, Code b) {
  RestrictInfo info;
  info.name = "RayTo";
  info.pred = [base, b](Code x) { return base.leq(x, b); };
  info.max = b;
  info.min = base.min();
  if (auto s = base.coinitial()) info.coinitial = detail::stream_from(base, *s, b);
  info.convex = true;
  if (info.min) {
    auto n = base.interval_size(*info.min, b);
    if (n.is_finite()) info.size = n.count;
  }
  info.locally_finite = base.locally_finite();
  return restrict_order(base, std::move(info));
}

}  // namespace linord
