#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "linord/codes.hpp"

namespace linord {

/// A finite linear order on distinct natural-number labels, stored as the
/// labels listed in increasing order.
class FinOrder {
 public:
  FinOrder() = default;

  explicit FinOrder(std::vector<Code> chain) : chain_(std::move(chain)) {
    rank_.reserve(chain_.size());
    for (std::size_t i = 0; i < chain_.size(); ++i) {
      if (!rank_.emplace(chain_[i], i).second)
        throw std::invalid_argument("FinOrder: duplicate label");
    }
  }

  /// The n-chain on labels 0..n-1.
  static FinOrder chain(std::size_t n) {
    std::vector<Code> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = i;
    return FinOrder(std::move(c));
  }

  [[nodiscard]] std::size_t size() const { return chain_.size(); }
  [[nodiscard]] bool empty() const { return chain_.empty(); }
  [[nodiscard]] const std::vector<Code>& labels() const { return chain_; }
  [[nodiscard]] Code at(std::size_t rank) const { return chain_.at(rank); }

  [[nodiscard]] std::optional<std::size_t> rank(Code label) const {
    auto it = rank_.find(label);
    if (it == rank_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool contains(Code label) const { return rank(label).has_value(); }
  [[nodiscard]] bool leq(Code a, Code b) const { return *rank(a) <= *rank(b); }

  friend bool operator==(const FinOrder& a, const FinOrder& b) { return a.chain_ == b.chain_; }

 private:
  std::vector<Code> chain_;
  std::unordered_map<Code, std::size_t, CodeHash> rank_;
};

}  // namespace linord
