#pragma once

// Natural-number codes: Cantor pairing and length-prefixed sequence coding.
//
// Codes are 128-bit unsigned integers. Arguments to pair() are limited to
// kPairArgLimit so that every intermediate product fits; exceeding the limit
// throws std::overflow_error rather than wrapping.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace linord {

using Code = unsigned __int128;

inline constexpr Code kPairArgLimit = Code{1} << 62;
/// Every value of pair() lies below this bound.
inline constexpr Code kCodeLimit = Code{1} << 125;

struct CodeHash {
  std::size_t operator()(Code c) const noexcept {
    auto lo = static_cast<std::uint64_t>(c);
    auto hi = static_cast<std::uint64_t>(c >> 64);
    return static_cast<std::size_t>(lo ^ (hi * 0x9e3779b97f4a7c15ULL) ^ (lo >> 29));
  }
};

inline std::string to_string(Code c) {
  if (c == 0) return "0";
  std::string out;
  while (c != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  return {out.rbegin(), out.rend()};
}

inline std::optional<Code> parse_code(std::string_view text) {
  if (text.empty() || text.size() > 38) return std::nullopt;
  Code c = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return std::nullopt;
    c = c * 10 + static_cast<unsigned>(ch - '0');
  }
  return c;
}

/// Integer square root, floor(sqrt(n)).
inline Code isqrt(Code n) {
  if (n < 2) return n;
  // long double carries a 64-bit mantissa, so the estimate is off by at most
  // a few units and the exact corrections below are short.
  Code x = static_cast<Code>(std::sqrt(static_cast<long double>(n)));
  const Code top = (Code{1} << 64) - 1;  // isqrt of any 128-bit value fits
  if (x > top) x = top;
  while (x * x > n) --x;
  while (x < top && (x + 1) * (x + 1) <= n) ++x;
  return x;
}

/// Cantor pairing: (a+b)(a+b+1)/2 + b.
inline Code pair(Code a, Code b) {
  if (a >= kPairArgLimit || b >= kPairArgLimit || a + b >= kPairArgLimit)
    throw std::overflow_error("pair: argument exceeds code range");
  Code s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<Code, Code> unpair(Code z) {
  if (z >= kCodeLimit) throw std::overflow_error("unpair: code exceeds range");
  Code w = (isqrt(8 * z + 1) - 1) / 2;
  Code t = w * (w + 1) / 2;
  Code b = z - t;
  return {w - b, b};
}

/// Largest b with pair(a, b) <= bound, or nullopt if pair(a, 0) > bound.
inline std::optional<Code> max_second(Code a, Code bound) {
  if (a >= kPairArgLimit) return std::nullopt;
  if (pair(a, 0) > bound) return std::nullopt;
  // pair(a, b) = (a+b)(a+b+1)/2 + b is increasing in b; binary search.
  Code lo = 0;
  Code hi = isqrt(2 * bound) + 1;
  if (hi >= kPairArgLimit - a) hi = kPairArgLimit - a - 1;
  while (lo < hi) {
    Code mid = lo + (hi - lo + 1) / 2;
    if (pair(a, mid) <= bound)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

/// Code of a finite sequence: pair(k, pair(a0, pair(a1, ... pair(a_{k-1}, 0)))).
inline Code seq_encode(std::span<const Code> items) {
  Code tail = 0;
  for (auto it = items.rbegin(); it != items.rend(); ++it) tail = pair(*it, tail);
  return pair(items.size(), tail);
}

inline Code seq_encode(std::initializer_list<Code> items) {
  return seq_encode(std::span<const Code>(items.begin(), items.size()));
}

/// Inverse of seq_encode; nullopt when the code violates the format.
inline std::optional<std::vector<Code>> seq_decode(Code c) {
  auto [len, tail] = unpair(c);
  // Once the tail reaches 0 every remaining element is 0, so any length is
  // well-formed; absurd lengths are refused instead of materialized.
  if (len > (Code{1} << 20)) throw std::length_error("seq_decode: sequence too long");
  std::vector<Code> out;
  out.reserve(static_cast<std::size_t>(len));
  for (Code i = 0; i < len; ++i) {
    auto [head, rest] = unpair(tail);
    out.push_back(head);
    tail = rest;
  }
  if (tail != 0) return std::nullopt;
  return out;
}

/// seq_decode that treats lengths above max_len as malformed.
inline std::optional<std::vector<Code>> seq_decode_limited(Code c, std::size_t max_len) {
  if (unpair(c).first > max_len) return std::nullopt;
  return seq_decode(c);
}

/// Zigzag integer coding used for the values of finite-support functions:
/// 2k -> k, 2k+1 -> -(k+1).
inline std::int64_t zigzag_decode(Code c) {
  if (c % 2 == 0) return static_cast<std::int64_t>(c / 2);
  return -static_cast<std::int64_t>(c / 2) - 1;
}

inline Code zigzag_encode(std::int64_t v) {
  if (v >= 0) return static_cast<Code>(v) * 2;
  return static_cast<Code>(-(v + 1)) * 2 + 1;
}

}  // namespace linord
