#pragma once

// Surjections from a segment of Z-power multiples onto a sum of lower ones:
//   sum over b0 <= r < b1 of Z^r * omega  ->>  sum over g in H of Z^g * omega
// for finite exponents, with b1 finite or omega.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "linord/cnf.hpp"
#include "linord/epi.hpp"

namespace linord {

namespace detail {

/// Z^g for a finite exponent; Z^0 is the one-point order with code 0.
inline CodedOrder zeta_fin(std::uint64_t g) {
  return g == 0 ? fin_order(1) : zeta_pow_order(fin_order(g));
}

inline CodedOrder zeta_omega_multiple(std::uint64_t g) { return prod_order(zeta_fin(g), omega_order()); }

/// A Z^g element with value v at its top point (zero function when v = 0).
inline Code top_valued(std::uint64_t g, std::int64_t v) {
  if (g == 0 || v == 0) return 0;
  return ZetaNode::encode({g - 1}, {v});
}

/// The restriction of f to the points [p - g, p - 1], shifted down to [0, g).
inline Code window(const ZetaNode::Function& f, std::uint64_t p, std::uint64_t g) {
  if (g == 0) return 0;
  std::vector<Code> pts;
  std::vector<std::int64_t> vals;
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const Code x = f.points[i];
    if (x + g >= p && x < p) {
      pts.push_back(x + g - p);
      vals.push_back(f.values[i]);
    }
  }
  return ZetaNode::encode(pts, vals);
}

inline std::uint64_t finite_exponent(const Cnf& c, const char* what) {
  if (!c.is_finite()) throw std::domain_error(std::string("zeta_segment_epi: ") + what + " must be finite");
  return c.finite_value();
}

}  // namespace detail

inline EpiWitness zeta_segment_epi(std::vector<Cnf> H, const Cnf& b0, const Cnf& b1) {
  if (H.empty()) throw std::invalid_argument("zeta_segment_epi: H is empty");
  std::vector<std::uint64_t> gs;
  for (const Cnf& g : H) gs.push_back(detail::finite_exponent(g, "every member of H"));
  std::sort(gs.begin(), gs.end());
  gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
  const std::uint64_t start = detail::finite_exponent(b0, "the lower exponent");
  const bool to_omega = b1 == Cnf::omega();
  const std::uint64_t end = to_omega ? 0 : detail::finite_exponent(b1, "the upper exponent (or omega)");
  if (gs.back() >= start) throw std::invalid_argument("zeta_segment_epi: max H must lie below the lower exponent");
  if (!to_omega && end <= start) throw std::invalid_argument("zeta_segment_epi: empty exponent segment");

  const std::size_t h = gs.size();
  const std::uint64_t top = gs.back();  // N
  const std::uint64_t summands = to_omega ? 0 : end - start;

  CodedOrder source;
  if (to_omega) {
    source = dependent_sum_order(
        omega_order(), [start](Code s) { return detail::zeta_omega_multiple(start + static_cast<std::uint64_t>(s)); },
        "ZetaSegment");
  } else {
    std::vector<CodedOrder> parts;
    for (std::uint64_t r = start; r < end; ++r) parts.push_back(detail::zeta_omega_multiple(r));
    source = sum_order(std::move(parts));
  }
  std::vector<CodedOrder> targets, zs;
  for (std::uint64_t g : gs) {
    targets.push_back(detail::zeta_omega_multiple(g));
    zs.push_back(detail::zeta_fin(g));
  }
  const CodedOrder target = sum_order(targets);

  auto map = [gs, zs, h, top, start, summands, to_omega](Code x) -> Code {
    const auto [s, rest] = unpair(x);
    const auto [n, phi] = unpair(rest);
    const std::uint64_t rho = start + static_cast<std::uint64_t>(s);
    const detail::ZetaNode node(fin_order(rho));
    const auto f = node.decode(phi);
    if (!f) throw std::invalid_argument("zeta_segment_epi: not a source code");
    const auto out = [](std::size_t j, Code copy, Code z) { return pair(j, pair(copy, z)); };
    const auto clamp = [&zs](std::size_t j, Code z, std::optional<Code> lo, std::optional<Code> hi) {
      const CodedOrder& o = zs[j];
      if (lo && o.less(z, *lo)) return *lo;
      if (hi && o.less(*hi, z)) return *hi;
      return z;
    };
    const std::size_t last = h - 1;
    const auto l_at = [top](std::int64_t i) { return detail::top_valued(top, i); };
    const auto fr = [&](std::uint64_t p, std::uint64_t g) { return detail::window(*f, p, g); };
    const bool single = !to_omega && summands == 1;

    // Onto the last summand, where a copy is spread over the intervals
    // (<-, l_0], [l_0, l_1], [l_1, l_2], ...
    const auto spread = [&](std::size_t block, Code copy, std::uint64_t p) {
      if (top == 0) return out(last, block, 0);
      if (copy == 0) return out(last, block, clamp(last, fr(p, top), std::nullopt, l_at(0)));
      const auto c = static_cast<std::int64_t>(copy);
      return out(last, block, clamp(last, fr(p, top), l_at(c - 1), l_at(c)));
    };

    if (s > 0) {
      if (!to_omega && s + 1 == summands) return out(last, s + n, fr(rho, top));
      return spread(static_cast<std::size_t>(s), n, rho);
    }
    if (n > 0) {
      if (single) return out(last, n, fr(rho, top));
      return spread(0, n, rho);
    }
    // Copy 0 of the first summand.
    if (h == 1) {
      if (single) return out(0, 0, fr(rho, top));
      return top == 0 ? out(0, 0, 0) : out(0, 0, clamp(0, fr(rho, top), std::nullopt, l_at(0)));
    }
    const std::int64_t t = detail::ZetaNode::value_at(*f, rho - 1);
    const auto lower_summand = [&](std::size_t j) -> Code {
      const std::uint64_t g = gs[j];
      const auto m_at = [g](std::int64_t i) { return detail::top_valued(g, -i); };
      const std::int64_t u = detail::ZetaNode::value_at(*f, rho - 2);
      if (j == 0 && t < 0) return out(0, 0, clamp(0, fr(rho - 1, g), m_at(-t), m_at(-t - 1)));
      if (j == 0 && u < 0) return out(0, 0, m_at(0));
      if (u < 0) return out(j, 0, clamp(j, fr(rho - 2, g), m_at(-u), m_at(-u - 1)));
      if (u == 0) return out(j, 0, clamp(j, fr(rho - 2, g), m_at(0), std::nullopt));
      return out(j, static_cast<Code>(u), fr(rho - 2, g));
    };
    if (t <= 0) return lower_summand(0);
    if (t < static_cast<std::int64_t>(last)) return lower_summand(static_cast<std::size_t>(t));
    const std::int64_t i = t - static_cast<std::int64_t>(last);
    if (top == 0) return out(last, 0, 0);
    if (i == 0) return out(last, 0, clamp(last, fr(rho - 1, top), std::nullopt, l_at(0)));
    if (!single) return out(last, 0, l_at(0));
    return out(last, 0, clamp(last, fr(rho - 1, top), l_at(i - 1), l_at(i)));
  };

  std::string hs;
  for (std::uint64_t g : gs) hs += (hs.empty() ? "" : ",") + std::to_string(g);
  return EpiWitness{source, target, map, nullptr,
                    {"zeta-seg(" + hs + ";" + std::to_string(start) + "," +
                     (to_omega ? std::string("w") : std::to_string(end)) + ")"}};
}

}  // namespace linord
