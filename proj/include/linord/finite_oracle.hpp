#pragma once

// Exhaustive ground truth on finite orders: embeddings and epimorphisms
// between finite chains, induced suborders, the finite form of the quotient
// construction, and a seeded instance generator.
//
// Maps are rank vectors: m[r] is the rank of the image of the element of
// rank r.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "linord/codes.hpp"
#include "linord/fin_order.hpp"

namespace linord {

using FinMap = std::vector<std::size_t>;

enum class MapKind { Emb, Epi };

/// Size cap for exhaustive enumeration, from LINORD_ORACLE_CAP (default 9).
inline std::size_t oracle_cap() {
  if (const char* env = std::getenv("LINORD_ORACLE_CAP")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 9;
}

inline bool is_monotone(const FinMap& m) {
  return std::is_sorted(m.begin(), m.end());
}

/// m maps an n-chain order-preservingly onto an target-chain.
inline bool is_epi(const FinMap& m, std::size_t target) {
  if (!is_monotone(m)) return false;
  if (m.empty()) return target == 0;
  if (m.front() != 0 || m.back() + 1 != target) return false;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] > m[i - 1] + 1) return false;
  return true;
}

/// m embeds an n-chain into a target-chain.
inline bool is_emb(const FinMap& m, std::size_t target) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] >= target) return false;
    if (i > 0 && m[i] <= m[i - 1]) return false;
  }
  return true;
}

struct MapList {
  std::vector<FinMap> maps;
  std::uint64_t count = 0;
};

namespace detail {

// Every monotone map from an n-chain into an m-chain, filtered by keep.
template <class Keep>
void monotone_maps(std::size_t n, std::size_t m, FinMap& cur, Keep&& keep, std::vector<FinMap>& out) {
  if (cur.size() == n) {
    if (keep(cur)) out.push_back(cur);
    return;
  }
  for (std::size_t v = cur.empty() ? 0 : cur.back(); v < m; ++v) {
    cur.push_back(v);
    monotone_maps(n, m, cur, keep, out);
    cur.pop_back();
  }
}

inline void check_cap(std::size_t n, std::optional<std::size_t> cap) {
  const std::size_t limit = cap.value_or(oracle_cap());
  if (n > limit)
    throw std::length_error("oracle: size " + std::to_string(n) + " exceeds cap " +
                            std::to_string(limit));
}

}  // namespace detail

/// Emb: order-preserving injections L -> K. Epi: order-preserving
/// surjections K -> L.
inline MapList enumerate_maps(const FinOrder& L, const FinOrder& K, MapKind kind,
                              std::optional<std::size_t> cap = std::nullopt) {
  detail::check_cap(L.size(), cap);
  detail::check_cap(K.size(), cap);
  MapList out;
  FinMap cur;
  if (kind == MapKind::Emb) {
    const std::size_t m = K.size();
    detail::monotone_maps(L.size(), m, cur, [m](const FinMap& f) { return is_emb(f, m); }, out.maps);
  } else {
    const std::size_t m = L.size();
    detail::monotone_maps(K.size(), m, cur, [m](const FinMap& f) { return is_epi(f, m); }, out.maps);
  }
  out.count = out.maps.size();
  return out;
}

inline bool exists_epi(const FinOrder& L, const FinOrder& K) {
  return enumerate_maps(L, K, MapKind::Epi).count > 0;
}

inline bool exists_emb(const FinOrder& L, const FinOrder& K) {
  return enumerate_maps(L, K, MapKind::Emb).count > 0;
}

inline bool contains_map(const MapList& list, const FinMap& m) {
  return std::find(list.maps.begin(), list.maps.end(), m) != list.maps.end();
}

inline FinOrder induced_suborder(const FinOrder& K, const std::vector<Code>& subset) {
  if (subset.empty()) throw std::invalid_argument("induced_suborder: empty subset");
  std::unordered_set<Code, CodeHash> want;
  for (Code c : subset) {
    if (!K.contains(c)) throw std::invalid_argument("induced_suborder: " + to_string(c) + " is not a label");
    want.insert(c);
  }
  std::vector<Code> chain;
  for (Code c : K.labels())
    if (want.count(c)) chain.push_back(c);
  return FinOrder(std::move(chain));
}

/// The product L*K (K copies of L), labelled pair(k, l) to match the coded
/// products.
inline FinOrder fin_product(const FinOrder& L, const FinOrder& K) {
  std::vector<Code> chain;
  for (Code k : K.labels())
    for (Code l : L.labels()) chain.push_back(pair(k, l));
  return FinOrder(std::move(chain));
}

/// From an epimorphism phi : L*K -> L*J (on ranks of the products), an
/// epimorphism psi : K -> J with k R psi(k), where k R j when phi sends some
/// point of block k into block j.
inline FinMap quotient_epi_fin(const FinOrder& L, const FinOrder& K, const FinOrder& J, const FinMap& phi) {
  const std::size_t a = L.size();
  if (a == 0 || K.empty() || J.empty()) throw std::invalid_argument("quotient_epi_fin: empty order");
  if (phi.size() != a * K.size() || !is_epi(phi, a * J.size()))
    throw std::invalid_argument("quotient_epi_fin: phi is not an epimorphism L*K -> L*J");
  const std::size_t nk = K.size();
  const std::size_t nj = J.size();

  // Images of blocks are convex, so each section is a range.
  struct Section {
    std::size_t lo, hi;  // blocks of J met
    std::optional<std::size_t> full;  // a block of J covered entirely
  };
  std::vector<Section> R(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const std::size_t first = phi[k * a];
    const std::size_t last = phi[k * a + a - 1];
    R[k] = {first / a, last / a, std::nullopt};
    for (std::size_t j = R[k].lo; j <= R[k].hi; ++j)
      if (first <= j * a && j * a + a - 1 <= last) R[k].full = j;
  }
  for (std::size_t k = 0; k < nk; ++k) {
    if (R[k].hi - R[k].lo + 1 > 3) throw std::logic_error("quotient_epi_fin: section larger than 3");
    if (k > 0 && (R[k].lo < R[k - 1].lo || R[k].hi < R[k - 1].hi))
      throw std::logic_error("quotient_epi_fin: sections not monotone");
  }
  for (std::size_t j = 0; j < nj; ++j) {
    bool hit = false;
    for (const auto& s : R) hit = hit || (s.lo <= j && j <= s.hi);
    if (!hit) throw std::logic_error("quotient_epi_fin: empty horizontal section");
  }

  std::vector<std::optional<std::size_t>> psi(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    if (R[k].lo == R[k].hi)
      psi[k] = R[k].lo;  // (a)
    else if (R[k].full)
      psi[k] = *R[k].full;  // (b)
  }
  // (c): maximal runs of the remaining blocks. A finite order is a single
  // condensation class, so its ends are min K and max K.
  for (std::size_t k = 0; k < nk;) {
    if (psi[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < nk && !psi[end + 1]) ++end;
    const std::size_t j0 = R[k].lo;
    bool shift;
    if (k == 0)
      shift = true;  // (c1a)
    else if (end + 1 == nk)
      shift = false;  // (c1b)
    else
      shift = *psi[k - 1] == j0;  // (c1c)
    for (std::size_t r = k; r <= end; ++r) psi[r] = j0 + (r - k) + (shift ? 1 : 0);
    k = end + 1;
  }

  FinMap out(nk);
  for (std::size_t k = 0; k < nk; ++k) out[k] = *psi[k];
  const bool valid = nk <= oracle_cap() && nj <= oracle_cap()
                         ? contains_map(enumerate_maps(J, K, MapKind::Epi), out)
                         : is_epi(out, nj);
  if (!valid) throw std::logic_error("quotient_epi_fin: result is not an epimorphism");
  return out;
}

struct FuzzParams {
  std::size_t max_chain = 6;   // chains have 1..max_chain elements
  std::size_t max_total = 9;   // bound on the size of generated carriers
  std::size_t max_pieces = 4;
};

/// A finite instance for definition by pieces: convex rank ranges of K and
/// L, with one epimorphism per piece (ranks relative to the piece).
struct FinPiecesInstance {
  std::size_t k_size = 0;
  std::size_t l_size = 0;
  std::vector<std::pair<std::size_t, std::size_t>> k_pieces;
  std::vector<std::pair<std::size_t, std::size_t>> l_pieces;
  std::vector<FinMap> sigmas;
};

/// A finite instance for family mashing: a nice family of K onto the whole
/// of an l_size-chain.
struct FinMashInstance {
  std::size_t k_size = 0;
  std::size_t l_size = 0;
  std::vector<std::pair<std::size_t, std::size_t>> k_pieces;
  std::vector<FinMap> sigmas;
};

struct FinQuotientInstance {
  FinOrder L, K, J;
  FinMap phi;
};

/// Deterministic stream of random finite instances.
class FuzzGen {
 public:
  explicit FuzzGen(std::uint64_t seed, FuzzParams params = {}) : rng_(seed), p_(params) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  /// An n-chain on random distinct labels below 1000.
  FinOrder chain(std::size_t n) {
    std::set<Code> seen;
    std::vector<Code> labels;
    while (labels.size() < n) {
      const Code c = uniform(0, 999);
      if (seen.insert(c).second) labels.push_back(c);
    }
    return FinOrder(std::move(labels));
  }

  FinOrder chain() { return chain(uniform(1, p_.max_chain)); }

  /// A uniformly random epimorphism from an n-chain onto an m-chain (m <= n).
  FinMap epi(std::size_t n, std::size_t m) {
    std::vector<std::size_t> gaps(n - 1);
    for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = i;
    std::shuffle(gaps.begin(), gaps.end(), rng_);
    std::vector<bool> cut(n, false);
    for (std::size_t i = 0; i + 1 < m; ++i) cut[gaps[i] + 1] = true;
    FinMap out(n);
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + (cut[i] ? 1 : 0);
    return out;
  }

  /// Definition-by-pieces instances whose hypotheses hold.
  FinPiecesInstance pieces() {
    for (;;) {
      FinPiecesInstance in;
      const std::size_t count = uniform(1, p_.max_pieces);
      // Target covering: consecutive pieces share a point or are adjacent.
      std::vector<bool> shared(count, false);
      std::size_t l = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) shared[i] = uniform(0, 1) == 0;
        const std::size_t lo = shared[i] ? l - 1 : l;
        const std::size_t hi = lo + uniform(0, 2);
        in.l_pieces.push_back({lo, hi});
        l = hi + 1;
      }
      in.l_size = l;
      // Source family: connected only where the target pieces are, with
      // optional holes elsewhere, covering both ends of K.
      std::size_t k = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const auto [llo, lhi] = in.l_pieces[i];
        const std::size_t width = lhi - llo + 1;
        std::size_t lo = k;
        if (i > 0) {
          const bool connect = shared[i] && uniform(0, 1) == 0;
          lo = connect ? k - 1 : k + uniform(0, 1);
        }
        const std::size_t hi = lo + width - 1 + uniform(0, 1);
        in.k_pieces.push_back({lo, hi});
        k = hi + 1;
      }
      in.k_size = k;
      if (in.k_size > p_.max_total || in.l_size > p_.max_total) continue;
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = in.k_pieces[i].second - in.k_pieces[i].first + 1;
        const std::size_t m = in.l_pieces[i].second - in.l_pieces[i].first + 1;
        in.sigmas.push_back(epi(n, m));
      }
      return in;
    }
  }

  /// Family-mash instances: |L| <= every piece, pieces increasing with
  /// optional overlap of one point and optional holes.
  FinMashInstance mash() {
    for (;;) {
      FinMashInstance in;
      in.l_size = uniform(1, 3);
      const std::size_t count = uniform(1, p_.max_pieces);
      std::size_t k = 0;
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t lo = k;
        if (i > 0) {
          const std::size_t r = uniform(0, 2);
          lo = r == 0 ? k - 1 : r == 1 ? k : k + 1;
        }
        const std::size_t hi = lo + in.l_size - 1 + uniform(0, 1);
        in.k_pieces.push_back({lo, hi});
        k = hi + 1;
      }
      in.k_size = k;
      if (in.k_size > p_.max_total) continue;
      for (const auto& [lo, hi] : in.k_pieces) in.sigmas.push_back(epi(hi - lo + 1, in.l_size));
      return in;
    }
  }

  /// Valid inputs of quotient_epi_fin.
  FinQuotientInstance quotient() {
    const std::size_t a = uniform(1, 3);
    const std::size_t nk = uniform(1, 4);
    const std::size_t nj = uniform(1, nk);
    FinQuotientInstance in{chain(a), chain(nk), chain(nj), {}};
    in.phi = epi(a * nk, a * nj);
    return in;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  FuzzParams p_;
};

}  // namespace linord
