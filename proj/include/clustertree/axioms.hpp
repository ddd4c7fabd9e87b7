#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clustertree/errors.hpp"
#include "clustertree/level_tree.hpp"
#include "clustertree/regions.hpp"

namespace clustertree {

namespace detail {

template <class Level>
std::vector<std::size_t> cluster_indices(const Cluster& cluster,
                                         const RegionComplex<Level>& complex) {
  if (cluster.empty()) throw PreconditionError("empty cluster");
  std::vector<std::size_t> idx;
  idx.reserve(cluster.size());
  for (RegionId id : cluster) idx.push_back(complex.index_of(id));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace detail

/// A1: the cluster is a chain-connected union of neighboring regions.
template <class Level>
bool check_a1(const Cluster& cluster, const RegionComplex<Level>& complex) {
  auto idx = detail::cluster_indices(cluster, complex);
  std::vector<bool> member(complex.size(), false);
  for (auto i : idx) member[i] = true;
  auto [label, count] = connected_components(complex.adjacency(Adjacency::neighbor), member);
  return count == 1;
}

/// A2 for clusters given as region ids holds by construction.
template <class Level>
bool check_a2(const Cluster& cluster, const RegionComplex<Level>& complex) {
  detail::cluster_indices(cluster, complex);
  return true;
}

/// Cluster given as a union of boxes rather than region ids.
struct GeometricCluster {
  std::vector<Box> boxes;
};

struct A2Verdict {
  bool ok = true;
  std::optional<RegionId> witness;  // a region met but not covered
  Cluster regions;                  // regions met with positive measure

  explicit operator bool() const { return ok; }
};

/// A2 for geometric clusters: every region the cluster meets (with positive
/// volume) must be covered entirely.
template <class Level>
A2Verdict check_a2(const GeometricCluster& cluster, const RegionComplex<Level>& complex) {
  const ShiftedGrid& grid = complex.grid();
  const int d = grid.dim();
  for (const Box& b : cluster.boxes)
    if (b.lo.size() != std::size_t(d) || b.hi.size() != std::size_t(d))
      throw PreconditionError("cluster box dimension does not match the complex");

  auto inside = [&](const std::vector<double>& p) {
    for (const Box& b : cluster.boxes) {
      bool in = true;
      for (int i = 0; i < d && in; ++i) in = b.lo[i] <= p[i] && p[i] < b.hi[i];
      if (in) return true;
    }
    return false;
  };

  A2Verdict verdict;
  for (const auto& region : complex.regions()) {
    bool met = false, covered = true;
    for (const CellId& cell : region.cells) {
      Box cb = grid.cell_box(cell);
      // Split the cell along every cluster box face that crosses it; each
      // piece is then either inside the cluster or outside it.
      std::vector<std::vector<double>> cuts(d);
      for (int i = 0; i < d; ++i) {
        cuts[i] = {cb.lo[i], cb.hi[i]};
        for (const Box& b : cluster.boxes)
          for (double x : {b.lo[i], b.hi[i]})
            if (cb.lo[i] < x && x < cb.hi[i]) cuts[i].push_back(x);
        std::sort(cuts[i].begin(), cuts[i].end());
        cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
      }
      std::vector<std::size_t> at(d, 0);
      std::vector<double> mid(d);
      while (true) {
        for (int i = 0; i < d; ++i) mid[i] = 0.5 * (cuts[i][at[i]] + cuts[i][at[i] + 1]);
        if (inside(mid)) met = true; else covered = false;
        int i = 0;
        while (i < d && ++at[i] + 1 >= cuts[i].size()) at[i++] = 0;
        if (i == d) break;
      }
    }
    if (!met) continue;
    verdict.regions.push_back(region.id);
    if (!covered && verdict.ok) {
      verdict.ok = false;
      verdict.witness = region.id;
    }
  }
  return verdict;
}

template <class Level>
struct A3Verdict {
  bool ok = false;
  bool tie = false;                // inside minimum equals outside maximum
  Level inside_min{};
  std::optional<Level> outside_max;  // empty when no outside neighbor exists
  std::optional<RegionId> witness;   // densest outside neighbor

  explicit operator bool() const { return ok; }
};

/// A3: the minimum level inside the cluster strictly exceeds every level on
/// neighboring regions outside it. Vacuously true without outside neighbors.
template <class Level>
A3Verdict<Level> check_a3(const Cluster& cluster, const RegionComplex<Level>& complex) {
  auto idx = detail::cluster_indices(cluster, complex);
  std::vector<bool> member(complex.size(), false);
  for (auto i : idx) member[i] = true;
  A3Verdict<Level> v;
  v.inside_min = complex.level(idx.front());
  for (auto i : idx) v.inside_min = std::min(v.inside_min, complex.level(i));
  const auto& adj = complex.adjacency(Adjacency::neighbor);
  for (auto i : idx)
    for (auto j : adj[i]) {
      if (member[j]) continue;
      if (!v.outside_max || *v.outside_max < complex.level(j)) {
        v.outside_max = complex.level(j);
        v.witness = complex.id(j);
      }
    }
  v.ok = !v.outside_max || *v.outside_max < v.inside_min;
  v.tie = v.outside_max && *v.outside_max == v.inside_min;
  return v;
}

/// True iff any two clusters are disjoint or nested.
inline bool is_cluster_tree(const ClusterSet& set) {
  std::vector<Cluster> s;
  for (const auto& c : set) s.push_back(normalized(c));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (intersects(s[i], s[j]) && !is_subset(s[i], s[j]) && !is_subset(s[j], s[i]))
        return false;
  return true;
}

/// True iff every cluster of `coarse` is also a cluster of `fine`.
inline bool is_finer(const ClusterSet& fine, const ClusterSet& coarse) {
  std::set<Cluster> have;
  for (const auto& c : fine) have.insert(normalized(c));
  return std::all_of(coarse.begin(), coarse.end(),
                     [&](const Cluster& c) { return have.count(normalized(c)) > 0; });
}

inline constexpr std::size_t kMaxEnumerationRegions = 20;

/// Every nonempty region subset satisfying A1 and A3 (A2 holds for id sets),
/// by exhaustive enumeration. Output is sorted by size, then lexicographically.
template <class Level>
ClusterSet enumerate_axiom_clusters(const RegionComplex<Level>& complex) {
  const std::size_t m = complex.size();
  if (m > kMaxEnumerationRegions)
    throw PreconditionError("enumeration is capped at " +
                            std::to_string(kMaxEnumerationRegions) + " regions");
  const auto& adj = complex.adjacency(Adjacency::neighbor);
  std::vector<std::uint32_t> nbr(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : adj[i]) nbr[i] |= std::uint32_t{1} << j;

  ClusterSet out;
  const std::uint32_t full = m == 32 ? ~0u : ((std::uint32_t{1} << m) - 1);
  for (std::uint32_t s = 1; s != 0 && s <= full; ++s) {
    // A1: flood fill inside the subset.
    std::uint32_t seen = s & (~s + 1), frontier = seen;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (frontier >> i & 1u) next |= nbr[i];
      next &= s & ~seen;
      seen |= next;
      frontier = next;
    }
    if (seen != s) continue;
    // A3.
    std::uint32_t outside = 0;
    std::optional<Level> lo;
    for (std::size_t i = 0; i < m; ++i)
      if (s >> i & 1u) {
        outside |= nbr[i];
        if (!lo || complex.level(i) < *lo) lo = complex.level(i);
      }
    outside &= ~s;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i)
      if ((outside >> i & 1u) && !(complex.level(i) < *lo)) ok = false;
    if (!ok) continue;
    Cluster c;
    for (std::size_t i = 0; i < m; ++i)
      if (s >> i & 1u) c.push_back(complex.id(i));
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  if (!is_cluster_tree(out))
    throw InvariantError("axiom clusters are not nested");
  return out;
}

}  // namespace clustertree
