#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clustertree/errors.hpp"
#include "clustertree/level_tree.hpp"
#include "clustertree/regions.hpp"

namespace clustertree {

/// Merge heights for every pair of domain regions. Entry (i, j) is the height
/// of the smallest cluster containing both, or zero when no cluster does.
template <class Level>
class MergeHeightTable {
 public:
  MergeHeightTable() = default;
  MergeHeightTable(std::vector<RegionId> ids, std::vector<Level> values)
      : ids_(std::move(ids)), values_(std::move(values)) {}

  const std::vector<RegionId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }

  const Level& at(std::size_t i, std::size_t j) const { return values_[i * ids_.size() + j]; }

  std::size_t index_of(RegionId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id)
      throw PreconditionError("unknown region id " + std::to_string(id));
    return std::size_t(it - ids_.begin());
  }

  const Level& value(RegionId a, RegionId b) const { return at(index_of(a), index_of(b)); }

 private:
  std::vector<RegionId> ids_;
  std::vector<Level> values_;
};

namespace detail {

// Deepest node containing each domain region, plus node depths, for
// lowest-common-ancestor queries.
template <class Level>
struct LcaIndex {
  std::vector<std::optional<std::size_t>> deepest;  // by domain position
  std::vector<std::size_t> depth;                   // by node

  explicit LcaIndex(const Dendrogram<Level>& tree) : deepest(tree.domain().size()) {
    const auto& dom = tree.domain();
    const std::size_t n = tree.size();
    depth.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (auto p = tree.node(i).parent; p; p = tree.node(*p).parent) ++depth[i];
    for (std::size_t i = 0; i < n; ++i)
      for (RegionId id : tree.node(i).cluster) {
        std::size_t r = std::size_t(std::lower_bound(dom.begin(), dom.end(), id) - dom.begin());
        if (!deepest[r] || depth[*deepest[r]] < depth[i]) deepest[r] = i;
      }
  }

  std::optional<std::size_t> lca(const Dendrogram<Level>& tree, std::size_t ra,
                                 std::size_t rb) const {
    auto a = deepest[ra], b = deepest[rb];
    if (!a || !b) return std::nullopt;
    std::size_t x = *a, y = *b;
    while (depth[x] > depth[y]) x = *tree.node(x).parent;
    while (depth[y] > depth[x]) y = *tree.node(y).parent;
    while (x != y) {
      auto px = tree.node(x).parent, py = tree.node(y).parent;
      if (!px || !py) return std::nullopt;
      x = *px;
      y = *py;
    }
    return x;
  }
};

inline std::size_t domain_index(const std::vector<RegionId>& dom, RegionId id) {
  auto it = std::lower_bound(dom.begin(), dom.end(), id);
  if (it == dom.end() || *it != id)
    throw PreconditionError("unknown region id " + std::to_string(id));
  return std::size_t(it - dom.begin());
}

}  // namespace detail

/// Merge height of two regions: height of their lowest common ancestor.
/// Regions in different trees of a forest merge at height zero.
template <class Level>
Level merge_height(const Dendrogram<Level>& tree, RegionId a, RegionId b) {
  detail::LcaIndex<Level> index(tree);
  auto node = index.lca(tree, detail::domain_index(tree.domain(), a),
                        detail::domain_index(tree.domain(), b));
  return node ? tree.node(*node).height : Level(0);
}

template <class Level>
MergeHeightTable<Level> merge_height_table(const Dendrogram<Level>& tree) {
  detail::LcaIndex<Level> index(tree);
  const std::size_t n = tree.domain().size();
  std::vector<Level> values(n * n, Level(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      auto node = index.lca(tree, i, j);
      if (!node) continue;
      values[i * n + j] = tree.node(*node).height;
      values[j * n + i] = tree.node(*node).height;
    }
  return MergeHeightTable<Level>(tree.domain(), std::move(values));
}

/// Largest achievable minimum level over adjacency paths from `a` to `b`
/// (zero when no path exists). Widest-path search, independent of any tree.
template <class Level>
Level merge_height_maximin(const RegionComplex<Level>& complex, Adjacency adjacency,
                           RegionId a, RegionId b) {
  const std::size_t src = complex.index_of(a), dst = complex.index_of(b);
  const auto& adj = complex.adjacency(adjacency);
  std::vector<std::optional<Level>> best(complex.size());
  std::vector<bool> done(complex.size(), false);
  best[src] = complex.level(src);
  while (true) {
    std::optional<std::size_t> u;
    for (std::size_t i = 0; i < complex.size(); ++i)
      if (!done[i] && best[i] && (!u || *best[*u] < *best[i])) u = i;
    if (!u) break;
    if (*u == dst) return *best[dst];
    done[*u] = true;
    for (std::size_t w : adj[*u]) {
      Level through = std::min(*best[*u], complex.level(w));
      if (!done[w] && (!best[w] || *best[w] < through)) best[w] = through;
    }
  }
  return Level(0);
}

/// All-pairs maximin table via Floyd-Warshall closure.
template <class Level>
MergeHeightTable<Level> maximin_table(const RegionComplex<Level>& complex, Adjacency adjacency) {
  const std::size_t n = complex.size();
  std::vector<Level> w(n * n, Level(0));
  for (std::size_t i = 0; i < n; ++i) {
    w[i * n + i] = complex.level(i);
    for (std::size_t j : complex.adjacency(adjacency)[i])
      w[i * n + j] = std::min(complex.level(i), complex.level(j));
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Level via = std::min(w[i * n + k], w[k * n + j]);
        if (w[i * n + j] < via) w[i * n + j] = via;
      }
  return MergeHeightTable<Level>(complex.ids(), std::move(w));
}

template <class Level>
struct Distortion {
  Level value{};
  std::optional<Edge> witness;  // region pair attaining the maximum
  bool exact = true;
};

/// Merge distortion over region pairs. Both trees must share a domain; merge
/// heights are constant on each region, so the maximum over region pairs is
/// the supremum over point pairs.
template <class Level>
Distortion<Level> merge_distortion(const Dendrogram<Level>& a, const Dendrogram<Level>& b) {
  if (a.domain() != b.domain())
    throw PreconditionError("regions-mode merge distortion needs trees over the same regions");
  auto ta = merge_height_table(a);
  auto tb = merge_height_table(b);
  Distortion<Level> d;
  d.value = Level(0);
  const auto& ids = a.domain();
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i; j < ids.size(); ++j) {
      Level diff = abs_diff(ta.at(i, j), tb.at(i, j));
      if (!d.witness || d.value < diff) {
        d.value = diff;
        d.witness = Edge{ids[i], ids[j]};
      }
    }
  return d;
}

using Point = std::vector<double>;

struct PointPair {
  Point x;
  Point y;
};

/// Sampled merge distortion: a lower bound on the supremum.
struct SampledDistortion {
  double value = 0.0;
  std::optional<std::size_t> witness;  // index into the pair list
  bool exact = false;
};

/// Merge height between two points for a tree over a geometric complex.
/// Points where the density vanishes merge at height zero.
template <class Level>
class PointMergeHeights {
 public:
  PointMergeHeights(const Dendrogram<Level>& tree, const RegionComplex<Level>& complex)
      : complex_(&complex), table_(merge_height_table(tree)) {
    if (!complex.has_geometry())
      throw PreconditionError("points-mode merge heights need a complex with geometry");
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    auto rx = complex_->region_at(x);
    auto ry = complex_->region_at(y);
    if (!rx || !ry) return 0.0;
    const auto& ids = table_.ids();
    if (!std::binary_search(ids.begin(), ids.end(), *rx) ||
        !std::binary_search(ids.begin(), ids.end(), *ry))
      return 0.0;
    return to_double(table_.value(*rx, *ry));
  }

 private:
  const RegionComplex<Level>* complex_;
  MergeHeightTable<Level> table_;
};

/// Maximum of |m1(x, y) - m2(x, y)| over the supplied pairs.
template <class M1, class M2>
SampledDistortion sampled_distortion(std::span<const PointPair> pairs, const M1& m1,
                                     const M2& m2) {
  SampledDistortion d;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double diff = std::abs(m1(pairs[k].x, pairs[k].y) - m2(pairs[k].x, pairs[k].y));
    if (!d.witness || diff > d.value) {
      d.value = diff;
      d.witness = k;
    }
  }
  return d;
}

template <class L1, class L2>
SampledDistortion merge_distortion(const Dendrogram<L1>& a, const RegionComplex<L1>& ca,
                                   const Dendrogram<L2>& b, const RegionComplex<L2>& cb,
                                   std::span<const PointPair> pairs) {
  return sampled_distortion(pairs, PointMergeHeights<L1>(a, ca), PointMergeHeights<L2>(b, cb));
}

/// Exact sup-norm distance between two piecewise-constant densities.
/// Abstract complexes must have the same region ids; geometric complexes must
/// live on the same grid and are compared cell by cell.
template <class Level>
Level sup_norm_distance(const RegionComplex<Level>& f, const RegionComplex<Level>& g) {
  Level best(0);
  if (!f.has_geometry() && !g.has_geometry()) {
    if (f.ids() != g.ids())
      throw PreconditionError("abstract complexes must share their region ids");
    for (std::size_t i = 0; i < f.size(); ++i)
      best = std::max(best, abs_diff(f.level(i), g.level(i)));
    return best;
  }
  if (!f.has_geometry() || !g.has_geometry())
    throw PreconditionError("cannot compare an abstract complex with a geometric one");
  if (f.grid().dim() != g.grid().dim() || f.grid().scale() != g.grid().scale())
    throw PreconditionError("geometric complexes must share their grid");
  std::map<CellId, std::pair<Level, Level>> cells;
  for (const auto& r : f.regions())
    for (const auto& c : r.cells) cells[c].first = r.level;
  for (const auto& r : g.regions())
    for (const auto& c : r.cells) cells[c].second = r.level;
  for (const auto& [cell, lv] : cells) best = std::max(best, abs_diff(lv.first, lv.second));
  return best;
}

/// Order isomorphism of the two cluster posets (heights ignored).
template <class Level>
bool is_isomorphic(const Dendrogram<Level>& a, const Dendrogram<Level>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::vector<int>, int> interned;
  auto canon = [&](const Dendrogram<Level>& t) {
    std::vector<std::vector<std::size_t>> kids(t.size());
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (auto p = t.node(i).parent) kids[*p].push_back(i);
      else roots.push_back(i);
    }
    // Children always have smaller clusters, so sorting by size gives a
    // bottom-up order.
    std::vector<std::size_t> order(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return t.node(x).cluster.size() < t.node(y).cluster.size();
    });
    std::vector<int> code(t.size(), -1);
    for (std::size_t v : order) {
      std::vector<int> key;
      for (std::size_t c : kids[v]) key.push_back(code[c]);
      std::sort(key.begin(), key.end());
      code[v] = interned.emplace(key, int(interned.size())).first->second;
    }
    std::vector<int> forest;
    for (std::size_t r : roots) forest.push_back(code[r]);
    std::sort(forest.begin(), forest.end());
    return forest;
  };
  return canon(a) == canon(b);
}

}  // namespace clustertree
