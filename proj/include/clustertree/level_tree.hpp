#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clustertree/errors.hpp"
#include "clustertree/regions.hpp"
#include "clustertree/union_find.hpp"

namespace clustertree {

/// Sorted list of region ids.
using Cluster = std::vector<RegionId>;

/// Arbitrary candidate collection of clusters.
using ClusterSet = std::vector<Cluster>;

inline Cluster normalized(Cluster c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

inline bool is_subset(const Cluster& a, const Cluster& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool intersects(const Cluster& a, const Cluster& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

template <class Level>
struct DendrogramNode {
  Cluster cluster;
  Level height;
  std::optional<std::size_t> parent;

  friend bool operator==(const DendrogramNode&, const DendrogramNode&) = default;
};

/// Cluster tree over a set of regions (the domain) with a height per cluster.
/// Several roots are allowed; a single-root dendrogram is a tree.
template <class Level = Rational>
class Dendrogram {
 public:
  Dendrogram() = default;

  Dendrogram(std::vector<RegionId> domain, std::vector<DendrogramNode<Level>> nodes)
      : domain_(normalized(std::move(domain))), nodes_(std::move(nodes)) {
    for (auto& n : nodes_) n.cluster = normalized(std::move(n.cluster));
    std::string why;
    if (!valid(&why)) throw PreconditionError("invalid dendrogram: " + why);
  }

  const std::vector<RegionId>& domain() const { return domain_; }
  const std::vector<DendrogramNode<Level>>& nodes() const { return nodes_; }
  const DendrogramNode<Level>& node(std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  std::vector<std::size_t> roots() const {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!nodes_[i].parent) r.push_back(i);
    return r;
  }

  std::vector<std::size_t> children(std::size_t i) const {
    std::vector<std::size_t> c;
    for (std::size_t k = 0; k < nodes_.size(); ++k)
      if (nodes_[k].parent == i) c.push_back(k);
    return c;
  }

  std::set<Cluster> cluster_set() const {
    std::set<Cluster> s;
    for (const auto& n : nodes_) s.insert(n.cluster);
    return s;
  }

  ClusterSet clusters() const {
    ClusterSet out;
    for (const auto& n : nodes_) out.push_back(n.cluster);
    return out;
  }

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;

  /// Checks nesting, parent links and height monotonicity. Siblings (and
  /// roots) must be disjoint strict subsets of their parent; together with
  /// monotone heights along parent links this makes the node set a laminar
  /// family whose parents are smallest supersets.
  bool valid(std::string* why = nullptr) const {
    auto fail = [&](std::string msg) {
      if (why) *why = std::move(msg);
      return false;
    };
    const std::size_t n = nodes_.size();
    std::vector<std::vector<std::size_t>> kids(n + 1);  // slot n: roots
    for (std::size_t i = 0; i < n; ++i) {
      const auto& node = nodes_[i];
      if (node.cluster.empty()) return fail("empty cluster at node " + std::to_string(i));
      if (!is_subset(node.cluster, domain_))
        return fail("node " + std::to_string(i) + " references regions outside the domain");
      if (node.parent) {
        if (*node.parent >= n || *node.parent == i)
          return fail("bad parent index at node " + std::to_string(i));
        const auto& p = nodes_[*node.parent];
        if (!is_subset(node.cluster, p.cluster) || p.cluster.size() == node.cluster.size())
          return fail("node " + std::to_string(i) + " is not a strict subset of its parent");
        if (node.height < p.height)
          return fail("height decreases from parent to node " + std::to_string(i));
      }
      kids[node.parent.value_or(n)].push_back(i);
    }
    for (const auto& group : kids) {
      std::vector<RegionId> seen;
      for (std::size_t k : group)
        seen.insert(seen.end(), nodes_[k].cluster.begin(), nodes_[k].cluster.end());
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        return fail("sibling clusters overlap");
    }
    // Parent links must not form a cycle.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t steps = 0;
      for (auto p = nodes_[i].parent; p; p = nodes_[*p].parent)
        if (++steps > n) return fail("parent links form a cycle");
    }
    return true;
  }

 private:
  std::vector<RegionId> domain_;
  std::vector<DendrogramNode<Level>> nodes_;
};

/// Builds a dendrogram from a laminar cluster family with heights given by
/// the minimum level over each cluster. Parents are the smallest supersets.
template <class Level>
Dendrogram<Level> dendrogram_from_clusters(const RegionComplex<Level>& complex,
                                           ClusterSet clusters) {
  for (auto& c : clusters) {
    c = normalized(std::move(c));
    if (c.empty()) throw PreconditionError("empty cluster");
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  clusters.erase(std::unique(clusters.begin(), clusters.end()), clusters.end());
  std::vector<DendrogramNode<Level>> nodes;
  for (const auto& c : clusters) {
    Level h = complex.level(complex.index_of(c.front()));
    for (RegionId id : c) h = std::min(h, complex.level(complex.index_of(id)));
    nodes.push_back({c, h, std::nullopt});
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (is_subset(nodes[i].cluster, nodes[j].cluster)) {
        nodes[i].parent = j;
        break;
      }
  return Dendrogram<Level>(complex.ids(), std::move(nodes));
}

/// One dendrogram per connected component of the adjacency graph.
template <class Level = Rational>
struct Forest {
  std::vector<Dendrogram<Level>> trees;
  std::map<RegionId, std::size_t> component_of;

  /// All trees as one multi-root dendrogram over the union of domains.
  Dendrogram<Level> combined() const {
    std::vector<RegionId> domain;
    std::vector<DendrogramNode<Level>> nodes;
    for (const auto& t : trees) {
      std::size_t offset = nodes.size();
      domain.insert(domain.end(), t.domain().begin(), t.domain().end());
      for (auto n : t.nodes()) {
        if (n.parent) *n.parent += offset;
        nodes.push_back(std::move(n));
      }
    }
    return Dendrogram<Level>(std::move(domain), std::move(nodes));
  }
};

namespace detail {

// Descending level sweep with union-find. Every batch of equal levels
// activates its regions, merges them with active adjacent regions and emits
// one node per component that received a new region.
template <class Level>
Dendrogram<Level> sweep_all(const RegionComplex<Level>& complex, Adjacency adjacency) {
  const std::size_t m = complex.size();
  const auto& adj = complex.adjacency(adjacency);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return complex.level(b) < complex.level(a);
  });

  DisjointSets sets(m);
  std::vector<bool> active(m, false);
  // Most recent node emitted for each union-find root.
  std::vector<std::optional<std::size_t>> top(m);
  std::vector<DendrogramNode<Level>> nodes;

  std::size_t pos = 0;
  while (pos < m) {
    const Level lambda = complex.level(order[pos]);
    std::size_t end = pos;
    while (end < m && !(complex.level(order[end]) < lambda)) ++end;

    std::vector<std::size_t> absorbed;  // nodes whose component grew this batch
    for (std::size_t k = pos; k < end; ++k) active[order[k]] = true;
    for (std::size_t k = pos; k < end; ++k) {
      std::size_t v = order[k];
      for (std::size_t w : adj[v]) {
        if (!active[w]) continue;
        std::size_t rv = sets.find(v), rw = sets.find(w);
        if (rv == rw) continue;
        for (std::size_t r : {rv, rw})
          if (top[r]) {
            absorbed.push_back(*top[r]);
            top[r].reset();
          }
        sets.unite(rv, rw);
      }
    }

    std::map<std::size_t, Cluster> touched;
    for (std::size_t k = pos; k < end; ++k)
      touched[sets.find(order[k])].push_back(complex.id(order[k]));
    for (std::size_t p : absorbed) {
      const Cluster& c = nodes[p].cluster;
      auto& dst = touched[sets.find(complex.index_of(c.front()))];
      dst.insert(dst.end(), c.begin(), c.end());
    }
    std::vector<std::pair<std::size_t, Cluster>> fresh;
    for (auto& [root, cluster] : touched) {
      std::sort(cluster.begin(), cluster.end());
      fresh.emplace_back(root, std::move(cluster));
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const auto& a, const auto& b) { return a.second.front() < b.second.front(); });
    for (auto& [root, cluster] : fresh) {
      top[root] = nodes.size();
      nodes.push_back({std::move(cluster), lambda, std::nullopt});
    }
    for (std::size_t p : absorbed)
      nodes[p].parent = *top[sets.find(complex.index_of(nodes[p].cluster.front()))];
    pos = end;
  }
  return Dendrogram<Level>(complex.ids(), std::move(nodes));
}

}  // namespace detail

/// Level-sweep cluster tree. Touch adjacency gives the Hartigan tree;
/// neighbor adjacency gives the finest tree satisfying the cluster axioms.
/// Requires the adjacency graph to be connected (see sweep_forest).
template <class Level>
Dendrogram<Level> sweep_tree(const RegionComplex<Level>& complex, Adjacency adjacency) {
  if (complex.empty()) throw PreconditionError("empty complex");
  auto [label, count] = connected_components(complex.adjacency(adjacency));
  if (count != 1)
    throw PreconditionError("support is disconnected under " +
                            std::string(to_string(adjacency)) + " adjacency (" +
                            std::to_string(count) + " components); use sweep_forest");
  return detail::sweep_all(complex, adjacency);
}

template <class Level>
Dendrogram<Level> hartigan_tree(const RegionComplex<Level>& complex) {
  return sweep_tree(complex, Adjacency::touch);
}

/// Finest axiom cluster tree. Requires the complex to be in F.
template <class Level>
Dendrogram<Level> axiom_tree(const RegionComplex<Level>& complex) {
  ClassReport report = classify(complex);
  if (!report.in_F) throw PreconditionError("complex is not in F: " + report.witness);
  return detail::sweep_all(complex, Adjacency::neighbor);
}

/// One sweep tree per connected component of the adjacency graph. Trees are
/// ordered by their smallest region id.
template <class Level>
Forest<Level> sweep_forest(const RegionComplex<Level>& complex, Adjacency adjacency) {
  if (complex.empty()) throw PreconditionError("empty complex");
  Dendrogram<Level> all = detail::sweep_all(complex, adjacency);
  auto roots = all.roots();
  std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
    return all.node(a).cluster.front() < all.node(b).cluster.front();
  });
  Forest<Level> forest;
  for (std::size_t t = 0; t < roots.size(); ++t) {
    const Cluster& members = all.node(roots[t]).cluster;
    for (RegionId id : members) forest.component_of[id] = t;
    std::vector<std::size_t> remap(all.size(), all.size());
    std::vector<DendrogramNode<Level>> nodes;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (is_subset(all.node(i).cluster, members)) {
        remap[i] = nodes.size();
        nodes.push_back(all.node(i));
      }
    for (auto& n : nodes)
      if (n.parent) n.parent = remap[*n.parent];
    forest.trees.emplace_back(members, std::move(nodes));
  }
  return forest;
}

}  // namespace clustertree
