#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clustertree/errors.hpp"
#include "clustertree/level.hpp"
#include "clustertree/shifted_grid.hpp"

namespace clustertree {

using RegionId = std::int64_t;

/// Unordered region pair, stored with first < second.
using Edge = std::pair<RegionId, RegionId>;

inline Edge make_edge(RegionId a, RegionId b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

/// Which adjacency relation a sweep or axiom check uses.
///  touch:    closures of the two regions have connected union
///  neighbor: interior of the union of closures is connected
enum class Adjacency { touch, neighbor };

inline std::string_view to_string(Adjacency a) {
  return a == Adjacency::touch ? "touch" : "neighbor";
}

inline Adjacency parse_adjacency(std::string_view s) {
  if (s == "touch") return Adjacency::touch;
  if (s == "neighbor") return Adjacency::neighbor;
  throw SchemaError("unknown adjacency '" + std::string(s) + "'");
}

template <class Level>
struct Region {
  RegionId id;
  Level level;
  std::vector<CellId> cells;  // empty for abstract complexes
};

template <class Level>
struct CellLevel {
  CellId cell;
  Level level;
  std::optional<RegionId> id;  // defaults to position + 1
};

/// Connected components of the subgraph induced by `active` (all vertices when
/// empty). Returns a label per vertex (-1 for inactive) and the label count.
inline std::pair<std::vector<int>, int> connected_components(
    const std::vector<std::vector<std::size_t>>& adj,
    const std::vector<bool>& active = {}) {
  const std::size_t n = adj.size();
  std::vector<int> label(n, -1);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0 || (!active.empty() && !active[s])) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[v]) {
        if (label[w] >= 0 || (!active.empty() && !active[w])) continue;
        label[w] = count;
        stack.push_back(w);
      }
    }
    ++count;
  }
  return {std::move(label), count};
}

/// Piecewise-constant density sum_i level_i * 1{A_i} over disjoint regions,
/// together with the touch and neighbor relations between regions.
///
/// Regions are kept sorted by id. Immutable once built.
template <class Level = Rational>
class RegionComplex {
 public:
  using level_type = Level;

  RegionComplex() = default;

  /// Complex without geometry. The caller asserts the topology through the
  /// two edge sets; neighbor edges must also be touch edges.
  static RegionComplex abstract(std::vector<std::pair<RegionId, Level>> regions,
                                std::vector<Edge> touch,
                                std::vector<Edge> neighbor) {
    RegionComplex c;
    for (auto& [id, level] : regions) c.regions_.push_back({id, std::move(level), {}});
    c.init_regions();
    c.touch_ = c.adjacency_from(touch);
    c.neighbor_ = c.adjacency_from(neighbor);
    c.check_neighbor_subset();
    return c;
  }

  /// One region per shifted-grid cell; both relations come from the grid.
  static RegionComplex from_cells(std::vector<CellLevel<Level>> cells,
                                  ShiftedGrid grid) {
    RegionComplex c;
    c.grid_ = grid;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!grid.is_anchor(cells[i].cell))
        throw PreconditionError("cell " + std::to_string(i) +
                                " is not a lattice anchor");
      RegionId id = cells[i].id.value_or(RegionId(i) + 1);
      c.regions_.push_back({id, std::move(cells[i].level), {cells[i].cell}});
    }
    c.init_regions();
    for (std::size_t i = 0; i < c.regions_.size(); ++i) {
      auto [it, fresh] = c.cell_owner_.emplace(c.regions_[i].cells.front(), i);
      if (!fresh) throw PreconditionError("duplicate cell in complex");
    }
    c.touch_.assign(c.size(), {});
    c.neighbor_.assign(c.size(), {});
    for (std::size_t i = 0; i < c.size(); ++i) {
      const CellId& cell = c.regions_[i].cells.front();
      for (const CellId& other : grid.cell_touching(cell)) {
        auto it = c.cell_owner_.find(other);
        if (it == c.cell_owner_.end()) continue;
        c.touch_[i].push_back(it->second);
        if (grid.shares_facet(cell, other)) c.neighbor_[i].push_back(it->second);
      }
      std::sort(c.touch_[i].begin(), c.touch_[i].end());
      std::sort(c.neighbor_[i].begin(), c.neighbor_[i].end());
    }
    c.check_neighbor_subset();
    return c;
  }

  std::size_t size() const { return regions_.size(); }
  bool empty() const { return regions_.empty(); }
  const std::vector<Region<Level>>& regions() const { return regions_; }
  const Region<Level>& region(std::size_t idx) const { return regions_[idx]; }
  const Level& level(std::size_t idx) const { return regions_[idx].level; }
  RegionId id(std::size_t idx) const { return regions_[idx].id; }

  std::vector<RegionId> ids() const {
    std::vector<RegionId> out;
    out.reserve(size());
    for (const auto& r : regions_) out.push_back(r.id);
    return out;
  }

  std::optional<std::size_t> find(RegionId id) const {
    auto it = std::lower_bound(regions_.begin(), regions_.end(), id,
                               [](const Region<Level>& r, RegionId v) { return r.id < v; });
    if (it == regions_.end() || it->id != id) return std::nullopt;
    return std::size_t(it - regions_.begin());
  }

  std::size_t index_of(RegionId id) const {
    auto idx = find(id);
    if (!idx) throw PreconditionError("unknown region id " + std::to_string(id));
    return *idx;
  }

  const std::vector<std::vector<std::size_t>>& adjacency(Adjacency a) const {
    return a == Adjacency::touch ? touch_ : neighbor_;
  }

  bool adjacent(Adjacency a, std::size_t i, std::size_t j) const {
    const auto& row = adjacency(a)[i];
    return std::binary_search(row.begin(), row.end(), j);
  }

  std::vector<Edge> edges(Adjacency a) const {
    std::vector<Edge> out;
    const auto& adj = adjacency(a);
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (std::size_t j : adj[i])
        if (i < j) out.push_back({id(i), id(j)});
    return out;
  }

  bool has_geometry() const { return grid_.has_value(); }

  const ShiftedGrid& grid() const {
    if (!grid_) throw PreconditionError("complex has no geometry");
    return *grid_;
  }

  /// Region containing `point`, or nullopt where the density vanishes.
  std::optional<RegionId> region_at(std::span<const double> point) const {
    const ShiftedGrid& g = grid();
    auto it = cell_owner_.find(g.cell_of(point));
    if (it == cell_owner_.end()) return std::nullopt;
    return regions_[it->second].id;
  }

  std::optional<std::size_t> index_at(std::span<const double> point) const {
    const ShiftedGrid& g = grid();
    auto it = cell_owner_.find(g.cell_of(point));
    if (it == cell_owner_.end()) return std::nullopt;
    return it->second;
  }

  /// Same regions and relations with new levels, in index order.
  RegionComplex with_levels(std::vector<Level> levels) const {
    if (levels.size() != size())
      throw PreconditionError("level count does not match region count");
    RegionComplex c = *this;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(levels[i] > Level(0)))
        throw PreconditionError("region levels must be strictly positive");
      c.regions_[i].level = std::move(levels[i]);
    }
    return c;
  }

 private:
  void init_regions() {
    std::sort(regions_.begin(), regions_.end(),
              [](const Region<Level>& a, const Region<Level>& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      if (i > 0 && regions_[i].id == regions_[i - 1].id)
        throw PreconditionError("duplicate region id " + std::to_string(regions_[i].id));
      if (!(regions_[i].level > Level(0)))
        throw PreconditionError("region " + std::to_string(regions_[i].id) +
                                " has a nonpositive level");
    }
  }

  std::vector<std::vector<std::size_t>> adjacency_from(const std::vector<Edge>& edges) const {
    std::vector<std::vector<std::size_t>> adj(size());
    for (auto [a, b] : edges) {
      if (a == b)
        throw PreconditionError("self edge on region " + std::to_string(a));
      std::size_t i = index_of(a), j = index_of(b);
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
  }

  void check_neighbor_subset() const {
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j : neighbor_[i])
        if (!adjacent(Adjacency::touch, i, j))
          throw PreconditionError("neighbor edge (" + std::to_string(id(i)) + "," +
                                  std::to_string(id(j)) + ") is not a touch edge");
  }

  std::vector<Region<Level>> regions_;
  std::vector<std::vector<std::size_t>> touch_;
  std::vector<std::vector<std::size_t>> neighbor_;
  std::optional<ShiftedGrid> grid_;
  std::unordered_map<CellId, std::size_t, CellIdHash> cell_owner_;
};

/// Membership in the piecewise-constant classes F and F_int.
struct ClassReport {
  bool in_F = false;
  bool in_F_int = false;
  std::string witness;
  std::optional<Edge> witness_pair;
};

/// F: the neighbor graph is connected (certifies a support with connected
/// interior). F_int: additionally every touching pair is a neighboring pair.
template <class Level>
ClassReport classify(const RegionComplex<Level>& complex) {
  ClassReport r;
  if (complex.empty()) {
    r.witness = "empty support";
    return r;
  }
  auto [label, count] = connected_components(complex.adjacency(Adjacency::neighbor));
  if (count != 1) {
    r.witness = "neighbor graph has " + std::to_string(count) + " components";
    for (std::size_t i = 0; i < complex.size(); ++i)
      if (label[i] != label[0]) {
        r.witness_pair = make_edge(complex.id(0), complex.id(i));
        break;
      }
    return r;
  }
  r.in_F = true;
  for (auto [a, b] : complex.edges(Adjacency::touch)) {
    if (!complex.adjacent(Adjacency::neighbor, complex.index_of(a), complex.index_of(b))) {
      r.witness = "regions " + std::to_string(a) + " and " + std::to_string(b) +
                  " touch but are not neighbors";
      r.witness_pair = Edge{a, b};
      return r;
    }
  }
  r.in_F_int = true;
  return r;
}

}  // namespace clustertree
