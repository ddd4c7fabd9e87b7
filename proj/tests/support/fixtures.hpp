#pragma once

#include <vector>

#include "clustertree/clustertree.hpp"

namespace fixtures {

using namespace clustertree;

// Three regions where A1 and A2 touch only through a point (not neighbors).
inline RegionComplex<Rational> corner_touch() {
  return RegionComplex<Rational>::abstract({{1, Rational(3)}, {2, Rational(2)}, {3, Rational(1)}},
                                           {{1, 2}, {1, 3}, {2, 3}}, {{1, 3}, {2, 3}});
}

// f = 1/2 1{A1} + 1/3 1{A2} + 1/6 1{A3} on three consecutive unit intervals.
inline RegionComplex<Rational> chain() {
  ShiftedGrid grid(1, 1.0);
  std::vector<CellLevel<Rational>> cells;
  cells.push_back({CellId{{-1}}, Rational(1, 2), std::nullopt});
  cells.push_back({CellId{{0}}, Rational(1, 3), std::nullopt});
  cells.push_back({CellId{{1}}, Rational(1, 6), std::nullopt});
  return RegionComplex<Rational>::from_cells(std::move(cells), grid);
}

inline Dendrogram<Rational> chain_tree() {
  return dendrogram_from_clusters(chain(), {{1}, {1, 2}, {1, 2, 3}});
}

inline Dendrogram<Rational> chain_tree_with_middle() {
  return dendrogram_from_clusters(chain(), {{1}, {2}, {1, 2}, {1, 2, 3}});
}

}  // namespace fixtures
