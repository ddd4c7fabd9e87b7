#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "clustertree/clustertree.hpp"

namespace gen {

using namespace clustertree;

struct ComplexShape {
  std::size_t min_regions = 1;
  std::size_t max_regions = 10;
  int max_numerator = 6;
  double extra_neighbor = 0.25;  // probability of each extra neighbor edge
  double extra_touch = 0.25;     // probability of each extra touch-only edge
  bool internally_connected = false;
};

// Small denominators so ties between levels are common.
inline Rational random_level(std::mt19937_64& rng, int max_numerator) {
  int q = std::uniform_int_distribution<int>(1, 3)(rng);
  int p = std::uniform_int_distribution<int>(1, max_numerator * q)(rng);
  return Rational(p, q);
}

// Random abstract complex whose neighbor graph is connected (a random
// spanning tree plus extra edges); touch edges are a superset.
inline RegionComplex<Rational> random_complex(std::mt19937_64& rng, const ComplexShape& shape = {}) {
  std::size_t m = std::uniform_int_distribution<std::size_t>(shape.min_regions, shape.max_regions)(rng);
  std::vector<RegionId> ids(m);
  for (std::size_t i = 0; i < m; ++i) ids[i] = RegionId(i) + 1;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::pair<RegionId, Rational>> regions;
  for (auto id : ids) regions.emplace_back(id, random_level(rng, shape.max_numerator));
  std::set<Edge> neighbor, touch;
  std::bernoulli_distribution add_n(shape.extra_neighbor), add_t(shape.extra_touch);
  for (std::size_t i = 1; i < m; ++i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    neighbor.insert(make_edge(ids[i], ids[j]));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      Edge e = make_edge(ids[i], ids[j]);
      if (neighbor.count(e)) continue;
      if (add_n(rng)) neighbor.insert(e);
      else if (!shape.internally_connected && add_t(rng)) touch.insert(e);
    }
  touch.insert(neighbor.begin(), neighbor.end());
  return RegionComplex<Rational>::abstract(std::move(regions), {touch.begin(), touch.end()},
                                           {neighbor.begin(), neighbor.end()});
}

// Same topology, every level replaced by a fresh random level.
inline RegionComplex<Rational> relevel(const RegionComplex<Rational>& c, std::mt19937_64& rng,
                                       int max_numerator = 6) {
  std::vector<Rational> levels;
  for (std::size_t i = 0; i < c.size(); ++i) levels.push_back(random_level(rng, max_numerator));
  return c.with_levels(std::move(levels));
}

// Random laminar family over the complex's regions, heights from the levels.
inline Dendrogram<Rational> random_dendrogram(const RegionComplex<Rational>& c, std::mt19937_64& rng) {
  ClusterSet clusters;
  std::vector<std::vector<RegionId>> work{c.ids()};
  std::bernoulli_distribution keep(0.7);
  while (!work.empty()) {
    auto s = std::move(work.back());
    work.pop_back();
    if (keep(rng) || work.empty()) clusters.push_back(s);
    if (s.size() < 2) continue;
    std::shuffle(s.begin(), s.end(), rng);
    std::size_t parts = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, s.size()))(rng);
    std::vector<std::vector<RegionId>> split(parts);
    for (std::size_t i = 0; i < s.size(); ++i) split[i % parts].push_back(s[i]);
    for (auto& p : split)
      if (p.size() < s.size() || parts == 1) {
        if (parts == 1) {
          p.pop_back();
          if (p.empty()) continue;
        }
        std::sort(p.begin(), p.end());
        work.push_back(std::move(p));
      }
  }
  return dendrogram_from_clusters(c, std::move(clusters));
}

}  // namespace gen
