#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clustertree/axioms.hpp"
#include "clustertree/density.hpp"
#include "clustertree/errors.hpp"
#include "clustertree/level.hpp"
#include "clustertree/level_tree.hpp"
#include "clustertree/regions.hpp"
#include "clustertree/shifted_grid.hpp"

namespace clustertree {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "v1";

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

inline const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  return v;
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw SchemaError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

inline std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

template <class Level>
Level level_from_json(const Json& j) {
  if (j.is_string()) return level_from_string<Level>(j.get<std::string>());
  return level_from_double<Level>(number(j, "level"));
}

inline void check_schema(const Json& j) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find("schema");
  if (it != j.end() && *it != kSchemaVersion)
    throw SchemaError("unsupported schema version " + it->dump());
}

inline std::vector<Edge> edges_from_json(const Json& j, const char* key) {
  std::vector<Edge> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  for (const auto& e : *it) {
    if (!e.is_array() || e.size() != 2)
      throw SchemaError(std::string("entries of '") + key + "' must be id pairs");
    out.push_back(make_edge(integer(e[0], "region id"), integer(e[1], "region id")));
  }
  return out;
}

}  // namespace detail

template <class Level>
void put_level(Json& j, const char* key, const Level& v) {
  j[key] = to_double(v);
  if constexpr (std::is_same_v<Level, Rational>) j[std::string(key) + "_exact"] = to_exact_string(v);
}

template <class Level>
Level get_level(const Json& j, const char* key) {
  auto exact = j.find(std::string(key) + "_exact");
  if (exact != j.end()) {
    if (!exact->is_string()) throw SchemaError(std::string(key) + "_exact must be a string");
    return level_from_string<Level>(exact->get<std::string>());
  }
  return detail::level_from_json<Level>(detail::field(j, key));
}

/// Reads either complex form:
///   {"dim", "scale", "cells": [{"anchor": [...], "level": x, "id"?: n}]}
///   {"regions": [{"id", "level"}], "touch": [[i, j]], "neighbor": [[i, j]]}
/// Levels may be numbers or exact strings such as "1/3".
template <class Level = Rational>
RegionComplex<Level> complex_from_json(const Json& j) {
  try {
    detail::check_schema(j);
    if (j.contains("cells")) {
      int dim = int(detail::integer(detail::field(j, "dim"), "dim"));
      double scale = detail::number(detail::field(j, "scale"), "scale");
      ShiftedGrid grid(dim, scale);
      std::vector<CellLevel<Level>> cells;
      for (const auto& c : detail::array_field(j, "cells")) {
        auto anchor = detail::numbers(detail::field(c, "anchor"), "anchor");
        std::optional<RegionId> id;
        if (c.contains("id")) id = detail::integer(c["id"], "cell id");
        cells.push_back({grid.anchor_from_units(anchor), get_level<Level>(c, "level"), id});
      }
      return RegionComplex<Level>::from_cells(std::move(cells), grid);
    }
    std::vector<std::pair<RegionId, Level>> regions;
    for (const auto& r : detail::array_field(j, "regions"))
      regions.emplace_back(detail::integer(detail::field(r, "id"), "region id"),
                           get_level<Level>(r, "level"));
    return RegionComplex<Level>::abstract(std::move(regions), detail::edges_from_json(j, "touch"),
                                          detail::edges_from_json(j, "neighbor"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  }
}

template <class Level>
Json complex_to_json(const RegionComplex<Level>& complex) {
  Json j;
  j["schema"] = kSchemaVersion;
  if (complex.has_geometry()) {
    const ShiftedGrid& grid = complex.grid();
    j["dim"] = grid.dim();
    j["scale"] = grid.scale();
    j["cells"] = Json::array();
    for (const auto& r : complex.regions()) {
      Json c;
      c["id"] = r.id;
      c["anchor"] = grid.anchor_units(r.cells.front());
      put_level(c, "level", r.level);
      j["cells"].push_back(std::move(c));
    }
    return j;
  }
  j["regions"] = Json::array();
  for (const auto& r : complex.regions()) {
    Json e;
    e["id"] = r.id;
    put_level(e, "level", r.level);
    j["regions"].push_back(std::move(e));
  }
  j["touch"] = Json::array();
  for (auto [a, b] : complex.edges(Adjacency::touch)) j["touch"].push_back({a, b});
  j["neighbor"] = Json::array();
  for (auto [a, b] : complex.edges(Adjacency::neighbor)) j["neighbor"].push_back({a, b});
  return j;
}

/// {"schema", "domain": [ids], "nodes": [{"id", "regions", "height", "parent"}]}
template <class Level>
Json tree_to_json(const Dendrogram<Level>& tree) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["domain"] = tree.domain();
  j["nodes"] = Json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    Json e;
    e["id"] = i;
    e["regions"] = n.cluster;
    put_level(e, "height", n.height);
    e["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
    j["nodes"].push_back(std::move(e));
  }
  return j;
}

/// Node ids must be 0..n-1 in order. Without "domain" the union of all
/// clusters is used.
template <class Level = Rational>
Dendrogram<Level> tree_from_json(const Json& j) {
  try {
    detail::check_schema(j);
    std::vector<DendrogramNode<Level>> nodes;
    std::vector<RegionId> domain;
    const auto& arr = detail::array_field(j, "nodes");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& e = arr[i];
      if (e.contains("id") && detail::integer(e["id"], "node id") != std::int64_t(i))
        throw SchemaError("node ids must be consecutive from 0");
      DendrogramNode<Level> n;
      for (const auto& r : detail::array_field(e, "regions"))
        n.cluster.push_back(detail::integer(r, "region id"));
      n.height = get_level<Level>(e, "height");
      const Json& p = detail::field(e, "parent");
      if (!p.is_null()) {
        auto v = detail::integer(p, "parent");
        if (v < 0) throw SchemaError("parent must be a node id or null");
        n.parent = std::size_t(v);
      }
      domain.insert(domain.end(), n.cluster.begin(), n.cluster.end());
      nodes.push_back(std::move(n));
    }
    if (j.contains("domain")) {
      domain.clear();
      for (const auto& r : detail::array_field(j, "domain"))
        domain.push_back(detail::integer(r, "region id"));
    }
    return Dendrogram<Level>(std::move(domain), std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  }
}

template <class Level>
Json forest_to_json(const Forest<Level>& forest) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["trees"] = Json::array();
  for (const auto& t : forest.trees) {
    Json tj = tree_to_json(t);
    tj.erase("schema");
    j["trees"].push_back(std::move(tj));
  }
  return j;
}

/// Graphviz digraph, parent -> child, edges labeled with the child height.
template <class Level>
std::string tree_to_dot(const Dendrogram<Level>& tree) {
  std::ostringstream os;
  os << "digraph dendrogram {\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    os << "  n" << i << " [label=\"{";
    for (std::size_t k = 0; k < n.cluster.size(); ++k) os << (k ? "," : "") << n.cluster[k];
    os << "}\\nh=" << to_exact_string(n.height) << "\"];\n";
  }
  for (std::size_t i = 0; i < tree.size(); ++i)
    if (auto p = tree.node(i).parent)
      os << "  n" << *p << " -> n" << i << " [label=\"" << to_exact_string(tree.node(i).height)
         << "\"];\n";
  os << "}\n";
  return os.str();
}

/// {"dim", "family": "gaussian_mixture", "weights", "means", "scales"} or
/// {"dim", "family": "box_mixture", "weights", "boxes": [{"lo", "hi"}]};
/// optional "lipschitz" and "modes".
inline DensitySpec density_from_json(const Json& j) {
  try {
    detail::check_schema(j);
    int dim = int(detail::integer(detail::field(j, "dim"), "dim"));
    const Json& fam = detail::field(j, "family");
    if (!fam.is_string()) throw SchemaError("family must be a string");
    auto weights = detail::numbers(detail::field(j, "weights"), "weights");
    std::vector<std::vector<double>> modes;
    if (j.contains("modes"))
      for (const auto& m : detail::array_field(j, "modes")) modes.push_back(detail::numbers(m, "mode"));
    if (fam == "gaussian_mixture") {
      GaussianMixture mix;
      mix.weights = std::move(weights);
      for (const auto& m : detail::array_field(j, "means")) mix.means.push_back(detail::numbers(m, "mean"));
      mix.scales = detail::numbers(detail::field(j, "scales"), "scales");
      std::optional<double> lip;
      if (j.contains("lipschitz")) lip = detail::number(j["lipschitz"], "lipschitz");
      return DensitySpec::gaussian_mixture(dim, std::move(mix), lip, std::move(modes));
    }
    if (fam == "box_mixture") {
      BoxMixture mix;
      mix.weights = std::move(weights);
      for (const auto& b : detail::array_field(j, "boxes"))
        mix.boxes.push_back({detail::numbers(detail::field(b, "lo"), "lo"),
                             detail::numbers(detail::field(b, "hi"), "hi")});
      return DensitySpec::box_mixture(dim, std::move(mix), std::move(modes));
    }
    throw SchemaError("unknown density family " + fam.dump());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  }
}

inline Json density_to_json(const DensitySpec& spec) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["dim"] = spec.dim();
  if (const auto* g = std::get_if<GaussianMixture>(&spec.family())) {
    j["family"] = "gaussian_mixture";
    j["weights"] = g->weights;
    j["means"] = g->means;
    j["scales"] = g->scales;
    j["lipschitz"] = spec.lipschitz_bound();
  } else {
    const auto& b = std::get<BoxMixture>(spec.family());
    j["family"] = "box_mixture";
    j["weights"] = b.weights;
    j["boxes"] = Json::array();
    for (const Box& box : b.boxes) j["boxes"].push_back({{"lo", box.lo}, {"hi", box.hi}});
  }
  if (!spec.modes().empty()) j["modes"] = spec.modes();
  return j;
}

/// {"clusters": [[ids]], "geometric_clusters"?: [[{"lo", "hi"}]]}
struct ClusterQuery {
  ClusterSet clusters;
  std::vector<GeometricCluster> geometric;
};

inline ClusterQuery clusters_from_json(const Json& j) {
  try {
    ClusterQuery q;
    for (const auto& c : detail::array_field(j, "clusters")) {
      if (!c.is_array()) throw SchemaError("each cluster must be an array of region ids");
      Cluster cl;
      for (const auto& r : c) cl.push_back(detail::integer(r, "region id"));
      if (cl.empty()) throw SchemaError("clusters must be nonempty");
      q.clusters.push_back(normalized(std::move(cl)));
    }
    if (j.contains("geometric_clusters"))
      for (const auto& g : detail::array_field(j, "geometric_clusters")) {
        GeometricCluster gc;
        if (!g.is_array()) throw SchemaError("geometric cluster must be an array of boxes");
        for (const auto& b : g)
          gc.boxes.push_back({detail::numbers(detail::field(b, "lo"), "lo"),
                              detail::numbers(detail::field(b, "hi"), "hi")});
        q.geometric.push_back(std::move(gc));
      }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace clustertree
