#include <gtest/gtest.h>

#include "clustertree/regions.hpp"
#include "support/fixtures.hpp"

using namespace clustertree;

TEST(RegionComplex, AbstractSortsById) {
  auto c = RegionComplex<Rational>::abstract({{3, Rational(1)}, {1, Rational(3)}, {2, Rational(2)}},
                                             {{1, 2}}, {});
  EXPECT_EQ(c.ids(), (std::vector<RegionId>{1, 2, 3}));
  EXPECT_EQ(c.level(0), Rational(3));
  EXPECT_TRUE(c.adjacent(Adjacency::touch, 0, 1));
  EXPECT_FALSE(c.adjacent(Adjacency::neighbor, 0, 1));
  EXPECT_FALSE(c.has_geometry());
  EXPECT_THROW(c.grid(), PreconditionError);
  EXPECT_THROW(c.index_of(9), PreconditionError);
}

TEST(RegionComplex, RejectsMalformedInput) {
  using C = RegionComplex<Rational>;
  EXPECT_THROW(C::abstract({{1, Rational(1)}, {1, Rational(2)}}, {}, {}), PreconditionError);
  EXPECT_THROW(C::abstract({{1, Rational(0)}}, {}, {}), PreconditionError);
  EXPECT_THROW(C::abstract({{1, Rational(-1)}}, {}, {}), PreconditionError);
  EXPECT_THROW(C::abstract({{1, Rational(1)}}, {{1, 1}}, {}), PreconditionError);
  EXPECT_THROW(C::abstract({{1, Rational(1)}, {2, Rational(1)}}, {}, {{1, 2}}), PreconditionError);
  EXPECT_THROW(C::abstract({{1, Rational(1)}}, {{1, 5}}, {}), PreconditionError);

  ShiftedGrid g(2, 1.0);
  std::vector<CellLevel<Rational>> dup{{CellId{{0, 0}}, Rational(1), {}}, {CellId{{0, 0}}, Rational(2), {}}};
  EXPECT_THROW(C::from_cells(dup, g), PreconditionError);
  std::vector<CellLevel<Rational>> off{{CellId{{1, 0}}, Rational(1), {}}};
  EXPECT_THROW(C::from_cells(off, g), PreconditionError);
}

TEST(RegionComplex, CellsGetRelationsFromTheGrid) {
  auto c = fixtures::chain();
  EXPECT_EQ(c.ids(), (std::vector<RegionId>{1, 2, 3}));
  EXPECT_EQ(c.edges(Adjacency::neighbor), (std::vector<Edge>{{1, 2}, {2, 3}}));
  EXPECT_EQ(c.edges(Adjacency::touch), (std::vector<Edge>{{1, 2}, {2, 3}}));
  EXPECT_EQ(c.region_at(std::vector<double>{-0.5}), RegionId(1));
  EXPECT_EQ(c.region_at(std::vector<double>{1.0}), RegionId(3));
  EXPECT_EQ(c.region_at(std::vector<double>{2.0}), std::nullopt);
}

TEST(RegionComplex, PlaneCellsUseBrickWallNeighbors) {
  ShiftedGrid g(2, 1.0);
  std::vector<CellLevel<Rational>> cells;
  for (auto u : std::vector<std::vector<double>>{{0, 0}, {1, 0}, {0.5, 1}, {2, 0}})
    cells.push_back({g.anchor_from_units(u), Rational(1), std::nullopt});
  auto c = RegionComplex<Rational>::from_cells(cells, g);
  EXPECT_EQ(c.edges(Adjacency::neighbor), (std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}, {2, 4}}));
  EXPECT_EQ(c.edges(Adjacency::touch), c.edges(Adjacency::neighbor));
  EXPECT_TRUE(classify(c).in_F_int);
}

TEST(RegionComplex, WithLevelsKeepsTopology) {
  auto c = fixtures::corner_touch();
  auto d = c.with_levels({Rational(1), Rational(1), Rational(1)});
  EXPECT_EQ(d.edges(Adjacency::touch), c.edges(Adjacency::touch));
  EXPECT_EQ(d.level(0), Rational(1));
  EXPECT_THROW(c.with_levels({Rational(1)}), PreconditionError);
  EXPECT_THROW(c.with_levels({Rational(1), Rational(0), Rational(1)}), PreconditionError);
}

TEST(Classify, CornerTouchIsInFButNotInternallyConnected) {
  auto r = classify(fixtures::corner_touch());
  EXPECT_TRUE(r.in_F);
  EXPECT_FALSE(r.in_F_int);
  ASSERT_TRUE(r.witness_pair);
  EXPECT_EQ(*r.witness_pair, Edge(1, 2));
}

TEST(Classify, DisconnectedNeighborGraphIsNotInF) {
  auto c = RegionComplex<Rational>::abstract({{1, Rational(1)}, {2, Rational(1)}}, {{1, 2}}, {});
  auto r = classify(c);
  EXPECT_FALSE(r.in_F);
  EXPECT_FALSE(r.in_F_int);
  EXPECT_EQ(*r.witness_pair, Edge(1, 2));
  EXPECT_FALSE(classify(RegionComplex<Rational>{}).in_F);
}

TEST(Classify, ChainIsInternallyConnected) {
  EXPECT_TRUE(classify(fixtures::chain()).in_F_int);
}

TEST(Adjacency, ParsesNames) {
  EXPECT_EQ(parse_adjacency("touch"), Adjacency::touch);
  EXPECT_EQ(parse_adjacency("neighbor"), Adjacency::neighbor);
  EXPECT_THROW(parse_adjacency("near"), SchemaError);
  EXPECT_EQ(to_string(Adjacency::neighbor), "neighbor");
}

TEST(ConnectedComponents, RespectsActiveMask) {
  std::vector<std::vector<std::size_t>> adj{{1}, {0, 2}, {1}};
  EXPECT_EQ(connected_components(adj).second, 1);
  auto [label, count] = connected_components(adj, {true, false, true});
  EXPECT_EQ(count, 2);
  EXPECT_EQ(label[1], -1);
}
