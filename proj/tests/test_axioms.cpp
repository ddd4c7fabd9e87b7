#include <random>
#include <set>

#include <gtest/gtest.h>

#include "clustertree/axioms.hpp"
#include "support/fixtures.hpp"
#include "support/random_complex.hpp"

using namespace clustertree;

TEST(Axioms, CornerTouchVerdicts) {
  auto c = fixtures::corner_touch();
  EXPECT_TRUE(check_a1({1}, c));
  EXPECT_FALSE(check_a1({1, 2}, c));
  EXPECT_TRUE(check_a1({1, 2, 3}, c));
  auto a3 = check_a3({1}, c);
  EXPECT_TRUE(a3.ok);
  EXPECT_EQ(a3.inside_min, Rational(3));
  EXPECT_EQ(*a3.outside_max, Rational(1));
  EXPECT_EQ(*a3.witness, RegionId(3));
  auto whole = check_a3({1, 2, 3}, c);
  EXPECT_TRUE(whole.ok);
  EXPECT_FALSE(whole.outside_max);
  EXPECT_EQ(enumerate_axiom_clusters(c), (ClusterSet{{1}, {2}, {1, 2, 3}}));
}

TEST(Axioms, TiesFailA3AndAreFlagged) {
  auto c = RegionComplex<Rational>::abstract({{1, Rational(2)}, {2, Rational(2)}}, {{1, 2}}, {{1, 2}});
  auto v = check_a3({1}, c);
  EXPECT_FALSE(v.ok);
  EXPECT_TRUE(v.tie);
  EXPECT_EQ(enumerate_axiom_clusters(c), (ClusterSet{{1, 2}}));
}

TEST(Axioms, A2ForIdClustersAndBadInput) {
  auto c = fixtures::corner_touch();
  EXPECT_TRUE(check_a2(Cluster{1, 3}, c));
  EXPECT_THROW(check_a2(Cluster{}, c), PreconditionError);
  EXPECT_THROW(check_a1({7}, c), PreconditionError);
}

TEST(Axioms, A2ForGeometricClusters) {
  auto c = fixtures::chain();  // cells [-1,0), [0,1), [1,2)
  auto full = check_a2(GeometricCluster{{Box{{-1}, {1}}}}, c);
  EXPECT_TRUE(full.ok);
  EXPECT_EQ(full.regions, (Cluster{1, 2}));
  auto partial = check_a2(GeometricCluster{{Box{{-1}, {0.5}}}}, c);
  EXPECT_FALSE(partial.ok);
  EXPECT_EQ(*partial.witness, RegionId(2));
  auto pieces = check_a2(GeometricCluster{{Box{{0}, {0.5}}, Box{{0.5}, {1}}}}, c);
  EXPECT_TRUE(pieces.ok);
  EXPECT_EQ(pieces.regions, (Cluster{2}));
  // Touching a region's boundary only is not meeting it.
  auto edge = check_a2(GeometricCluster{{Box{{1}, {2}}}}, c);
  EXPECT_TRUE(edge.ok);
  EXPECT_EQ(edge.regions, (Cluster{3}));
  EXPECT_THROW(check_a2(GeometricCluster{{Box{{0, 0}, {1, 1}}}}, c), PreconditionError);
}

TEST(Axioms, ClusterTreeAndFinerThan) {
  EXPECT_TRUE(is_cluster_tree({{1}, {2}, {1, 2, 3}}));
  EXPECT_FALSE(is_cluster_tree({{1, 2}, {2, 3}}));
  EXPECT_TRUE(is_finer({{1}, {2}, {1, 2}}, {{1}, {1, 2}}));
  EXPECT_FALSE(is_finer({{1}, {1, 2}}, {{2}}));
}

TEST(Axioms, EnumerationIsCapped) {
  std::vector<std::pair<RegionId, Rational>> regions;
  std::vector<Edge> edges;
  for (RegionId i = 1; i <= 21; ++i) {
    regions.emplace_back(i, Rational(1));
    if (i > 1) edges.push_back({i - 1, i});
  }
  auto c = RegionComplex<Rational>::abstract(regions, edges, edges);
  EXPECT_THROW(enumerate_axiom_clusters(c), PreconditionError);
}

TEST(Axioms, SweepTreeIsFinestAxiomTree) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = gen::random_complex(rng);
    auto tree = axiom_tree(c);
    auto all = enumerate_axiom_clusters(c);
    EXPECT_EQ(tree.cluster_set(), std::set<Cluster>(all.begin(), all.end()));
    for (const auto& cl : tree.clusters()) {
      EXPECT_TRUE(check_a1(cl, c));
      EXPECT_TRUE(check_a3(cl, c).ok);
    }
    EXPECT_TRUE(is_finer(tree.clusters(), all));
  }
}
