#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "clustertree/serialize.hpp"

namespace fs = std::filesystem;
using namespace clustertree;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("clustertree_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(run("fixtures " + dir_.string()), 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    std::string cmd = std::string(CLUSTERTREE_CLI) + " " + args + " > " + (dir_ / "stdout").string() +
                      " 2> " + (dir_ / "stderr").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Json json(const std::string& name) const { return Json::parse(read(name)); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

std::set<Cluster> clusters_of(const Json& tree) {
  std::set<Cluster> s;
  for (const auto& n : tree["nodes"]) s.insert(n["regions"].get<Cluster>());
  return s;
}

}  // namespace

TEST_F(Cli, FixturesAreWrittenAndReparse) {
  for (auto name : {"fig_hartigan.json", "exampleA1_complex.json", "exampleA2_complex.json"}) {
    auto j = json(name);
    EXPECT_EQ(j["schema"], "v1");
    EXPECT_NO_THROW(complex_from_json<Rational>(j)) << name;
  }
  for (auto name : {"exampleA1_C.json", "exampleA1_Cprime.json", "exampleA2_flat.json", "exampleA2_nested.json"})
    EXPECT_NO_THROW(tree_from_json<Rational>(json(name))) << name;
  for (auto name : {"mixture_1d.json", "split_bimodal_2d.json"})
    EXPECT_NO_THROW(density_from_json(json(name))) << name;
  for (const auto& e : fs::directory_iterator(dir_))
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
}

TEST_F(Cli, AxiomTreeOfCornerTouchComplex) {
  ASSERT_EQ(run("axiom-tree " + path("fig_hartigan.json") + " --output " + path("tree.json")), 0);
  auto t = json("tree.json");
  EXPECT_EQ(t["schema"], "v1");
  EXPECT_EQ(clusters_of(t), (std::set<Cluster>{{1}, {2}, {1, 2, 3}}));
  ASSERT_EQ(run("hartigan --input " + path("fig_hartigan.json") + " -o " + path("h.json")), 0);
  EXPECT_EQ(clusters_of(json("h.json")), (std::set<Cluster>{{1}, {1, 2}, {1, 2, 3}}));
}

TEST_F(Cli, DotOutput) {
  ASSERT_EQ(run("hartigan " + path("fig_hartigan.json") + " --format dot"), 0);
  auto dot = read("stdout");
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("->"), std::string::npos);
}

TEST_F(Cli, CompareNestedChainTreesIsExactZero) {
  ASSERT_EQ(run("compare " + path("exampleA1_C.json") + " " + path("exampleA1_Cprime.json")), 0);
  auto j = Json::parse(read("stdout"));
  EXPECT_EQ(j["d_M"], 0.0);
  EXPECT_EQ(j["d_M_exact"], "0");
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_TRUE(j["witness_pair"].is_array());
  EXPECT_EQ(j["isomorphic"], false);
  ASSERT_EQ(run("compare " + path("exampleA2_flat.json") + " " + path("exampleA2_nested.json")), 0);
  EXPECT_EQ(Json::parse(read("stdout"))["d_M"], 0.0);
}

TEST_F(Cli, VerifyReportsWitnesses) {
  write("clusters.json", R"({"clusters":[[1,2],[1],[1,2,3]]})");
  ASSERT_EQ(run("verify " + path("fig_hartigan.json") + " " + path("clusters.json")), 0);
  auto j = Json::parse(read("stdout"));
  EXPECT_EQ(j["in_F_int"], false);
  EXPECT_EQ(j["clusters"][0]["A1"]["ok"], false);
  EXPECT_EQ(j["clusters"][1]["A3"]["ok"], true);
  EXPECT_EQ(j["clusters"][1]["A3"]["witness"], 3);
  EXPECT_EQ(j["is_cluster_tree"], true);
}

TEST_F(Cli, ExitCodes) {
  write("empty.json", R"({"regions":[]})");
  EXPECT_EQ(run("hartigan " + path("empty.json")), 2);
  write("broken.json", "{not json");
  EXPECT_EQ(run("hartigan " + path("broken.json")), 1);
  write("badfield.json", R"({"regions":[{"id":1}]})");
  EXPECT_EQ(run("hartigan " + path("badfield.json")), 1);
  write("split.json", R"({"regions":[{"id":1,"level":1},{"id":2,"level":1}],"touch":[[1,2]]})");
  EXPECT_EQ(run("axiom-tree " + path("split.json")), 2);
  EXPECT_EQ(run("hartigan " + path("missing.json")), 2);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("hartigan " + path("fig_hartigan.json") + " --format csv"), 1);
}

TEST_F(Cli, ForestSplitsComponents) {
  write("split.json", R"({"regions":[{"id":1,"level":1},{"id":2,"level":2}]})");
  ASSERT_EQ(run("forest " + path("split.json")), 0);
  auto j = Json::parse(read("stdout"));
  EXPECT_EQ(j["trees"].size(), 2u);
}

TEST_F(Cli, DiscretizeProducesReparsableComplex) {
  ASSERT_EQ(run("discretize " + path("mixture_1d.json") + " --scale 0.25 --eta 0.02 -o " + path("g.json")), 0);
  auto j = json("g.json");
  EXPECT_EQ(j["in_F_int"], true);
  auto g = complex_from_json<Rational>(j);
  EXPECT_EQ(g.size(), j["cells"].size());
  ASSERT_EQ(run("hartigan " + path("g.json") + " -o " + path("gt.json")), 0);
  EXPECT_NO_THROW(tree_from_json<Rational>(json("gt.json")));
  EXPECT_EQ(run("discretize " + path("mixture_1d.json") + " --scale 0.25 --eta 0.07"), 2);
  EXPECT_EQ(run("discretize " + path("mixture_1d.json")), 1);
}

TEST_F(Cli, ConvergeIsReproducible) {
  std::string args = "converge " + path("mixture_1d.json") +
                     " --scales 0.5,0.25 --pairs 200 --eta 0.02 --seed 7 --format csv -o ";
  ASSERT_EQ(run(args + path("a.csv")), 0);
  ASSERT_EQ(run(args + path("b.csv")), 0);
  auto a = read("a.csv");
  EXPECT_EQ(a, read("b.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "scale,eta_used,sup_norm_bound,sup_norm_sampled,d_M_to_truth,cell_count,in_F_int");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
}

TEST_F(Cli, SampledCompareAcrossGrids) {
  ASSERT_EQ(run("discretize " + path("mixture_1d.json") + " --scale 0.25 --eta 0.02 -o " + path("g1.json")), 0);
  ASSERT_EQ(run("discretize " + path("mixture_1d.json") + " --scale 0.125 --eta 0.02 -o " + path("g2.json")), 0);
  ASSERT_EQ(run("hartigan " + path("g1.json") + " -o " + path("t1.json")), 0);
  ASSERT_EQ(run("hartigan " + path("g2.json") + " -o " + path("t2.json")), 0);
  std::string args = "compare " + path("t1.json") + " " + path("t2.json") + " --complex " + path("g1.json") +
                     " --complex " + path("g2.json") + " --seed 3 --pairs 300";
  ASSERT_EQ(run(args), 0);
  auto first = read("stdout");
  auto j = Json::parse(first);
  EXPECT_EQ(j["mode"], "sampled");
  EXPECT_GT(j["d_M"].get<double>(), 0.0);
  EXPECT_LT(j["d_M"].get<double>(), 0.1);
  ASSERT_EQ(run(args), 0);
  EXPECT_EQ(read("stdout"), first);
  EXPECT_EQ(run("compare " + path("t1.json") + " " + path("t2.json")), 2);
}
