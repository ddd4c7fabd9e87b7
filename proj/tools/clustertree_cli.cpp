#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "clustertree/clustertree.hpp"

namespace fs = std::filesystem;
using namespace clustertree;

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* v = std::getenv("CLUSTERTREE_LOG");
  if (!v) return LogLevel::quiet;
  std::string s(v);
  if (s == "debug") return LogLevel::debug;
  if (s == "info") return LogLevel::info;
  return LogLevel::quiet;
}

void log(LogLevel at, const std::string& msg) {
  if (log_level() >= at)
    std::cerr << (at == LogLevel::debug ? "[debug] " : "[info] ") << msg << '\n';
}

struct Options {
  std::string input;
  std::vector<std::string> positional;
  std::string output = "-";
  std::string format = "json";
  std::string adjacency = "touch";
  std::optional<double> scale;
  std::optional<double> eta;
  int samples_per_axis = 11;
  std::uint64_t seed = 1;
  std::vector<std::string> complexes;
  std::vector<double> scales{0.5, 0.25, 0.125, 0.0625};
  std::size_t pairs = 1000;
};

std::vector<std::string> inputs(const Options& o) {
  std::vector<std::string> all;
  if (!o.input.empty()) all.push_back(o.input);
  all.insert(all.end(), o.positional.begin(), o.positional.end());
  return all;
}

std::string need_input(const Options& o, std::size_t k, const char* what) {
  auto all = inputs(o);
  if (all.size() <= k) throw SchemaError(std::string("missing input: ") + what);
  return all[k];
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  log(LogLevel::debug, "reading " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw PreconditionError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw PreconditionError("cannot move output into " + path + ": " + ec.message());
  }
  log(LogLevel::info, "wrote " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void check_format(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (o.format == f) return;
  throw SchemaError("format '" + o.format + "' is not available for this command");
}

void emit_tree(const Options& o, const Dendrogram<Rational>& tree) {
  check_format(o, {"json", "dot"});
  write_atomic(o.output, o.format == "dot" ? tree_to_dot(tree) : dump(tree_to_json(tree)));
}

int cmd_tree(const Options& o, Adjacency adjacency) {
  auto complex = complex_from_json<Rational>(read_json(need_input(o, 0, "complex")));
  log(LogLevel::info, "complex with " + std::to_string(complex.size()) + " regions");
  if (adjacency == Adjacency::neighbor) {
    emit_tree(o, axiom_tree(complex));
  } else {
    emit_tree(o, hartigan_tree(complex));
  }
  return 0;
}

int cmd_forest(const Options& o) {
  auto complex = complex_from_json<Rational>(read_json(need_input(o, 0, "complex")));
  auto forest = sweep_forest(complex, parse_adjacency(o.adjacency));
  log(LogLevel::info, std::to_string(forest.trees.size()) + " trees");
  check_format(o, {"json", "dot"});
  write_atomic(o.output, o.format == "dot" ? tree_to_dot(forest.combined())
                                           : dump(forest_to_json(forest)));
  return 0;
}

Json level_json(const Rational& v) {
  Json j;
  put_level(j, "value", v);
  return j;
}

int cmd_verify(const Options& o) {
  auto complex = complex_from_json<Rational>(read_json(need_input(o, 0, "complex")));
  auto query = clusters_from_json(read_json(need_input(o, 1, "clusters")));
  Json out;
  out["schema"] = kSchemaVersion;
  auto report = classify(complex);
  out["in_F"] = report.in_F;
  out["in_F_int"] = report.in_F_int;
  if (!report.witness.empty()) out["class_witness"] = report.witness;
  out["is_cluster_tree"] = is_cluster_tree(query.clusters);
  out["clusters"] = Json::array();
  for (const auto& c : query.clusters) {
    Json v;
    v["regions"] = c;
    v["A1"] = {{"ok", check_a1(c, complex)}};
    v["A2"] = {{"ok", check_a2(c, complex)}};
    auto a3 = check_a3(c, complex);
    Json a3j{{"ok", a3.ok}, {"tie", a3.tie}, {"inside_min", level_json(a3.inside_min)}};
    a3j["outside_max"] = a3.outside_max ? level_json(*a3.outside_max) : Json(nullptr);
    a3j["witness"] = a3.witness ? Json(*a3.witness) : Json(nullptr);
    v["A3"] = std::move(a3j);
    out["clusters"].push_back(std::move(v));
  }
  if (!query.geometric.empty()) {
    out["geometric_clusters"] = Json::array();
    for (const auto& g : query.geometric) {
      auto a2 = check_a2(g, complex);
      out["geometric_clusters"].push_back(
          {{"A2", {{"ok", a2.ok}, {"witness", a2.witness ? Json(*a2.witness) : Json(nullptr)}}},
           {"regions", a2.regions}});
    }
  }
  check_format(o, {"json"});
  write_atomic(o.output, dump(out));
  return 0;
}

int cmd_compare(const Options& o) {
  auto a = tree_from_json<Rational>(read_json(need_input(o, 0, "first tree")));
  auto b = tree_from_json<Rational>(read_json(need_input(o, 1, "second tree")));
  Json out;
  out["schema"] = kSchemaVersion;
  if (a.domain() == b.domain()) {
    auto d = merge_distortion(a, b);
    put_level(out, "d_M", d.value);
    out["mode"] = "exact";
    out["witness_pair"] = d.witness ? Json{d.witness->first, d.witness->second} : Json(nullptr);
  } else {
    if (o.complexes.empty())
      throw PreconditionError("trees cover different regions; pass --complex for sampled comparison");
    auto ca = complex_from_json<Rational>(read_json(o.complexes.front()));
    auto cb = complex_from_json<Rational>(read_json(o.complexes.back()));
    if (!ca.has_geometry() || !cb.has_geometry())
      throw PreconditionError("sampled comparison needs complexes with cells");
    Box box{std::vector<double>(ca.grid().dim(), HUGE_VAL), std::vector<double>(ca.grid().dim(), -HUGE_VAL)};
    if (cb.grid().dim() != ca.grid().dim()) throw PreconditionError("complex dimensions differ");
    for (const auto* c : {&ca, &cb})
      for (const auto& r : c->regions())
        for (const auto& cell : r.cells) {
          Box cbx = c->grid().cell_box(cell);
          for (std::size_t i = 0; i < cbx.lo.size(); ++i) {
            box.lo[i] = std::min(box.lo[i], cbx.lo[i]);
            box.hi[i] = std::max(box.hi[i], cbx.hi[i]);
          }
        }
    std::mt19937_64 rng(o.seed);
    auto xs = uniform_points(box, o.pairs, rng);
    auto ys = uniform_points(box, o.pairs, rng);
    std::vector<PointPair> pairs;
    for (std::size_t k = 0; k < o.pairs; ++k) pairs.push_back({xs[k], ys[k]});
    auto d = merge_distortion(a, ca, b, cb, pairs);
    out["d_M"] = d.value;
    out["mode"] = "sampled";
    out["note"] = "sampled lower bound";
    out["pairs"] = o.pairs;
    out["seed"] = o.seed;
    if (d.witness) {
      const auto& p = pairs[*d.witness];
      out["witness_points"] = {p.x, p.y};
      auto ra = ca.region_at(p.x), rb = ca.region_at(p.y);
      out["witness_pair"] = ra && rb ? Json{*ra, *rb} : Json(nullptr);
    } else {
      out["witness_pair"] = nullptr;
    }
  }
  out["isomorphic"] = is_isomorphic(a, b);
  check_format(o, {"json"});
  write_atomic(o.output, dump(out));
  return 0;
}

double eta_or_default(const Options& o, const DensitySpec& spec, double scale) {
  if (o.eta) return *o.eta;
  double eta = spec.lipschitz_bound() * scale * std::sqrt(double(spec.dim()));
  if (!(eta > 0.0)) throw PreconditionError("no Lipschitz bound for this density; pass --eta");
  return eta;
}

int cmd_discretize(const Options& o) {
  auto spec = density_from_json(read_json(need_input(o, 0, "density")));
  if (!o.scale) throw SchemaError("discretize needs --scale");
  double eta = eta_or_default(o, spec, *o.scale);
  log(LogLevel::info, "eta " + std::to_string(eta));
  auto g = discretize(spec, eta, *o.scale, o.samples_per_axis);
  log(LogLevel::info, std::to_string(g.complex.size()) + " cells kept");
  Json out = complex_to_json(g.complex);
  out["eta"] = g.eta;
  out["samples_per_axis"] = g.samples_per_axis;
  out["sampling_slack"] = g.sampling_slack;
  out["max_oscillation"] = g.max_oscillation;
  out["sup_norm_bound"] = g.sup_norm_bound;
  out["in_F_int"] = g.report.in_F_int;
  check_format(o, {"json"});
  write_atomic(o.output, dump(out));
  return 0;
}

int cmd_converge(const Options& o) {
  auto spec = density_from_json(read_json(need_input(o, 0, "density")));
  ConvergenceOptions opt;
  opt.samples_per_axis = o.samples_per_axis;
  opt.max_eta = o.eta;
  auto report = convergence_experiment(spec, o.scales, o.pairs, o.seed, opt);
  log(LogLevel::info, std::string("within bounds: ") + (report.within_bounds ? "yes" : "no"));
  if (o.format == "json") {
    Json out;
    out["schema"] = kSchemaVersion;
    out["within_bounds"] = report.within_bounds;
    out["d_M_non_increasing"] = report.d_M_non_increasing;
    out["rows"] = Json::array();
    for (const auto& r : report.rows)
      out["rows"].push_back({{"scale", r.scale},
                             {"eta_used", r.eta_used},
                             {"sup_norm_bound", r.sup_norm_bound},
                             {"sup_norm_sampled", r.sup_norm_sampled},
                             {"d_M_to_truth", r.d_M_to_truth},
                             {"cell_count", r.cell_count},
                             {"in_F_int", r.in_F_int}});
    write_atomic(o.output, dump(out));
  } else {
    check_format(o, {"csv"});
    write_atomic(o.output, report.to_csv());
  }
  return 0;
}

Json gaussian_json(int dim, std::vector<double> w, std::vector<std::vector<double>> means,
                   std::vector<std::vector<double>> modes) {
  GaussianMixture mix{std::move(w), std::move(means), {}};
  mix.scales.assign(mix.weights.size(), 1.0);
  return density_to_json(DensitySpec::gaussian_mixture(dim, std::move(mix), std::nullopt, std::move(modes)));
}

int cmd_fixtures(const Options& o) {
  auto all = inputs(o);
  fs::path dir = all.empty() ? fs::path(o.output == "-" ? "." : o.output) : fs::path(all.front());
  fs::create_directories(dir);

  auto fig = RegionComplex<Rational>::abstract({{1, Rational(3)}, {2, Rational(2)}, {3, Rational(1)}},
                                               {{1, 2}, {1, 3}, {2, 3}}, {{1, 3}, {2, 3}});
  ShiftedGrid line(1, 1.0);
  auto chain = RegionComplex<Rational>::from_cells(
      {{CellId{{-1}}, Rational(1, 2), 1}, {CellId{{0}}, Rational(1, 3), 2}, {CellId{{1}}, Rational(1, 6), 3}},
      line);
  auto c = dendrogram_from_clusters(chain, {{1}, {1, 2}, {1, 2, 3}});
  auto cp = dendrogram_from_clusters(chain, {{1}, {2}, {1, 2}, {1, 2, 3}});
  auto unit = RegionComplex<Rational>::from_cells(
      {{CellId{{0}}, Rational(1), 1}, {CellId{{1}}, Rational(1), 2}, {CellId{{2}}, Rational(1), 3}}, line);
  auto flat = dendrogram_from_clusters(unit, {{1, 2, 3}});
  auto nested = dendrogram_from_clusters(unit, {{1}, {1, 2}, {1, 2, 3}});

  const std::vector<std::pair<std::string, Json>> files{
      {"fig_hartigan.json", complex_to_json(fig)},
      {"exampleA1_complex.json", complex_to_json(chain)},
      {"exampleA1_C.json", tree_to_json(c)},
      {"exampleA1_Cprime.json", tree_to_json(cp)},
      {"exampleA2_complex.json", complex_to_json(unit)},
      {"exampleA2_flat.json", tree_to_json(flat)},
      {"exampleA2_nested.json", tree_to_json(nested)},
      {"mixture_1d.json", gaussian_json(1, {0.6, 0.4}, {{-2.0}, {2.0}}, {{-2.0}, {2.0}})},
      {"split_bimodal_2d.json",
       gaussian_json(2, {0.5, 0.5}, {{-2.0, 0.0}, {2.0, 0.0}}, {{-2.0, 0.0}, {2.0, 0.0}})},
  };
  for (const auto& [name, j] : files) write_atomic((dir / name).string(), dump(j));
  log(LogLevel::info, "fixtures written to " + dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster trees for piecewise-constant densities"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("-i,--input", o.input, "Input file");
  app.add_option("-o,--output", o.output, "Output file or directory ('-' for stdout)");
  app.add_option("--format", o.format, "json, dot or csv")->check(CLI::IsMember({"json", "dot", "csv"}));
  app.add_option("--adjacency", o.adjacency, "touch or neighbor")
      ->check(CLI::IsMember({"touch", "neighbor"}));
  app.add_option("--scale", o.scale, "Grid cell side")->check(CLI::PositiveNumber);
  app.add_option("--eta", o.eta, "Level threshold (cap on eta for converge)")->check(CLI::PositiveNumber);
  app.add_option("--samples-per-axis", o.samples_per_axis, "Sample lattice per cell axis")
      ->check(CLI::Range(2, 1000));
  app.add_option("--seed", o.seed, "Random seed");

  auto* hartigan = app.add_subcommand("hartigan", "Hartigan tree of a complex");
  auto* axiom = app.add_subcommand("axiom-tree", "Finest axiom cluster tree of a complex");
  auto* forest = app.add_subcommand("forest", "One tree per connected component");
  auto* verify = app.add_subcommand("verify", "Check clusters against the axioms");
  auto* compare = app.add_subcommand("compare", "Merge distortion between two trees");
  auto* disc = app.add_subcommand("discretize", "Piecewise-constant approximation of a density");
  auto* conv = app.add_subcommand("converge", "Convergence report over decreasing scales");
  auto* fixtures = app.add_subcommand("fixtures", "Write the example inputs into a directory");
  for (auto* sub : {hartigan, axiom, forest, verify, compare, disc, conv, fixtures})
    sub->add_option("inputs", o.positional, "Input files");
  compare->add_option("--complex", o.complexes, "Complex(es) for sampled comparison");
  compare->add_option("--pairs", o.pairs, "Sampled point pairs");
  conv->add_option("--scales", o.scales, "Decreasing grid scales")->delimiter(',');
  conv->add_option("--pairs", o.pairs, "Sampled point pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*hartigan) return cmd_tree(o, Adjacency::touch);
    if (*axiom) return cmd_tree(o, Adjacency::neighbor);
    if (*forest) return cmd_forest(o);
    if (*verify) return cmd_verify(o);
    if (*compare) return cmd_compare(o);
    if (*disc) return cmd_discretize(o);
    if (*conv) return cmd_converge(o);
    if (*fixtures) return cmd_fixtures(o);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
