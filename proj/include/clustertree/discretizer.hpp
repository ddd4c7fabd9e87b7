#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "clustertree/density.hpp"
#include "clustertree/errors.hpp"
#include "clustertree/level_tree.hpp"
#include "clustertree/merge_metric.hpp"
#include "clustertree/regions.hpp"
#include "clustertree/shifted_grid.hpp"

namespace clustertree {

inline CellSup sup_on_cell(const DensitySpec& spec, const CellId& cell, const ShiftedGrid& grid,
                           int samples_per_axis) {
  if (spec.dim() != grid.dim()) throw PreconditionError("density and grid dimensions differ");
  return spec.sup_on_box(grid.cell_box(cell), samples_per_axis);
}

/// Piecewise-constant approximation g of a density on a shifted grid.
struct Discretization {
  RegionComplex<double> complex;
  double eta = 0.0;
  double scale = 0.0;
  int samples_per_axis = 0;
  double sampling_slack = 0.0;   // max certified_upper - lower over all scanned cells
  double max_oscillation = 0.0;  // max oscillation bound over kept cells
  double sup_norm_bound = 0.0;   // certified bound on ||f - g||_inf
  ClassReport report;
};

/// Keeps every cell whose sampled supremum reaches `eta` and gives it that
/// sampled value as its level. On kept cells |f - g| is at most the cell
/// oscillation; elsewhere f < eta + slack. Errors when nothing is kept or the
/// kept cells do not form a connected, internally connected complex.
inline Discretization discretize(const DensitySpec& spec, double eta, double grid_scale,
                                 int samples_per_axis) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw PreconditionError("eta must be positive");
  if (samples_per_axis < 2) throw PreconditionError("samples per axis must be at least 2");
  ShiftedGrid grid(spec.dim(), grid_scale);
  auto box = spec.support_box(eta);
  if (!box) throw PreconditionError("empty support: eta exceeds the density maximum");

  const double tpu = double(grid.ticks_per_unit());
  std::vector<std::int64_t> lo(spec.dim()), hi(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    lo[i] = std::int64_t(std::floor(box->lo[i] / grid_scale * tpu));
    hi[i] = std::int64_t(std::ceil(box->hi[i] / grid_scale * tpu));
  }

  Discretization out;
  out.eta = eta;
  out.scale = grid_scale;
  out.samples_per_axis = samples_per_axis;
  std::vector<CellLevel<double>> kept;
  for (const CellId& cell : grid.cells_meeting(lo, hi)) {
    CellSup s = sup_on_cell(spec, cell, grid, samples_per_axis);
    out.sampling_slack = std::max(out.sampling_slack, s.certified_upper - s.lower);
    if (s.lower < eta) continue;
    out.max_oscillation = std::max(out.max_oscillation, spec.oscillation_bound(grid.cell_box(cell)));
    kept.push_back({cell, s.lower, std::nullopt});
  }
  if (kept.empty()) throw PreconditionError("empty support: no cell reaches eta");
  std::sort(kept.begin(), kept.end(),
            [](const CellLevel<double>& a, const CellLevel<double>& b) { return a.cell < b.cell; });

  out.complex = RegionComplex<double>::from_cells(std::move(kept), grid);
  out.report = classify(out.complex);
  if (!out.report.in_F)
    throw PreconditionError("discretized support is disconnected (" + out.report.witness +
                            "); lower eta or refine the grid");
  if (!out.report.in_F_int)
    throw InvariantError("shifted-grid complex lost the internally connected property: " +
                         out.report.witness);
  out.sup_norm_bound = std::max(out.max_oscillation, eta + out.sampling_slack);
  return out;
}

/// Density of a discretization at a point (zero off the kept cells).
inline double evaluate(const RegionComplex<double>& g, std::span<const double> x) {
  auto idx = g.index_at(x);
  return idx ? g.level(*idx) : 0.0;
}

/// max |f - g| over the given points: a lower bound on ||f - g||_inf.
inline double sampled_sup_norm(const DensitySpec& f, const RegionComplex<double>& g,
                               std::span<const Point> points) {
  double best = 0.0;
  for (const Point& p : points) best = std::max(best, std::abs(f(p) - evaluate(g, p)));
  return best;
}

inline std::vector<Point> uniform_points(const Box& box, std::size_t count, std::mt19937_64& rng) {
  std::vector<Point> out(count, Point(box.lo.size()));
  for (auto& p : out)
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
  return out;
}

/// Ground-truth merge heights of a one-dimensional density: the merge height
/// of x and y is the minimum of f over [x, y]. Gaussian mixtures are scanned
/// on a dense grid (range minimum over a sparse table); box mixtures are
/// evaluated exactly at their breakpoints.
class IntervalMinOracle {
 public:
  IntervalMinOracle(const DensitySpec& spec, double lo, double hi, double step)
      : spec_(&spec), lo_(lo), step_(step) {
    if (spec.dim() != 1) throw PreconditionError("interval-min oracle is one-dimensional");
    if (!(hi > lo) || !(step > 0.0)) throw PreconditionError("bad oracle range");
    if (spec.is_gaussian()) {
      std::size_t n = std::size_t(std::ceil((hi - lo) / step)) + 1;
      std::vector<double> level0(n);
      for (std::size_t i = 0; i < n; ++i) {
        double x = lo + double(i) * step;
        level0[i] = spec(std::span<const double>(&x, 1));
      }
      table_.push_back(std::move(level0));
      for (std::size_t w = 1; 2 * w <= n; w *= 2) {
        const auto& prev = table_.back();
        std::vector<double> next(n - 2 * w + 1);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + w]);
        table_.push_back(std::move(next));
      }
    } else {
      for (const Box& b : std::get<BoxMixture>(spec.family()).boxes) {
        breaks_.push_back(b.lo[0]);
        breaks_.push_back(b.hi[0]);
      }
      std::sort(breaks_.begin(), breaks_.end());
    }
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    double a = std::min(x[0], y[0]), b = std::max(x[0], y[0]);
    const DensitySpec& f = *spec_;
    double best = std::min(f(std::span<const double>(&a, 1)), f(std::span<const double>(&b, 1)));
    if (!table_.empty()) {
      // Grid nodes strictly inside [a, b].
      auto first = std::int64_t(std::floor((a - lo_) / step_)) + 1;
      auto last = std::int64_t(std::ceil((b - lo_) / step_)) - 1;
      first = std::max<std::int64_t>(first, 0);
      last = std::min<std::int64_t>(last, std::int64_t(table_[0].size()) - 1);
      if (first <= last) {
        std::size_t len = std::size_t(last - first + 1);
        std::size_t k = 0;
        while ((std::size_t{2} << k) <= len) ++k;
        best = std::min({best, table_[k][std::size_t(first)],
                         table_[k][std::size_t(last) + 1 - (std::size_t{1} << k)]});
      }
    } else {
      for (double t : breaks_)
        if (a <= t && t <= b) best = std::min(best, f(std::span<const double>(&t, 1)));
    }
    return best;
  }

 private:
  const DensitySpec* spec_;
  double lo_;
  double step_;
  std::vector<std::vector<double>> table_;
  std::vector<double> breaks_;
};

struct ConvergenceRow {
  double scale = 0.0;
  double eta_used = 0.0;
  double sup_norm_bound = 0.0;
  double sup_norm_sampled = 0.0;
  double d_M_to_truth = 0.0;
  std::size_t cell_count = 0;
  bool in_F_int = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool within_bounds = true;  // every row: d_M_to_truth <= sup_norm_bound
  bool d_M_non_increasing = true;

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "scale,eta_used,sup_norm_bound,sup_norm_sampled,d_M_to_truth,cell_count,in_F_int\n";
    for (const auto& r : rows)
      os << r.scale << ',' << r.eta_used << ',' << r.sup_norm_bound << ',' << r.sup_norm_sampled
         << ',' << r.d_M_to_truth << ',' << r.cell_count << ',' << (r.in_F_int ? "true" : "false")
         << '\n';
    return os.str();
  }
};

struct ConvergenceOptions {
  int samples_per_axis = 11;
  // Connectivity threshold for the upper eta-level set, asserted by the
  // caller. eta is min(L * scale * sqrt(d), max_eta).
  std::optional<double> max_eta;
  std::size_t sup_samples = 10000;
  double truth_step = 1e-3;
};

/// Discretizes at each scale, builds the Hartigan tree of the approximation
/// and measures its sampled merge distortion to the exact merge heights of
/// the density. One-dimensional densities only (interval-min truth).
inline ConvergenceReport convergence_experiment(const DensitySpec& spec,
                                                std::span<const double> scales,
                                                std::size_t pair_samples, std::uint64_t seed,
                                                const ConvergenceOptions& options = {}) {
  if (spec.dim() != 1)
    throw PreconditionError("no ground-truth merge heights for dimension " +
                            std::to_string(spec.dim()));
  if (scales.empty()) throw PreconditionError("no scales given");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
      throw PreconditionError("scales must be positive and finite");
    if (i > 0 && !(scales[i] < scales[i - 1]))
      throw PreconditionError("scales must be strictly decreasing");
  }
  const double L = spec.lipschitz_bound();
  auto eta_for = [&](double scale) {
    double eta = L * scale * std::sqrt(double(spec.dim()));
    if (options.max_eta) eta = eta > 0.0 ? std::min(eta, *options.max_eta) : *options.max_eta;
    if (!(eta > 0.0)) throw PreconditionError("eta is zero; pass max_eta for this density");
    return eta;
  };

  // One sample domain for all rows so the rows see identical point pairs.
  double smallest_eta = eta_for(scales.back());
  auto domain = spec.support_box(smallest_eta);
  if (!domain) throw PreconditionError("empty support");
  const double margin = 0.1 * (domain->hi[0] - domain->lo[0]);
  domain->lo[0] -= margin;
  domain->hi[0] += margin;

  std::mt19937_64 rng(seed);
  auto firsts = uniform_points(*domain, pair_samples, rng);
  auto seconds = uniform_points(*domain, pair_samples, rng);
  std::vector<PointPair> pairs;
  for (std::size_t k = 0; k < pair_samples; ++k) pairs.push_back({firsts[k], seconds[k]});
  auto sup_points = uniform_points(*domain, options.sup_samples, rng);

  IntervalMinOracle truth(spec, domain->lo[0], domain->hi[0], options.truth_step);

  ConvergenceReport report;
  for (double scale : scales) {
    ConvergenceRow row;
    row.scale = scale;
    row.eta_used = eta_for(scale);
    Discretization g = discretize(spec, row.eta_used, scale, options.samples_per_axis);
    row.sup_norm_bound = g.sup_norm_bound;
    row.sup_norm_sampled = sampled_sup_norm(spec, g.complex, sup_points);
    row.cell_count = g.complex.size();
    row.in_F_int = g.report.in_F_int;
    Dendrogram<double> tree = sweep_tree(g.complex, Adjacency::touch);
    row.d_M_to_truth =
        sampled_distortion(std::span<const PointPair>(pairs),
                           PointMergeHeights<double>(tree, g.complex), truth)
            .value;
    if (!(row.d_M_to_truth <= row.sup_norm_bound)) report.within_bounds = false;
    if (!report.rows.empty() && row.d_M_to_truth > report.rows.back().d_M_to_truth)
      report.d_M_non_increasing = false;
    report.rows.push_back(row);
  }
  return report;
}

struct SplitResult {
  Discretization discretization;
  Dendrogram<double> tree;
  double split_height = 0.0;
  std::size_t split_node = 0;
};

/// Locates the level at which the upper level set of a bimodal density
/// splits: the merge height of the cells holding the two modes. Modes come
/// from the spec, or else from the means of the two heaviest components.
inline SplitResult split_fixture(const DensitySpec& spec, double scale, double eta,
                                 int samples_per_axis = 11) {
  std::vector<std::vector<double>> modes = spec.modes();
  if (modes.size() < 2) {
    const auto* g = std::get_if<GaussianMixture>(&spec.family());
    if (!g || g->weights.size() < 2) throw PreconditionError("no split: density is unimodal");
    std::vector<std::size_t> order(g->weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g->weights[a] > g->weights[b]; });
    modes = {g->means[order[0]], g->means[order[1]]};
  }
  SplitResult out{discretize(spec, eta, scale, samples_per_axis), {}, 0.0, 0};
  out.tree = sweep_tree(out.discretization.complex, Adjacency::touch);
  auto a = out.discretization.complex.region_at(modes[0]);
  auto b = out.discretization.complex.region_at(modes[1]);
  if (!a || !b) throw PreconditionError("no split: a mode lies outside the discretized support");
  detail::LcaIndex<double> index(out.tree);
  const auto& dom = out.tree.domain();
  std::size_t ra = detail::domain_index(dom, *a), rb = detail::domain_index(dom, *b);
  auto node = index.lca(out.tree, ra, rb);
  if (!node) throw InvariantError("modes are in different trees of a connected complex");
  if (*node == *index.deepest[ra] || *node == *index.deepest[rb])
    throw PreconditionError("no split: the modes are not separated in the tree");
  out.split_node = *node;
  out.split_height = out.tree.node(*node).height;
  return out;
}

}  // namespace clustertree
