#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clustertree/errors.hpp"
#include "clustertree/shifted_grid.hpp"

namespace clustertree {

/// Isotropic Gaussian mixture: sum_k w_k N(mean_k, scale_k^2 I).
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<double> scales;
};

/// Mixture of uniform densities on half-open boxes.
struct BoxMixture {
  std::vector<double> weights;
  std::vector<Box> boxes;
};

/// Bounds on the supremum of a density over one cell.
struct CellSup {
  double lower = 0.0;            // attained at a sampled point of the closed cell
  double certified_upper = 0.0;  // true supremum is at most this
};

/// Analytic density with an evaluation oracle and a Lipschitz certificate.
class DensitySpec {
 public:
  using Family = std::variant<GaussianMixture, BoxMixture>;

  static DensitySpec gaussian_mixture(int dim, GaussianMixture mix,
                                      std::optional<double> lipschitz = std::nullopt,
                                      std::vector<std::vector<double>> modes = {}) {
    DensitySpec s(dim);
    const std::size_t n = mix.weights.size();
    if (n == 0 || mix.means.size() != n || mix.scales.size() != n)
      throw PreconditionError("gaussian mixture needs matching weights, means and scales");
    for (std::size_t k = 0; k < n; ++k) {
      if (mix.means[k].size() != std::size_t(dim))
        throw PreconditionError("mixture mean has the wrong dimension");
      if (!(mix.scales[k] > 0.0)) throw PreconditionError("mixture scales must be positive");
    }
    s.check_weights(mix.weights);
    double bound = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // max |grad N(mu, s^2 I)| = peak * exp(-1/2) / s, attained at distance s
      bound += mix.weights[k] * s.peak(mix.scales[k]) * std::exp(-0.5) / mix.scales[k];
    }
    if (lipschitz) {
      if (!(*lipschitz > 0.0)) throw PreconditionError("lipschitz bound must be positive");
      bound = *lipschitz;
    }
    s.lipschitz_ = bound;
    s.family_ = std::move(mix);
    s.set_modes(std::move(modes));
    return s;
  }

  static DensitySpec box_mixture(int dim, BoxMixture mix,
                                 std::vector<std::vector<double>> modes = {}) {
    DensitySpec s(dim);
    if (mix.weights.empty() || mix.weights.size() != mix.boxes.size())
      throw PreconditionError("box mixture needs one weight per box");
    for (const Box& b : mix.boxes) {
      if (b.lo.size() != std::size_t(dim) || b.hi.size() != std::size_t(dim))
        throw PreconditionError("mixture box has the wrong dimension");
      for (int i = 0; i < dim; ++i)
        if (!(b.lo[i] < b.hi[i])) throw PreconditionError("mixture box is empty");
    }
    s.check_weights(mix.weights);
    s.family_ = std::move(mix);
    s.set_modes(std::move(modes));
    return s;
  }

  int dim() const { return dim_; }
  const Family& family() const { return family_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianMixture>(family_); }

  /// Certified Lipschitz constant. Box mixtures are discontinuous; their cell
  /// bounds are exact and do not use it, so it is reported as zero.
  double lipschitz_bound() const { return lipschitz_; }

  const std::vector<std::vector<double>>& modes() const { return modes_; }

  double operator()(std::span<const double> x) const {
    if (x.size() != std::size_t(dim_)) throw PreconditionError("point has the wrong dimension");
    if (const auto* g = std::get_if<GaussianMixture>(&family_)) {
      double total = 0.0;
      for (std::size_t k = 0; k < g->weights.size(); ++k) {
        double r2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
          double t = x[i] - g->means[k][i];
          r2 += t * t;
        }
        const double s = g->scales[k];
        total += g->weights[k] * peak(s) * std::exp(-0.5 * r2 / (s * s));
      }
      return total;
    }
    const auto& b = std::get<BoxMixture>(family_);
    double total = 0.0;
    for (std::size_t k = 0; k < b.weights.size(); ++k)
      if (inside(b.boxes[k], x)) total += b.weights[k] / volume(b.boxes[k]);
    return total;
  }

  double max_value_bound() const {
    if (const auto* g = std::get_if<GaussianMixture>(&family_)) {
      double p = 0.0;
      for (std::size_t k = 0; k < g->weights.size(); ++k) p += g->weights[k] * peak(g->scales[k]);
      return p;
    }
    const auto& b = std::get<BoxMixture>(family_);
    double p = 0.0;
    for (std::size_t k = 0; k < b.weights.size(); ++k) p += b.weights[k] / volume(b.boxes[k]);
    return p;
  }

  /// A box outside of which f < eta, or nullopt when f < eta everywhere.
  std::optional<Box> support_box(double eta) const {
    if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
    const double top = max_value_bound();
    if (top < eta) return std::nullopt;
    Box box{std::vector<double>(dim_, HUGE_VAL), std::vector<double>(dim_, -HUGE_VAL)};
    auto grow = [&](std::span<const double> lo, std::span<const double> hi) {
      for (int i = 0; i < dim_; ++i) {
        box.lo[i] = std::min(box.lo[i], lo[i]);
        box.hi[i] = std::max(box.hi[i], hi[i]);
      }
    };
    if (const auto* g = std::get_if<GaussianMixture>(&family_)) {
      // Outside radius r_k every term is below w_k peak_k eta / top, so the
      // sum is below eta.
      for (std::size_t k = 0; k < g->weights.size(); ++k) {
        double r = g->scales[k] * std::sqrt(2.0 * std::log(top / eta)) + 1e-9;
        std::vector<double> lo(g->means[k]), hi(g->means[k]);
        for (int i = 0; i < dim_; ++i) {
          lo[i] -= r;
          hi[i] += r;
        }
        grow(lo, hi);
      }
    } else {
      for (const Box& b : std::get<BoxMixture>(family_).boxes) grow(b.lo, b.hi);
    }
    return box;
  }

  /// Supremum bounds over the closed box `cell` using a k^d sample lattice
  /// that includes the corners. Exact for box mixtures.
  CellSup sup_on_box(const Box& cell, int k) const {
    if (k < 2) throw PreconditionError("samples per axis must be at least 2");
    if (!is_gaussian()) {
      double v = extreme_on_box(cell, true);
      return {v, v};
    }
    double best = -HUGE_VAL;
    std::vector<int> at(dim_, 0);
    std::vector<double> p(dim_);
    double side = 0.0;
    while (true) {
      for (int i = 0; i < dim_; ++i) {
        double t = double(at[i]) / double(k - 1);
        p[i] = cell.lo[i] + t * (cell.hi[i] - cell.lo[i]);
      }
      best = std::max(best, (*this)(p));
      int i = 0;
      while (i < dim_ && ++at[i] == k) at[i++] = 0;
      if (i == dim_) break;
    }
    for (int i = 0; i < dim_; ++i) side = std::max(side, cell.hi[i] - cell.lo[i]);
    const double diameter = side * std::sqrt(double(dim_));
    return {best, best + lipschitz_ * diameter / double(k - 1)};
  }

  /// Upper bound on sup - inf of f over the half-open box.
  double oscillation_bound(const Box& cell) const {
    if (!is_gaussian()) return extreme_on_box(cell, true) - extreme_on_box(cell, false);
    double diam2 = 0.0;
    for (int i = 0; i < dim_; ++i) diam2 += (cell.hi[i] - cell.lo[i]) * (cell.hi[i] - cell.lo[i]);
    return lipschitz_ * std::sqrt(diam2);
  }

 private:
  explicit DensitySpec(int dim) : dim_(dim) {
    if (dim < 1 || dim > ShiftedGrid::kMaxDim) throw PreconditionError("bad density dimension");
  }

  void check_weights(const std::vector<double>& w) const {
    double sum = 0.0;
    for (double x : w) {
      if (!(x > 0.0)) throw PreconditionError("mixture weights must be positive");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw PreconditionError("mixture weights must sum to 1");
  }

  void set_modes(std::vector<std::vector<double>> modes) {
    for (const auto& m : modes)
      if (m.size() != std::size_t(dim_)) throw PreconditionError("mode has the wrong dimension");
    modes_ = std::move(modes);
  }

  double peak(double s) const {
    return std::pow(2.0 * std::numbers::pi * s * s, -0.5 * dim_);
  }

  static bool inside(const Box& b, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(b.lo[i] <= x[i] && x[i] < b.hi[i])) return false;
    return true;
  }

  static double volume(const Box& b) {
    double v = 1.0;
    for (std::size_t i = 0; i < b.lo.size(); ++i) v *= b.hi[i] - b.lo[i];
    return v;
  }

  // Max (or min) of a box mixture over a half-open cell. The density is
  // constant on the sub-boxes cut by mixture box faces, so evaluating at each
  // sub-box's lower corner is exact.
  double extreme_on_box(const Box& cell, bool want_max) const {
    const auto& mix = std::get<BoxMixture>(family_);
    std::vector<std::vector<double>> cuts(dim_);
    for (int i = 0; i < dim_; ++i) {
      cuts[i] = {cell.lo[i]};
      for (const Box& b : mix.boxes)
        for (double x : {b.lo[i], b.hi[i]})
          if (cell.lo[i] < x && x < cell.hi[i]) cuts[i].push_back(x);
      std::sort(cuts[i].begin(), cuts[i].end());
      cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
    }
    double best = want_max ? -HUGE_VAL : HUGE_VAL;
    std::vector<std::size_t> at(dim_, 0);
    std::vector<double> p(dim_);
    while (true) {
      for (int i = 0; i < dim_; ++i) p[i] = cuts[i][at[i]];
      double v = (*this)(p);
      best = want_max ? std::max(best, v) : std::min(best, v);
      int i = 0;
      while (i < dim_ && ++at[i] == cuts[i].size()) at[i++] = 0;
      if (i == dim_) break;
    }
    return best;
  }

  int dim_;
  double lipschitz_ = 0.0;
  Family family_;
  std::vector<std::vector<double>> modes_;
};

}  // namespace clustertree
