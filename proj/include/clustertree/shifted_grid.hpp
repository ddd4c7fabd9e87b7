#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "clustertree/errors.hpp"

namespace clustertree {

/// Lattice anchor of a shifted-grid cell, stored in integer ticks.
///
/// A tick is 2^-(dim-1) of a cell side, so every shift used by the lattice
/// recursion is an exact integer. For dim = 2 a tick is one half.
struct CellId {
  std::vector<std::int64_t> ticks;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

struct CellIdHash {
  std::size_t operator()(const CellId& c) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto t : c.ticks)
      h ^= std::hash<std::int64_t>{}(t) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Axis-aligned box. Cells are half-open [lo, hi); closures are [lo, hi].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

inline bool is_odd(std::int64_t v) { return (v % 2) != 0; }

}  // namespace detail

/// Shifted-lattice partition of R^d into half-open cubes of side `scale`.
///
/// Layer k (cells with anchor coordinate k in {2m, 2m+1}) holds a copy of the
/// (k)-dimensional partition; odd layers shift that copy by 2^-(k-i) along
/// each lower axis i. In one and two dimensions this is the usual brick wall.
/// The shifts are chosen so that two cells whose closures meet always share a
/// (d-1)-dimensional face portion of positive measure.
class ShiftedGrid {
 public:
  static constexpr int kMaxDim = 24;

  ShiftedGrid(int dim, double scale) : dim_(dim), scale_(scale) {
    if (dim < 1 || dim > kMaxDim)
      throw PreconditionError("grid dimension must be in [1, " +
                              std::to_string(kMaxDim) + "]");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw PreconditionError("grid scale must be positive and finite");
  }

  int dim() const { return dim_; }
  double scale() const { return scale_; }
  double cell_diameter() const { return scale_ * std::sqrt(double(dim_)); }

  std::int64_t ticks_per_unit() const { return std::int64_t{1} << (dim_ - 1); }

  // Shift of lower axis `axis` inside an odd layer of axis `layer_axis`.
  std::int64_t shift_ticks(int layer_axis, int axis) const {
    return ticks_per_unit() >> (layer_axis - axis);
  }

  bool is_anchor(const CellId& c) const {
    if (c.ticks.size() != std::size_t(dim_)) return false;
    std::vector<std::int64_t> x = c.ticks;
    for (int k = dim_ - 1; k >= 0; --k) {
      if (x[k] % ticks_per_unit() != 0) return false;
      if (k > 0 && detail::is_odd(x[k] / ticks_per_unit()))
        for (int i = 0; i < k; ++i) x[i] += shift_ticks(k, i);
    }
    return true;
  }

  /// Converts anchor coordinates in cell units (0.5, -1.25, ...) to ticks.
  CellId anchor_from_units(std::span<const double> units) const {
    check_dim(units.size());
    CellId c;
    c.ticks.reserve(units.size());
    const double tpu = double(ticks_per_unit());
    for (double u : units) {
      double t = u * tpu;
      if (!std::isfinite(t) || t != std::floor(t) || std::fabs(t) > 9.0e15)
        throw PreconditionError("anchor coordinate is not on the tick lattice");
      c.ticks.push_back(std::int64_t(t));
    }
    return c;
  }

  std::vector<double> anchor_units(const CellId& c) const {
    std::vector<double> u;
    u.reserve(c.ticks.size());
    for (auto t : c.ticks) u.push_back(double(t) / double(ticks_per_unit()));
    return u;
  }

  /// Unique cell whose half-open box contains `point`.
  CellId cell_of(std::span<const double> point) const {
    check_dim(point.size());
    const std::int64_t tpu = ticks_per_unit();
    std::vector<std::int64_t> acc(dim_, 0);
    CellId c;
    c.ticks.assign(dim_, 0);
    for (int k = dim_ - 1; k >= 0; --k) {
      double shifted = point[k] / scale_ + double(acc[k]) / double(tpu);
      auto m = static_cast<std::int64_t>(std::floor(shifted));
      c.ticks[k] = m * tpu - acc[k];
      if (k > 0 && detail::is_odd(m))
        for (int i = 0; i < k; ++i) acc[i] += shift_ticks(k, i);
    }
    return c;
  }

  Box cell_box(const CellId& c) const {
    check_anchor(c);
    Box b;
    b.lo.reserve(dim_);
    b.hi.reserve(dim_);
    for (auto t : c.ticks) {
      double lo = double(t) / double(ticks_per_unit()) * scale_;
      b.lo.push_back(lo);
      b.hi.push_back(lo + scale_);
    }
    return b;
  }

  bool contains(const CellId& c, std::span<const double> point) const {
    Box b = cell_box(c);
    for (int i = 0; i < dim_; ++i)
      if (!(b.lo[i] <= point[i] && point[i] < b.hi[i])) return false;
    return true;
  }

  /// All cells whose closed boxes meet the closed tick box [lo, hi].
  std::vector<CellId> cells_meeting(std::span<const std::int64_t> lo,
                                    std::span<const std::int64_t> hi) const {
    check_dim(lo.size());
    check_dim(hi.size());
    std::vector<CellId> out;
    std::vector<std::int64_t> anchor(dim_, 0);
    std::vector<std::int64_t> acc(dim_, 0);
    meet(dim_ - 1, lo, hi, acc, anchor, out);
    return out;
  }

  /// Cells whose closures intersect the closure of `c` (excluding `c`).
  std::vector<CellId> cell_touching(const CellId& c) const {
    check_anchor(c);
    std::vector<std::int64_t> hi(c.ticks);
    for (auto& t : hi) t += ticks_per_unit();
    auto all = cells_meeting(c.ticks, hi);
    std::erase(all, c);
    return all;
  }

  /// Cells sharing a (d-1)-face portion of positive measure with `c`.
  std::vector<CellId> cell_neighbors(const CellId& c) const {
    auto touching = cell_touching(c);
    std::erase_if(touching, [&](const CellId& o) { return !shares_facet(c, o); });
    return touching;
  }

  /// Number of axes along which the closed boxes of `a` and `b` overlap in a
  /// single point, or -1 when the closures are disjoint.
  int contact_codimension(const CellId& a, const CellId& b) const {
    const std::int64_t tpu = ticks_per_unit();
    int degenerate = 0;
    for (int i = 0; i < dim_; ++i) {
      std::int64_t lo = std::max(a.ticks[i], b.ticks[i]);
      std::int64_t hi = std::min(a.ticks[i], b.ticks[i]) + tpu;
      if (lo > hi) return -1;
      if (lo == hi) ++degenerate;
    }
    return degenerate;
  }

  bool shares_facet(const CellId& a, const CellId& b) const {
    return contact_codimension(a, b) == 1;
  }

 private:
  void check_dim(std::size_t n) const {
    if (n != std::size_t(dim_))
      throw PreconditionError("expected " + std::to_string(dim_) +
                              " coordinates, got " + std::to_string(n));
  }

  void check_anchor(const CellId& c) const {
    check_dim(c.ticks.size());
    if (!is_anchor(c)) throw PreconditionError("not a lattice anchor");
  }

  void meet(int k, std::span<const std::int64_t> lo,
            std::span<const std::int64_t> hi, std::vector<std::int64_t>& acc,
            std::vector<std::int64_t>& anchor, std::vector<CellId>& out) const {
    const std::int64_t tpu = ticks_per_unit();
    const std::int64_t a = lo[k] + acc[k];
    const std::int64_t b = hi[k] + acc[k];
    const std::int64_t first = detail::ceil_div(a - tpu, tpu);
    const std::int64_t last = detail::floor_div(b, tpu);
    for (std::int64_t m = first; m <= last; ++m) {
      anchor[k] = m * tpu - acc[k];
      if (k == 0) {
        out.push_back(CellId{anchor});
        continue;
      }
      const bool odd = detail::is_odd(m);
      if (odd)
        for (int i = 0; i < k; ++i) acc[i] += shift_ticks(k, i);
      meet(k - 1, lo, hi, acc, anchor, out);
      if (odd)
        for (int i = 0; i < k; ++i) acc[i] -= shift_ticks(k, i);
    }
  }

  int dim_;
  double scale_;
};

/// Lattice membership for anchor coordinates given in cell units.
inline bool is_lattice_anchor(std::span<const double> coords, int dim) {
  if (coords.size() != std::size_t(dim))
    throw PreconditionError("coordinate count does not match dimension");
  ShiftedGrid grid(dim, 1.0);
  try {
    return grid.is_anchor(grid.anchor_from_units(coords));
  } catch (const PreconditionError&) {
    return false;
  }
}

}  // namespace clustertree
