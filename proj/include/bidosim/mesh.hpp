#pragma once

// Uniform tensor-product grids on [0,Lx] (x [0,Ly]) with trapezoidal quadrature,
// plus the discrete H, V and L4 functionals everything else is built on.
//
// Conventions:
//   * nodes_per_axis counts nodes including both endpoints (>= 3), same on each axis
//   * 2-D node ordering is row-major: idx = iy * nx + ix
//   * H inner product is the quadrature-weighted dot product; V adds one-sided /
//     central difference gradients on top.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidosim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Grid {
  int dimension = 1;                  // 1 or 2
  std::array<double, 2> extent{};     // domain lengths (extent[1] unused in 1-D)
  int nodes_per_axis = 3;
  std::array<double, 2> spacing{};    // h per axis
  Vec quadrature_weight;              // one trapezoid weight per node

  int nx() const { return nodes_per_axis; }
  int ny() const { return dimension == 2 ? nodes_per_axis : 1; }
  int size() const { return nx() * ny(); }
  int index(int ix, int iy) const { return iy * nx() + ix; }
  double x(int ix) const { return ix * spacing[0]; }
  double y(int iy) const { return iy * spacing[1]; }
  double measure() const {
    return dimension == 2 ? extent[0] * extent[1] : extent[0];
  }
  bool same_layout(const Grid& o) const {
    return dimension == o.dimension && nodes_per_axis == o.nodes_per_axis &&
           extent[0] == o.extent[0] && (dimension == 1 || extent[1] == o.extent[1]);
  }
};

using GridPtr = std::shared_ptr<const Grid>;

// A nodal scalar field bound to its grid.
struct Field {
  GridPtr grid;
  Vec values;

  Field() = default;
  Field(GridPtr g, Vec v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("Field: null grid");
    if (values.size() != grid->size())
      throw std::invalid_argument("Field: value count does not match grid");
  }
};

namespace detail {

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!a.grid || !b.grid || !a.grid->same_layout(*b.grid))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace detail

inline GridPtr make_grid(int dimension, const std::vector<double>& extent,
                         int nodes_per_axis) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("make_grid: dimension must be 1 or 2");
  if (nodes_per_axis < 3)
    throw std::invalid_argument("make_grid: need at least 3 nodes per axis");
  if (extent.size() != static_cast<size_t>(dimension))
    throw std::invalid_argument("make_grid: extent entries must match dimension");
  for (double L : extent)
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("make_grid: extent must be positive and finite");

  auto g = std::make_shared<Grid>();
  g->dimension = dimension;
  g->nodes_per_axis = nodes_per_axis;
  g->extent[0] = extent[0];
  g->extent[1] = dimension == 2 ? extent[1] : 0.0;
  g->spacing[0] = extent[0] / (nodes_per_axis - 1);
  g->spacing[1] = dimension == 2 ? extent[1] / (nodes_per_axis - 1) : 0.0;

  const int n = nodes_per_axis;
  auto axis_w = [n](double h, int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
  g->quadrature_weight.resize(g->size());
  if (dimension == 1) {
    for (int i = 0; i < n; ++i) g->quadrature_weight[i] = axis_w(g->spacing[0], i);
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        g->quadrature_weight[g->index(ix, iy)] =
            axis_w(g->spacing[0], ix) * axis_w(g->spacing[1], iy);
  }
  return g;
}

inline GridPtr make_grid(int dimension, double extent, int nodes_per_axis) {
  std::vector<double> e(static_cast<size_t>(dimension), extent);
  return make_grid(dimension, e, nodes_per_axis);
}

inline Field make_field(GridPtr grid, double value = 0.0) {
  if (!grid) throw std::invalid_argument("make_field: null grid");
  return Field(grid, Vec::Constant(grid->size(), value));
}

template <typename F>
Field make_field_from(GridPtr grid, F&& fn) {
  if (!grid) throw std::invalid_argument("make_field_from: null grid");
  Vec v(grid->size());
  if (grid->dimension == 1) {
    for (int i = 0; i < grid->size(); ++i) v[i] = fn(grid->x(i), 0.0);
  } else {
    for (int iy = 0; iy < grid->ny(); ++iy)
      for (int ix = 0; ix < grid->nx(); ++ix)
        v[grid->index(ix, iy)] = fn(grid->x(ix), grid->y(iy));
  }
  return Field(std::move(grid), std::move(v));
}

inline double inner_product_h(const Field& a, const Field& b) {
  detail::require_same_grid(a, b, "inner_product_h");
  return a.values.cwiseProduct(b.values).dot(a.grid->quadrature_weight);
}

inline double norm_h_sq(const Field& a) { return inner_product_h(a, a); }
inline double norm_h(const Field& a) { return std::sqrt(std::max(0.0, norm_h_sq(a))); }

// Nodal difference gradient along one axis: one-sided at the boundary nodes,
// central in the interior. Returns plain values (same grid).
inline Vec gradient_axis(const Grid& g, const Vec& v, int axis) {
  if (axis < 0 || axis >= g.dimension)
    throw std::invalid_argument("gradient_axis: axis out of range");
  const int n = g.nodes_per_axis;
  const double h = g.spacing[axis];
  Vec out(v.size());
  auto diff_line = [&](auto value, auto store) {
    store(0, (value(1) - value(0)) / h);
    for (int i = 1; i < n - 1; ++i) store(i, (value(i + 1) - value(i - 1)) / (2 * h));
    store(n - 1, (value(n - 1) - value(n - 2)) / h);
  };
  if (g.dimension == 1) {
    diff_line([&](int i) { return v[i]; }, [&](int i, double d) { out[i] = d; });
    return out;
  }
  if (axis == 0) {
    for (int iy = 0; iy < n; ++iy)
      diff_line([&](int i) { return v[g.index(i, iy)]; },
                [&](int i, double d) { out[g.index(i, iy)] = d; });
  } else {
    for (int ix = 0; ix < n; ++ix)
      diff_line([&](int i) { return v[g.index(ix, i)]; },
                [&](int i, double d) { out[g.index(ix, i)] = d; });
  }
  return out;
}

// Discrete V inner product: (a,b)_H + sum_axis (da,db)_H.
inline double inner_product_v(const Field& a, const Field& b) {
  detail::require_same_grid(a, b, "inner_product_v");
  const Grid& g = *a.grid;
  double s = inner_product_h(a, b);
  for (int axis = 0; axis < g.dimension; ++axis) {
    Vec da = gradient_axis(g, a.values, axis);
    Vec db = gradient_axis(g, b.values, axis);
    s += da.cwiseProduct(db).dot(g.quadrature_weight);
  }
  return s;
}

inline double norm_v_sq(const Field& a) { return inner_product_v(a, a); }

inline double norm_l4(const Field& a) {
  if (!a.grid) throw std::invalid_argument("norm_l4: null grid");
  const Vec sq = a.values.cwiseProduct(a.values);
  double q = sq.cwiseProduct(sq).dot(a.grid->quadrature_weight);
  return std::pow(std::max(0.0, q), 0.25);
}

// Remove the quadrature-weighted mean: u - (1/|D|) (u, 1)_H.
inline Field mean_zero_project(const Field& a) {
  if (!a.grid) throw std::invalid_argument("mean_zero_project: null grid");
  const double mean =
      a.values.dot(a.grid->quadrature_weight) / a.grid->measure();
  return Field(a.grid, a.values.array() - mean);
}

}  // namespace bidosim
