#pragma once

// Conductivity tensors and the weak-form assembly of -div(sigma grad .) with
// homogeneous Neumann boundaries on the uniform tensor grids from mesh.hpp.
//
// The assembled object stores the quadrature-weighted stiffness matrix K:
//   * K is symmetric positive semidefinite and annihilates constants,
//   * the nodal operator action is W^{-1} K (W = diag of trapezoid weights),
//   * the bilinear form a(u,v) = u^T K v.
// Fluxes use two-point differences per edge with harmonic face averages of the
// diagonal tensor entries; the off-diagonal (xy) part is a cell-centered term
// built from central cell-average gradients.

#include <bidosim/mesh.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace bidosim {

// Dense matrices keep the spectral transforms exact; cap the node count so the
// worst case stays comfortably in memory.
inline constexpr int max_dense_nodes = 4096;

struct ConductivitySpec {
  GridPtr grid;
  Vec xx, xy, yy;     // per-node tensor entries; 1-D uses xx only
  double sigma1 = 0;  // ellipticity bounds: sigma1 <= eig(sigma) <= sigma2
  double sigma2 = 0;
};

namespace detail {

inline void conductivity_bounds(ConductivitySpec& spec) {
  const int n = spec.grid->size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n; ++i) {
    double lmin, lmax;
    if (spec.grid->dimension == 1) {
      lmin = lmax = spec.xx[i];
    } else {
      const double m = 0.5 * (spec.xx[i] + spec.yy[i]);
      const double r = std::hypot(0.5 * (spec.xx[i] - spec.yy[i]), spec.xy[i]);
      lmin = m - r;
      lmax = m + r;
    }
    if (!std::isfinite(lmin) || !std::isfinite(lmax))
      throw std::invalid_argument("conductivity: non-finite tensor entry");
    lo = std::min(lo, lmin);
    hi = std::max(hi, lmax);
  }
  if (!(lo > 0))
    throw std::invalid_argument("conductivity: not uniformly elliptic (min eigenvalue <= 0)");
  spec.sigma1 = lo;
  spec.sigma2 = hi;
}

}  // namespace detail

inline ConductivitySpec make_conductivity(GridPtr grid, const Vec& per_node) {
  if (!grid) throw std::invalid_argument("make_conductivity: null grid");
  if (per_node.size() != grid->size())
    throw std::invalid_argument("make_conductivity: value count does not match grid");
  ConductivitySpec spec;
  spec.grid = std::move(grid);
  spec.xx = per_node;
  if (spec.grid->dimension == 2) {
    spec.yy = per_node;
    spec.xy = Vec::Zero(spec.grid->size());
  }
  detail::conductivity_bounds(spec);
  return spec;
}

inline ConductivitySpec make_conductivity(GridPtr grid, double scalar) {
  if (!grid) throw std::invalid_argument("make_conductivity: null grid");
  const int n = grid->size();
  return make_conductivity(std::move(grid), Vec::Constant(n, scalar));
}

inline ConductivitySpec make_conductivity_tensor(GridPtr grid, const Vec& xx,
                                                 const Vec& xy, const Vec& yy) {
  if (!grid) throw std::invalid_argument("make_conductivity_tensor: null grid");
  if (grid->dimension != 2)
    throw std::invalid_argument("make_conductivity_tensor: tensor entries need a 2-D grid");
  const int n = grid->size();
  if (xx.size() != n || xy.size() != n || yy.size() != n)
    throw std::invalid_argument("make_conductivity_tensor: entry count does not match grid");
  ConductivitySpec spec;
  spec.grid = std::move(grid);
  spec.xx = xx;
  spec.xy = xy;
  spec.yy = yy;
  detail::conductivity_bounds(spec);
  return spec;
}

struct EllipticOperator {
  GridPtr grid;
  Mat stiffness;  // symmetric PSD, kernel = constants
  double sigma1 = 0, sigma2 = 0;

  Vec apply(const Vec& u) const {
    return (stiffness * u).cwiseQuotient(grid->quadrature_weight);
  }
  Field apply(const Field& u) const {
    detail::require_same_grid(u, Field(grid, Vec::Zero(grid->size())), "EllipticOperator::apply");
    return Field(grid, apply(u.values));
  }
  double bilinear(const Vec& u, const Vec& v) const { return u.dot(stiffness * v); }
};

inline EllipticOperator assemble_elliptic(const ConductivitySpec& conductivity,
                                          const GridPtr& grid) {
  if (!grid || !conductivity.grid || !conductivity.grid->same_layout(*grid))
    throw std::invalid_argument("assemble_elliptic: grid mismatch");
  const Grid& g = *grid;
  if (g.size() > max_dense_nodes)
    throw std::invalid_argument("assemble_elliptic: grid exceeds dense-operator cap");

  const int n = g.nodes_per_axis;
  Mat K = Mat::Zero(g.size(), g.size());
  auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };

  if (g.dimension == 1) {
    const double h = g.spacing[0];
    for (int i = 0; i + 1 < n; ++i) {
      const double coef = harmonic(conductivity.xx[i], conductivity.xx[i + 1]) / h;
      K(i, i) += coef;
      K(i + 1, i + 1) += coef;
      K(i, i + 1) -= coef;
      K(i + 1, i) -= coef;
    }
  } else {
    const double hx = g.spacing[0], hy = g.spacing[1];
    auto transverse = [n](double h, int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    // x-directed edges
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix + 1 < n; ++ix) {
        const int a = g.index(ix, iy), b = g.index(ix + 1, iy);
        const double coef =
            harmonic(conductivity.xx[a], conductivity.xx[b]) * transverse(hy, iy) / hx;
        K(a, a) += coef;
        K(b, b) += coef;
        K(a, b) -= coef;
        K(b, a) -= coef;
      }
    // y-directed edges
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy + 1 < n; ++iy) {
        const int a = g.index(ix, iy), b = g.index(ix, iy + 1);
        const double coef =
            harmonic(conductivity.yy[a], conductivity.yy[b]) * transverse(hx, ix) / hy;
        K(a, a) += coef;
        K(b, b) += coef;
        K(a, b) -= coef;
        K(b, a) -= coef;
      }
    // cell-centered mixed term from the xy entry
    for (int iy = 0; iy + 1 < n; ++iy)
      for (int ix = 0; ix + 1 < n; ++ix) {
        const int node[4] = {g.index(ix, iy), g.index(ix + 1, iy), g.index(ix, iy + 1),
                             g.index(ix + 1, iy + 1)};
        const double sxy = 0.25 * (conductivity.xy[node[0]] + conductivity.xy[node[1]] +
                                   conductivity.xy[node[2]] + conductivity.xy[node[3]]);
        if (sxy == 0.0) continue;
        const double gx[4] = {-0.5 / hx, 0.5 / hx, -0.5 / hx, 0.5 / hx};
        const double gy[4] = {-0.5 / hy, -0.5 / hy, 0.5 / hy, 0.5 / hy};
        const double scale = hx * hy * sxy;
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q)
            K(node[p], node[q]) += scale * (gx[p] * gy[q] + gy[p] * gx[q]);
      }
  }

  EllipticOperator op;
  op.grid = grid;
  op.stiffness = std::move(K);
  op.sigma1 = conductivity.sigma1;
  op.sigma2 = conductivity.sigma2;
  return op;
}

// Generalized eigenpairs of (K, W): K psi = lambda W psi with psi^T W psi = I.
// Solved by diagonal whitening; eigenvalues ascending.
inline std::pair<Vec, Mat> weighted_eigendecomposition(const Mat& K, const Vec& w) {
  const Vec s = w.cwiseSqrt();
  const Vec si = s.cwiseInverse();
  Mat B = si.asDiagonal() * K * si.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("weighted_eigendecomposition: eigensolver failed");
  Mat psi = si.asDiagonal() * es.eigenvectors();
  return {es.eigenvalues(), std::move(psi)};
}

// Leading generalized eigenvalues of an assembled operator (diagnostics/tests).
inline Vec elliptic_eigenvalues(const EllipticOperator& op, int count) {
  auto [lam, psi] = weighted_eigendecomposition(op.stiffness, op.grid->quadrature_weight);
  (void)psi;
  count = std::min<int>(count, static_cast<int>(lam.size()));
  return lam.head(count);
}

}  // namespace bidosim
