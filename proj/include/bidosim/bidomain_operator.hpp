#pragma once

// Harmonic composition of the intra- and extracellular operators,
//   A_b = A_i (A_i + A_e)^+ A_e,
// held in diagonalized form: eigenvalues lambda_k (ascending, lambda_0 = 0) and
// H-orthonormal eigenvectors psi_k. The composition happens on the stiffness
// matrices, K_b = K_i - B^T B with B = Lambda^{-1/2} Q^T K_i from the
// eigendecomposition of S = K_i + K_e, which is exactly symmetric and treats
// the shared constant null-space with the Moore-Penrose inverse.

#include <bidosim/elliptic.hpp>
#include <bidosim/mesh.hpp>
#include <bidosim/rng.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bidosim {

struct OperatorConstants {
  double alpha = 0;         // discrete Garding/coercivity constant
  double continuity_m = 0;  // bilinear-form continuity constant
  double poincare_cp = 0;   // 1 / (smallest positive unit-Laplacian eigenvalue)
};

struct BidomainOperator {
  GridPtr grid;
  Vec weights;       // copy of the grid quadrature weights
  Vec eigenvalues;   // ascending; eigenvalues[0] == 0
  Mat eigenvectors;  // columns psi_k, H-orthonormal
  OperatorConstants constants;
  std::string fingerprint;  // 64-bit hash of grid + conductivity + spectrum

  int modes() const { return static_cast<int>(eigenvalues.size()); }

  Vec to_modal(const Vec& u) const {
    return eigenvectors.transpose() * weights.cwiseProduct(u);
  }
  Vec from_modal(const Vec& c) const { return eigenvectors * c; }
  Vec apply(const Vec& u) const {
    return from_modal(eigenvalues.cwiseProduct(to_modal(u)));
  }
  Field apply(const Field& u) const {
    if (!u.grid || !u.grid->same_layout(*grid))
      throw std::invalid_argument("BidomainOperator::apply: grid mismatch");
    return Field(grid, apply(u.values));
  }
};

inline double bilinear_form(const BidomainOperator& op, const Field& u, const Field& v) {
  if (!u.grid || !v.grid || !u.grid->same_layout(*op.grid) || !v.grid->same_layout(*op.grid))
    throw std::invalid_argument("bilinear_form: grid mismatch");
  return op.to_modal(u.values).dot(op.eigenvalues.cwiseProduct(op.to_modal(v.values)));
}

// exp(-t A_b) u via the eigenbasis; t >= 0.
inline Field semigroup_apply(const BidomainOperator& op, const Field& u, double t) {
  if (t < 0) throw std::invalid_argument("semigroup_apply: negative time");
  if (!u.grid || !u.grid->same_layout(*op.grid))
    throw std::invalid_argument("semigroup_apply: grid mismatch");
  Vec c = op.to_modal(u.values);
  for (int k = 0; k < c.size(); ++k) c[k] *= std::exp(-op.eigenvalues[k] * t);
  return Field(op.grid, op.from_modal(c));
}

namespace detail {

inline void fnv_accumulate(std::uint64_t& h, const void* data, size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
}

inline std::string operator_fingerprint(const Grid& g, const ConductivitySpec& ci,
                                        const ConductivitySpec& ce, const Vec& lambda) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  fnv_accumulate(h, &g.dimension, sizeof g.dimension);
  fnv_accumulate(h, &g.nodes_per_axis, sizeof g.nodes_per_axis);
  fnv_accumulate(h, g.extent.data(), sizeof(double) * 2);
  auto add_vec = [&h](const Vec& v) {
    if (v.size()) fnv_accumulate(h, v.data(), sizeof(double) * v.size());
  };
  add_vec(ci.xx);
  add_vec(ci.xy);
  add_vec(ci.yy);
  add_vec(ce.xx);
  add_vec(ce.xy);
  add_vec(ce.yy);
  add_vec(lambda);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Deterministic iid-normal probe field used by the constant estimators.
inline Vec probe_field(const Grid& g, std::uint64_t trial) {
  NoiseStream s{0x5EEDCAFE01ull, 0};
  Vec v(g.size());
  for (int i = 0; i < g.size(); ++i)
    v[i] = normal_draw(s, DrawPurpose::probe, static_cast<std::uint32_t>(i), trial);
  return v;
}

}  // namespace detail

// Discrete constants certified against the operator itself: poincare_cp from
// the unit-conductivity Laplacian on the same grid, alpha from the eigenvector
// diagonal sharpened by the exact (Lambda, V-Gram) pencil bound, continuity_m
// from random-field Rayleigh quotients. Deterministic.
inline OperatorConstants estimate_constants(const BidomainOperator& op) {
  const Grid& g = *op.grid;
  const int N = g.size();
  OperatorConstants out;

  // Poincare constant of the grid: 1 / mu_1 of the unit Laplacian pencil.
  {
    auto unit = assemble_elliptic(make_conductivity(op.grid, 1.0), op.grid);
    Vec mu = elliptic_eigenvalues(unit, 2);
    if (mu.size() < 2 || !(mu[1] > 0))
      throw std::runtime_error("estimate_constants: degenerate unit-Laplacian spectrum");
    out.poincare_cp = 1.0 / mu[1];
  }

  // Gradient Gram of the eigenbasis (constant mode excluded): V-Gram minus I.
  const int M = N - 1;
  Mat GV = Mat::Zero(M, M);
  {
    Mat grads(N, M);
    for (int axis = 0; axis < g.dimension; ++axis) {
      for (int k = 1; k < N; ++k)
        grads.col(k - 1) = gradient_axis(g, op.eigenvectors.col(k), axis);
      GV.noalias() += grads.transpose() * g.quadrature_weight.asDiagonal() * grads;
    }
  }

  // alpha candidate 1: eigenvector diagonal, min_k lambda_k / (v_k + 1).
  double alpha = std::numeric_limits<double>::infinity();
  for (int k = 1; k < N; ++k)
    alpha = std::min(alpha, op.eigenvalues[k] / (GV(k - 1, k - 1) + 1.0));
  // alpha candidate 2: exact pencil bound 1 / lambda_max(L^-1/2 GV L^-1/2),
  // which certifies a(u,u) >= alpha (||u||_V^2 - ||u||_H^2) for every field.
  {
    Vec li(M);
    for (int k = 0; k < M; ++k) li[k] = 1.0 / std::sqrt(op.eigenvalues[k + 1]);
    Mat P = li.asDiagonal() * GV * li.asDiagonal();
    P = 0.5 * (P + P.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("estimate_constants: pencil eigensolver failed");
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmax > 0) alpha = std::min(alpha, 1.0 / lmax);
  }
  if (!(alpha > 0)) throw std::runtime_error("estimate_constants: nonpositive alpha");

  // Certify alpha on random fields; back off (never triggers in practice).
  auto gap = [&](const Vec& u) {  // a(u,u) - alpha (||u||_V^2 - ||u||_H^2)
    Vec c = op.to_modal(u);
    double auu = c.dot(op.eigenvalues.cwiseProduct(c));
    double vh = 0;
    for (int axis = 0; axis < g.dimension; ++axis) {
      Vec du = gradient_axis(g, u, axis);
      vh += du.cwiseProduct(du).dot(g.quadrature_weight);
    }
    return auu - alpha * vh;
  };
  for (int attempt = 0; attempt < 100; ++attempt) {
    bool ok = true;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      Field probe(op.grid, detail::probe_field(g, trial));
      if (gap(mean_zero_project(probe).values) < -1e-10) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    alpha *= 1.0 - 1e-6;
  }
  out.alpha = alpha;

  // Continuity constant from random Rayleigh quotients.
  double m = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Vec u = detail::probe_field(g, 1000 + trial);
    Vec v = detail::probe_field(g, 2000 + trial);
    Field fu(op.grid, u), fv(op.grid, v);
    const double num = std::abs(op.to_modal(u).dot(op.eigenvalues.cwiseProduct(op.to_modal(v))));
    const double den = std::sqrt(norm_v_sq(fu) * norm_v_sq(fv));
    if (den > 0) m = std::max(m, num / den);
  }
  out.continuity_m = m;
  return out;
}

inline BidomainOperator compose_bidomain(const EllipticOperator& intra,
                                         const EllipticOperator& extra,
                                         const ConductivitySpec& intra_spec,
                                         const ConductivitySpec& extra_spec) {
  if (!intra.grid || !extra.grid || !intra.grid->same_layout(*extra.grid))
    throw std::invalid_argument("compose_bidomain: grid mismatch");
  const Grid& g = *intra.grid;
  const int N = g.size();

  // S = K_i + K_e must have exactly the constant kernel.
  Mat S = intra.stiffness + extra.stiffness;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("compose_bidomain: eigensolver failed on K_i + K_e");
  const Vec& mu = es.eigenvalues();
  const double mu_max = mu[N - 1];
  const double thresh = 1e-10 * std::max(mu_max, 1e-300);
  int kernel = 0;
  while (kernel < N && mu[kernel] <= thresh) ++kernel;
  if (kernel != 1)
    throw std::runtime_error("compose_bidomain: singular composition (K_i + K_e kernel is not exactly the constants)");

  // K_b = K_i - B^T B, B = Lambda^{-1/2} Q^T K_i over the nonzero modes.
  Mat B = es.eigenvectors().rightCols(N - 1).transpose() * intra.stiffness;
  for (int r = 0; r < N - 1; ++r) B.row(r) /= std::sqrt(mu[r + 1]);
  Mat Kb = intra.stiffness - B.transpose() * B;
  Kb = 0.5 * (Kb + Kb.transpose()).eval();

  auto [lambda, psi] = weighted_eigendecomposition(Kb, g.quadrature_weight);
  const double lmax = lambda[N - 1];
  if (!(lmax > 0)) throw std::runtime_error("compose_bidomain: degenerate spectrum");
  if (std::abs(lambda[0]) > 1e-8 * lmax)
    throw std::runtime_error("compose_bidomain: constant mode eigenvalue did not vanish");
  if (!(lambda[1] > 1e-12 * lmax))
    throw std::runtime_error("compose_bidomain: degenerate spectrum (repeated zero eigenvalue)");
  lambda[0] = 0.0;
  psi.col(0) = Vec::Constant(N, 1.0 / std::sqrt(g.measure()));
  for (int k = 1; k < N; ++k) {
    lambda[k] = std::max(lambda[k], 0.0);
    int imax = 0;
    psi.col(k).cwiseAbs().maxCoeff(&imax);
    if (psi(imax, k) < 0) psi.col(k) = -psi.col(k);
  }

  BidomainOperator op;
  op.grid = intra.grid;
  op.weights = g.quadrature_weight;
  op.eigenvalues = std::move(lambda);
  op.eigenvectors = std::move(psi);
  op.fingerprint = detail::operator_fingerprint(g, intra_spec, extra_spec, op.eigenvalues);
  op.constants = estimate_constants(op);
  return op;
}

// Convenience overload assembling both leaves itself.
inline BidomainOperator compose_bidomain(const ConductivitySpec& intra,
                                         const ConductivitySpec& extra,
                                         const GridPtr& grid) {
  return compose_bidomain(assemble_elliptic(intra, grid), assemble_elliptic(extra, grid),
                          intra, extra);
}

}  // namespace bidosim
