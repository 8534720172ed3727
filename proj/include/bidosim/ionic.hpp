#pragma once

// Reaction kinetics in the decomposed form
//   f(u,w) = f1(u) + f2(u) w,      u_t gets -f(u,w)
//   g(u,w) = g1(u) + g2 w,         w_t = -g(u,w)
// with the standard named models (FitzHugh-Nagumo, Aliev-Panfilov,
// Rogers-McCulloch, Allen-Cahn) plus user-supplied callables, and the fitters
// that certify growth, quartic-coercivity and one-sided-monotonicity constants
// over a sampling box. Named models are cubic polynomials, so divided
// differences have exact closed forms and the fitted constants are
// refinement-stable up to the polish tolerance.

#include <bidosim/detail/optimize.hpp>
#include <bidosim/mesh.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidosim {

enum class IonicKind { fitzhugh_nagumo, aliev_panfilov, rogers_mcculloch, allen_cahn, custom };

inline const char* ionic_kind_name(IonicKind k) {
  switch (k) {
    case IonicKind::fitzhugh_nagumo: return "fitzhugh_nagumo";
    case IonicKind::aliev_panfilov: return "aliev_panfilov";
    case IonicKind::rogers_mcculloch: return "rogers_mcculloch";
    case IonicKind::allen_cahn: return "allen_cahn";
    case IonicKind::custom: return "custom";
  }
  return "?";
}

// Optional growth caps a custom model declares about itself; fitted constants
// are cross-checked against them.
struct GrowthDeclaration {
  std::array<double, 6> c{};        // c1..c6 growth caps
  double quartic_lead = 0;          // leading coefficient of u*f1(u)
};

struct IonicModel {
  IonicKind kind = IonicKind::allen_cahn;
  // named parameters; which ones are meaningful depends on kind
  double eta = 1, a = 0.5, b = 1, c = 1, d = 1, k = 1;
  // cubic coefficient form, poly[j] multiplies u^j (named kinds only)
  std::array<double, 4> f1_poly{}, f2_poly{}, g1_poly{};
  double g2 = 0;
  // custom callables
  std::function<double(double)> f1_fn, f2_fn, g1_fn;
  std::optional<GrowthDeclaration> declared;
  std::vector<std::string> notes;
};

namespace detail {

inline double peval(const std::array<double, 4>& p, double u) {
  return ((p[3] * u + p[2]) * u + p[1]) * u + p[0];
}
inline double pderiv(const std::array<double, 4>& p, double u) {
  return (3 * p[3] * u + 2 * p[2]) * u + p[1];
}
// exact divided difference of a cubic: no cancellation for close arguments
inline double pdivdiff(const std::array<double, 4>& p, double u1, double u2) {
  return p[1] + p[2] * (u1 + u2) + p[3] * (u1 * u1 + u1 * u2 + u2 * u2);
}

// uniform view of one scalar component (value / derivative / divided diff)
struct Component {
  std::function<double(double)> val;
  std::function<double(double)> deriv;
  std::function<double(double, double)> divdiff;
};

inline Component poly_component(const std::array<double, 4>& p) {
  return {[p](double u) { return peval(p, u); },
          [p](double u) { return pderiv(p, u); },
          [p](double a, double b) { return pdivdiff(p, a, b); }};
}

inline Component callable_component(std::function<double(double)> f) {
  auto deriv = [f](double u) {
    const double h = 1e-6 * (1 + std::abs(u));
    return (f(u + h) - f(u - h)) / (2 * h);
  };
  auto dd = [f, deriv](double u1, double u2) {
    if (std::abs(u1 - u2) < 1e-7 * (1 + std::abs(u1) + std::abs(u2)))
      return deriv(0.5 * (u1 + u2));
    return (f(u1) - f(u2)) / (u1 - u2);
  };
  return {f, deriv, dd};
}

inline Component f1_component(const IonicModel& m) {
  return m.kind == IonicKind::custom ? callable_component(m.f1_fn) : poly_component(m.f1_poly);
}
inline Component f2_component(const IonicModel& m) {
  return m.kind == IonicKind::custom ? callable_component(m.f2_fn) : poly_component(m.f2_poly);
}
inline Component g1_component(const IonicModel& m) {
  return m.kind == IonicKind::custom ? callable_component(m.g1_fn) : poly_component(m.g1_poly);
}

inline void require_unit_interval(double a, const char* who) {
  if (!(a > 0) || !(a < 1))
    throw std::invalid_argument(std::string(who) + ": parameter a must lie in (0,1)");
}
inline void require_positive(double v, const char* who, const char* name) {
  if (!(v > 0))
    throw std::invalid_argument(std::string(who) + ": parameter " + name + " must be positive");
}

}  // namespace detail

// f(u,w) = eta [ u(u-a)(u-1) + w ],  g(u,w) = b w - c u
inline IonicModel make_fitzhugh_nagumo(double eta, double a, double b, double c) {
  detail::require_positive(eta, "fitzhugh_nagumo", "eta");
  detail::require_unit_interval(a, "fitzhugh_nagumo");
  detail::require_positive(b, "fitzhugh_nagumo", "b");
  detail::require_positive(c, "fitzhugh_nagumo", "c");
  IonicModel m;
  m.kind = IonicKind::fitzhugh_nagumo;
  m.eta = eta; m.a = a; m.b = b; m.c = c;
  m.f1_poly = {0, eta * a, -eta * (1 + a), eta};
  m.f2_poly = {eta, 0, 0, 0};
  m.g1_poly = {0, -c, 0, 0};
  m.g2 = b;
  return m;
}

// f(u,w) = eta [ k u(u-a)(u-1) + u w ],  g(u,w) = k u(u-1-a) + w
inline IonicModel make_aliev_panfilov(double eta, double k, double a) {
  detail::require_positive(eta, "aliev_panfilov", "eta");
  detail::require_positive(k, "aliev_panfilov", "k");
  detail::require_unit_interval(a, "aliev_panfilov");
  IonicModel m;
  m.kind = IonicKind::aliev_panfilov;
  m.eta = eta; m.k = k; m.a = a;
  m.f1_poly = {0, eta * k * a, -eta * k * (1 + a), eta * k};
  m.f2_poly = {0, eta, 0, 0};
  m.g1_poly = {0, -k * (1 + a), k, 0};
  m.g2 = 1;
  m.notes.push_back(
      "aliev_panfilov recovery implemented verbatim: g = k u(u-1-a) + w, so the "
      "w-relaxation coefficient g2 is fixed at 1");
  return m;
}

// f(u,w) = eta [ b u(u-a)(u-1) + u w ],  g(u,w) = d w - c u
inline IonicModel make_rogers_mcculloch(double eta, double b, double a, double c, double d) {
  detail::require_positive(eta, "rogers_mcculloch", "eta");
  detail::require_positive(b, "rogers_mcculloch", "b");
  detail::require_unit_interval(a, "rogers_mcculloch");
  detail::require_positive(c, "rogers_mcculloch", "c");
  detail::require_positive(d, "rogers_mcculloch", "d");
  IonicModel m;
  m.kind = IonicKind::rogers_mcculloch;
  m.eta = eta; m.b = b; m.a = a; m.c = c; m.d = d;
  m.f1_poly = {0, eta * b * a, -eta * b * (1 + a), eta * b};
  m.f2_poly = {0, eta, 0, 0};
  m.g1_poly = {0, -c, 0, 0};
  m.g2 = d;
  return m;
}

// f(u) = eta (u^3 - u),  g = 0
inline IonicModel make_allen_cahn(double eta) {
  detail::require_positive(eta, "allen_cahn", "eta");
  IonicModel m;
  m.kind = IonicKind::allen_cahn;
  m.eta = eta;
  m.f1_poly = {0, -eta, 0, eta};
  m.f2_poly = {0, 0, 0, 0};
  m.g1_poly = {0, 0, 0, 0};
  m.g2 = 0;
  return m;
}

inline IonicModel make_custom(std::function<double(double)> f1,
                              std::function<double(double)> f2,
                              std::function<double(double)> g1, double g2,
                              std::optional<GrowthDeclaration> declared = std::nullopt) {
  if (!f1 || !f2 || !g1)
    throw std::invalid_argument("make_custom: all of f1, f2, g1 must be callable");
  IonicModel m;
  m.kind = IonicKind::custom;
  m.f1_fn = std::move(f1);
  m.f2_fn = std::move(f2);
  m.g1_fn = std::move(g1);
  m.g2 = g2;
  m.declared = std::move(declared);
  return m;
}

inline double eval_f(const IonicModel& m, double u, double w) {
  if (m.kind == IonicKind::custom) return m.f1_fn(u) + m.f2_fn(u) * w;
  return detail::peval(m.f1_poly, u) + detail::peval(m.f2_poly, u) * w;
}
inline double eval_g(const IonicModel& m, double u, double w) {
  if (m.kind == IonicKind::custom) return m.g1_fn(u) + m.g2 * w;
  return detail::peval(m.g1_poly, u) + m.g2 * w;
}

inline Field eval_f(const IonicModel& m, const Field& u, const Field& w) {
  detail::require_same_grid(u, w, "eval_f");
  Vec out(u.values.size());
  for (int i = 0; i < out.size(); ++i) out[i] = eval_f(m, u.values[i], w.values[i]);
  return Field(u.grid, std::move(out));
}
inline Field eval_g(const IonicModel& m, const Field& u, const Field& w) {
  detail::require_same_grid(u, w, "eval_g");
  Vec out(u.values.size());
  for (int i = 0; i < out.size(); ++i) out[i] = eval_g(m, u.values[i], w.values[i]);
  return Field(u.grid, std::move(out));
}

// Sampling box for the fitters.
struct Box {
  double u_lo = -10, u_hi = 10, w_lo = -10, w_hi = 10;
};

inline void validate_box(const Box& box, const char* who) {
  if (!(box.u_lo < box.u_hi) || !(box.w_lo < box.w_hi))
    throw std::invalid_argument(std::string(who) + ": empty sampling box");
  if (!std::isfinite(box.u_lo) || !std::isfinite(box.u_hi) || !std::isfinite(box.w_lo) ||
      !std::isfinite(box.w_hi))
    throw std::invalid_argument(std::string(who) + ": non-finite sampling box");
}

// |f1| <= c1 + c2 |u|^3, |f2| <= c3 + c4 |u|, |g1| <= c5 + c6 |u|^2, certified
// over the box: the constant part is fitted on |u| <= 1 and the growth part on
// the remainder.
struct Condition1Fit {
  std::array<double, 6> c{};
  bool unbounded = false;      // custom model exceeded its declared caps
  std::string message;
};

inline Condition1Fit fit_condition_c1(const IonicModel& m, const Box& box = {},
                                      int samples_per_axis = 2001) {
  validate_box(box, "fit_condition_c1");
  if (samples_per_axis < 16)
    throw std::invalid_argument("fit_condition_c1: too few samples");

  struct Target {
    detail::Component comp;
    double power;
  };
  const Target targets[3] = {{detail::f1_component(m), 3.0},
                             {detail::f2_component(m), 1.0},
                             {detail::g1_component(m), 2.0}};

  Condition1Fit fit;
  for (int t = 0; t < 3; ++t) {
    const auto& F = targets[t].comp;
    const double p = targets[t].power;
    auto absF = [&](double u) {
      const double v = F.val(u);
      if (!std::isfinite(v)) throw std::runtime_error("fit_condition_c1: non-finite sample");
      return std::abs(v);
    };

    // constant part on box ∩ [-1,1]
    const double in_lo = std::max(box.u_lo, -1.0), in_hi = std::min(box.u_hi, 1.0);
    double c_const = 0;
    if (in_lo <= in_hi) {
      double best_u = in_lo;
      for (int i = 0; i < samples_per_axis; ++i) {
        const double u = in_lo + (in_hi - in_lo) * i / (samples_per_axis - 1);
        if (absF(u) > absF(best_u)) best_u = u;
      }
      const double span = (in_hi - in_lo) / samples_per_axis;
      const double lo = std::max(in_lo, best_u - 2 * span);
      const double hi = std::min(in_hi, best_u + 2 * span);
      const double polished = detail::golden_max(absF, lo, hi);
      c_const = std::max(absF(best_u), absF(polished));
    }

    // growth part on box ∖ [-1,1]
    auto ratio = [&](double u) {
      return std::max(0.0, (absF(u) - c_const) / std::pow(std::abs(u), p));
    };
    double c_growth = 0;
    for (double sgn : {-1.0, 1.0}) {
      const double seg_lo = sgn < 0 ? box.u_lo : std::max(box.u_lo, 1.0);
      const double seg_hi = sgn < 0 ? std::min(box.u_hi, -1.0) : box.u_hi;
      if (seg_lo >= seg_hi) continue;
      double best_u = seg_lo;
      for (int i = 0; i < samples_per_axis; ++i) {
        const double u = seg_lo + (seg_hi - seg_lo) * i / (samples_per_axis - 1);
        if (ratio(u) > ratio(best_u)) best_u = u;
      }
      const double span = (seg_hi - seg_lo) / samples_per_axis;
      const double polished = detail::golden_max(
          ratio, std::max(seg_lo, best_u - 2 * span), std::min(seg_hi, best_u + 2 * span));
      c_growth = std::max({c_growth, ratio(best_u), ratio(polished)});
    }

    fit.c[2 * t] = c_const;
    fit.c[2 * t + 1] = c_growth;
  }

  if (m.kind == IonicKind::custom && m.declared) {
    for (int i = 0; i < 6; ++i)
      if (fit.c[i] > m.declared->c[i] * (1 + 1e-6) + 1e-12) {
        fit.unbounded = true;
        fit.message = "fitted growth constant c" + std::to_string(i + 1) +
                      " exceeds the declared cap: growth violation";
      }
  }
  return fit;
}

// u f + w g >= a u^4 - b (u^2 + w^2) - c over the box, a from the quartic
// leading coefficient of u f1(u). A required b or c beyond the cap turns into
// a violation certificate carrying the witness sample.
struct Condition3Fit {
  double a = 0, b = 0, c = 0;
  bool violated = false;
  double witness_u = 0, witness_w = 0;
  std::string message;
};

inline Condition3Fit fit_condition_c3(const IonicModel& m, const Box& box = {},
                                      int samples_per_axis = 241) {
  validate_box(box, "fit_condition_c3");
  if (samples_per_axis < 16)
    throw std::invalid_argument("fit_condition_c3: too few samples");
  constexpr double cap = 1e6;

  Condition3Fit fit;
  if (m.kind == IonicKind::custom) {
    if (m.declared && m.declared->quartic_lead > 0) {
      fit.a = 0.5 * m.declared->quartic_lead;
    } else {
      const double U = std::max(std::abs(box.u_lo), std::abs(box.u_hi));
      const double lead =
          std::min(m.f1_fn(U) / (U * U * U), m.f1_fn(-U) / (-U * U * U));
      if (!(lead > 0)) {
        fit.violated = true;
        fit.witness_u = U;
        fit.message = "custom f1 has no positive cubic growth at the box edge";
        return fit;
      }
      fit.a = 0.5 * lead;
    }
  } else {
    fit.a = 0.5 * m.f1_poly[3];
  }

  // deficit E(u,w) = a u^4 - u f - w g; need E <= b (u^2+w^2) + c
  auto deficit = [&](double u, double w) {
    const double E = fit.a * u * u * u * u - u * eval_f(m, u, w) - w * eval_g(m, u, w);
    if (!std::isfinite(E)) throw std::runtime_error("fit_condition_c3: non-finite sample");
    return E;
  };

  // candidate w values for a given u: box edges, scan lattice and the interior
  // vertex of the (concave when g2 > 0) quadratic-in-w deficit
  auto clamp_w = [&](double w) { return std::min(box.w_hi, std::max(box.w_lo, w)); };
  auto vertex_w = [&](double u) {
    if (!(m.g2 > 0)) return box.w_hi;
    const double lin = u * (m.kind == IonicKind::custom ? m.f2_fn(u)
                                                        : detail::peval(m.f2_poly, u)) +
                       (m.kind == IonicKind::custom ? m.g1_fn(u)
                                                    : detail::peval(m.g1_poly, u));
    return clamp_w(-lin / (2 * m.g2));
  };

  // --- c: sup of E over box ∩ unit ball
  double c_fit = 0;
  {
    detail::Point2 best{0, 0};
    double best_val = deficit(0, 0);
    const int S = samples_per_axis;
    for (int i = 0; i < S; ++i) {
      const double r = static_cast<double>(i) / (S - 1);
      for (int j = 0; j < S; ++j) {
        const double th = 2 * 3.14159265358979323846 * j / S;
        const double u = r * std::cos(th), w = r * std::sin(th);
        if (u < box.u_lo || u > box.u_hi || w < box.w_lo || w > box.w_hi) continue;
        const double v = deficit(u, w);
        if (v > best_val) { best_val = v; best = {u, w}; }
      }
    }
    auto obj = [&](detail::Point2 p) {
      double u = p.x, w = p.y;
      const double r = std::hypot(u, w);
      if (r > 1) { u /= r; w /= r; }
      u = std::min(box.u_hi, std::max(box.u_lo, u));
      w = clamp_w(w);
      return deficit(u, w);
    };
    auto [pt, val] = detail::nelder_mead_max(obj, best, 0.05);
    (void)pt;
    c_fit = std::max(0.0, std::max(best_val, val));
  }

  // --- b: sup of (E - c)/(u^2+w^2) over box ∖ unit ball
  double b_fit = 0;
  detail::Point2 b_arg{box.u_hi, box.w_hi};
  {
    auto ratio_at = [&](double u, double w) {
      const double r2 = u * u + w * w;
      if (r2 <= 1) return 0.0;
      return std::max(0.0, (deficit(u, w) - c_fit) / r2);
    };
    double best_val = 0;
    const int S = samples_per_axis;
    for (int i = 0; i < S; ++i) {
      const double u = box.u_lo + (box.u_hi - box.u_lo) * i / (S - 1);
      const double wv = vertex_w(u);
      for (int j = 0; j <= S; ++j) {
        const double w =
            j < S ? box.w_lo + (box.w_hi - box.w_lo) * j / (S - 1) : wv;
        const double v = ratio_at(u, w);
        if (v > best_val) { best_val = v; b_arg = {u, w}; }
      }
    }
    auto obj = [&](detail::Point2 p) {
      const double u = std::min(box.u_hi, std::max(box.u_lo, p.x));
      const double w = clamp_w(p.y);
      return ratio_at(u, w);
    };
    auto [pt, val] = detail::nelder_mead_max(obj, b_arg, 0.02 * (box.u_hi - box.u_lo));
    b_fit = std::max(best_val, val);
    if (val > best_val) b_arg = pt;
  }

  if (c_fit > cap || b_fit > cap) {
    fit.violated = true;
    fit.witness_u = b_arg.x;
    fit.witness_w = b_arg.y;
    fit.message = "required quadratic absorption exceeds the search cap";
    return fit;
  }
  fit.b = b_fit;
  fit.c = c_fit;
  return fit;
}

// One-sided monotonicity of F(p) = (-f + I, -g): for p1, p2 in the box,
//   (F(p1)-F(p2)) . (p1-p2) <= -c1 (u1-u2)^2 - c2 (w1-w2)^2.
// Written with divided differences the pair deficit is
//   P du^2 + Q du dw + g2 dw^2,  P = ddf1 + mw ddf2,  Q = mean(f2) + ddg1,
// and the symmetric Young split certifies c1 = inf(P - |Q|/2), c2 = g2 - sup|Q|/2.
struct MonotonicityFit {
  double c1 = 0, c2 = 0;
  bool violation = false;
  std::string message;
};

inline MonotonicityFit fit_monotonicity(const IonicModel& m, const Box& box = {},
                                        int pair_samples = 40000) {
  validate_box(box, "fit_monotonicity");
  const int S = std::max(41, static_cast<int>(std::lround(std::sqrt(double(pair_samples)))));

  const auto F1 = detail::f1_component(m);
  const auto F2 = detail::f2_component(m);
  const auto G1 = detail::g1_component(m);

  auto Q = [&](double u1, double u2) {
    return 0.5 * (F2.val(u1) + F2.val(u2)) + G1.divdiff(u1, u2);
  };
  // P minimized over the w endpoint range analytically (linear in mw)
  auto pmin = [&](double u1, double u2) {
    const double ddf2 = F2.divdiff(u1, u2);
    return F1.divdiff(u1, u2) + std::min(box.w_lo * ddf2, box.w_hi * ddf2);
  };
  auto c1_obj = [&](double u1, double u2) {  // to MINIMIZE
    const double v = pmin(u1, u2) - 0.5 * std::abs(Q(u1, u2));
    if (!std::isfinite(v)) throw std::runtime_error("fit_monotonicity: non-finite sample");
    return v;
  };
  auto absq = [&](double u1, double u2) {
    const double v = std::abs(Q(u1, u2));
    if (!std::isfinite(v)) throw std::runtime_error("fit_monotonicity: non-finite sample");
    return v;
  };

  MonotonicityFit fit;
  try {
    double c1_best = std::numeric_limits<double>::infinity();
    detail::Point2 c1_arg{0, 0};
    double q_best = 0;
    detail::Point2 q_arg{0, 0};
    for (int i = 0; i < S; ++i) {
      const double u1 = box.u_lo + (box.u_hi - box.u_lo) * i / (S - 1);
      for (int j = 0; j < S; ++j) {
        const double u2 = box.u_lo + (box.u_hi - box.u_lo) * j / (S - 1);
        const double v = c1_obj(u1, u2);
        if (v < c1_best) { c1_best = v; c1_arg = {u1, u2}; }
        const double q = absq(u1, u2);
        if (q > q_best) { q_best = q; q_arg = {u1, u2}; }
      }
    }
    auto clampu = [&](double u) { return std::min(box.u_hi, std::max(box.u_lo, u)); };
    const double step = 2.0 * (box.u_hi - box.u_lo) / S;
    {
      auto obj = [&](detail::Point2 p) { return -c1_obj(clampu(p.x), clampu(p.y)); };
      auto [pt, val] = detail::nelder_mead_max(obj, c1_arg, step);
      (void)pt;
      fit.c1 = std::min(c1_best, -val);
    }
    {
      auto obj = [&](detail::Point2 p) { return absq(clampu(p.x), clampu(p.y)); };
      auto [pt, val] = detail::nelder_mead_max(obj, q_arg, step);
      (void)pt;
      fit.c2 = m.g2 - 0.5 * std::max(q_best, val);
    }
  } catch (const std::runtime_error& e) {
    fit.violation = true;
    fit.message = e.what();
  }
  return fit;
}

// alpha/C_p admissibility of the fitted monotonicity constants. The two
// sub-flags follow the closed forms for the named cubic models and the fitted
// constants otherwise; `satisfied` is their conjunction.
struct CoefficientConditionReport {
  bool satisfied = false;
  bool alpha_criterion = false;  // -c1 <= alpha / C_p
  bool c3_criterion = false;     // c2 >= 0
  double requirement = 0;        // -c1
  double ratio = 0;              // alpha / C_p
  double margin = 0;             // ratio - requirement
  double c1_used = 0, c2_used = 0;
};

inline CoefficientConditionReport check_coefficient_condition(const IonicModel& m,
                                                              double alpha,
                                                              double poincare_cp,
                                                              const Box& box = {}) {
  if (!(alpha > 0) || !(poincare_cp > 0))
    throw std::invalid_argument("check_coefficient_condition: alpha and poincare_cp must be positive");
  CoefficientConditionReport rep;
  rep.ratio = alpha / poincare_cp;

  switch (m.kind) {
    case IonicKind::allen_cahn:
      rep.c1_used = -m.eta;
      rep.c2_used = 0;
      break;
    case IonicKind::fitzhugh_nagumo: {
      const double curvature = (1 + m.a) * (1 + m.a) / 3.0 - m.a;
      rep.c1_used = -(curvature * m.eta + 0.5 * std::abs(m.eta - m.c));
      rep.c2_used = m.b - 0.5 * std::abs(m.eta - m.c);
      break;
    }
    default: {
      auto fit = fit_monotonicity(m, box);
      if (fit.violation)
        throw std::runtime_error("check_coefficient_condition: monotonicity fit failed: " +
                                 fit.message);
      rep.c1_used = fit.c1;
      rep.c2_used = fit.c2;
      break;
    }
  }

  rep.requirement = -rep.c1_used;
  rep.margin = rep.ratio - rep.requirement;
  rep.alpha_criterion = rep.requirement <= rep.ratio;
  rep.c3_criterion = rep.c2_used >= 0;
  rep.satisfied = rep.alpha_criterion && rep.c3_criterion;
  return rep;
}

// Umbrella report produced by the model checker.
struct ConditionReport {
  Condition1Fit growth;
  Condition3Fit coercivity;
  MonotonicityFit monotonicity;
  CoefficientConditionReport coefficient;
  Box box;
  std::vector<std::string> notes;
};

inline ConditionReport check_model(const IonicModel& m, double alpha, double poincare_cp,
                                   const Box& box = {}) {
  ConditionReport rep;
  rep.box = box;
  rep.growth = fit_condition_c1(m, box);
  rep.coercivity = fit_condition_c3(m, box);
  rep.monotonicity = fit_monotonicity(m, box);
  rep.coefficient = check_coefficient_condition(m, alpha, poincare_cp, box);
  rep.notes = m.notes;
  return rep;
}

}  // namespace bidosim
