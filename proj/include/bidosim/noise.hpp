#pragma once

// Q-Wiener noise aligned with the operator eigenbasis,
//   W(t,x) = sum_{k=1..K} sqrt(gamma_k) psi_k(x) W_k(t),
// where the W_k are independent standard Wiener processes and the constant
// mode k = 0 carries no noise. The stochastic convolution W_A evolves by the
// exact per-mode Ornstein-Uhlenbeck recursion, so neither the increments nor
// the convolution carry any time-discretization bias. Counter-based RNG keyed
// by (seed, replica, purpose, mode, step) makes every path reproducible under
// any replica execution order.
//
// Convention: WienerState stores the standard W_k (weight applied when a field
// is assembled); ConvolutionState stores the full modal coefficient of W_A
// with sqrt(gamma_k) already inside, so its stationary variance is
// gamma_k / (2 lambda_k).

#include <bidosim/bidomain_operator.hpp>
#include <bidosim/rng.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidosim {

enum class DecayRule { power_law, explicit_list };

// gamma_k = scale * k^{-p}
struct PowerLawRule {
  double p = 3;
  double scale = 1;
};

// Mode weights gamma_k >= 0 for operator modes k = 1..K (gammas[k-1]). `trace`
// is the finite sum; for power-law rules `extrapolated_trace` adds an
// Euler-Maclaurin tail estimate of the K -> infinity limit.
struct NoiseSpectrum {
  Vec gammas;
  DecayRule rule = DecayRule::explicit_list;
  double power = 0, scale = 0;  // meaningful for power_law only
  double trace = 0;
  double extrapolated_trace = 0;
  std::string operator_fingerprint;
  int modes() const { return static_cast<int>(gammas.size()); }
};

namespace detail {

inline int positive_mode_count(const BidomainOperator& op) {
  const int n = static_cast<int>(op.eigenvalues.size());
  const double floor = 1e-12 * std::max(1.0, op.eigenvalues[n - 1]);
  int count = 0;
  for (int k = 1; k < n; ++k)
    if (op.eigenvalues[k] > floor) ++count;
  return count;
}

inline void require_built_against(const NoiseSpectrum& s, const BidomainOperator& op,
                                  const char* who) {
  if (s.operator_fingerprint != op.fingerprint)
    throw std::invalid_argument(std::string(who) + ": spectrum was built against a different operator");
  if (s.modes() >= static_cast<int>(op.eigenvalues.size()))
    throw std::invalid_argument(std::string(who) + ": spectrum has more modes than the operator");
}

}  // namespace detail

inline NoiseSpectrum make_spectrum(const PowerLawRule& rule, int K, const BidomainOperator& op) {
  if (K < 1) throw std::invalid_argument("make_spectrum: power-law rule needs at least one mode");
  if (!(rule.scale >= 0) || !std::isfinite(rule.scale))
    throw std::invalid_argument("make_spectrum: negative coefficients");
  if (!std::isfinite(rule.p)) throw std::invalid_argument("make_spectrum: non-finite decay power");
  if (K > detail::positive_mode_count(op))
    throw std::invalid_argument("make_spectrum: more modes requested than the operator has positive eigenvalues");

  NoiseSpectrum s;
  s.rule = DecayRule::power_law;
  s.power = rule.p;
  s.scale = rule.scale;
  s.gammas.resize(K);
  for (int k = 1; k <= K; ++k) s.gammas[k - 1] = rule.scale * std::pow(double(k), -rule.p);
  s.trace = s.gammas.sum();
  if (rule.scale > 0 && rule.p > 1) {
    // tail sum_{k>K} k^{-p} by Euler-Maclaurin: integral - midpoint + curvature
    const double Kd = K;
    s.extrapolated_trace =
        s.trace + rule.scale * (std::pow(Kd, 1 - rule.p) / (rule.p - 1) -
                                0.5 * std::pow(Kd, -rule.p) +
                                rule.p / 12.0 * std::pow(Kd, -rule.p - 1));
  } else if (rule.scale > 0) {
    s.extrapolated_trace = std::numeric_limits<double>::infinity();
  }
  s.operator_fingerprint = op.fingerprint;
  return s;
}

inline NoiseSpectrum make_spectrum(const std::vector<double>& gammas, const BidomainOperator& op) {
  const int K = static_cast<int>(gammas.size());
  if (K > detail::positive_mode_count(op))
    throw std::invalid_argument("make_spectrum: more modes listed than the operator has positive eigenvalues");
  NoiseSpectrum s;
  s.rule = DecayRule::explicit_list;
  s.gammas.resize(K);
  for (int i = 0; i < K; ++i) {
    if (!(gammas[i] >= 0) || !std::isfinite(gammas[i]))
      throw std::invalid_argument("make_spectrum: negative coefficients");
    s.gammas[i] = gammas[i];
  }
  s.trace = K ? s.gammas.sum() : 0.0;
  s.extrapolated_trace = s.trace;
  s.operator_fingerprint = op.fingerprint;
  return s;
}

// Rescale so the finite trace hits `target` (mode ratios preserved).
inline NoiseSpectrum normalize_trace(NoiseSpectrum s, double target) {
  if (!(target > 0) || !std::isfinite(target))
    throw std::invalid_argument("normalize_trace: target trace must be positive");
  if (!(s.trace > 0))
    throw std::invalid_argument("normalize_trace: cannot rescale a zero spectrum");
  const double factor = target / s.trace;
  s.gammas *= factor;
  s.scale *= factor;
  s.trace = target;
  if (std::isfinite(s.extrapolated_trace)) s.extrapolated_trace *= factor;
  return s;
}

enum class TailVerdict { converges, diverges, inconclusive };

inline const char* tail_verdict_name(TailVerdict v) {
  switch (v) {
    case TailVerdict::converges: return "converges";
    case TailVerdict::diverges: return "diverges";
    case TailVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

// Partial sums of the two summability series plus a power-law tail-fit verdict
// for each: the log-log slope of the terms over the middle band of modes,
// called convergent below -1.2 and divergent above -0.8 (the neutral zone
// around the critical slope -1 stays inconclusive).
struct SummabilityReport {
  double s_half = 0;  // sum gamma_k lambda_k^{1/2}
  double s_sq = 0;    // sum gamma_k^2 lambda_k^2
  double slope_half = 0, slope_sq = 0;
  TailVerdict half_verdict = TailVerdict::inconclusive;
  TailVerdict sq_verdict = TailVerdict::inconclusive;
};

namespace detail {

inline TailVerdict term_slope_verdict(const std::vector<double>& terms, double* slope_out) {
  *slope_out = 0;
  const int K = static_cast<int>(terms.size());
  bool all_zero = true;
  for (double t : terms)
    if (t != 0) all_zero = false;
  if (all_zero) return TailVerdict::converges;  // finitely many nonzero terms

  const int lo = std::max(2, K / 4), hi = (3 * K) / 4;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = lo; k <= hi; ++k) {
    if (!(terms[k - 1] > 0)) continue;
    const double x = std::log(double(k)), y = std::log(terms[k - 1]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 4) return TailVerdict::inconclusive;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  *slope_out = slope;
  if (slope < -1.2) return TailVerdict::converges;
  if (slope > -0.8) return TailVerdict::diverges;
  return TailVerdict::inconclusive;
}

}  // namespace detail

inline SummabilityReport check_summability(const NoiseSpectrum& s, const BidomainOperator& op) {
  detail::require_built_against(s, op, "check_summability");
  const int K = s.modes();
  std::vector<double> half_terms(K), sq_terms(K);
  SummabilityReport rep;
  for (int k = 1; k <= K; ++k) {
    const double gamma = s.gammas[k - 1];
    const double lambda = std::max(0.0, op.eigenvalues[k]);
    half_terms[k - 1] = gamma * std::sqrt(lambda);
    sq_terms[k - 1] = gamma * gamma * lambda * lambda;
    rep.s_half += half_terms[k - 1];
    rep.s_sq += sq_terms[k - 1];
  }
  rep.half_verdict = detail::term_slope_verdict(half_terms, &rep.slope_half);
  rep.sq_verdict = detail::term_slope_verdict(sq_terms, &rep.slope_sq);
  return rep;
}

// ---------------------------------------------------------------------------
// Standard Wiener values W_k(t) per mode (weight sqrt(gamma_k) is applied only
// when a field is assembled).
struct WienerState {
  Vec values;
  double t = 0;
  NoiseStream stream;
  std::uint64_t step = 0;
};

inline WienerState make_wiener_state(const NoiseSpectrum& s, NoiseStream stream) {
  WienerState st;
  st.values = Vec::Zero(s.modes());
  st.stream = stream;
  return st;
}

// Draw dW_k ~ N(0, dt) i.i.d. across modes and steps, advance the state and
// return the increments.
inline Vec sample_increment(WienerState& state, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("sample_increment: dt must be positive");
  Vec dw(state.values.size());
  const double root = std::sqrt(dt);
  for (int i = 0; i < dw.size(); ++i)
    dw[i] = root * normal_draw(state.stream, DrawPurpose::wiener_increment, i + 1, state.step);
  state.values += dw;
  state.t += dt;
  ++state.step;
  return dw;
}

inline Field wiener_field(const WienerState& state, const NoiseSpectrum& s,
                          const BidomainOperator& op) {
  detail::require_built_against(s, op, "wiener_field");
  if (state.values.size() != s.gammas.size())
    throw std::invalid_argument("wiener_field: state does not match the spectrum");
  Vec modal = Vec::Zero(op.eigenvalues.size());
  for (int i = 0; i < state.values.size(); ++i)
    modal[i + 1] = std::sqrt(s.gammas[i]) * state.values[i];
  return Field(op.grid, op.from_modal(modal));
}

// ---------------------------------------------------------------------------
// Modal coefficients of the stochastic convolution W_A (weights built in),
// advanced by the exact Ornstein-Uhlenbeck recursion
//   Y_k(t+dt) = e^{-lambda_k dt} Y_k(t) + sqrt(gamma_k (1-e^{-2 lambda_k dt}) / (2 lambda_k)) xi.
struct ConvolutionState {
  Vec values;
  double t = 0;
  NoiseStream stream;
  std::uint64_t step = 0;
};

inline ConvolutionState make_convolution_state(const NoiseSpectrum& s, NoiseStream stream) {
  ConvolutionState st;
  st.values = Vec::Zero(s.modes());  // W_A(0) = 0
  st.stream = stream;
  return st;
}

// One-step conditional variance of the OU recursion (gamma * dt in the
// lambda -> 0 limit).
inline double convolution_step_variance(double gamma, double lambda, double dt) {
  if (lambda <= 0) return gamma * dt;
  return gamma * (-std::expm1(-2 * lambda * dt)) / (2 * lambda);
}

inline double convolution_stationary_variance(double gamma, double lambda) {
  if (!(lambda > 0))
    throw std::invalid_argument("convolution_stationary_variance: lambda must be positive");
  return gamma / (2 * lambda);
}

inline void convolution_step(ConvolutionState& state, const NoiseSpectrum& s,
                             const BidomainOperator& op, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("convolution_step: dt must be positive");
  detail::require_built_against(s, op, "convolution_step");
  if (state.values.size() != s.gammas.size())
    throw std::invalid_argument("convolution_step: state does not match the spectrum");
  for (int i = 0; i < state.values.size(); ++i) {
    const double gamma = s.gammas[i];
    const double lambda = op.eigenvalues[i + 1];
    if (gamma > 0 && !(lambda > 0))
      throw std::runtime_error("convolution_step: noise weight on a zero-eigenvalue mode");
    state.values[i] *= std::exp(-lambda * dt);
    if (gamma > 0)
      state.values[i] += std::sqrt(convolution_step_variance(gamma, lambda, dt)) *
                         normal_draw(state.stream, DrawPurpose::ou_increment, i + 1, state.step);
  }
  state.t += dt;
  ++state.step;
}

inline Field convolution_field(const ConvolutionState& state, const NoiseSpectrum& s,
                               const BidomainOperator& op) {
  detail::require_built_against(s, op, "convolution_field");
  if (state.values.size() != s.gammas.size())
    throw std::invalid_argument("convolution_field: state does not match the spectrum");
  Vec modal = Vec::Zero(op.eigenvalues.size());
  for (int i = 0; i < state.values.size(); ++i) modal[i + 1] = state.values[i];
  return Field(op.grid, op.from_modal(modal));
}

}  // namespace bidosim
