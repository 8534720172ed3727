#pragma once

// Monte-Carlo experiment drivers. Each experiment runs replicated (coupled)
// simulations, reduces per-replica statistics with deterministic pairwise
// summation, and compares the resulting estimate against the corresponding
// analytic bound with an explicit confidence allowance. Replica r of a run
// seeded with `master_seed` always sees NoiseStream{master_seed, r}, so every
// report is reproducible from (master_seed, config) alone, independent of the
// thread count used to produce it.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bidosim/bidomain_operator.hpp"
#include "bidosim/ionic.hpp"
#include "bidosim/noise.hpp"
#include "bidosim/sim.hpp"

namespace bidosim {

// ---------------------------------------------------------------------------
// Monte-Carlo plumbing
// ---------------------------------------------------------------------------

struct McConfig {
  int replicas = 100;
  std::uint64_t master_seed = 0;
  double confidence_multiplier = 4;  // CI half-width, in standard errors
  int threads = 1;
};

enum class Verdict { within_bound, violated_beyond_CI, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::within_bound: return "within_bound";
    case Verdict::violated_beyond_CI: return "violated_beyond_CI";
    default: return "inconclusive";
  }
}

struct Estimate {
  std::string label;
  double value = 0;
  double se = 0;  // standard error of `value` across replicas
};

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;  // echoed parameters
  std::vector<Estimate> estimates;
  double bound = std::numeric_limits<double>::quiet_NaN();
  int primary = -1;  // index into `estimates` of the value compared to `bound`
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> diagnostics;
  int replicas_used = 0;
  int replicas_excluded = 0;
  std::vector<std::string> replica_columns;
  std::vector<std::vector<double>> replica_stats;  // one row per replica
};

// Everything a single trajectory needs; the referenced objects must outlive
// the experiment call and are shared read-only across replica threads.
struct SimInputs {
  State initial;
  SimConfig config;
  const BidomainOperator* op = nullptr;
  const IonicModel* model = nullptr;
  const NoiseSpectrum* spectrum = nullptr;
};

namespace detail {

// Pairwise (cascade) summation: error grows like log2(n) rather than n, and
// the bracketing is a pure function of n, so reductions are bit-stable.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void validate_mc(const McConfig& mc, const char* who) {
  if (mc.replicas < 2)
    throw std::invalid_argument(std::string(who) + ": at least two replicas required");
  if (!(mc.confidence_multiplier > 0))
    throw std::invalid_argument(std::string(who) + ": confidence multiplier must be positive");
}

inline void validate_inputs(const SimInputs& si, const char* who) {
  if (!si.op || !si.model || !si.spectrum)
    throw std::invalid_argument(std::string(who) + ": operator, model and spectrum are required");
  validate_sim_inputs(si.initial, si.config, *si.op, *si.spectrum, who);
}

// Run `body(r)` for r in [0, replicas), on up to `threads` workers. Bodies
// write only to their own replica's slot, so scheduling order is irrelevant
// and the reduction over slots is deterministic.
template <class Body>
void run_replicas(int replicas, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, replicas));
  if (threads == 1) {
    for (int r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicas) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double sq_norm_gap(const State& a, const State& b) {
  return norm_h_sq(Field{a.u.grid, a.u.values - b.u.values}) +
         norm_h_sq(Field{a.w.grid, a.w.values - b.w.values});
}

inline void echo_common(ExperimentReport& rep, const SimInputs& si, const McConfig& mc) {
  rep.inputs.emplace_back("dt", format_double(si.config.dt));
  rep.inputs.emplace_back("scheme", scheme_name(si.config.scheme));
  rep.inputs.emplace_back("grid_nx", std::to_string(si.op->grid->nx()));
  rep.inputs.emplace_back("grid_ny", std::to_string(si.op->grid->ny()));
  rep.inputs.emplace_back("model", ionic_kind_name(si.model->kind));
  rep.inputs.emplace_back("noise_modes", std::to_string(si.spectrum->modes()));
  rep.inputs.emplace_back("noise_trace", format_double(si.spectrum->trace));
  rep.inputs.emplace_back("replicas", std::to_string(mc.replicas));
  rep.inputs.emplace_back("master_seed", std::to_string(mc.master_seed));
  rep.inputs.emplace_back("confidence_multiplier", format_double(mc.confidence_multiplier));
}

}  // namespace detail

// Mean and standard error of a sample vector, by pairwise summation.
inline std::pair<double, double> mc_estimate(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("mc_estimate: at least two samples required");
  const double mean = detail::pairwise_sum(samples.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = samples[i] - mean;
    sq[i] = d * d;
  }
  const double var = detail::pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// ---------------------------------------------------------------------------
// Small-noise deviation ladder
// ---------------------------------------------------------------------------
// For each amplitude in `epsilons`, estimate
//   D(eps) = E sup_{t<=T} (||u_eps - u_0||_H^2 + ||w_eps - w_0||_H^2)
// against the shared-path deterministic baseline (eps = 0 member of the same
// coupled family). Reports D(eps) per rung, C_hat = max D(eps)/eps, and a
// CI-favorable max/min ratio of D(eps)/eps which is compared to `ratio_bound`;
// within_bound additionally requires D to decrease strictly (beyond CI) as
// eps halves. Replicas in which any member blows up are excluded and counted;
// more than 5% exclusions makes the verdict inconclusive.
inline ExperimentReport small_noise_deviation(const std::vector<double>& epsilons,
                                              const SimInputs& si, const McConfig& mc,
                                              double ratio_bound = 3) {
  static constexpr const char* who = "small_noise_deviation";
  detail::validate_mc(mc, who);
  detail::validate_inputs(si, who);
  if (epsilons.empty()) throw std::invalid_argument(std::string(who) + ": empty epsilon list");
  for (double e : epsilons)
    if (!(e >= 0) || !std::isfinite(e))
      throw std::invalid_argument(std::string(who) + ": epsilons must be non-negative");
  if (std::none_of(epsilons.begin(), epsilons.end(), [](double e) { return e > 0; }))
    throw std::invalid_argument(std::string(who) + ": at least one positive epsilon required");
  if (!(ratio_bound > 0))
    throw std::invalid_argument(std::string(who) + ": ratio bound must be positive");
  {
    const auto mono = fit_monotonicity(*si.model, si.config.condition_box);
    if (mono.violation)
      throw std::invalid_argument(std::string(who) +
                                  ": one-sided Lipschitz fit failed: " + mono.message);
  }

  SimConfig cfg = si.config;
  cfg.record_every = 1;  // the sup is taken over every step
  const int n_eps = static_cast<int>(epsilons.size());
  std::vector<double> family{0.0};  // member 0 is the deterministic baseline
  family.insert(family.end(), epsilons.begin(), epsilons.end());

  const int M = mc.replicas;
  std::vector<std::vector<double>> sups(static_cast<std::size_t>(M),
                                        std::vector<double>(n_eps, 0.0));
  std::vector<char> excluded(static_cast<std::size_t>(M), 0);

  detail::run_replicas(M, mc.threads, [&](int r) {
    const auto records = simulate_coupled(si.initial, cfg, *si.op, *si.model, *si.spectrum,
                                          family, mc.master_seed,
                                          static_cast<std::uint32_t>(r));
    for (const auto& rec : records)
      if (rec.blew_up) {
        excluded[static_cast<std::size_t>(r)] = 1;
        return;
      }
    const auto& base = records[0].states;
    for (int j = 0; j < n_eps; ++j) {
      double sup = 0;
      const auto& member = records[static_cast<std::size_t>(j) + 1].states;
      for (std::size_t k = 0; k < base.size(); ++k)
        sup = std::max(sup, detail::sq_norm_gap(member[k], base[k]));
      sups[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = sup;
    }
  });

  ExperimentReport rep;
  rep.name = "small_noise_deviation";
  detail::echo_common(rep, si, mc);
  rep.inputs.emplace_back("T", detail::format_double(cfg.T));
  for (int j = 0; j < n_eps; ++j)
    rep.inputs.emplace_back("epsilon_" + std::to_string(j), detail::format_double(epsilons[j]));
  rep.inputs.emplace_back("ratio_bound", detail::format_double(ratio_bound));
  rep.bound = ratio_bound;

  rep.replica_columns.push_back("excluded");
  for (int j = 0; j < n_eps; ++j)
    rep.replica_columns.push_back("sup_sq_gap_eps=" + detail::format_double(epsilons[j]));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int r = 0; r < M; ++r) {
    std::vector<double> row{static_cast<double>(excluded[static_cast<std::size_t>(r)])};
    for (int j = 0; j < n_eps; ++j)
      row.push_back(excluded[static_cast<std::size_t>(r)]
                        ? nan
                        : sups[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]);
    rep.replica_stats.push_back(std::move(row));
  }

  int n_excluded = 0;
  for (char e : excluded) n_excluded += e;
  rep.replicas_excluded = n_excluded;
  rep.replicas_used = M - n_excluded;
  if (n_excluded > 0)
    rep.diagnostics.push_back(std::to_string(n_excluded) + " of " + std::to_string(M) +
                              " replicas blew up and were excluded");

  if (rep.replicas_used < 2) {
    for (int j = 0; j < n_eps; ++j)
      rep.estimates.push_back({"D_eps=" + detail::format_double(epsilons[j]), nan, nan});
    rep.estimates.push_back({"C_hat", nan, nan});
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("fewer than two surviving replicas; no estimates");
    return rep;
  }

  std::vector<double> d_mean(n_eps), d_se(n_eps);
  for (int j = 0; j < n_eps; ++j) {
    std::vector<double> col;
    col.reserve(static_cast<std::size_t>(rep.replicas_used));
    for (int r = 0; r < M; ++r)
      if (!excluded[static_cast<std::size_t>(r)])
        col.push_back(sups[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]);
    const auto [mean, se] = mc_estimate(col);
    d_mean[static_cast<std::size_t>(j)] = mean;
    d_se[static_cast<std::size_t>(j)] = se;
    rep.estimates.push_back({"D_eps=" + detail::format_double(epsilons[j]), mean, se});
  }

  // C_hat = max over positive rungs of D(eps)/eps.
  double c_hat = 0, c_hat_se = 0;
  for (int j = 0; j < n_eps; ++j)
    if (epsilons[j] > 0 && d_mean[static_cast<std::size_t>(j)] / epsilons[j] > c_hat) {
      c_hat = d_mean[static_cast<std::size_t>(j)] / epsilons[j];
      c_hat_se = d_se[static_cast<std::size_t>(j)] / epsilons[j];
    }
  rep.estimates.push_back({"C_hat", c_hat, c_hat_se});

  // Ladder checks run over the positive rungs, ordered by decreasing eps.
  std::vector<int> order;
  for (int j = 0; j < n_eps; ++j)
    if (epsilons[j] > 0) order.push_back(j);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return epsilons[a] > epsilons[b]; });

  const double mult = mc.confidence_multiplier;
  double ratio_lo_max = 0;  // max over rungs of (D - CI)^+ / eps
  double ratio_hi_min = std::numeric_limits<double>::infinity();  // min of (D + CI)/eps
  for (int j : order) {
    const double lo = std::max(0.0, d_mean[j] - mult * d_se[j]) / epsilons[j];
    const double hi = (d_mean[j] + mult * d_se[j]) / epsilons[j];
    ratio_lo_max = std::max(ratio_lo_max, lo);
    ratio_hi_min = std::min(ratio_hi_min, hi);
  }
  // Most favorable max/min ratio consistent with every rung's CI.
  double favorable_ratio;
  if (ratio_lo_max == 0 && ratio_hi_min == 0) favorable_ratio = 1;
  else if (ratio_hi_min == 0) favorable_ratio = std::numeric_limits<double>::infinity();
  else favorable_ratio = std::max(1.0, ratio_lo_max / ratio_hi_min);
  rep.estimates.push_back({"ratio_ci_favorable", favorable_ratio, 0});
  rep.primary = static_cast<int>(rep.estimates.size()) - 1;

  bool decreasing_certified = true;  // every adjacent pair separated beyond CI
  bool increase_beyond_ci = false;   // some pair increased beyond CI
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const int i = order[k], j = order[k + 1];  // eps_i > eps_j
    const double lo_i = d_mean[i] - mult * d_se[i];
    const double hi_i = d_mean[i] + mult * d_se[i];
    const double lo_j = d_mean[j] - mult * d_se[j];
    const double hi_j = d_mean[j] + mult * d_se[j];
    if (!(lo_i > hi_j)) decreasing_certified = false;
    if (lo_j > hi_i) {
      increase_beyond_ci = true;
      rep.diagnostics.push_back("D(eps=" + detail::format_double(epsilons[j]) +
                                ") exceeds D(eps=" + detail::format_double(epsilons[i]) +
                                ") beyond CI");
    }
  }
  if (order.size() < 2) decreasing_certified = true;

  const bool too_many_exclusions = n_excluded > 0.05 * M;
  if (too_many_exclusions) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("more than 5% of replicas excluded");
  } else if (favorable_ratio > ratio_bound || increase_beyond_ci) {
    rep.verdict = Verdict::violated_beyond_CI;
    if (favorable_ratio > ratio_bound)
      rep.diagnostics.push_back("max/min ratio of D(eps)/eps exceeds " +
                                detail::format_double(ratio_bound) + " beyond CI");
  } else if (decreasing_certified) {
    rep.verdict = Verdict::within_bound;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("monotone decrease not resolved at this replica count");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exponential tail probability
// ---------------------------------------------------------------------------
// Estimate P{ sup_{t<=T} (||u_eps - u_0||_H^2 + ||w_eps - w_0||_H^2) >= r^2 }
// by coupled replicas and compare with the analytic tail bound
//   3 exp(-r^2 / (4 gamma eps^2 T)),   gamma = trace of the noise spectrum.
// The coefficient condition for the model must hold (checked up front); the
// comparison is attempted only when the bound lands in (0.02, 0.9), otherwise
// the verdict is inconclusive by design.
inline ExperimentReport tail_probability(double r, double epsilon, double T,
                                         const SimInputs& si, const McConfig& mc) {
  static constexpr const char* who = "tail_probability";
  detail::validate_mc(mc, who);
  if (!(r > 0) || !std::isfinite(r))
    throw std::invalid_argument(std::string(who) + ": threshold r must be positive");
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw std::invalid_argument(std::string(who) + ": epsilon must be positive");
  if (!(T > 0) || !std::isfinite(T))
    throw std::invalid_argument(std::string(who) + ": horizon must be positive");

  SimConfig cfg = si.config;
  cfg.T = T;
  cfg.record_every = 1;
  SimInputs local = si;
  local.config = cfg;
  detail::validate_inputs(local, who);

  const auto coeff = check_coefficient_condition(*si.model, si.op->constants.alpha,
                                                 si.op->constants.poincare_cp,
                                                 cfg.condition_box);
  if (!coeff.satisfied)
    throw std::invalid_argument(std::string(who) +
                                ": coefficient condition fails for this model/operator pair");

  const double gamma = si.spectrum->trace;
  if (!(gamma > 0))
    throw std::invalid_argument(std::string(who) + ": noise spectrum has zero trace");
  const double bound = 3 * std::exp(-(r * r) / (4 * gamma * epsilon * epsilon * T));

  const int M = mc.replicas;
  std::vector<double> sup_sq(static_cast<std::size_t>(M), 0.0);
  std::vector<char> excluded(static_cast<std::size_t>(M), 0);
  detail::run_replicas(M, mc.threads, [&](int rep_i) {
    const auto records = simulate_coupled(local.initial, cfg, *si.op, *si.model, *si.spectrum,
                                          {0.0, epsilon}, mc.master_seed,
                                          static_cast<std::uint32_t>(rep_i));
    if (records[0].blew_up || records[1].blew_up) {
      excluded[static_cast<std::size_t>(rep_i)] = 1;
      return;
    }
    double sup = 0;
    for (std::size_t k = 0; k < records[0].states.size(); ++k)
      sup = std::max(sup, detail::sq_norm_gap(records[1].states[k], records[0].states[k]));
    sup_sq[static_cast<std::size_t>(rep_i)] = sup;
  });

  ExperimentReport rep;
  rep.name = "tail_probability";
  detail::echo_common(rep, si, mc);
  rep.inputs.emplace_back("r", detail::format_double(r));
  rep.inputs.emplace_back("epsilon", detail::format_double(epsilon));
  rep.inputs.emplace_back("T", detail::format_double(T));
  rep.bound = bound;

  rep.replica_columns = {"excluded", "sup_sq_gap", "exceeded"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int n_excluded = 0, n_exceeded = 0, n_used = 0;
  for (int i = 0; i < M; ++i) {
    if (excluded[static_cast<std::size_t>(i)]) {
      ++n_excluded;
      rep.replica_stats.push_back({1.0, nan, nan});
      continue;
    }
    ++n_used;
    const bool hit = sup_sq[static_cast<std::size_t>(i)] >= r * r;
    n_exceeded += hit;
    rep.replica_stats.push_back({0.0, sup_sq[static_cast<std::size_t>(i)], hit ? 1.0 : 0.0});
  }
  rep.replicas_used = n_used;
  rep.replicas_excluded = n_excluded;
  if (n_excluded > 0)
    rep.diagnostics.push_back(std::to_string(n_excluded) + " of " + std::to_string(M) +
                              " replicas blew up and were excluded");

  if (n_used < 2) {
    rep.estimates.push_back({"tail_frequency", nan, nan});
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("fewer than two surviving replicas; no estimate");
    return rep;
  }

  const double freq = static_cast<double>(n_exceeded) / static_cast<double>(n_used);
  const double se = std::sqrt(freq * (1 - freq) / static_cast<double>(n_used));
  rep.estimates.push_back({"tail_frequency", freq, se});
  rep.primary = 0;

  if (n_excluded > 0.05 * M) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("more than 5% of replicas excluded");
  } else if (!(bound > 0.02 && bound < 0.9)) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("analytic bound " + detail::format_double(bound) +
                              " is outside the testable window (0.02, 0.9)");
  } else if (freq <= bound + mc.confidence_multiplier * se) {
    rep.verdict = Verdict::within_bound;
  } else {
    rep.verdict = Verdict::violated_beyond_CI;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stationary coupling distance
// ---------------------------------------------------------------------------
// Run two amplitudes eps1, eps2 on one shared path, discard [0, burn_in), and
// time-and-replica average ||u_1 - u_2||_H^2 + ||w_1 - w_2||_H^2 over
// [burn_in, horizon]. The estimate is compared against (eps1 - eps2)^2 * gamma.
// The comparison only speaks about the invariant measures under the asserted
// stationarity hypotheses, so `stationarity_hypotheses` must be set by the
// caller; the burn-in is auto-checked by recomputing the average from
// 2*burn_in and requiring agreement within one standard error.
inline ExperimentReport stationary_coupling(double eps1, double eps2, double burn_in,
                                            double horizon, const SimInputs& si,
                                            const McConfig& mc,
                                            bool stationarity_hypotheses = false) {
  static constexpr const char* who = "stationary_coupling";
  detail::validate_mc(mc, who);
  if (!(eps1 >= 0) || !(eps2 >= 0) || !std::isfinite(eps1) || !std::isfinite(eps2))
    throw std::invalid_argument(std::string(who) + ": amplitudes must be non-negative");
  if (!(burn_in >= 0) || !std::isfinite(burn_in))
    throw std::invalid_argument(std::string(who) + ": burn-in must be non-negative");
  if (!(horizon > 2 * burn_in))
    throw std::invalid_argument(std::string(who) +
                                ": horizon must exceed twice the burn-in (for the burn-in check)");
  if (si.config.source.fn)
    throw std::invalid_argument(std::string(who) + ": source must be time-independent");
  for (const auto& rect : si.config.source.rects)
    if (rect.t0 != 0 || rect.t1 != std::numeric_limits<double>::infinity())
      throw std::invalid_argument(std::string(who) + ": source must be time-independent");

  SimConfig cfg = si.config;
  cfg.T = horizon;
  SimInputs local = si;
  local.config = cfg;
  detail::validate_inputs(local, who);

  const int M = mc.replicas;
  std::vector<double> avg(static_cast<std::size_t>(M), 0.0);
  std::vector<double> avg_2b(static_cast<std::size_t>(M), 0.0);
  std::vector<char> excluded(static_cast<std::size_t>(M), 0);
  detail::run_replicas(M, mc.threads, [&](int r) {
    const auto records = simulate_coupled(local.initial, cfg, *si.op, *si.model, *si.spectrum,
                                          {eps1, eps2}, mc.master_seed,
                                          static_cast<std::uint32_t>(r));
    if (records[0].blew_up || records[1].blew_up) {
      excluded[static_cast<std::size_t>(r)] = 1;
      return;
    }
    double sum = 0, sum_2b = 0;
    int n = 0, n_2b = 0;
    for (std::size_t k = 0; k < records[0].states.size(); ++k) {
      const double t = records[0].states[k].t;
      if (t < burn_in) continue;
      const double d = detail::sq_norm_gap(records[0].states[k], records[1].states[k]);
      sum += d;
      ++n;
      if (t >= 2 * burn_in) {
        sum_2b += d;
        ++n_2b;
      }
    }
    avg[static_cast<std::size_t>(r)] = n > 0 ? sum / n : 0;
    avg_2b[static_cast<std::size_t>(r)] = n_2b > 0 ? sum_2b / n_2b : 0;
  });

  ExperimentReport rep;
  rep.name = "stationary_coupling";
  detail::echo_common(rep, si, mc);
  rep.inputs.emplace_back("eps1", detail::format_double(eps1));
  rep.inputs.emplace_back("eps2", detail::format_double(eps2));
  rep.inputs.emplace_back("burn_in", detail::format_double(burn_in));
  rep.inputs.emplace_back("horizon", detail::format_double(horizon));
  rep.inputs.emplace_back("stationarity_hypotheses",
                          stationarity_hypotheses ? "true" : "false");
  const double gamma = si.spectrum->trace;
  rep.bound = (eps1 - eps2) * (eps1 - eps2) * gamma;

  rep.replica_columns = {"excluded", "time_avg_sq_diff", "time_avg_sq_diff_2x_burn_in"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int n_excluded = 0;
  for (int r = 0; r < M; ++r) {
    if (excluded[static_cast<std::size_t>(r)]) {
      ++n_excluded;
      rep.replica_stats.push_back({1.0, nan, nan});
    } else {
      rep.replica_stats.push_back(
          {0.0, avg[static_cast<std::size_t>(r)], avg_2b[static_cast<std::size_t>(r)]});
    }
  }
  rep.replicas_used = M - n_excluded;
  rep.replicas_excluded = n_excluded;
  if (n_excluded > 0)
    rep.diagnostics.push_back(std::to_string(n_excluded) + " of " + std::to_string(M) +
                              " replicas blew up and were excluded");

  if (rep.replicas_used < 2) {
    rep.estimates.push_back({"mean_sq_coupling_distance", nan, nan});
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("fewer than two surviving replicas; no estimate");
    return rep;
  }

  std::vector<double> col, col_2b;
  for (int r = 0; r < M; ++r)
    if (!excluded[static_cast<std::size_t>(r)]) {
      col.push_back(avg[static_cast<std::size_t>(r)]);
      col_2b.push_back(avg_2b[static_cast<std::size_t>(r)]);
    }
  const auto [mean, se] = mc_estimate(col);
  const auto [mean_2b, se_2b] = mc_estimate(col_2b);
  rep.estimates.push_back({"mean_sq_coupling_distance", mean, se});
  rep.estimates.push_back({"mean_sq_coupling_distance_2x_burn_in", mean_2b, se_2b});
  rep.primary = 0;

  const bool burn_in_stable = std::abs(mean - mean_2b) < std::max(se, 1e-300) ||
                              (mean == 0 && mean_2b == 0);
  if (n_excluded > 0.05 * M) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("more than 5% of replicas excluded");
  } else if (!stationarity_hypotheses) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back(
        "stationarity hypotheses not asserted; the bound compares invariant measures");
  } else if (!burn_in_stable) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("doubling the burn-in moves the estimate by more than one "
                              "standard error; increase burn_in");
  } else if (mean <= rep.bound + mc.confidence_multiplier * se) {
    rep.verdict = Verdict::within_bound;
  } else {
    rep.verdict = Verdict::violated_beyond_CI;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Invariant-measure support bound
// ---------------------------------------------------------------------------
// Estimate the time averages (1/T) \int_0^T (||u||_V^2 + ||w||_H^2) dt for each
// horizon in `horizons` and fit the cumulative integral to
//   C(T) ~ intercept + K2_hat * T,   K1_hat = intercept / ||v0||_H^2,
// per replica. within_bound requires successive horizon averages to agree
// within 20%. Requires a summable noise spectrum and a certified quartic
// dissipation fit; any blow-up makes the verdict inconclusive.
inline ExperimentReport invariant_support(const SimInputs& si,
                                          const std::vector<double>& horizons,
                                          const McConfig& mc) {
  static constexpr const char* who = "invariant_support";
  detail::validate_mc(mc, who);
  if (horizons.empty()) throw std::invalid_argument(std::string(who) + ": empty horizon list");
  for (double h : horizons)
    if (!(h > 0) || !std::isfinite(h))
      throw std::invalid_argument(std::string(who) + ": horizons must be positive");
  for (std::size_t i = 0; i + 1 < horizons.size(); ++i)
    if (!(horizons[i] < horizons[i + 1]))
      throw std::invalid_argument(std::string(who) + ": horizons must be strictly increasing");

  SimConfig cfg = si.config;
  cfg.T = horizons.back();
  SimInputs local = si;
  local.config = cfg;
  detail::validate_inputs(local, who);

  const auto summ = check_summability(*si.spectrum, *si.op);
  if (summ.half_verdict != TailVerdict::converges || summ.sq_verdict != TailVerdict::converges)
    throw std::invalid_argument(
        std::string(who) + ": noise spectrum fails the summability check (half: " +
        tail_verdict_name(summ.half_verdict) + ", sq: " + tail_verdict_name(summ.sq_verdict) +
        ")");
  const auto quartic = fit_condition_c3(*si.model, cfg.condition_box);
  if (quartic.violated)
    throw std::invalid_argument(std::string(who) +
                                ": quartic dissipation fit failed: " + quartic.message);

  const double dt_record = cfg.dt * cfg.record_every;
  const int n_h = static_cast<int>(horizons.size());
  const int M = mc.replicas;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> averages(static_cast<std::size_t>(M),
                                            std::vector<double>(n_h, nan));
  std::vector<double> intercepts(static_cast<std::size_t>(M), nan);
  std::vector<double> slopes(static_cast<std::size_t>(M), nan);
  std::vector<char> excluded(static_cast<std::size_t>(M), 0);

  detail::run_replicas(M, mc.threads, [&](int r) {
    const auto rec = simulate(local.initial, cfg, *si.op, *si.model, *si.spectrum,
                              mc.master_seed, static_cast<std::uint32_t>(r));
    if (rec.blew_up) {
      excluded[static_cast<std::size_t>(r)] = 1;
      return;
    }
    const auto& rows = rec.ledger.rows;
    // Cumulative trapezoid of the support integrand over the record times.
    std::vector<double> cum(rows.size(), 0.0);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double y0 = rows[k - 1].norm_u_v2 + rows[k - 1].norm_w_h2;
      const double y1 = rows[k].norm_u_v2 + rows[k].norm_w_h2;
      cum[k] = cum[k - 1] + 0.5 * (y0 + y1) * (rows[k].t - rows[k - 1].t);
    }
    for (int i = 0; i < n_h; ++i) {
      std::size_t best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double gap = std::abs(rows[k].t - horizons[static_cast<std::size_t>(i)]);
        if (gap < best_gap) {
          best_gap = gap;
          best = k;
        }
      }
      if (best_gap > dt_record + 1e-9 || rows[best].t <= 0)
        throw std::invalid_argument(std::string(who) +
                                    ": horizon does not land on a recorded time");
      averages[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
          cum[best] / rows[best].t;
    }
    // Least squares line through (t_k, cum_k) over t_k > 0.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!(rows[k].t > 0)) continue;
      sx += rows[k].t;
      sy += cum[k];
      sxx += rows[k].t * rows[k].t;
      sxy += rows[k].t * cum[k];
      ++n;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0;
    slopes[static_cast<std::size_t>(r)] = slope;
    intercepts[static_cast<std::size_t>(r)] = (sy - slope * sx) / n;
  });

  ExperimentReport rep;
  rep.name = "invariant_support";
  detail::echo_common(rep, si, mc);
  for (int i = 0; i < n_h; ++i)
    rep.inputs.emplace_back("horizon_" + std::to_string(i),
                            detail::format_double(horizons[static_cast<std::size_t>(i)]));

  rep.replica_columns.push_back("excluded");
  for (int i = 0; i < n_h; ++i)
    rep.replica_columns.push_back(
        "time_avg_T=" + detail::format_double(horizons[static_cast<std::size_t>(i)]));
  rep.replica_columns.push_back("intercept");
  rep.replica_columns.push_back("slope");
  int n_excluded = 0;
  for (int r = 0; r < M; ++r) {
    std::vector<double> row{static_cast<double>(excluded[static_cast<std::size_t>(r)])};
    for (int i = 0; i < n_h; ++i)
      row.push_back(averages[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]);
    row.push_back(intercepts[static_cast<std::size_t>(r)]);
    row.push_back(slopes[static_cast<std::size_t>(r)]);
    rep.replica_stats.push_back(std::move(row));
    n_excluded += excluded[static_cast<std::size_t>(r)];
  }
  rep.replicas_used = M - n_excluded;
  rep.replicas_excluded = n_excluded;
  if (n_excluded > 0)
    rep.diagnostics.push_back(std::to_string(n_excluded) + " of " + std::to_string(M) +
                              " replicas blew up; partial results reported");

  if (rep.replicas_used < 2) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("fewer than two surviving replicas; no estimates");
    return rep;
  }

  std::vector<double> a_mean(n_h), a_se(n_h);
  for (int i = 0; i < n_h; ++i) {
    std::vector<double> col;
    for (int r = 0; r < M; ++r)
      if (!excluded[static_cast<std::size_t>(r)])
        col.push_back(averages[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]);
    const auto [mean, se] = mc_estimate(col);
    a_mean[static_cast<std::size_t>(i)] = mean;
    a_se[static_cast<std::size_t>(i)] = se;
    rep.estimates.push_back(
        {"time_avg_T=" + detail::format_double(horizons[static_cast<std::size_t>(i)]), mean,
         se});
  }
  std::vector<double> col_a, col_b;
  for (int r = 0; r < M; ++r)
    if (!excluded[static_cast<std::size_t>(r)]) {
      col_a.push_back(intercepts[static_cast<std::size_t>(r)]);
      col_b.push_back(slopes[static_cast<std::size_t>(r)]);
    }
  const auto [int_mean, int_se] = mc_estimate(col_a);
  const auto [slope_mean, slope_se] = mc_estimate(col_b);
  rep.estimates.push_back({"fit_intercept", int_mean, int_se});
  const double v0_sq = norm_h_sq(si.initial.u) + norm_h_sq(si.initial.w);
  rep.inputs.emplace_back("initial_norm_sq", detail::format_double(v0_sq));
  if (v0_sq > 0) {
    rep.estimates.push_back({"K1_hat", int_mean / v0_sq, int_se / v0_sq});
  } else {
    rep.estimates.push_back({"K1_hat", 0, 0});
    rep.diagnostics.push_back("zero initial data; K1_hat is reported as 0");
  }
  rep.estimates.push_back({"K2_hat", slope_mean, slope_se});

  // Boundedness surrogate: successive horizon averages agree within 20%.
  const double mult = mc.confidence_multiplier;
  bool stable = true, unstable_beyond_ci = false;
  for (int i = 0; i + 1 < n_h; ++i) {
    const double a = a_mean[static_cast<std::size_t>(i)];
    const double b = a_mean[static_cast<std::size_t>(i + 1)];
    const double ci = mult * (a_se[static_cast<std::size_t>(i)] +
                              a_se[static_cast<std::size_t>(i + 1)]);
    const double gap = std::abs(b - a);
    const double tol = 0.2 * std::abs(a) + 1e-12;
    if (gap > tol) {
      stable = false;
      if (gap - ci > tol) {
        unstable_beyond_ci = true;
        rep.diagnostics.push_back(
            "time averages at T=" +
            detail::format_double(horizons[static_cast<std::size_t>(i)]) + " and T=" +
            detail::format_double(horizons[static_cast<std::size_t>(i + 1)]) +
            " differ by more than 20% beyond CI");
      }
    }
  }

  if (n_excluded > 0) {
    rep.verdict = Verdict::inconclusive;  // a trajectory left the resolved regime
  } else if (unstable_beyond_ci) {
    rep.verdict = Verdict::violated_beyond_CI;
  } else if (stable) {
    rep.verdict = Verdict::within_bound;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostics.push_back("horizon averages not resolved at this replica count");
  }
  return rep;
}

}  // namespace bidosim
