// Release acceptance harness. Drives the ten go/no-go checks end to end
// against the public headers only, prints exactly one [PASS]/[FAIL] line per
// criterion (with the measured numbers and elapsed time), and exits with the
// number of failed criteria. Every run is fully seeded and deterministic.

#include <bidosim/bidomain_operator.hpp>
#include <bidosim/elliptic.hpp>
#include <bidosim/experiments.hpp>
#include <bidosim/ionic.hpp>
#include <bidosim/mesh.hpp>
#include <bidosim/noise.hpp>
#include <bidosim/report_io.hpp>
#include <bidosim/rng.hpp>
#include <bidosim/sim.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace bidosim;
using std::numbers::pi;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

using Outcome = std::pair<bool, std::string>;

// Euclidean Moore-Penrose pseudoinverse via SVD; the shared constant null
// space is dropped by a relative singular-value cutoff.
Mat pinv(const Mat& m, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * sv.maxCoeff();
  Vec inv = sv;
  for (int i = 0; i < inv.size(); ++i) inv[i] = sv[i] > cut ? 1.0 / sv[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

BidomainOperator unit_sigma_operator(int n, double length = pi) {
  auto g = make_grid(1, length, n);
  return compose_bidomain(make_conductivity(g, 1.0), make_conductivity(g, 1.0), g);
}

Field random_unit_field(GridPtr g, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Vec v(g->size());
  for (int i = 0; i < v.size(); ++i) v[i] = nd(rng);
  Field f(g, v);
  f.values /= norm_h(f);
  return f;
}

State zero_state(GridPtr g) {
  return State{Field(g, Vec::Zero(g->size())), Field(g, Vec::Zero(g->size())), 0.0};
}

double estimate_value(const ExperimentReport& rep, const std::string& label) {
  for (const auto& e : rep.estimates)
    if (e.label == label) return e.value;
  return std::numeric_limits<double>::quiet_NaN();
}

// --- 1. operator eigenvalues, symmetry, dense-composition oracle ------------

Outcome criterion_operator() {
  auto op = unit_sigma_operator(513);
  double eig_rel = 0;
  for (int k = 1; k <= 10; ++k) {
    const double target = 0.5 * k * k;
    eig_rel = std::max(eig_rel, std::abs(op.eigenvalues[k] - target) / target);
  }

  std::mt19937 rng(101);
  double defect = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = random_unit_field(op.grid, rng);
    const Field v = random_unit_field(op.grid, rng);
    defect = std::max(defect, std::abs(inner_product_h(op.apply(u), v) -
                                       inner_product_h(u, op.apply(v))));
  }

  auto g = make_grid(1, pi, 64);
  auto ci = make_conductivity(g, 1.0);
  auto ce = make_conductivity(g, 1.0);
  auto oi = assemble_elliptic(ci, g);
  auto oe = assemble_elliptic(ce, g);
  auto op64 = compose_bidomain(oi, oe, ci, ce);
  const Mat winv = g->quadrature_weight.cwiseInverse().asDiagonal();
  const Mat Ai = winv * oi.stiffness;
  const Mat Ae = winv * oe.stiffness;
  const Mat composed = Ai * pinv(Ai + Ae) * Ae;
  std::normal_distribution<double> nd;
  double dense_err = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Vec u(g->size());
    for (int i = 0; i < u.size(); ++i) u[i] = nd(rng);
    const Vec direct = composed * u;
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    dense_err = std::max(dense_err, (direct - op64.apply(u)).cwiseAbs().maxCoeff() / scale);
  }

  const bool ok = eig_rel < 1e-3 && defect <= 1e-10 && dense_err <= 1e-9;
  return {ok, fmt("eigenvalue rel err %.2e < 1e-3, symmetry defect %.2e <= 1e-10, "
                  "dense oracle %.2e <= 1e-9",
                  eig_rel, defect, dense_err)};
}

// --- 2. semigroup acts diagonally on eigenfunctions --------------------------

Outcome criterion_semigroup(const BidomainOperator& op) {
  std::mt19937 rng(202);
  std::uniform_int_distribution<int> kd(0, op.modes() - 1);
  std::uniform_real_distribution<double> td(0.0, 2.0);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const int k = kd(rng);
    const double t = td(rng);
    const Field psi(op.grid, op.eigenvectors.col(k));
    const Field lhs = semigroup_apply(op, psi, t);
    const double decay = std::exp(-op.eigenvalues[k] * t);
    worst = std::max(worst, (lhs.values - decay * psi.values).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("20 random (k,t): max defect %.2e <= 1e-10", worst)};
}

// --- 3. stochastic convolution variance, linear mean-square growth ----------

Outcome criterion_noise_statistics(const BidomainOperator& op, const NoiseSpectrum& spec) {
  // (a) per-mode long-run variance of the stochastic convolution. The OU
  // recursion is exact in distribution at any dt, so 20 unit steps land on the
  // stationary law up to e^{-2 lambda_1 * 20} ~ 2e-9 relative bias.
  const int M = 10000, steps = 20;
  const int K = spec.modes();
  Mat samples(M, K);
  for (int r = 0; r < M; ++r) {
    auto st = make_convolution_state(spec, NoiseStream{777, static_cast<std::uint32_t>(r)});
    for (int s = 0; s < steps; ++s) convolution_step(st, spec, op, 1.0);
    samples.row(r) = st.values.transpose();
  }
  int bad_modes = 0;
  double worst_dev = 0;  // |var - target| in units of the 4 SE budget
  for (int k = 0; k < K; ++k) {
    const Vec col = samples.col(k);
    const double mean = col.mean();
    const double var = (col.array() - mean).matrix().squaredNorm() / (M - 1);
    const double target = convolution_stationary_variance(spec.gammas[k], op.eigenvalues[k + 1]);
    const double se = var * std::sqrt(2.0 / (M - 1));  // Gaussian variance estimator
    worst_dev = std::max(worst_dev, std::abs(var - target) / (4 * se));
    bad_modes += std::abs(var - target) > 4 * se;
  }

  // (b) zero-drift mean-square identity: the spectral scheme reproduces
  // E||u(T)||_H^2 = ||S(T)u0||^2 + eps^2 sum gamma_k (1-e^{-2 lambda_k T})/(2 lambda_k)
  // exactly in expectation, leaving pure MC error.
  auto zero = [](double) { return 0.0; };
  const auto drift_free = make_custom(zero, zero, zero, 0.0);
  State init = zero_state(op.grid);
  init.u = make_field_from(op.grid, [](double x, double) {
    return std::cos(x) + 0.5 * std::cos(3 * x);
  });
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 1.0;
  cfg.record_every = 20;
  cfg.epsilon = 0.5;
  const int M2 = 1000;
  std::vector<double> sq(M2);
  for (int r = 0; r < M2; ++r) {
    const auto rec = simulate(init, cfg, op, drift_free, spec, 778,
                              static_cast<std::uint32_t>(r));
    sq[static_cast<std::size_t>(r)] = norm_h_sq(rec.states.back().u);
  }
  const auto [mean2, se2] = mc_estimate(sq);
  double formula = norm_h_sq(semigroup_apply(op, init.u, cfg.T));
  for (int k = 0; k < K; ++k) {
    const double lam = op.eigenvalues[k + 1];
    formula += cfg.epsilon * cfg.epsilon * spec.gammas[k] * (-std::expm1(-2 * lam * cfg.T)) /
               (2 * lam);
  }
  const bool ok_b = std::abs(mean2 - formula) <= 4 * se2;

  const bool ok = bad_modes == 0 && ok_b;
  return {ok, fmt("all %d mode variances within 4 SE over 10^4 replicas (worst %.2f of "
                  "budget); mean-square %.5f vs formula %.5f within 4 SE (%.5f) over 10^3",
                  K, worst_dev, mean2, formula, 4 * se2)};
}

// --- 4. deterministic first-order convergence, 0-D ODE oracle ----------------

Outcome criterion_solver_order() {
  auto op = unit_sigma_operator(33);
  const auto fhn = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);
  const auto no_noise = make_spectrum(std::vector<double>{}, op);
  State init = zero_state(op.grid);
  init.u = make_field_from(op.grid, [](double x, double) { return 0.8 * std::cos(x) + 0.1; });

  auto final_at = [&](double dt) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.T = 1.0;
    cfg.record_every = static_cast<int>(std::llround(cfg.T / dt));
    return simulate(init, cfg, op, fhn, no_noise, 0).states.back();
  };
  const std::vector<double> dts{0.04, 0.02, 0.01, 0.005};
  const State ref = final_at(dts.back() / 100.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double dt : dts) {
    const State s = final_at(dt);
    const double err = std::sqrt(norm_h_sq(Field(op.grid, s.u.values - ref.u.values)) +
                                 norm_h_sq(Field(op.grid, s.w.values - ref.w.values)));
    const double lx = std::log(dt), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool ok_a = slope >= 0.8 && slope <= 1.2;

  // Spatially constant data: the grid run must track the pointwise ODE
  // u' = -f(u,w), w' = -g(u,w), integrated here by RK4 at dt = 1e-5.
  auto g9 = make_grid(1, pi, 9);
  auto op9 = compose_bidomain(make_conductivity(g9, 1.0), make_conductivity(g9, 1.0), g9);
  const auto none9 = make_spectrum(std::vector<double>{}, op9);
  State flat{Field(g9, Vec::Constant(9, 0.5)), Field(g9, Vec::Constant(9, 0.1)), 0.0};
  SimConfig cfg;
  cfg.dt = 2e-5;
  cfg.T = 5.0;
  cfg.record_every = static_cast<int>(std::llround(cfg.T / cfg.dt));
  const auto rec = simulate(flat, cfg, op9, fhn, none9, 0);
  const double u_sim = rec.states.back().u.values[0];
  const double w_sim = rec.states.back().w.values[0];

  double u = 0.5, w = 0.1;
  const double h = 1e-5;
  auto du = [&](double uu, double ww) { return -eval_f(fhn, uu, ww); };
  auto dw = [&](double uu, double ww) { return -eval_g(fhn, uu, ww); };
  for (int i = 0; i < 500000; ++i) {
    const double k1u = du(u, w), k1w = dw(u, w);
    const double k2u = du(u + 0.5 * h * k1u, w + 0.5 * h * k1w);
    const double k2w = dw(u + 0.5 * h * k1u, w + 0.5 * h * k1w);
    const double k3u = du(u + 0.5 * h * k2u, w + 0.5 * h * k2w);
    const double k3w = dw(u + 0.5 * h * k2u, w + 0.5 * h * k2w);
    const double k4u = du(u + h * k3u, w + h * k3w);
    const double k4w = dw(u + h * k3u, w + h * k3w);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
  }
  const double ode_gap = std::max(std::abs(u_sim - u), std::abs(w_sim - w));
  const bool ok_b = ode_gap <= 1e-4;

  return {ok_a && ok_b, fmt("self-convergence slope %.3f in [0.8, 1.2]; constant-data gap "
                            "to ODE oracle %.2e <= 1e-4 at T=5",
                            slope, ode_gap)};
}

// --- 5. coefficient-condition checker on the named models --------------------

Outcome criterion_condition_checker(const BidomainOperator& op) {
  const double alpha = op.constants.alpha;
  const double cp = op.constants.poincare_cp;
  const double ratio = alpha / cp;
  std::string why;

  const auto ac_ok = check_coefficient_condition(make_allen_cahn(0.95 * ratio), alpha, cp);
  const auto ac_bad = check_coefficient_condition(make_allen_cahn(1.05 * ratio), alpha, cp);
  bool ok = ac_ok.satisfied && !ac_bad.satisfied;
  if (!ok) why += " cubic threshold misclassified;";

  // Balanced cross coupling: when the u->w and w->u couplings cancel, the
  // admissibility must hold for every relaxation rate.
  for (double b : {0.1, 1.0, 10.0}) {
    const auto r = check_coefficient_condition(make_fitzhugh_nagumo(0.8, 0.5, b, 0.8), alpha, cp);
    if (!r.satisfied) {
      ok = false;
      why += fmt(" balanced coupling rejected at b=%g;", b);
    }
  }

  // Skewed cross coupling beyond the relaxation rate must trip the
  // nonnegative-c2 sub-flag.
  const auto skew = check_coefficient_condition(make_fitzhugh_nagumo(1.0, 0.5, 0.1, 5.0),
                                                alpha, cp);
  if (skew.c3_criterion) {
    ok = false;
    why += " skewed coupling not flagged;";
  }

  const IonicModel named[] = {
      make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8),
      make_aliev_panfilov(1.5, 8.0, 0.15),
      make_rogers_mcculloch(2.0, 1.2, 0.3, 0.9, 0.4),
      make_allen_cahn(0.7),
  };
  for (const auto& m : named) {
    const auto growth = fit_condition_c1(m);
    const auto quartic = fit_condition_c3(m);
    if (growth.unbounded || quartic.violated) {
      ok = false;
      why += fmt(" %s fails growth/dissipation certification;", ionic_kind_name(m.kind));
    }
  }

  if (ok)
    why = fmt("thresholds at alpha/C_p=%.4f classified both ways; skew flagged; all four "
              "named models certify growth + dissipation",
              ratio);
  return {ok, why};
}

// --- 6. small-noise deviation ladder -----------------------------------------

Outcome criterion_small_noise(const BidomainOperator& op, const NoiseSpectrum& spec,
                              const IonicModel& fhn) {
  SimInputs si;
  si.initial = zero_state(op.grid);
  si.config.dt = 0.01;
  si.config.T = 2.0;
  si.op = &op;
  si.model = &fhn;
  si.spectrum = &spec;
  McConfig mc;
  mc.replicas = 500;
  mc.master_seed = 4242;
  mc.confidence_multiplier = 4;
  mc.threads = 1;
  const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
  const auto rep = small_noise_deviation(ladder, si, mc, 3.0);

  std::string d_list;
  for (double e : ladder)
    d_list += fmt(" D(%g)=%.4g", e, estimate_value(rep, fmt("D_eps=%g", e)));
  const double fav = estimate_value(rep, "ratio_ci_favorable");
  return {rep.verdict == Verdict::within_bound,
          fmt("verdict %s:%s; CI-favorable max/min of D(eps)/eps = %.2f vs bound 3",
              verdict_name(rep.verdict), d_list.c_str(), fav)};
}

// --- 7. exponential tail bound ------------------------------------------------

Outcome criterion_tail(const BidomainOperator& op, const NoiseSpectrum& spec,
                       const IonicModel& fhn) {
  const double gamma = spec.trace;
  const double epsilon = 0.1, T = 1.0;
  // Threshold placed so the analytic bound 3 exp(-r^2/(4 gamma eps^2 T)) is 0.3.
  const double r = std::sqrt(std::log(10.0) * 4 * gamma * epsilon * epsilon * T);

  SimInputs si;
  si.initial = zero_state(op.grid);
  si.config.dt = 0.01;
  si.op = &op;
  si.model = &fhn;
  si.spectrum = &spec;
  McConfig mc;
  mc.replicas = 2000;
  mc.master_seed = 555;
  mc.confidence_multiplier = 2;  // binomial CI at two standard errors
  mc.threads = 1;
  const auto rep = tail_probability(r, epsilon, T, si, mc);
  const double freq = estimate_value(rep, "tail_frequency");
  return {rep.verdict == Verdict::within_bound,
          fmt("verdict %s: frequency %.4f vs bound %.4f + 2 SE over %d replicas",
              verdict_name(rep.verdict), freq, rep.bound, rep.replicas_used)};
}

// --- 8. stationary coupling distance ------------------------------------------

Outcome criterion_stationary(const BidomainOperator& op, const NoiseSpectrum& spec,
                             const IonicModel& fhn) {
  SimInputs si;
  si.initial = zero_state(op.grid);
  si.config.dt = 0.01;
  si.config.record_every = 5;
  si.op = &op;
  si.model = &fhn;
  si.spectrum = &spec;
  McConfig mc;
  mc.replicas = 200;
  mc.master_seed = 888;
  mc.confidence_multiplier = 4;
  mc.threads = 1;
  const auto rep = stationary_coupling(0.2, 0.1, 5.0, 20.0, si, mc, true);
  const double est = estimate_value(rep, "mean_sq_coupling_distance");
  return {rep.verdict == Verdict::within_bound,
          fmt("verdict %s: estimate %.5f vs bound %.3f + CI (burn-in auto-validated)",
              verdict_name(rep.verdict), est, rep.bound)};
}

// --- 9. invariant-support time averages ----------------------------------------

Outcome criterion_support(const BidomainOperator& op, const NoiseSpectrum& spec,
                          const IonicModel& fhn) {
  SimInputs si;
  si.initial = zero_state(op.grid);
  si.config.dt = 0.01;
  si.config.record_every = 10;
  si.config.epsilon = 0.1;
  si.op = &op;
  si.model = &fhn;
  si.spectrum = &spec;
  McConfig mc;
  mc.replicas = 128;
  mc.master_seed = 999;
  mc.confidence_multiplier = 4;
  mc.threads = 1;
  const std::vector<double> horizons{10, 20, 40};
  const auto rep = invariant_support(si, horizons, mc);

  double avg[3];
  std::string list;
  for (int i = 0; i < 3; ++i) {
    avg[i] = estimate_value(rep, fmt("time_avg_T=%g", horizons[static_cast<std::size_t>(i)]));
    list += fmt(" %.4f", avg[i]);
  }
  bool pairwise = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      pairwise = pairwise && std::abs(avg[i] - avg[j]) <=
                                 0.2 * std::max(std::abs(avg[i]), std::abs(avg[j])) + 1e-12;
  return {rep.verdict == Verdict::within_bound && pairwise,
          fmt("verdict %s: averages{%s } pairwise within 20%%: %s",
              verdict_name(rep.verdict), list.c_str(), pairwise ? "yes" : "no")};
}

// --- 10. byte-identical reruns across thread counts ----------------------------

Outcome criterion_reproducibility(const IonicModel& fhn) {
  auto op = unit_sigma_operator(33);
  const auto spec = normalize_trace(make_spectrum(PowerLawRule{3.0, 1.0}, 8, op), 1.0);
  SimInputs si;
  si.initial = zero_state(op.grid);
  si.config.dt = 0.01;
  si.config.T = 0.5;
  si.op = &op;
  si.model = &fhn;
  si.spectrum = &spec;
  McConfig serial;
  serial.replicas = 16;
  serial.master_seed = 31337;
  serial.threads = 1;
  McConfig pooled = serial;
  pooled.threads = 4;

  const std::vector<double> ladder{0.2, 0.1};
  const auto a = small_noise_deviation(ladder, si, serial);
  const auto b = small_noise_deviation(ladder, si, pooled);
  const auto c = small_noise_deviation(ladder, si, serial);  // plain rerun
  const bool reports = report_json(a).dump(2) == report_json(b).dump(2) &&
                       report_json(a).dump(2) == report_json(c).dump(2);
  const bool tables = replica_csv(a) == replica_csv(b) && replica_csv(a) == replica_csv(c);

  SimConfig cfg = si.config;
  cfg.epsilon = 0.1;
  const auto t1 = simulate(si.initial, cfg, op, fhn, spec, 7, 3);
  const auto t2 = simulate(si.initial, cfg, op, fhn, spec, 7, 3);
  const bool ledgers = ledger_csv(t1.ledger) == ledger_csv(t2.ledger);

  return {reports && tables && ledgers,
          fmt("report JSON %s, replica CSV %s, trajectory CSV %s across reruns and "
              "1 vs 4 threads",
              reports ? "identical" : "DIFFERS", tables ? "identical" : "DIFFERS",
              ledgers ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  std::printf("acceptance: ten criteria, deterministic seeds, single process\n");

  // Shared fixtures: the default production operator and noise spectrum.
  const auto op = unit_sigma_operator(129);
  const auto spec = normalize_trace(make_spectrum(PowerLawRule{3.0, 1.0}, 32, op), 1.0);
  const auto fhn = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);

  int failures = 0;
  auto run = [&failures](int number, const char* title, double limit_s, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      auto res = fn();
      ok = res.first;
      detail = std::move(res.second);
    } catch (const std::exception& e) {
      detail = fmt("exception: %s", e.what());
    }
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && elapsed >= limit_s) {
      ok = false;
      detail += fmt("; TIME LIMIT %gs EXCEEDED", limit_s);
    }
    std::printf("[%s] %2d. %s (%s; %.1fs)\n", ok ? "PASS" : "FAIL", number, title,
                detail.c_str(), elapsed);
    std::fflush(stdout);
    failures += !ok;
  };

  run(1, "bidomain eigenvalues, symmetry, dense-composition oracle", 10,
      [] { return criterion_operator(); });
  run(2, "semigroup acts diagonally on eigenfunctions", 0,
      [&] { return criterion_semigroup(op); });
  run(3, "convolution variance and linear mean-square growth", 120,
      [&] { return criterion_noise_statistics(op, spec); });
  run(4, "first-order deterministic convergence, constant-data ODE oracle", 0,
      [] { return criterion_solver_order(); });
  run(5, "coefficient-condition checker on the named models", 0,
      [&] { return criterion_condition_checker(op); });
  run(6, "small-noise deviation ladder", 600,
      [&] { return criterion_small_noise(op, spec, fhn); });
  run(7, "exponential tail bound", 900, [&] { return criterion_tail(op, spec, fhn); });
  run(8, "stationary coupling distance", 900,
      [&] { return criterion_stationary(op, spec, fhn); });
  run(9, "invariant-support time averages", 600,
      [&] { return criterion_support(op, spec, fhn); });
  run(10, "byte-identical reruns across thread counts", 0,
      [&] { return criterion_reproducibility(fhn); });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
