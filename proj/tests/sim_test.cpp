#include <bidosim/sim.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace bidosim;

namespace {

BidomainOperator unit_op(int n, double length = 3.14159265358979323846) {
  auto g = make_grid(1, length, n);
  auto spec = make_conductivity(g, 1.0);
  return compose_bidomain(spec, spec, g);
}

IonicModel zero_model() {
  return make_custom([](double) { return 0.0; }, [](double) { return 0.0; },
                     [](double) { return 0.0; }, 0.0);
}

NoiseSpectrum no_noise(const BidomainOperator& op) {
  return make_spectrum(std::vector<double>{}, op);
}

bool same_values(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("pure semigroup: zero reaction relaxes each mode exactly") {
  auto op = unit_op(33);
  auto u0 = make_field_from(op.grid, [](double x, double) {
    return 0.7 * std::cos(x) + 0.2 * std::cos(3 * x) + 0.05;
  });
  State init{u0, make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 1.0;
  auto rec = simulate(init, cfg, op, zero_model(), no_noise(op), 1);
  REQUIRE(!rec.blew_up);
  REQUIRE(rec.steps_taken == 20);
  const Field expect = semigroup_apply(op, u0, 1.0);
  CHECK((rec.states.back().u.values - expect.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec.states.back().w.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rec.states.back().t == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("spatially constant run reproduces the 0-D kinetics") {
  // A annihilates constants, so the PDE collapses to u' = -f, w' = -g.
  auto op = unit_op(5, 1.0);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  State init{make_field(op.grid, 0.4), make_field(op.grid, 0.1), 0.0};
  SimConfig cfg;
  cfg.dt = 2e-5;
  cfg.T = 5.0;
  cfg.record_every = 50000;
  auto rec = simulate(init, cfg, op, m, no_noise(op), 0);
  REQUIRE(!rec.blew_up);

  // dense two-variable Runge-Kutta reference
  double u = 0.4, w = 0.1;
  const double h = 1e-4;
  auto du = [&](double uu, double ww) { return -eval_f(m, uu, ww); };
  auto dw = [&](double uu, double ww) { return -eval_g(m, uu, ww); };
  for (int i = 0; i < 50000; ++i) {
    const double k1u = du(u, w), k1w = dw(u, w);
    const double k2u = du(u + 0.5 * h * k1u, w + 0.5 * h * k1w),
                 k2w = dw(u + 0.5 * h * k1u, w + 0.5 * h * k1w);
    const double k3u = du(u + 0.5 * h * k2u, w + 0.5 * h * k2w),
                 k3w = dw(u + 0.5 * h * k2u, w + 0.5 * h * k2w);
    const double k4u = du(u + h * k3u, w + h * k3w), k4w = dw(u + h * k3u, w + h * k3w);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
  }
  const auto& last = rec.states.back();
  CHECK(last.u.values[2] == Catch::Approx(u).margin(1e-4));
  CHECK(last.w.values[2] == Catch::Approx(w).margin(1e-4));
  // the field stays spatially constant
  CHECK(last.u.values.maxCoeff() - last.u.values.minCoeff() < 1e-10);
}

TEST_CASE("deterministic runs converge at first order in dt") {
  auto op = unit_op(17);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  auto u0 = make_field_from(op.grid, [](double x, double) { return 0.8 * std::cos(x) + 0.1; });
  State init{u0, make_field(op.grid, 0.0), 0.0};

  auto at_T = [&](double dt) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.T = 1.0;
    cfg.record_every = 1 << 20;
    return simulate(init, cfg, op, m, no_noise(op), 0).states.back().u;
  };
  const Field ref = at_T(1e-4);
  const double e1 = norm_h(Field(op.grid, at_T(0.02).values - ref.values));
  const double e2 = norm_h(Field(op.grid, at_T(0.01).values - ref.values));
  CHECK(e1 / e2 == Catch::Approx(2.0).margin(0.5));
}

TEST_CASE("equilibrium stays identically zero") {
  auto op = unit_op(17);
  auto m = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);
  State init{make_field(op.grid, 0.0), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.5;
  auto rec = simulate(init, cfg, op, m, no_noise(op), 3);
  for (const auto& row : rec.ledger.rows) {
    CHECK(row.norm_u_h2 == 0.0);
    CHECK(row.norm_w_h2 == 0.0);
    CHECK(row.a_uu == 0.0);
  }
}

TEST_CASE("same seed reproduces the trajectory bit for bit") {
  auto op = unit_op(33);
  auto m = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);
  auto s = make_spectrum(PowerLawRule{3.0, 1.0}, 8, op);
  State init{make_field(op.grid, 0.2), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.5;
  cfg.epsilon = 0.2;
  auto a = simulate(init, cfg, op, m, s, 42);
  auto b = simulate(init, cfg, op, m, s, 42);
  REQUIRE(a.ledger.rows.size() == b.ledger.rows.size());
  for (size_t i = 0; i < a.ledger.rows.size(); ++i) {
    CHECK(a.ledger.rows[i].norm_u_h2 == b.ledger.rows[i].norm_u_h2);
    CHECK(a.ledger.rows[i].c3_residual == b.ledger.rows[i].c3_residual);
  }
  CHECK(same_values(a.states.back().u.values, b.states.back().u.values));

  auto c = simulate(init, cfg, op, m, s, 43);
  CHECK(!same_values(a.states.back().u.values, c.states.back().u.values));
}

TEST_CASE("spatial mean of u moves only through the reaction and source") {
  auto op = unit_op(33);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  auto u = make_field_from(op.grid, [](double x, double) { return std::sin(2 * x) + 0.3; });
  auto w = make_field_from(op.grid, [](double x, double) { return 0.2 * std::cos(x); });
  State s{u, w, 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.source.constant = 0.25;
  cfg.source.rects.push_back({1.5, 0.5, 1.5, 0, 0, 0.0, 10.0});

  // modal noise increment with nothing on the constant mode
  Vec noise = Vec::Zero(op.eigenvalues.size());
  for (int k = 1; k < 6; ++k) noise[k] = 0.01 * k;

  State next = step_imex(s, cfg, op, m, noise);
  const Field f = eval_f(m, s.u, s.w);
  Vec rhs = -f.values + source_values(cfg.source, *op.grid, 0.0);
  const double before = op.to_modal(s.u.values)[0];
  const double after = op.to_modal(next.u.values)[0];
  const double expected = before + cfg.dt * op.to_modal(rhs)[0];
  CHECK(after == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("noisy run keeps finite energy and non-negative dissipation residual") {
  auto op = unit_op(65);
  auto m = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);
  auto s = normalize_trace(make_spectrum(PowerLawRule{3.0, 1.0}, 16, op), 1.0);
  State init{make_field(op.grid, 0.1), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 10.0;
  cfg.epsilon = 0.1;
  cfg.record_every = 10;
  auto rec = simulate(init, cfg, op, m, s, 7);
  REQUIRE(!rec.blew_up);
  CHECK(rec.steps_taken == 1000);
  CHECK(rec.states.back().t == Catch::Approx(10.0).margin(cfg.dt));
  REQUIRE(!rec.ledger.quartic_violated);
  double sup = 0;
  for (const auto& row : rec.ledger.rows) {
    sup = std::max(sup, row.norm_u_h2 + row.norm_w_h2);
    const double scale = 1 + std::abs(row.u_l4_4) + row.norm_u_h2 + row.norm_w_h2;
    CHECK(row.c3_residual >= -1e-8 * scale);
    CHECK(std::isfinite(row.norm_u_v2));
    CHECK(row.a_uu >= -1e-10);
  }
  CHECK(sup > 0);
  CHECK(std::isfinite(sup));
}

TEST_CASE("coupled runs share one Brownian path") {
  auto op = unit_op(33);
  auto m = make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8);
  auto s = make_spectrum(PowerLawRule{3.0, 1.0}, 8, op);
  State init{make_field(op.grid, 0.2), make_field(op.grid, 0.05), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.6;
  cfg.record_every = 10;

  auto recs = simulate_coupled(init, cfg, op, m, s, {0.0, 0.0, 0.1, 0.1, 0.2}, 11);
  REQUIRE(recs.size() == 5);
  // equal amplitudes agree bit for bit
  CHECK(same_values(recs[0].states.back().u.values, recs[1].states.back().u.values));
  CHECK(same_values(recs[2].states.back().u.values, recs[3].states.back().u.values));
  // distinct amplitudes genuinely differ
  CHECK(!same_values(recs[2].states.back().u.values, recs[4].states.back().u.values));
  CHECK(!same_values(recs[0].states.back().u.values, recs[2].states.back().u.values));

  // the eps = 0 member is the deterministic run
  SimConfig det = cfg;
  det.epsilon = 0.0;
  auto solo = simulate(init, det, op, m, no_noise(op), 999);
  CHECK(same_values(recs[0].states.back().u.values, solo.states.back().u.values));
  CHECK(same_values(recs[0].states.back().w.values, solo.states.back().w.values));

  CHECK_THROWS_AS(simulate_coupled(init, cfg, op, m, s, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_coupled(init, cfg, op, m, s, {-0.1}, 1), std::invalid_argument);
}

TEST_CASE("transformed integration matches the direct path") {
  auto op = unit_op(33);
  auto s = make_spectrum(PowerLawRule{3.0, 1.0}, 8, op);
  auto u0 = make_field_from(op.grid, [](double x, double) { return 0.5 * std::cos(2 * x); });
  State init{u0, make_field(op.grid, 0.0), 0.0};

  SECTION("zero noise: identical to simulate") {
    auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
    SimConfig cfg;
    cfg.dt = 0.02;
    cfg.T = 0.5;
    auto direct = simulate(init, cfg, op, m, s, 5);
    auto shifted = simulate_transformed(init, cfg, op, m, s, 5);
    CHECK(same_values(direct.states.back().u.values, shifted.states.back().u.values));
    CHECK(same_values(direct.states.back().w.values, shifted.states.back().w.values));
  }

  SECTION("linear system: both are exact per mode, pathwise agreement") {
    auto m = zero_model();
    SimConfig cfg;
    cfg.dt = 0.1;
    cfg.T = 1.0;
    cfg.epsilon = 0.5;
    auto direct = simulate(init, cfg, op, m, s, 21);
    auto shifted = simulate_transformed(init, cfg, op, m, s, 21);
    const double gap = (direct.states.back().u.values - shifted.states.back().u.values)
                           .cwiseAbs()
                           .maxCoeff();
    CHECK(gap < 1e-10);
  }

  SECTION("nonlinear: the gap shrinks linearly with dt") {
    auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
    auto gap_at = [&](double dt) {
      SimConfig cfg;
      cfg.dt = dt;
      cfg.T = 1.0;
      cfg.epsilon = 0.1;
      cfg.record_every = 1 << 20;
      auto direct = simulate(init, cfg, op, m, s, 33);
      auto shifted = simulate_transformed(init, cfg, op, m, s, 33);
      return norm_h(Field(op.grid,
                          direct.states.back().u.values - shifted.states.back().u.values));
    };
    const double g1 = gap_at(0.02), g2 = gap_at(0.01);
    CHECK(g1 / g2 == Catch::Approx(2.0).margin(0.8));
  }

  SECTION("explicit scheme refused") {
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 0.1;
    cfg.scheme = Scheme::explicit_em;
    CHECK_THROWS_AS(simulate_transformed(init, cfg, op, zero_model(), s, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("source terms follow geometry and time windows") {
  auto g1d = make_grid(1, 2.0, 5);  // nodes 0, 0.5, 1, 1.5, 2
  SourceTerm src;
  src.constant = 0.5;
  src.rects.push_back({2.0, 0.5, 1.0, 0, 0, 1.0, 2.0});
  Vec off = source_values(src, *g1d, 0.5);
  CHECK(off.isApproxToConstant(0.5));
  Vec on = source_values(src, *g1d, 1.5);
  CHECK(on[0] == 0.5);
  CHECK(on[1] == 2.5);
  CHECK(on[2] == 2.5);
  CHECK(on[3] == 0.5);
  Vec expired = source_values(src, *g1d, 2.0);  // window is [t0, t1)
  CHECK(expired.isApproxToConstant(0.5));

  auto g2d = make_grid(2, std::vector<double>{1.0, 1.0}, 3);
  SourceTerm planar;
  planar.rects.push_back({1.0, 0.0, 0.5, 0.5, 1.0, 0.0,
                          std::numeric_limits<double>::infinity()});
  Vec v = source_values(planar, *g2d, 0.0);
  CHECK(v[g2d->index(0, 1)] == 1.0);
  CHECK(v[g2d->index(1, 1)] == 1.0);
  CHECK(v[g2d->index(0, 2)] == 1.0);
  CHECK(v[g2d->index(2, 2)] == 0.0);
  CHECK(v[g2d->index(0, 0)] == 0.0);

  SourceTerm ramp;
  ramp.fn = [](double t, double x, double) { return t * x; };
  Vec r = source_values(ramp, *g1d, 2.0);
  CHECK(r[3] == Catch::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("explicit scheme: stability guard and first-order linear decay") {
  auto op = unit_op(33);
  const double lam_max = op.eigenvalues[op.eigenvalues.size() - 1];
  State init{Field(op.grid, op.eigenvectors.col(1)), make_field(op.grid, 0.0), 0.0};

  SimConfig bad;
  bad.scheme = Scheme::explicit_em;
  bad.dt = 2.5 / lam_max;
  bad.T = 1.0;
  CHECK_THROWS_AS(simulate(init, bad, op, zero_model(), no_noise(op), 1),
                  std::invalid_argument);

  auto coeff_err = [&](double dt) {
    SimConfig cfg;
    cfg.scheme = Scheme::explicit_em;
    cfg.dt = dt;
    cfg.T = 0.256;
    cfg.record_every = 1 << 20;
    auto rec = simulate(init, cfg, op, zero_model(), no_noise(op), 1);
    const double got = op.to_modal(rec.states.back().u.values)[1];
    return std::abs(got - std::exp(-op.eigenvalues[1] * 0.256));
  };
  const double e1 = coeff_err(0.002), e2 = coeff_err(0.001);
  CHECK(e1 / e2 == Catch::Approx(2.0).margin(0.25));

  // noisy explicit run stays finite at a stable step size
  auto s = make_spectrum(PowerLawRule{3.0, 1.0}, 8, op);
  SimConfig noisy;
  noisy.scheme = Scheme::explicit_em;
  noisy.dt = 1e-3;
  noisy.T = 0.2;
  noisy.epsilon = 0.3;
  noisy.record_every = 50;
  auto rec = simulate(init, noisy, op, make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8), s, 2);
  CHECK(!rec.blew_up);
  CHECK(std::isfinite(rec.ledger.rows.back().norm_u_h2));
  CHECK(rec.ledger.rows.back().norm_u_h2 > 0);
}

TEST_CASE("finite-time blow-up is detected and reported finitely") {
  // f = -u^3 makes u' = +u^3: explosion at t = 1/(2 u0^2) = 0.5
  auto op = unit_op(5, 1.0);
  auto m = make_custom([](double u) { return -u * u * u; }, [](double) { return 0.0; },
                       [](double) { return 0.0; }, 0.0);
  State init{make_field(op.grid, 1.0), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 1.0;
  cfg.record_every = 20;
  auto rec = simulate(init, cfg, op, m, no_noise(op), 0);
  CHECK(rec.blew_up);
  CHECK(rec.blowup_time > 0.3);
  CHECK(rec.blowup_time < 0.7);
  CHECK(rec.steps_taken < 1000);
  CHECK(rec.ledger.quartic_violated);  // u f1 has no positive quartic direction
  REQUIRE(!rec.ledger.rows.empty());
  for (const auto& row : rec.ledger.rows) {
    CHECK(std::isfinite(row.norm_u_h2));
    CHECK(std::isfinite(row.c3_residual));
  }
  CHECK(std::isfinite(norm_h(rec.states.back().u)));
}

TEST_CASE("recording cadence covers start, stride and final step") {
  auto op = unit_op(9, 1.0);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  State init{make_field(op.grid, 0.1), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 1.0;
  cfg.record_every = 3;
  auto rec = simulate(init, cfg, op, m, no_noise(op), 0);
  REQUIRE(rec.ledger.rows.size() == 5);  // steps 0, 3, 6, 9, 10
  CHECK(rec.states.size() == rec.ledger.rows.size());
  CHECK(rec.ledger.rows[0].t == Catch::Approx(0.0).margin(1e-15));
  CHECK(rec.ledger.rows[1].t == Catch::Approx(0.3).margin(1e-12));
  CHECK(rec.ledger.rows[3].t == Catch::Approx(0.9).margin(1e-12));
  CHECK(rec.ledger.rows[4].t == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("ledger serializes to CSV with stable columns") {
  auto op = unit_op(9, 1.0);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  State init{make_field(op.grid, 0.3), make_field(op.grid, 0.1), 0.0};
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 0.3;
  auto rec = simulate(init, cfg, op, m, no_noise(op), 0);
  const std::string csv = ledger_csv(rec.ledger);
  CHECK(csv.rfind("t,norm_u_H2,norm_w_H2,norm_u_V2,u_L4_4,a_uu,c3_residual\n", 0) == 0);
  const size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == rec.ledger.rows.size() + 1);
  // second line round-trips the recorded u-norm exactly
  const size_t first_nl = csv.find('\n');
  const size_t second_nl = csv.find('\n', first_nl + 1);
  const std::string line = csv.substr(first_nl + 1, second_nl - first_nl - 1);
  const size_t comma = line.find(',');
  const std::string u_h2 = line.substr(comma + 1, line.find(',', comma + 1) - comma - 1);
  CHECK(std::strtod(u_h2.c_str(), nullptr) == rec.ledger.rows[0].norm_u_h2);
}

TEST_CASE("simulation input validation") {
  auto op = unit_op(17);
  auto other = unit_op(9);
  auto m = make_fitzhugh_nagumo(1.0, 0.5, 1.0, 0.8);
  State init{make_field(op.grid, 0.0), make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.1;

  SimConfig bad = cfg;
  bad.dt = 0;
  CHECK_THROWS_AS(simulate(init, bad, op, m, no_noise(op), 1), std::invalid_argument);
  bad = cfg;
  bad.T = 0.001;
  CHECK_THROWS_AS(simulate(init, bad, op, m, no_noise(op), 1), std::invalid_argument);
  bad = cfg;
  bad.record_every = 0;
  CHECK_THROWS_AS(simulate(init, bad, op, m, no_noise(op), 1), std::invalid_argument);
  bad = cfg;
  bad.epsilon = -0.1;
  CHECK_THROWS_AS(simulate(init, bad, op, m, no_noise(op), 1), std::invalid_argument);

  State mismatched{make_field(other.grid, 0.0), make_field(other.grid, 0.0), 0.0};
  CHECK_THROWS_AS(simulate(mismatched, cfg, op, m, no_noise(op), 1), std::invalid_argument);

  auto foreign = make_spectrum(PowerLawRule{3.0, 1.0}, 4, other);
  SimConfig noisy = cfg;
  noisy.epsilon = 0.1;
  CHECK_THROWS_AS(simulate(init, noisy, op, m, foreign, 1), std::invalid_argument);

  Vec short_noise = Vec::Zero(3);
  CHECK_THROWS_AS(step_imex(init, cfg, op, m, short_noise), std::invalid_argument);
}

TEST_CASE("linear SPDE mean-square energy matches the closed form") {
  auto op = unit_op(33);
  auto m = zero_model();
  auto s = make_spectrum(PowerLawRule{2.0, 0.5}, 8, op);
  auto u0 = make_field_from(op.grid, [](double x, double) { return 0.4 * std::cos(x); });
  State init{u0, make_field(op.grid, 0.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 1.0;
  cfg.epsilon = 0.3;
  cfg.record_every = 1 << 20;

  const int M = 1000;
  double sum = 0, sumsq = 0;
  for (int r = 0; r < M; ++r) {
    auto rec = simulate(init, cfg, op, m, s, 2024, std::uint32_t(r));
    const double e = rec.ledger.rows.back().norm_u_h2;
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / M;
  const double sd = std::sqrt((sumsq - M * mean * mean) / (M - 1));

  double expect = norm_h_sq(semigroup_apply(op, u0, 1.0));
  for (int k = 1; k <= 8; ++k)
    expect += cfg.epsilon * cfg.epsilon * s.gammas[k - 1] *
              (-std::expm1(-2 * op.eigenvalues[k] * 1.0)) / (2 * op.eigenvalues[k]);
  CHECK(std::abs(mean - expect) < 4 * sd / std::sqrt(double(M)));
}
