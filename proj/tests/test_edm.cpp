#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "qres/edm.hpp"
#include "qres/error.hpp"
#include "support.hpp"

using namespace qres;
using qres::test::Draw;

namespace {

constexpr double kPi = std::numbers::pi;

EdmConfig make_config(double p_i, double eps_t, double T, double n_bar, std::size_t cycles, std::uint64_t seed,
                      std::vector<int> pattern) {
  EdmConfig c;
  c.model.p_i = p_i;
  c.T = T;
  c.e_field = 7000.0;
  c.d_n = edm_from_epsilon(eps_t / T, c.e_field);
  c.delta_omega_list = EdmConfig::default_delta_omega(T);
  c.field_pattern = std::move(pattern);
  c.n_bar = n_bar;
  c.cycles_per_run = cycles;
  c.seed = seed;
  return c;
}

std::vector<CycleRecord> noiseless(const EdmConfig& c) {
  std::vector<CycleRecord> out;
  for (std::size_t j = 0; j < c.total_cycles(); ++j) {
    const auto [np, nm] = expected_counts(c, c.delta_omega(j), c.field_sign(j));
    out.push_back({j, c.delta_omega(j), c.field_sign(j), np, nm});
  }
  return out;
}

// Mean fitted fringe phase of both channels, times T.
double fitted_phase(const EdmConfig& c) {
  const auto [up, down] = fit_run(simulate_all(c), c.T);
  return 0.5 * (up.phi_fit + down.phi_fit) * c.T;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

TEST_CASE("unit conversion") {
  // 2 d E / hbar with d in C m and E in V/m
  const double d = 3e-26;
  const double e = 7000.0;
  const double expected = 2.0 * (d * 1.602176634e-19 * 1e-2) * (e * 1e2) / 1.054571817e-34;
  CHECK(epsilon_from_edm(d, e) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(edm_from_epsilon(epsilon_from_edm(d, e), e) == doctest::Approx(d).epsilon(1e-14));
}

TEST_CASE("imperfection model") {
  CHECK(ImperfectionModel{0.8, 0.05}.alpha() == doctest::Approx(0.72));
  CHECK(ImperfectionModel{0.0, 0.2}.alpha() == 0.0);
  CHECK(ImperfectionModel{0.7, 0.5}.alpha() == 0.0);
  CHECK_THROWS_AS((ImperfectionModel{1.2, 0.0}.validate()), InvalidConfig);
  CHECK_THROWS_AS((ImperfectionModel{0.5, -0.1}.validate()), InvalidConfig);
}

TEST_CASE("detection probability") {
  const ImperfectionModel perfect{1.0, 0.0};
  CHECK(std::abs(detection_probability(perfect, 0.0, 0.0, Spin::up)) < 1e-16);
  CHECK(detection_probability(perfect, 0.0, 0.0, Spin::down) == doctest::Approx(1.0).epsilon(1e-16));
  for (double phi : {0.0, 0.4, 1.3}) {
    CHECK(detection_probability({0.0, 0.3}, phi, 0.01, Spin::up) == 0.5);
    CHECK(detection_probability({0.0, 0.3}, phi, 0.01, Spin::down) == 0.5);
  }
  const ImperfectionModel m{0.8, 0.05};
  for (Spin s : {Spin::up, Spin::down}) {
    CHECK(std::abs(detection_probability(m, 0.3, 1e-3, s) - detection_probability_explicit(m, 0.3, 1e-3, s)) <
          1e-14);
  }
}

TEST_CASE("closed form matches the four-term combination on 1000 draws") {
  Draw d(41);
  for (int k = 0; k < 1000; ++k) {
    const ImperfectionModel m{d.uniform(0.0, 1.0), d.uniform(0.0, 1.0)};
    const double phi = d.uniform(-kPi, kPi);
    const double eps_t = d.uniform(-0.1, 0.1);
    const double up = detection_probability(m, phi, eps_t, Spin::up);
    const double down = detection_probability(m, phi, eps_t, Spin::down);
    CHECK(std::abs(up - detection_probability_explicit(m, phi, eps_t, Spin::up)) < 1e-14);
    CHECK(std::abs(down - detection_probability_explicit(m, phi, eps_t, Spin::down)) < 1e-14);
    CHECK(up + down == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("first-order detection") {
  const ImperfectionModel m{0.58, 0.0};
  for (double phi : {0.2, kPi / 4, 1.1}) {
    CHECK(std::abs(first_order_detection(m, phi, 0.0, Spin::up) - detection_probability(m, phi, 0.0, Spin::up)) <
          1e-15);
  }
  CHECK(std::abs(first_order_detection(m, kPi / 4, 1e-3, Spin::up) - detection_probability(m, kPi / 4, 1e-3, Spin::up)) <=
        1e-6);
  // at phi = pi/4 the quadratic term vanishes, so the halving check uses another phase
  double previous = 0.0;
  for (double eps_t : {1e-2, 5e-3, 2.5e-3}) {
    const double r = std::abs(first_order_detection(m, 0.3, eps_t, Spin::down) -
                              detection_probability(m, 0.3, eps_t, Spin::down));
    if (previous > 0.0) {
      CHECK(previous / r > 3.2);
      CHECK(previous / r < 4.8);
    }
    previous = r;
  }
}

TEST_CASE("cycle simulation") {
  EdmConfig c = make_config(1.0, 0.0, 130.0, 14000.0, 50, 99, {1});
  c.delta_omega_list = {0.0};
  for (const auto& r : simulate_all(c)) CHECK(r.n_plus == 0.0);

  c = make_config(0.58, 2e-3, 130.0, 14000.0, 50, 99, {1, -1});
  const CycleRecord a = simulate_cycle(c, 17);
  const CycleRecord b = simulate_cycle(c, 17);
  CHECK(a.n_plus == b.n_plus);
  CHECK(a.n_minus == b.n_minus);
  CHECK(a.field_sign == -1);
  CHECK(a.delta_omega == c.delta_omega(17));
  {
    qres::test::ScopedEnv env("QRES_THREADS", "3");
    const auto all = simulate_all(c);
    CHECK(all[17].n_plus == a.n_plus);
  }

  c = make_config(0.58, 0.0, 130.0, 200.0, 10000, 5, {1});
  c.delta_omega_list = {kPi / (2.0 * c.T) * 0.8};
  const auto recs = simulate_all(c);
  const double expected = expected_counts(c, c.delta_omega_list[0], 1).first;
  double sum = 0.0;
  for (const auto& r : recs) sum += r.n_plus;
  CHECK(std::abs(sum / recs.size() - expected) <= 4.0 * std::sqrt(expected) / 100.0);
}

TEST_CASE("noiseless fit recovers the fringe") {
  const EdmConfig c = make_config(0.58, 0.3, 130.0, 14000.0, 40, 1, {-1});
  const auto [up, down] = fit_run(noiseless(c), c.T);
  const double phi = c.epsilon_magnitude();
  for (const RunFit& f : {up, down}) {
    CHECK(f.converged);
    CHECK(f.n_bar_fit == doctest::Approx(14000.0).epsilon(1e-9));
    CHECK(f.alpha_fit == doctest::Approx(0.58).epsilon(1e-9));
    CHECK(f.phi_fit == doctest::Approx(phi).epsilon(1e-9));
  }
}

TEST_CASE("fit input checks") {
  EdmConfig c = make_config(0.58, 0.0, 130.0, 14000.0, 20, 1, {1});
  c.delta_omega_list = {0.01};
  CHECK_THROWS_AS(fit_run(noiseless(c), c.T), InsufficientData);
  c = make_config(0.58, 0.0, 130.0, 14000.0, 3, 1, {1});
  CHECK_THROWS_AS(fit_run(noiseless(c), c.T), InsufficientData);
}

TEST_CASE("fitted phase scatter follows counting statistics") {
  const double T = 130.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const EdmConfig c = make_config(0.58, 2e-3, T, 14000.0, 400, 500 + seed, {-1});
    const auto recs = simulate_all(c);
    const auto [up, down] = fit_run(recs, T);
    double n_up = 0.0;
    double n_down = 0.0;
    for (const auto& r : recs) {
      n_up += r.n_plus;
      n_down += r.n_minus;
    }
    const double truth = c.epsilon_magnitude();
    CHECK(std::abs(up.phi_fit - truth) <= 4.0 / (std::sqrt(n_up) * 0.58 * T));
    CHECK(std::abs(down.phi_fit - truth) <= 4.0 / (std::sqrt(n_down) * 0.58 * T));
  }
}

TEST_CASE("zero injection Monte Carlo") {
  std::vector<double> est;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    est.push_back(fitted_phase(make_config(0.58, 0.0, 130.0, 14000.0, 400, 2000 + seed, {-1})));
  }
  const double predicted = 1.0 / (0.58 * std::sqrt(2.0 * 14000.0 * 400.0));
  const double sd = stddev(est);
  CHECK(std::abs(mean(est)) <= 4.0 * sd / std::sqrt(est.size()));
  CHECK(std::abs(sd / predicted - 1.0) <= 0.25);
}

TEST_CASE("injection recovery") {
  for (double injected : {1e-3, 2e-3, 5e-3}) {
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const EdmConfig c = make_config(0.58, injected, 130.0, 50000.0, 1000, 9000 + seed, {-1});
      est.push_back(fitted_phase(c));
    }
    const double sigma = 1.0 / (0.58 * std::sqrt(2.0 * 50000.0 * 1000.0));
    REQUIRE(sigma < injected / 5.0);
    CHECK(std::abs(mean(est) - injected) < 0.1 * injected);
  }
}

TEST_CASE("cycle phase inversion") {
  const double T = 130.0;
  RunFit fit;
  fit.n_bar_fit = 14000.0;
  fit.alpha_fit = 0.58;
  fit.phi_fit = 0.0;

  EdmConfig c = make_config(0.58, 0.0, T, 14000.0, 8, 1, {1});
  for (const auto& r : noiseless(c)) {
    CHECK(std::abs(extract_cycle_phase(r, fit, T, Spin::up)) < 1e-10);
    CHECK(std::abs(extract_cycle_phase(r, fit, T, Spin::down)) < 1e-10);
  }

  c = make_config(0.58, 2e-3, T, 14000.0, 1, 1, {-1});
  const double dw = kPi / (2.0 * T);
  const auto [np, nm] = expected_counts(c, dw, -1);
  const CycleRecord rec{0, dw, -1, np, nm};
  CHECK(std::abs(extract_cycle_phase(rec, fit, T, Spin::up) * T - 2e-3) < 1e-9);
  CHECK(std::abs(extract_cycle_phase(rec, fit, T, Spin::down) * T - 2e-3) < 1e-9);

  const CycleRecord bad{0, dw, 1, 14000.0 * (1.0 + 1.2 * 0.58), 14000.0};
  CHECK_THROWS_AS(extract_cycle_phase(bad, fit, T, Spin::up), OutOfRange);
}

TEST_CASE("EDM estimate") {
  SUBCASE("null injection") {
    EdmConfig c = make_config(0.58, 0.0, 130.0, 14000.0, 1000, 77, EdmConfig::default_field_pattern());
    const auto recs = simulate_all(c);
    const auto est = estimate_edm(recs, fit_all_runs(recs, c), c);
    double n = 0.0;
    for (const auto& r : recs) n += r.n_plus + r.n_minus;
    const double sigma = uncertainties(0.58, c.e_field, c.T, n, kPi / 4).sigma_d;
    CHECK(std::abs(est.d_ecm) <= 3.0 * sigma);
    CHECK(est.used_cycles + est.dropped_cycles == 1000);
  }
  SUBCASE("injected 5e-24 e cm") {
    EdmConfig c = make_config(0.58, 0.0, 130.0, 14000.0, 1000, 78, EdmConfig::default_field_pattern());
    c.d_n = 5e-24;
    const auto recs = simulate_all(c);
    const auto fits = fit_all_runs(recs, c);
    const auto est = estimate_edm(recs, fits, c);
    double n = 0.0;
    for (const auto& r : recs) n += r.n_plus + r.n_minus;
    const double sigma = uncertainties(0.58, c.e_field, c.T, n, kPi / 4).sigma_d;
    CHECK(std::abs(est.d_ecm - 5e-24) <= 3.0 * sigma);

    // relabelling the field directions flips the sign
    auto flipped = recs;
    for (auto& r : flipped) r.field_sign = -r.field_sign;
    CHECK(estimate_edm(flipped, fits, c).d_ecm == doctest::Approx(-est.d_ecm).epsilon(1e-12));
  }
  SUBCASE("one field direction only") {
    const EdmConfig c = make_config(0.58, 0.0, 130.0, 14000.0, 40, 79, {1});
    const auto recs = simulate_all(c);
    CHECK_THROWS_AS(estimate_edm(recs, fit_all_runs(recs, c), c), MissingFieldSign);
  }
}

TEST_CASE("weak value from a run") {
  RunFit fit;
  fit.phi_fit = 0.001;
  const double T = 2.0;
  const auto dw_for = [&](double x) { return fit.phi_fit + x / T; };
  CHECK(weak_value_from_run(fit, dw_for(kPi / 2), T) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(weak_value_from_run(fit, dw_for(kPi), T)) < 1e-14);
  CHECK(std::abs(weak_value_from_run(fit, dw_for(0.4), T) - std::sin(0.4) / (1.0 - std::cos(0.4))) < 1e-14);
  CHECK_THROWS_AS(weak_value_from_run(fit, fit.phi_fit, T), Diverged);
}

TEST_CASE("uncertainties") {
  const UncertaintyReport r = uncertainties(0.58, 7000.0, 130.0, 2.5e9, kPi / 4);
  CHECK(std::abs(r.sigma_d / 1.34e-26 - 1.0) <= 0.1);
  CHECK(r.sigma_phi_t == doctest::Approx(1.0 / (0.58 * std::sqrt(2.5e9))));
  const UncertaintyReport o = uncertainties(0.58, 7000.0, 130.0, 2.5e9, kPi / 4, 3.71e-5);
  CHECK(std::abs(o.sigma_im_weak - 7.42e-5) <= 1e-12 * 7.42e-5 + 1e-20);
  const UncertaintyReport q = uncertainties(0.58, 7000.0, 130.0, 2.5e9, kPi / 2);
  CHECK(q.sigma_im_weak == doctest::Approx(q.sigma_phi_t).epsilon(1e-15));
}

TEST_CASE("cycle CSV") {
  const EdmConfig c = make_config(0.58, 1e-3, 130.0, 14000.0, 16, 3, EdmConfig::default_field_pattern());
  const auto recs = simulate_all(c);
  std::ostringstream out;
  write_cycles_csv(out, recs);
  CHECK(out.str().rfind("j,delta_omega,field_sign,n_plus,n_minus\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_cycles_csv(in);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].j == recs[i].j);
    CHECK(back[i].delta_omega == recs[i].delta_omega);
    CHECK(back[i].field_sign == recs[i].field_sign);
    CHECK(back[i].n_plus == recs[i].n_plus);
    CHECK(back[i].n_minus == recs[i].n_minus);
  }

  std::istringstream crlf("j,delta_omega,field_sign,n_plus,n_minus\r\n0,0.1,1,5,6\r\n");
  CHECK(read_cycles_csv(crlf).size() == 1);

  const auto parse_line = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_cycles_csv(s);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(parse_line("j,n\n") == 1);
  CHECK(parse_line("j,delta_omega,field_sign,n_plus,n_minus\n0,0.1,1,5,6\n1,0.1,1,5\n") == 3);
  CHECK(parse_line("j,delta_omega,field_sign,n_plus,n_minus\n0,0.1,2,5,6\n") == 2);
  CHECK(parse_line("j,delta_omega,field_sign,n_plus,n_minus\n0,abc,1,5,6\n") == 2);
  CHECK(parse_line("j,delta_omega,field_sign,n_plus,n_minus\n0,0.1,1,-5,6\n") == 2);
}

TEST_CASE("config validation") {
  EdmConfig c = make_config(0.58, 0.0, 130.0, 14000.0, 10, 1, {1, -1});
  CHECK_NOTHROW(c.validate());
  c.omega2_tau = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = make_config(0.58, 0.0, 130.0, 14000.0, 10, 1, {1, -1});
  c.n_bar = 0.0;
  c.T = -1.0;
  try {
    c.validate();
    FAIL("expected InvalidConfig");
  } catch (const InvalidConfig& e) {
    CHECK(e.violations().size() >= 2);
  }
  const auto dw = EdmConfig::default_delta_omega(2.0);
  REQUIRE(dw.size() == 4);
  CHECK(std::abs(dw[0] + 1.2 * kPi / 4.0) < 1e-15);
  CHECK(std::abs(dw[2] - 0.8 * kPi / 4.0) < 1e-15);
}
