#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cavread/errors.hpp"
#include "cavread/zeno_sim.hpp"
#include "support.hpp"

using namespace cavread;

namespace {

// w'' + r w' + Omega^2 w = 0 with w(0) = -1, w'(0) = 0.
double w_oracle(double omega, double r, double t) {
  const std::complex<double> mu = std::sqrt(std::complex<double>(omega * omega - r * r / 4.0, 0.0));
  if (std::abs(mu) < 1e-12) return -std::exp(-r * t / 2.0) * (1.0 + r * t / 2.0);
  const auto w = -std::exp(-r * t / 2.0) * (std::cos(mu * t) + (r / 2.0) * std::sin(mu * t) / mu);
  return w.real();
}

double transfer_oracle(const ZenoConfig& cfg, double n_tilde) {
  return 0.5 * (1.0 + w_oracle(cfg.rabi_frequency(), n_tilde / cfg.tau_us, cfg.tau_us));
}

}  // namespace

TEST_CASE("ideal transfer matches the analytic damped oscillator") {
  ZenoConfig cfg;
  CHECK(bloch_transfer(cfg, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  for (double nt : {0.1, 1.0, 2.5, 3.7, 5.0, 20.0, 200.0})
    CHECK(bloch_transfer(cfg, nt) == doctest::Approx(transfer_oracle(cfg, nt)).epsilon(1e-7));
  // Critical damping: r = 2 Omega.
  const double critical = 2.0 * cfg.rabi_frequency() * cfg.tau_us;
  CHECK(bloch_transfer(cfg, critical) == doctest::Approx(transfer_oracle(cfg, critical)).epsilon(1e-7));
  CHECK(bloch_transfer(cfg, 1e4) < 1e-3);
  CHECK(bloch_transfer(cfg, INFINITY) == 0.0);
  CHECK_THROWS_AS(bloch_transfer(cfg, -1.0), DomainError);
}

TEST_CASE("property: random pulses agree with the oscillator oracle") {
  testing::Gen gen(31);
  for (int i = 0; i < 50; ++i) {
    ZenoConfig cfg;
    cfg.tau_us = gen.uniform(1.0, 20.0);
    cfg.rabi = gen.uniform(0.0, 3.0);
    const double nt = gen.uniform(0.0, 30.0);
    CHECK(std::abs(bloch_transfer(cfg, nt) - transfer_oracle(cfg, nt)) < 1e-7);
  }
}

TEST_CASE("without drive the coherence decays as exp(-n_tilde)") {
  for (double nt : {0.0, 0.3, 1.0, 4.0}) {
    const BlochState start{0.6, 0.0, -0.8};
    const auto end = evolve_bloch(start, 0.0, nt / 8.8, 8.8);
    CHECK(end.w == doctest::Approx(start.w).epsilon(1e-12));
    CHECK(std::abs(end.coherence() / start.coherence() - coherence_decay(nt)) < 1e-6);
  }
  CHECK(coherence_decay(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(zeno_knowledge(0.0) == 0.0);
  CHECK(zeno_knowledge(1.0) == doctest::Approx(fln(2.0)));
  // n_tilde = 0.37 n: the back-action exponent per photon is 0.74.
  CHECK(zeno_knowledge(0.37 * 10.0) == doctest::Approx(fln(0.74 * 10.0)));
}

TEST_CASE("property: the Bloch vector never grows") {
  testing::Gen gen(32);
  for (int i = 0; i < 40; ++i) {
    const double th = gen.uniform(0, std::numbers::pi), ph = gen.uniform(0, 2 * std::numbers::pi);
    const BlochState s{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    const double rabi = gen.uniform(0, 2), rate = gen.uniform(0, 5), t = gen.uniform(0, 10);
    CHECK(evolve_bloch(s, rabi, rate, t).norm() <= 1.0 + 1e-9);
  }
}

TEST_CASE("trajectories agree with the ensemble within 3 sigma") {
  ZenoConfig cfg;
  CHECK(mc_zeno_transfer(cfg, 0.0, 100, 1).mean == 1.0);
  for (double nt : {0.1, 1.0, 5.0, 20.0}) {
    const auto mc = mc_zeno_transfer(cfg, nt, 40000, 11);
    CHECK(std::abs(mc.mean - bloch_transfer(cfg, nt)) < 3.0 * mc.sigma + 1e-12);
  }
  // Overdamped: the population leaks at Omega^2 tau / r, so n_tilde = 20 still transfers about 0.19.
  const auto strong = mc_zeno_transfer(cfg, 20.0, 20000, 3);
  CHECK(strong.mean < mc_zeno_transfer(cfg, 5.0, 20000, 3).mean);
  CHECK(std::abs(strong.mean - transfer_oracle(cfg, 20.0)) < 3.0 * strong.sigma);
  const auto a = mc_zeno_transfer(cfg, 2.0, 5000, 9), b = mc_zeno_transfer(cfg, 2.0, 5000, 9);
  CHECK(a.mean == b.mean);
}

TEST_CASE("imperfections and inversion") {
  ZenoConfig cfg;
  CHECK(apply_imperfections(1.0, cfg) == doctest::Approx(0.95));
  CHECK(apply_imperfections(0.0, cfg) == doctest::Approx(0.02));
  CHECK(apply_imperfections(0.5, cfg) == doctest::Approx(0.485));
  CHECK(infer_n_tilde(0.95, cfg) == 0.0);
  CHECK(std::abs(infer_n_tilde(apply_imperfections(bloch_transfer(cfg, 2.5), cfg), cfg) - 2.5) < 1e-5);
  CHECK(infer_n_tilde(0.021, cfg) > infer_n_tilde(0.03, cfg));
  CHECK_THROWS_AS(infer_n_tilde(0.02, cfg), OutOfModelError);
  CHECK_THROWS_AS(infer_n_tilde(0.96, cfg), OutOfModelError);
}

TEST_CASE("property: transfer decreases and inversion round-trips") {
  testing::Gen gen(33);
  ZenoConfig cfg;
  for (int i = 0; i < 60; ++i) {
    const double nt = gen.log_uniform(1e-3, 50.0);
    CHECK(bloch_transfer(cfg, nt * 1.1) < bloch_transfer(cfg, nt));
    CHECK(std::abs(infer_n_tilde(apply_imperfections(bloch_transfer(cfg, nt), cfg), cfg) - nt) < 1e-5);
  }
}

TEST_CASE("linear fit of n_tilde against n") {
  std::vector<ZenoPoint> exact;
  for (double n : {2.0, 5.0, 10.0, 15.0}) exact.push_back({n, 0.37 * n, 0.1});
  CHECK(fit_a0(exact).a0 == doctest::Approx(0.37).epsilon(1e-12));
  std::vector<ZenoPoint> zeros{{1, 0, 1}, {2, 0, 1}};
  CHECK(fit_a0(zeros).a0 == 0.0);
  CHECK_THROWS_AS(fit_a0(std::vector<ZenoPoint>{{1, 1, 1}}), DomainError);

  testing::Gen gen(34);
  int inside = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ZenoPoint> pts;
    for (double n = 1.0; n <= 20.0; n += 1.0) pts.push_back({n, 0.37 * n + 0.3 * gen.normal(), 0.3});
    const auto f = fit_a0(pts);
    inside += std::abs(f.a0 - 0.37) < 2.0 * f.sigma_a0;
  }
  // Two sigma covers 95.4%; allow for binomial scatter over 100 resamples.
  CHECK(inside >= 88);
}

TEST_CASE("configuration checks") {
  ZenoConfig cfg;
  CHECK(cfg.rabi_frequency() == doctest::Approx(std::numbers::pi / 8.8));
  cfg.p_floor = 0.96;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  ZenoConfig bad_tau;
  bad_tau.tau_us = 0.0;
  CHECK_THROWS_AS(bad_tau.validate(), DomainError);
}
