#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cavread/detection_stats.hpp"
#include "cavread/errors.hpp"
#include "support.hpp"

using namespace cavread;

namespace {

double poisson_pmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

struct Lattice {
  double tv = 0.0;       // sum |P0 - P1| / 2
  double min_sum = 0.0;  // sum min(P0, P1)
};

// Brute-force sums over a generous square lattice.
Lattice lattice_oracle(const CountDistributions& d, double n, int cut) {
  Lattice l;
  for (int a = 0; a <= cut; ++a)
    for (int b = 0; b <= cut; ++b) {
      const double p0 = poisson_pmf(n * d.mu_T0, a) * poisson_pmf(n * d.mu_R0, b);
      const double p1 = poisson_pmf(n * d.mu_T1, a) * poisson_pmf(n * d.mu_R1, b);
      l.tv += 0.5 * std::abs(p0 - p1);
      l.min_sum += std::min(p0, p1);
    }
  return l;
}

// Chernoff exponent by dense grid search over s.
double xi_oracle(const CountingCoefficients& c, DetectorEfficiency eta = {}) {
  const double T0 = c.T0 * eta.transmission, T1 = c.T1 * eta.transmission;
  const double R0 = c.R0 * eta.reflection, R1 = c.R1 * eta.reflection;
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double s = i / 200000.0;
    const double f = std::pow(T0, s) * std::pow(T1, 1 - s) + std::pow(R0, s) * std::pow(R1, 1 - s) -
                     s * (T0 + R0) - (1 - s) * (T1 + R1);
    best = std::min(best, f);
  }
  return -best;
}

const CountingCoefficients kPaper = paper_counting_coefficients();
const DetectorEfficiency kEta = paper_detector_efficiency();

}  // namespace

TEST_CASE("closed-form exponent at s = 1/2") {
  const double oracle = (0.13 + 0.0024 + 0.42 + 0.99) / 2 - std::sqrt(0.13 * 0.0024) - std::sqrt(0.42 * 0.99);
  CHECK(closed_form_xi_half(kPaper) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(closed_form_xi_half(kPaper) == doctest::Approx(0.109).epsilon(0.003 / 0.109));
}

TEST_CASE("Chernoff exponent matches a dense grid search") {
  const auto r = chernoff_exponent(kPaper);
  CHECK(r.xi == doctest::Approx(xi_oracle(kPaper)).epsilon(1e-9));
  CHECK(r.xi >= closed_form_xi_half(kPaper));
  CHECK(r.s_star > 0.0);
  CHECK(r.s_star < 1.0);
  const auto e = chernoff_exponent(kPaper, kEta);
  CHECK(e.xi == doctest::Approx(xi_oracle(kPaper, kEta)).epsilon(1e-9));
  CHECK(e.xi >= 0.039);
  CHECK(e.xi <= 0.053);
}

TEST_CASE("Chernoff exponent edge cases") {
  // Identical states carry no information.
  CHECK(chernoff_exponent({0.3, 0.3, 0.5, 0.5}).xi == doctest::Approx(0.0).epsilon(1e-12));
  // A state that is perfectly dark: xi = T0 + R0 at s = 1.
  CHECK(chernoff_exponent({1.0, 0.0, 0.0, 0.0}).xi == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(chernoff_exponent({-0.1, 0, 0, 0}), DomainError);
}

TEST_CASE("property: Chernoff exponent is symmetric and scales with efficiency") {
  testing::Gen gen(21);
  for (int i = 0; i < 60; ++i) {
    const CountingCoefficients c{gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1)};
    const CountingCoefficients swapped{c.T1, c.T0, c.R1, c.R0};
    const double eta = gen.uniform(0.05, 1.0);
    const double xi = chernoff_exponent(c).xi;
    CHECK(chernoff_exponent(swapped).xi == doctest::Approx(xi).epsilon(1e-9));
    CHECK(chernoff_exponent(c, {eta, eta}).xi == doctest::Approx(eta * xi).epsilon(1e-8));
    CHECK(xi >= closed_form_xi_half(c) - 1e-12);
  }
}

TEST_CASE("l1 error against a brute-force lattice") {
  const auto d = CountDistributions::from(kPaper, kEta);
  for (double n : {1.0, 5.0, 20.0, 40.0}) {
    const auto l = lattice_oracle(d, n, 120);
    CHECK(l1_error(d, n) == doctest::Approx(0.5 * l.min_sum).epsilon(1e-10));
    CHECK(l1_error(d, n) == doctest::Approx(0.5 * (1.0 - l.tv)).epsilon(1e-10));
  }
  CHECK(l1_error(d, 0.0) == 0.5);
}

TEST_CASE("l1 error refuses a lossy truncation") {
  const auto d = CountDistributions::from(kPaper);
  CHECK_THROWS_AS(l1_error(d, 100.0, 10), TruncationError);
  CHECK_THROWS_AS(l1_error(d, -1.0), DomainError);
}

TEST_CASE("property: l1 error sits between the Bhattacharyya and Chernoff bounds") {
  testing::Gen gen(22);
  for (int i = 0; i < 60; ++i) {
    const CountingCoefficients c{gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1)};
    const auto d = CountDistributions::from(c);
    const double n = gen.uniform(0.0, 60.0);
    const double eps = l1_error(d, n);
    const double bc = std::exp(-closed_form_xi_half(c) * n);
    CHECK(eps <= 0.5 * std::exp(-chernoff_exponent(c).xi * n) + 1e-12);
    CHECK(eps >= 0.5 * (1.0 - std::sqrt(1.0 - bc * bc)) - 1e-12);
    CHECK(l1_error(d, n + 5.0) <= eps + 1e-12);
  }
}

TEST_CASE("sqrt(1-Q) gap matches the lattice oracle") {
  const auto d = CountDistributions::from(kPaper, kEta);
  const double xi = xi_oracle(d.as_coefficients());
  for (double n : {1.0, 10.0, 40.0}) {
    const double oracle = std::abs(lattice_oracle(d, n, 120).tv - std::sqrt(1.0 - std::exp(-xi * n)));
    CHECK(chernoff_vs_l1_gap(d, n) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("count distributions") {
  const auto d = CountDistributions::from(kPaper, kEta);
  CHECK(d.mu_T0 == doctest::Approx(0.13 * 0.47));
  CHECK(d.mu_R1 == doctest::Approx(0.99 * 0.31));
  CHECK(d.mean_T(QubitState::One) == d.mu_T1);
  CHECK_THROWS_AS((CountDistributions{-1, 0, 0, 0}.validate()), DomainError);
  CHECK(default_truncation(d, 100.0) ==
        static_cast<int>(std::ceil(100.0 * d.mu_R1 + 10.0 * std::sqrt(100.0 * d.mu_R1) + 20.0)));
}

TEST_CASE("records are reproducible and have the right means") {
  const auto d = CountDistributions::from(kPaper);
  CHECK(simulate_record(QubitState::One, 50.0, d, 0.0, 7u) == simulate_record(QubitState::One, 50.0, d, 0.0, 7u));
  Rng rng = make_rng(3);
  double sum_T = 0.0, sum_R = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const auto r = simulate_record(QubitState::Zero, 20.0, d, 0.0, rng);
    sum_T += r.n_T;
    sum_R += r.n_R;
  }
  // Means 2.6 and 8.4; standard errors sqrt(mean/N).
  CHECK(std::abs(sum_T / N - 20.0 * d.mu_T0) < 4.0 * std::sqrt(20.0 * d.mu_T0 / N));
  CHECK(std::abs(sum_R / N - 20.0 * d.mu_R0) < 4.0 * std::sqrt(20.0 * d.mu_R0 / N));
  CHECK_THROWS_AS(simulate_record(QubitState::One, 5.0, d, 1.5, rng), DomainError);
}

TEST_CASE("a certain jump switches the statistics") {
  const auto d = CountDistributions::from({1.0, 0.0, 0.0, 1.0});
  Rng rng = make_rng(5);
  // Without a jump a state-1 record never has transmitted counts.
  for (int i = 0; i < 200; ++i) CHECK(simulate_record(QubitState::One, 30.0, d, 0.0, rng).n_T == 0);
  int with_T = 0;
  for (int i = 0; i < 200; ++i) with_T += simulate_record(QubitState::One, 30.0, d, 1.0, rng).n_T > 0;
  CHECK(with_T > 150);
}

TEST_CASE("maximum-likelihood classification") {
  const auto d = CountDistributions::from(kPaper);
  // Many transmitted photons point to state 0, only reflection to state 1.
  CHECK(ml_classify({5, 2}, d, 20.0).state == QubitState::Zero);
  CHECK(ml_classify({0, 20}, d, 20.0).state == QubitState::One);
  // Equal likelihoods and the impossible record both go to state 1.
  const auto same = CountDistributions::from({0.5, 0.5, 0.5, 0.5});
  CHECK(ml_classify({3, 3}, same, 10.0).state == QubitState::One);
  const auto split = CountDistributions::from({1.0, 0.0, 0.0, 1.0});
  CHECK(ml_classify({2, 2}, split, 10.0).state == QubitState::One);
  CHECK(ml_classify({2, 0}, split, 10.0).state == QubitState::Zero);
}

TEST_CASE("property: the ML rule agrees with a direct likelihood comparison") {
  testing::Gen gen(23);
  const auto d = CountDistributions::from(kPaper, kEta);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const CountRecord rec{static_cast<std::uint64_t>(gen.integer(0, 20)), static_cast<std::uint64_t>(gen.integer(0, 40))};
    const double n = gen.uniform(1.0, 60.0);
    const int a = static_cast<int>(rec.n_T), b = static_cast<int>(rec.n_R);
    const double p0 = poisson_pmf(n * d.mu_T0, a) * poisson_pmf(n * d.mu_R0, b);
    const double p1 = poisson_pmf(n * d.mu_T1, a) * poisson_pmf(n * d.mu_R1, b);
    if (std::abs(p0 - p1) > 1e-9 * std::max(p0, p1))
      CHECK(ml_classify(rec, d, n).state == (p0 > p1 ? QubitState::Zero : QubitState::One));
  }
}

TEST_CASE("Monte Carlo error agrees with the exact error") {
  const auto d = CountDistributions::from(kPaper, kEta);
  for (double n : {5.0, 20.0}) {
    const auto r = empirical_error(50000, n, d, JumpModel::none(), 99);
    const double exact = l1_error(d, n);
    const double sigma = std::sqrt(exact * (1.0 - exact) / (2.0 * 50000));
    CHECK(std::abs(r.epsilon - exact) < 3.0 * sigma);
    CHECK(r.ci_half_width == doctest::Approx(sigma).epsilon(0.1));
    CHECK(r.epsilon == doctest::Approx(0.5 * (r.epsilon_0 + r.epsilon_1)));
  }
}

TEST_CASE("Monte Carlo error is deterministic in the seed") {
  const auto d = CountDistributions::from(kPaper, kEta);
  const auto a = empirical_error(4000, 10.0, d, JumpModel{}, 42);
  const auto b = empirical_error(4000, 10.0, d, JumpModel{}, 42);
  const auto c = empirical_error(4000, 10.0, d, JumpModel{}, 43);
  CHECK(a.epsilon_0 == b.epsilon_0);
  CHECK(a.epsilon_1 == b.epsilon_1);
  CHECK((a.epsilon_0 != c.epsilon_0 || a.epsilon_1 != c.epsilon_1));
  CHECK_THROWS_AS(empirical_error(0, 10.0, d, JumpModel{}, 1), DomainError);
}

TEST_CASE("depumping raises the error for long pulses") {
  const auto d = CountDistributions::from(kPaper, kEta);
  const auto plain = empirical_error(20000, 200.0, d, JumpModel::none(), 8);
  const auto jumps = empirical_error(20000, 200.0, d, JumpModel{}, 8);
  CHECK(jumps.epsilon > plain.epsilon + 5.0 * jumps.ci_half_width);
  CHECK(jumps.epsilon_0 == doctest::Approx(plain.epsilon_0));
}

TEST_CASE("error report CSV") {
  const auto d = CountDistributions::from(kPaper, kEta);
  std::vector<ErrorReportRow> rows{{5.0, empirical_error(1000, 5.0, d, JumpModel::none(), 1)}};
  std::ostringstream out;
  write_error_report_csv(out, rows);
  const auto text = out.str();
  CHECK(text.rfind("n,epsilon,ci,knowledge,knowledge_ci\n", 0) == 0);
  CHECK(text.find("\n5,") != std::string::npos);
}

TEST_CASE("knowledge with confidence interval") {
  DetectionErrorReport r;
  r.epsilon = 0.05;
  r.ci_half_width = 0.005;
  CHECK(r.knowledge() == doctest::Approx(-std::log(0.1)));
  CHECK(r.knowledge_ci() == doctest::Approx(0.1));
  CHECK(accessible_knowledge(0.046, 100.0) == doctest::Approx(fln(4.6)));
}
