#include "cavread/detection_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <vector>

#include "cavread/csv.hpp"
#include "cavread/errors.hpp"

namespace cavread {

namespace {

constexpr double kTailMassLimit = 1e-9;

// a^s b^(1-s) with the s in (0,1) limit 0 when either base vanishes.
double mixed_power(double a, double b, double s) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return std::exp(s * std::log(a) + (1.0 - s) * std::log(b));
}

double chernoff_objective(const CountingCoefficients& c, double s) {
  return mixed_power(c.T0, c.T1, s) + mixed_power(c.R0, c.R1, s) - s * (c.T0 + c.R0) -
         (1.0 - s) * (c.T1 + c.R1);
}

std::vector<double> poisson_pmf(double mean, int truncation) {
  std::vector<double> p(static_cast<std::size_t>(truncation) + 1, 0.0);
  if (mean == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double log_mean = std::log(mean);
  for (int k = 0; k <= truncation; ++k)
    p[k] = std::exp(k * log_mean - mean - std::lgamma(k + 1.0));
  return p;
}

double tail_mass(const std::vector<double>& pmf) {
  double s = 0.0;
  for (double v : pmf) s += v;
  return std::max(0.0, 1.0 - s);
}

// ln P(k | mean) without the ln k! term shared by both hypotheses.
double log_weight(std::uint64_t k, double mean) {
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return static_cast<double>(k) * std::log(mean) - mean;
}

std::uint64_t draw_poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

void check_n(double n, const char* who) {
  if (!(n >= 0.0) || !std::isfinite(n))
    throw DomainError(std::string(who) + ": photon number must be finite and >= 0");
}

}  // namespace

CountingCoefficients paper_counting_coefficients() { return {0.13, 0.0024, 0.42, 0.99}; }

DetectorEfficiency paper_detector_efficiency() { return {0.47, 0.31}; }

ChernoffResult chernoff_exponent(const CountingCoefficients& c, DetectorEfficiency eta) {
  if (c.T0 < 0.0 || c.T1 < 0.0 || c.R0 < 0.0 || c.R1 < 0.0)
    throw DomainError("chernoff_exponent: coefficients must be >= 0");
  if (eta.transmission < 0.0 || eta.reflection < 0.0)
    throw DomainError("chernoff_exponent: efficiencies must be >= 0");

  const CountingCoefficients scaled{c.T0 * eta.transmission, c.T1 * eta.transmission,
                                    c.R0 * eta.reflection, c.R1 * eta.reflection};
  const auto f = [&](double s) { return chernoff_objective(scaled, s); };

  // The objective is convex in s (sum of exponentials plus a linear term).
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-7) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double s = 0.5 * (lo + hi);
  return {std::max(0.0, -f(s)), s};
}

double closed_form_xi_half(const CountingCoefficients& c) {
  if (c.T0 < 0.0 || c.T1 < 0.0 || c.R0 < 0.0 || c.R1 < 0.0)
    throw DomainError("closed_form_xi_half: coefficients must be >= 0");
  return 0.5 * (c.T0 + c.T1 + c.R0 + c.R1) - std::sqrt(c.T0 * c.T1) - std::sqrt(c.R0 * c.R1);
}

CountDistributions CountDistributions::from(const CountingCoefficients& c, DetectorEfficiency eta) {
  CountDistributions d{c.T0 * eta.transmission, c.R0 * eta.reflection, c.T1 * eta.transmission,
                       c.R1 * eta.reflection};
  d.validate();
  return d;
}

void CountDistributions::validate() const {
  for (double m : {mu_T0, mu_R0, mu_T1, mu_R1})
    if (!(m >= 0.0) || !std::isfinite(m))
      throw DomainError("CountDistributions: mean counts must be finite and >= 0");
}

int default_truncation(const CountDistributions& d, double n) {
  check_n(n, "default_truncation");
  const double m = n * std::max({d.mu_T0, d.mu_R0, d.mu_T1, d.mu_R1});
  return static_cast<int>(std::ceil(m + 10.0 * std::sqrt(m) + 20.0));
}

double l1_error(const CountDistributions& d, double n, std::optional<int> truncation) {
  d.validate();
  check_n(n, "l1_error");
  const int cut = truncation.value_or(default_truncation(d, n));
  if (cut < 0) throw DomainError("l1_error: truncation must be >= 0");

  const auto pT0 = poisson_pmf(n * d.mu_T0, cut);
  const auto pR0 = poisson_pmf(n * d.mu_R0, cut);
  const auto pT1 = poisson_pmf(n * d.mu_T1, cut);
  const auto pR1 = poisson_pmf(n * d.mu_R1, cut);
  for (const auto* pmf : {&pT0, &pR0, &pT1, &pR1}) {
    if (tail_mass(*pmf) > kTailMassLimit)
      throw TruncationError("l1_error: truncation " + std::to_string(cut) +
                            " leaves more than 1e-9 Poisson mass outside the lattice");
  }

  double overlap = 0.0;
  for (int i = 0; i <= cut; ++i) {
    const double a0 = pT0[i], a1 = pT1[i];
    if (a0 == 0.0 && a1 == 0.0) continue;
    for (int j = 0; j <= cut; ++j) overlap += std::min(a0 * pR0[j], a1 * pR1[j]);
  }
  return 0.5 * overlap;
}

double accessible_knowledge(double xi, double n) {
  if (xi < 0.0 || n < 0.0) throw DomainError("accessible_knowledge: xi and n must be >= 0");
  return fln(xi * n);
}

double chernoff_vs_l1_gap(const CountDistributions& d, double n) {
  const double eps = l1_error(d, n);
  const double distance = 1.0 - 2.0 * eps;
  const double xi = chernoff_exponent(d.as_coefficients()).xi;
  return std::abs(distance - std::sqrt(-std::expm1(-xi * n)));
}

CountRecord simulate_record(QubitState state, double n, const CountDistributions& d,
                            double jump_prob_per_photon, Rng& rng) {
  check_n(n, "simulate_record");
  if (!(jump_prob_per_photon >= 0.0 && jump_prob_per_photon <= 1.0))
    throw DomainError("simulate_record: jump probability must lie in [0,1]");
  if (n == 0.0) return {};

  double before = n;  // incident photons seen with the initial state's response
  if (jump_prob_per_photon > 0.0) {
    const double p_jump = -std::expm1(n * std::log1p(-jump_prob_per_photon));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < p_jump) before = unit(rng) * n;
  }
  const double after = n - before;
  const QubitState next = other(state);
  const double mean_T = d.mean_T(state) * before + d.mean_T(next) * after;
  const double mean_R = d.mean_R(state) * before + d.mean_R(next) * after;
  CountRecord rec;
  rec.n_T = draw_poisson(mean_T, rng);
  rec.n_R = draw_poisson(mean_R, rng);
  return rec;
}

CountRecord simulate_record(QubitState state, double n, const CountDistributions& d,
                            double jump_prob_per_photon, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return simulate_record(state, n, d, jump_prob_per_photon, rng);
}

Classification ml_classify(const CountRecord& rec, const CountDistributions& d, double n) {
  check_n(n, "ml_classify");
  const double l0 = log_weight(rec.n_T, n * d.mu_T0) + log_weight(rec.n_R, n * d.mu_R0);
  const double l1 = log_weight(rec.n_T, n * d.mu_T1) + log_weight(rec.n_R, n * d.mu_R1);
  if (std::isinf(l0) && std::isinf(l1)) return {QubitState::One, 0.0};
  const double llr = l0 - l1;
  return {llr > 0.0 ? QubitState::Zero : QubitState::One, llr};
}

double DetectionErrorReport::knowledge() const { return knowledge_from_error(epsilon); }

double DetectionErrorReport::knowledge_ci() const {
  if (epsilon == 0.0) return kInfiniteKnowledge;
  return ci_half_width / epsilon;
}

DetectionErrorReport empirical_error(std::uint64_t trials, double n, const CountDistributions& d,
                                     const JumpModel& jumps, std::uint64_t seed) {
  if (trials == 0) throw DomainError("empirical_error: trials must be > 0");
  check_n(n, "empirical_error");
  d.validate();

  // errors[shard][state]
  std::vector<std::future<std::array<std::uint64_t, 2>>> shards;
  shards.reserve(kMonteCarloShards);
  for (int k = 0; k < kMonteCarloShards; ++k) {
    const std::uint64_t count = trials / kMonteCarloShards + (static_cast<std::uint64_t>(k) <
                                                              trials % kMonteCarloShards);
    shards.push_back(std::async(std::launch::async, [=, &d, &jumps] {
      std::array<std::uint64_t, 2> errors{0, 0};
      for (QubitState s : {QubitState::Zero, QubitState::One}) {
        Rng rng = make_rng(seed, 2 * static_cast<std::uint64_t>(k) + static_cast<int>(s));
        for (std::uint64_t t = 0; t < count; ++t) {
          const auto rec = simulate_record(s, n, d, jumps.for_state(s), rng);
          if (ml_classify(rec, d, n).state != s) ++errors[static_cast<int>(s)];
        }
      }
      return errors;
    }));
  }
  std::array<std::uint64_t, 2> errors{0, 0};
  for (auto& f : shards) {
    const auto e = f.get();
    errors[0] += e[0];
    errors[1] += e[1];
  }

  DetectionErrorReport r;
  r.trials = trials;
  r.epsilon_0 = static_cast<double>(errors[0]) / static_cast<double>(trials);
  r.epsilon_1 = static_cast<double>(errors[1]) / static_cast<double>(trials);
  r.epsilon = 0.5 * (r.epsilon_0 + r.epsilon_1);

  // Wilson score interval, z = 1, over the 2*trials pooled Bernoulli outcomes.
  const double total = 2.0 * static_cast<double>(trials);
  const double z2 = 1.0;
  const double p = r.epsilon;
  r.ci_half_width =
      std::sqrt(z2) / (1.0 + z2 / total) * std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total));
  return r;
}

void write_error_report_csv(std::ostream& out, std::span<const ErrorReportRow> rows) {
  CsvWriter csv(out);
  csv.header({"n", "epsilon", "ci", "knowledge", "knowledge_ci"});
  for (const auto& row : rows) {
    csv.row({row.n, row.report.epsilon, row.report.ci_half_width, row.report.knowledge(),
             row.report.knowledge_ci()});
  }
}

}  // namespace cavread
