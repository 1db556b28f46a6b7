#pragma once

// Photon-counting discrimination of the two qubit states from transmitted and
// reflected counts. Both count records are products of two Poisson laws; detector
// efficiency is folded into the Poisson means (binomial thinning of a Poisson
// variable is Poisson).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>

#include "cavread/core_model.hpp"
#include "cavread/rng.hpp"

namespace cavread {

/// Power transmission/reflection of the cavity for each qubit state.
struct CountingCoefficients {
  double T0 = 0.13;
  double T1 = 0.0024;
  double R0 = 0.42;
  double R1 = 0.99;
};

struct DetectorEfficiency {
  double transmission = 1.0;
  double reflection = 1.0;
};

/// Transmission/reflection of the experiment with detection efficiencies 47%/31%.
CountingCoefficients paper_counting_coefficients();
DetectorEfficiency paper_detector_efficiency();

struct ChernoffResult {
  double xi = 0.0;
  double s_star = 0.5;
};

/// xi = -min_{s in [0,1]} [T0^s T1^(1-s) + R0^s R1^(1-s) - s(T0+R0) - (1-s)(T1+R1)]
/// after scaling T by eta_t and R by eta_r. Golden-section search to |ds| < 1e-6.
ChernoffResult chernoff_exponent(const CountingCoefficients& c, DetectorEfficiency eta = {});

/// The s = 1/2 value (T0+T1+R0+R1)/2 - sqrt(T0 T1) - sqrt(R0 R1).
double closed_form_xi_half(const CountingCoefficients& c);

/// Detected mean counts per incident photon. Means at pulse size n are n times these.
struct CountDistributions {
  double mu_T0 = 0.0;
  double mu_R0 = 0.0;
  double mu_T1 = 0.0;
  double mu_R1 = 0.0;

  static CountDistributions from(const CountingCoefficients& c, DetectorEfficiency eta = {});

  double mean_T(QubitState s) const { return s == QubitState::Zero ? mu_T0 : mu_T1; }
  double mean_R(QubitState s) const { return s == QubitState::Zero ? mu_R0 : mu_R1; }
  CountingCoefficients as_coefficients() const { return {mu_T0, mu_T1, mu_R0, mu_R1}; }
  void validate() const;
};

struct CountRecord {
  std::uint64_t n_T = 0;
  std::uint64_t n_R = 0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// mean + 10 sqrt(mean) + 20 over the largest of the four means.
int default_truncation(const CountDistributions& d, double n);

/// Exact minimal counting error (1 - ||P0-P1||)/2 = 1/2 sum_x min(P0(x), P1(x)),
/// summed over the (n_T, n_R) lattice up to `truncation`. Throws TruncationError
/// when the truncation leaves more than 1e-9 of Poisson mass outside the lattice.
double l1_error(const CountDistributions& d, double n, std::optional<int> truncation = {});

/// fln(xi n)
double accessible_knowledge(double xi, double n);

/// |TV(P0,P1) - sqrt(1 - exp(-xi n))| with TV = sum|P0-P1|/2 and xi from the
/// detected means in `d`.
double chernoff_vs_l1_gap(const CountDistributions& d, double n);

/// Probability per incident photon that the atom switches its optical response
/// (state 1 -> 0 statistics, or 0 -> 1) part way through the pulse.
struct JumpModel {
  double prob_per_photon_state1 = 1.0 / 142.0;
  double prob_per_photon_state0 = 0.0;

  static JumpModel none() { return {0.0, 0.0}; }
  double for_state(QubitState s) const {
    return s == QubitState::One ? prob_per_photon_state1 : prob_per_photon_state0;
  }
};

/// One detection record. A jump happens with probability 1 - (1-p)^n at a
/// position uniform over the pulse; counts after it follow the other state.
CountRecord simulate_record(QubitState state, double n, const CountDistributions& d,
                            double jump_prob_per_photon, Rng& rng);
CountRecord simulate_record(QubitState state, double n, const CountDistributions& d,
                            double jump_prob_per_photon, std::uint64_t seed);

struct Classification {
  QubitState state = QubitState::One;
  double log_likelihood_ratio = 0.0;  // ln P0(rec) - ln P1(rec)
};

/// Maximum-likelihood state for a record. Ties (including records impossible
/// under both hypotheses) go to state 1.
Classification ml_classify(const CountRecord& rec, const CountDistributions& d, double n);

struct DetectionErrorReport {
  double epsilon_0 = 0.0;
  double epsilon_1 = 0.0;
  double epsilon = 0.0;        // (epsilon_0 + epsilon_1)/2
  double ci_half_width = 0.0;  // Wilson 68% interval on the pooled error rate
  std::uint64_t trials = 0;    // per preparation

  double knowledge() const;
  double knowledge_ci() const;
};

inline constexpr int kMonteCarloShards = 16;

/// Runs `trials` records for each preparation, classifies them with the no-jump
/// likelihoods, and reports the error rates. Shard k of preparation s draws from
/// stream 2k+s of `seed`, so results do not depend on scheduling.
DetectionErrorReport empirical_error(std::uint64_t trials, double n, const CountDistributions& d,
                                     const JumpModel& jumps, std::uint64_t seed);

struct ErrorReportRow {
  double n = 0.0;
  DetectionErrorReport report;
};

/// Columns: n, epsilon, ci, knowledge, knowledge_ci
void write_error_report_csv(std::ostream& out, std::span<const ErrorReportRow> rows);

}  // namespace cavread
