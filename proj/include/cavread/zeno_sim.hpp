#pragma once

// Measurement back action seen through a quantum Zeno experiment: a resonant
// microwave pi-pulse of duration tau acts on the qubit while the probe light
// performs on average n_tilde projective z-measurements at Poisson-random times.
//
// In the ensemble picture those projections are a transverse decay at rate
// n_tilde/tau, so the Bloch vector obeys
//   du/dt = -r u,   dv/dt = -r v + Omega w,   dw/dt = -Omega v.
// w = -1 is the prepared state; the transfer probability is (1 + w)/2.

#include <cstdint>
#include <optional>
#include <span>

#include "cavread/core_model.hpp"

namespace cavread {

struct BlochState {
  double u = 0.0;
  double v = 0.0;
  double w = -1.0;

  double norm() const;
  /// rho_01 = (u + i v)/2, so |rho_01| = |u + i v|/2.
  double coherence() const;
};

struct ZenoConfig {
  double tau_us = 8.8;
  std::optional<double> rabi;  // rad/us; pi/tau (a pi-pulse) when unset
  double p_floor = 0.02;
  double p_ceiling = 0.95;
  QubitState initial = QubitState::One;

  double rabi_frequency() const;
  void validate() const;
};

/// Fixed-step RK4 integration of the Bloch equations above over `duration`.
/// `steps` = 0 picks max(1e4, 4 * rate * duration) steps.
BlochState evolve_bloch(const BlochState& start, double rabi, double dephasing_rate,
                        double duration, int steps = 0);

/// Ideal transfer probability after the pulse with n_tilde projections on average.
double bloch_transfer(const ZenoConfig& cfg, double n_tilde);

struct McEstimate {
  double mean = 0.0;
  double sigma = 0.0;  // standard error of the mean
};

/// Trajectory version of bloch_transfer: per trial K ~ Poisson(n_tilde) projections
/// at uniform times, Rabi rotation in between. Each trial contributes its Born
/// probability of being transferred at tau.
McEstimate mc_zeno_transfer(const ZenoConfig& cfg, double n_tilde, std::uint64_t trials,
                            std::uint64_t seed);

/// p_floor + (p_ceiling - p_floor) p_ideal
double apply_imperfections(double p_ideal, const ZenoConfig& cfg);

/// Inverts apply_imperfections(bloch_transfer(cfg, .)) by bisection, |dn| < 1e-6.
/// Throws OutOfModelError for p_obs outside (p_floor, p_ceiling].
double infer_n_tilde(double p_obs, const ZenoConfig& cfg);

struct ZenoPoint {
  double n = 0.0;
  double n_tilde = 0.0;
  double sigma = 1.0;
};

struct LinearFit {
  double a0 = 0.0;
  double sigma_a0 = 0.0;
};

/// Weighted least squares of n_tilde = a0 n through the origin.
LinearFit fit_a0(std::span<const ZenoPoint> points);

/// exp(-n_tilde)
double coherence_decay(double n_tilde);

/// fln(2 n_tilde)
double zeno_knowledge(double n_tilde);

}  // namespace cavread
