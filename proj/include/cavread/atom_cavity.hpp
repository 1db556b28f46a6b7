#pragma once

// Atom-cavity models for the master-equation solver.
//
// Rates follow the field convention: kappa and gamma are amplitude half-widths,
// so photons leave a mode at 2 kappa and the excited state decays at 2 gamma,
// and C = g^2 / (2 kappa gamma). CavityParams are in 2pi MHz; the builders
// convert to rad/us. Everything is written in the frame rotating at the probe
// frequency, with the probe resonant with the main mode and the atom.
//
// The input mirror has field coupling kappa_in = kappa sqrt(T0)/2 (identical
// output mirror), so the empty cavity transmits T0 on resonance and a drive
// term eps (a + a^+) corresponds to an incident flux eps^2 / (2 kappa_in).

#include "cavread/core_model.hpp"
#include "cavread/lindblad.hpp"

namespace cavread {

/// 2pi MHz -> rad/us
double to_rad_per_us(double two_pi_mhz);

/// Drive amplitude (rad/us) for which the empty cavity holds `photons` on average.
double drive_for_photon_number(const CavityParams& cavity, double photons);

/// Field coupling rate of the input mirror (rad/us).
double input_coupling(const CavityParams& cavity, double mirror_T0);

/// Empty cavities above this mean photon number are outside the weak-drive regime.
inline constexpr double kWeakDrivePhotons = 0.01;

struct TwoLevelSpec {
  CavityParams cavity;
  double drive = 0.0;      // rad/us; 0 selects drive_for_photon_number(cavity, 1e-8)
  int n_max = 1;
  double mirror_T0 = 1.0;  // empty-cavity transmission; 1 = lossless symmetric cavity

  double drive_amplitude() const;
  void validate() const;
};

struct AtomCavitySpec {
  CavityParams cavity;
  double second_mode_detuning = 540.0;  // 2pi MHz, relative to the main mode
  /// Weight of each circular component of the second mode's polarisation.
  /// Linear polarisation orthogonal to the quantisation axis gives 1/sqrt(2).
  double second_mode_coupling = 0.70710678118654752;
  /// Ground-state Zeeman splitting between adjacent m (2pi MHz); the excited
  /// manifold splits 4/3 as much (g_F = 1/2 and 2/3). A small field is enough
  /// to detune the Raman coupling that the two modes otherwise induce between
  /// degenerate ground sublevels.
  double larmor_frequency = 1.0;
  double drive = 0.0;  // rad/us; 0 selects drive_for_photon_number(cavity, 1e-8)
  int n_max = 1;
  double mirror_T0 = 0.13;
  /// Return the atom to |F=2, m=0> whenever a decay would leave it in another
  /// Zeeman state, so the steady state describes the driven bright configuration.
  bool recycle_bright_state = true;

  double drive_amplitude() const;
  int dimension() const { return 12 * (n_max + 1) * (n_max + 1); }
  void validate() const;
};

/// Model plus the observables needed for the flux accounting.
struct AtomCavityModel {
  LindbladModel model;
  ComplexMatrix main_photons;      // a_m^+ a_m
  ComplexMatrix second_photons;    // a_d^+ a_d (zero matrix without a second mode)
  ComplexMatrix excited;           // projector onto the excited manifold
  ComplexMatrix zeeman_changing;   // diagonal: free-space decay rate into ground states other than m = 0
  int initial_index = 0;           // |F=2, m=0> (or |g>) with empty modes
};

/// Level index of |F=2, m> (m = -2..2) and |F'=3, m'> (m' = -3..3) in the 12-level atom.
int ground_level(int m);
int excited_level(int m);

AtomCavityModel build_two_level_model(const CavityParams& cavity, double drive, int n_max = 1);
/// Throws DimensionCapError when 12 (n_max+1)^2 exceeds kMaxDimension.
AtomCavityModel build_full_model(const AtomCavitySpec& spec);
/// The driven main mode alone (the atom removed).
AtomCavityModel build_empty_cavity_model(const CavityParams& cavity, double drive, int n_max = 1);

/// Steady-state photon flows, in photons per us.
struct ScatterBudget {
  double incident = 0.0;
  double transmitted = 0.0;
  double free_space = 0.0;
  double second_mode = 0.0;
  double free_space_zeeman_changing = 0.0;
  double main_photons = 0.0;
  double empty_main_photons = 0.0;

  /// (free space + second mode) / incident
  double scattered_fraction() const;
  /// second mode / free space
  double purcell_ratio() const;
  /// main-mode photons with the atom / without
  double extinction() const;
};

/// Throws RegimeError when the empty cavity holds kWeakDrivePhotons or more.
ScatterBudget scatter_budget(const TwoLevelSpec& spec);
ScatterBudget scatter_budget(const AtomCavitySpec& spec);

/// T1/T0 from the steady intracavity photon number with the atom coupled vs uncoupled.
double extinction_ratio(const TwoLevelSpec& spec);
double extinction_ratio(const AtomCavitySpec& spec);
/// m/n
double scatter_fraction(const TwoLevelSpec& spec);
double scatter_fraction(const AtomCavitySpec& spec);
/// Gamma_P / Gamma: second-mode vs free-space emission in the driven steady state.
double purcell_ratio(const AtomCavitySpec& spec);

/// Purcell estimate for emission from |F'=3, 0> into the detuned mode,
/// 2C (g_d/g)^2 kappa^2/(kappa^2 + Delta^2), with (g_d/g)^2 the summed sigma
/// strength relative to the pi transition.
double purcell_ratio_estimate(const AtomCavitySpec& spec);

}  // namespace cavread
