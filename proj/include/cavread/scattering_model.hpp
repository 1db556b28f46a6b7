#pragma once

// Spontaneous-scattering budget of the bright state.
//
// The probe excites |F'=3, m=0>, which decays either into free space (rate Gamma)
// or, Purcell enhanced, into the orthogonally polarised detuned cavity mode
// (rate Gamma_P). A free-space decay returns to the bright Zeeman state with
// probability 3/5; a decay into the second mode always leaves it. The measured
// depumping rate per incident photon nu therefore underestimates the scattering
// rate by the factor (Gamma_P + 2 Gamma/5)/(Gamma_P + Gamma).

#include <optional>
#include <span>

namespace cavread {

struct DepumpParams {
  double nu = 1.0 / 142.0;  // initial depumping rate per incident photon
  double gamma_ratio = 2.6;  // Gamma_P / Gamma
  double s_inf = 0.27;       // steady-state survival in the bright state

  void validate() const;
};

/// Probability that one scattering event leaves the bright Zeeman state,
/// (rho + 2/5)/(rho + 1) with rho = Gamma_P/Gamma.
double depump_prob_per_scatter(double gamma_ratio);

/// Scattered photons per incident photon, m/n = nu / depump_prob_per_scatter.
double scatter_per_photon(double nu, double gamma_ratio);

/// S(n) = s_inf + (1 - s_inf) exp(-lambda n) with lambda = nu/(1 - s_inf), so that
/// dS/dn at n = 0 is exactly -nu.
double survival_model(double n, const DepumpParams& p);

/// d S / d n
double survival_slope(double n, const DepumpParams& p);

struct SurvivalPoint {
  double n = 0.0;
  double S = 1.0;
  double sigma = 1.0;
};

struct FitOptions {
  bool weighted = true;                // use the point sigmas; false gives unit weights
  std::optional<double> fixed_s_inf;   // hold s_inf at this value, fit nu only
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
};

struct FitResult {
  double s_inf = 0.0;
  double nu = 0.0;
  double sigma_s_inf = 0.0;
  double sigma_nu = 0.0;
  double rss = 0.0;  // weighted residual sum of squares
  int iterations = 0;

  DepumpParams params(double gamma_ratio = 2.6) const { return {nu, gamma_ratio, s_inf}; }
};

/// Gauss-Newton fit of survival_model to (n, S, sigma) data, started from
/// s_inf in {0, 0.2, 0.4}; the lowest-residual converged start wins. Throws
/// FitError if no start converges within max_iterations.
FitResult fit_survival(std::span<const SurvivalPoint> data, const FitOptions& options = {});

/// exponent_per_photon / m_per_n: converts fln(x n) into fln(y m).
double knowledge_exponent_per_scatter(double exponent_per_photon, double m_per_n);

}  // namespace cavread
