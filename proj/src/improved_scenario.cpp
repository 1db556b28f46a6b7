#include <cmath>

#include "cavread/core_model.hpp"
#include "cavread/detection_stats.hpp"
#include "cavread/errors.hpp"

namespace cavread {

ImprovedScenarioResult improved_scenario(const ImprovedScenario& s) {
  if (!(s.loss_scale > 0.0 && s.loss_scale <= 1.0))
    throw DomainError("improved_scenario: loss_scale must lie in (0,1]");
  if (!(s.eta_t > 0.0 && s.eta_t <= 1.0 && s.eta_r > 0.0 && s.eta_r <= 1.0))
    throw DomainError("improved_scenario: detector efficiencies must lie in (0,1]");
  if (!(s.base_T0 > 0.0 && s.base_T0 < 1.0))
    throw DomainError("improved_scenario: base_T0 must lie in (0,1)");
  if (s.photons_per_scatter && !(*s.photons_per_scatter > 0.0))
    throw DomainError("improved_scenario: photons_per_scatter must be > 0");

  // Per-mirror loss/transmission ratio from the calibrated amplitude transmission.
  const double t_base = std::sqrt(s.base_T0);
  const double loss_over_trans = (1.0 - t_base) / t_base;
  const double t = 1.0 / (1.0 + s.loss_scale * loss_over_trans);

  ImprovedScenarioResult r;
  r.T0 = t * t;
  r.R0 = (1.0 - t) * (1.0 - t);
  // kappa scales with total mirror loss+transmission, i.e. as t_base/t.
  r.cooperativity = cooperativity(s.base) * t / t_base;

  switch (s.response) {
    case AtomResponse::SingleMode: {
      r.T1 = r.T0 * ideal_extinction(r.cooperativity);
      const double r1 = 1.0 - t / (1.0 + 2.0 * r.cooperativity);
      r.R1 = r1 * r1;
      break;
    }
    case AtomResponse::Measured:
      r.T1 = r.T0 * s.measured_extinction;
      r.R1 = s.measured_R1;
      break;
  }

  const auto chernoff =
      chernoff_exponent(CountingCoefficients{r.T0, r.T1, r.R0, r.R1}, {s.eta_t, s.eta_r});
  r.xi_per_photon = chernoff.xi;
  r.photons_per_scatter =
      s.photons_per_scatter.value_or(1.0 / single_mode_scatter_ratio(r.T0, r.cooperativity));
  r.exponent_per_scatter = r.xi_per_photon * r.photons_per_scatter;
  return r;
}

}  // namespace cavread
