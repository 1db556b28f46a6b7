#include "cavread/atom_cavity.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cavread/clebsch_gordan.hpp"
#include "cavread/errors.hpp"

namespace cavread {

namespace {

constexpr double kDefaultPhotons = 1e-8;
constexpr int kAtomLevels = 12;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
  return kron(kron(a, b), c);
}

ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix annihilation(int n_max) {
  ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// |i><j| on the atom
ComplexMatrix transition(int levels, int i, int j) {
  ComplexMatrix s = ComplexMatrix::Zero(levels, levels);
  s(i, j) = 1.0;
  return s;
}

// Splits a jump operator so that every jump ends with the atom in |2,0>:
// L -> {|2,0><2,m| L for m != 0, P L}, with P projecting onto the remaining
// levels. The sum of L^+ L, and so the decay rate of every state, is unchanged.
void push_recycled(std::vector<CollapseOperator>& out, const CollapseOperator& c, int photons) {
  const ComplexMatrix id_fields = ComplexMatrix::Identity(photons * photons, photons * photons);
  ComplexMatrix rest = ComplexMatrix::Identity(kAtomLevels, kAtomLevels);
  for (int mg = -2; mg <= 2; ++mg) {
    if (mg == 0) continue;
    rest(ground_level(mg), ground_level(mg)) = 0.0;
    const ComplexMatrix reset = kron(transition(kAtomLevels, ground_level(0), ground_level(mg)), id_fields);
    out.push_back({reset * c.op, c.rate, c.channel, c.label + " -> m=0 from m=" + std::to_string(mg)});
  }
  out.push_back({kron(rest, id_fields) * c.op, c.rate, c.channel, c.label});
}

void check_n_max(int n_max) {
  if (n_max < 1) throw DomainError("photon truncation n_max must be >= 1");
}

void check_drive(double drive) {
  if (!(drive >= 0.0) || !std::isfinite(drive)) throw DomainError("drive amplitude must be finite and >= 0");
}

void check_mirror(double mirror_T0) {
  if (!(mirror_T0 > 0.0 && mirror_T0 <= 1.0)) throw DomainError("mirror_T0 must lie in (0, 1]");
}

double resolve_drive(double drive, const CavityParams& cavity) {
  return drive > 0.0 ? drive : drive_for_photon_number(cavity, kDefaultPhotons);
}

double main_photons(const AtomCavityModel& m) {
  const auto rho = steady_state(m.model);
  return rho.expectation(m.main_photons).real();
}

void check_regime(double empty_photons) {
  if (!(empty_photons < kWeakDrivePhotons))
    throw RegimeError("drive outside the weak-drive regime: empty cavity holds " + std::to_string(empty_photons) +
                      " photons (limit " + std::to_string(kWeakDrivePhotons) + ")");
}

ScatterBudget budget_from(const AtomCavityModel& m, const CavityParams& cavity, double drive, int n_max,
                          double mirror_T0) {
  ScatterBudget b;
  const auto empty = build_empty_cavity_model(cavity, drive, n_max);
  b.empty_main_photons = main_photons(empty);
  check_regime(b.empty_main_photons);

  const auto rho = steady_state(m.model);
  const double k_in = input_coupling(cavity, mirror_T0);
  b.incident = drive * drive / (2.0 * k_in);
  b.main_photons = rho.expectation(m.main_photons).real();
  b.transmitted = 2.0 * k_in * b.main_photons;
  b.free_space = m.model.channel_flux(rho, DecayChannel::FreeSpace);
  b.second_mode = m.model.channel_flux(rho, DecayChannel::SecondMode);
  b.free_space_zeeman_changing = rho.expectation(m.zeeman_changing).real();
  return b;
}

}  // namespace

double to_rad_per_us(double two_pi_mhz) { return 2.0 * std::numbers::pi * two_pi_mhz; }

double drive_for_photon_number(const CavityParams& cavity, double photons) {
  cavity.validate();
  if (!(photons >= 0.0)) throw DomainError("drive_for_photon_number: photon number must be >= 0");
  return to_rad_per_us(cavity.kappa) * std::sqrt(photons);
}

double input_coupling(const CavityParams& cavity, double mirror_T0) {
  cavity.validate();
  check_mirror(mirror_T0);
  return 0.5 * to_rad_per_us(cavity.kappa) * std::sqrt(mirror_T0);
}

double TwoLevelSpec::drive_amplitude() const { return resolve_drive(drive, cavity); }

void TwoLevelSpec::validate() const {
  cavity.validate();
  check_n_max(n_max);
  check_drive(drive);
  check_mirror(mirror_T0);
}

double AtomCavitySpec::drive_amplitude() const { return resolve_drive(drive, cavity); }

void AtomCavitySpec::validate() const {
  cavity.validate();
  check_n_max(n_max);
  check_drive(drive);
  check_mirror(mirror_T0);
  if (!std::isfinite(second_mode_detuning)) throw DomainError("AtomCavitySpec: detuning must be real");
  if (!std::isfinite(larmor_frequency)) throw DomainError("AtomCavitySpec: Larmor frequency must be real");
  if (!(second_mode_coupling >= 0.0 && second_mode_coupling <= 1.0))
    throw DomainError("AtomCavitySpec: second_mode_coupling must lie in [0, 1]");
}

int ground_level(int m) {
  if (m < -2 || m > 2) throw DomainError("ground_level: m must lie in [-2, 2]");
  return m + 2;
}

int excited_level(int m) {
  if (m < -3 || m > 3) throw DomainError("excited_level: m must lie in [-3, 3]");
  return 5 + m + 3;
}

AtomCavityModel build_two_level_model(const CavityParams& cavity, double drive, int n_max) {
  cavity.validate();
  check_n_max(n_max);
  check_drive(drive);
  const int photons = n_max + 1;
  const double g = to_rad_per_us(cavity.g);
  const double kappa = to_rad_per_us(cavity.kappa);
  const double gamma = to_rad_per_us(cavity.gamma);

  const ComplexMatrix lower = kron(transition(2, 0, 1), identity(photons));
  const ComplexMatrix a = kron(identity(2), annihilation(n_max));

  AtomCavityModel m;
  m.model.hamiltonian = g * (a.adjoint() * lower + lower.adjoint() * a) + drive * (a + a.adjoint());
  m.model.collapses.push_back({lower, 2.0 * gamma, DecayChannel::FreeSpace, "free space"});
  m.model.collapses.push_back({a, 2.0 * kappa, DecayChannel::MainMode, "main mode"});
  m.main_photons = a.adjoint() * a;
  m.second_photons = ComplexMatrix::Zero(2 * photons, 2 * photons);
  m.excited = kron(transition(2, 1, 1), identity(photons));
  m.zeeman_changing = ComplexMatrix::Zero(2 * photons, 2 * photons);
  m.initial_index = 0;
  m.model.validate();
  return m;
}

AtomCavityModel build_empty_cavity_model(const CavityParams& cavity, double drive, int n_max) {
  cavity.validate();
  check_n_max(n_max);
  check_drive(drive);
  const ComplexMatrix a = annihilation(n_max);
  AtomCavityModel m;
  m.model.hamiltonian = drive * (a + a.adjoint());
  m.model.collapses.push_back({a, 2.0 * to_rad_per_us(cavity.kappa), DecayChannel::MainMode, "main mode"});
  m.main_photons = a.adjoint() * a;
  m.second_photons = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  m.excited = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  m.zeeman_changing = m.excited;
  m.model.validate();
  return m;
}

AtomCavityModel build_full_model(const AtomCavitySpec& spec) {
  spec.validate();
  const int d = spec.dimension();
  if (d > kMaxDimension)
    throw DimensionCapError("build_full_model: n_max = " + std::to_string(spec.n_max) + " needs dimension " +
                            std::to_string(d) + ", which requires a solver cap of at least " + std::to_string(d) +
                            " (current cap " + std::to_string(kMaxDimension) + ")");

  const int photons = spec.n_max + 1;
  const double g = to_rad_per_us(spec.cavity.g);
  const double kappa = to_rad_per_us(spec.cavity.kappa);
  const double gamma = to_rad_per_us(spec.cavity.gamma);
  const double detuning = to_rad_per_us(spec.second_mode_detuning);
  const double drive = spec.drive_amplitude();
  // g is quoted for the pi transition |2,0> <-> |3,0>.
  const double g_reduced = g / cg_coefficient(2, 0, 0, 3, 0);

  const ComplexMatrix id_atom = identity(kAtomLevels);
  const ComplexMatrix id_field = identity(photons);
  const ComplexMatrix a_field = annihilation(spec.n_max);
  const ComplexMatrix a_main = kron(id_atom, a_field, id_field);
  const ComplexMatrix a_second = kron(id_atom, id_field, a_field);
  const auto atom_op = [&](const ComplexMatrix& s) { return kron(s, id_field, id_field); };

  AtomCavityModel m;
  ComplexMatrix h = detuning * (a_second.adjoint() * a_second) + drive * (a_main + a_main.adjoint());
  const double larmor = to_rad_per_us(spec.larmor_frequency);
  for (int mg = -2; mg <= 2; ++mg)
    h += mg * larmor * atom_op(transition(kAtomLevels, ground_level(mg), ground_level(mg)));
  for (int me = -3; me <= 3; ++me)
    h += me * (4.0 / 3.0) * larmor * atom_op(transition(kAtomLevels, excited_level(me), excited_level(me)));
  for (int mg = -2; mg <= 2; ++mg) {
    const ComplexMatrix lower = atom_op(transition(kAtomLevels, ground_level(mg), excited_level(mg)));
    const double g_pi = g_reduced * cg_coefficient(2, mg, 0, 3, mg);
    h += g_pi * (a_main.adjoint() * lower + lower.adjoint() * a_main);
    // Second mode: linear polarisation with circular components (-c, +c) for q = (+1, -1).
    for (int q : {-1, 1}) {
      const int me = mg + q;
      if (me < -3 || me > 3) continue;
      const double weight = (q == 1 ? -1.0 : 1.0) * spec.second_mode_coupling;
      const double g_d = g_reduced * weight * cg_coefficient(2, mg, q, 3, me);
      if (g_d == 0.0) continue;
      const ComplexMatrix lower_d = atom_op(transition(kAtomLevels, ground_level(mg), excited_level(me)));
      h += g_d * (a_second.adjoint() * lower_d + lower_d.adjoint() * a_second);
    }
  }
  m.model.hamiltonian = h;

  // Free-space decay |3,m'> -> |2,m'-q> with polarisation q.
  std::vector<CollapseOperator> collapses;
  ComplexMatrix zeeman = ComplexMatrix::Zero(kAtomLevels, kAtomLevels);
  for (int q : {-1, 0, 1}) {
    ComplexMatrix lower = ComplexMatrix::Zero(kAtomLevels, kAtomLevels);
    for (int me = -3; me <= 3; ++me) {
      const int mg = me - q;
      if (mg < -2 || mg > 2) continue;
      const double c = cg_coefficient(2, mg, q, 3, me);
      lower(ground_level(mg), excited_level(me)) = c;
      if (mg != 0) zeeman(excited_level(me), excited_level(me)) += 2.0 * gamma * c * c;
    }
    collapses.push_back({atom_op(lower), 2.0 * gamma, DecayChannel::FreeSpace, "free space q=" + std::to_string(q)});
  }
  collapses.push_back({a_main, 2.0 * kappa, DecayChannel::MainMode, "main mode"});
  collapses.push_back({a_second, 2.0 * kappa, DecayChannel::SecondMode, "second mode"});
  if (spec.recycle_bright_state) {
    for (const auto& c : collapses) push_recycled(m.model.collapses, c, photons);
  } else {
    m.model.collapses = std::move(collapses);
  }

  ComplexMatrix excited = ComplexMatrix::Zero(kAtomLevels, kAtomLevels);
  for (int me = -3; me <= 3; ++me) excited(excited_level(me), excited_level(me)) = 1.0;
  m.main_photons = a_main.adjoint() * a_main;
  m.second_photons = a_second.adjoint() * a_second;
  m.excited = atom_op(excited);
  m.zeeman_changing = atom_op(zeeman);
  m.initial_index = ground_level(0) * photons * photons;
  m.model.validate();
  return m;
}

double ScatterBudget::scattered_fraction() const { return incident > 0.0 ? (free_space + second_mode) / incident : 0.0; }

double ScatterBudget::purcell_ratio() const { return free_space > 0.0 ? second_mode / free_space : 0.0; }

double ScatterBudget::extinction() const { return empty_main_photons > 0.0 ? main_photons / empty_main_photons : 1.0; }

ScatterBudget scatter_budget(const TwoLevelSpec& spec) {
  spec.validate();
  const double drive = spec.drive_amplitude();
  return budget_from(build_two_level_model(spec.cavity, drive, spec.n_max), spec.cavity, drive, spec.n_max,
                     spec.mirror_T0);
}

ScatterBudget scatter_budget(const AtomCavitySpec& spec) {
  spec.validate();
  return budget_from(build_full_model(spec), spec.cavity, spec.drive_amplitude(), spec.n_max, spec.mirror_T0);
}

double extinction_ratio(const TwoLevelSpec& spec) { return scatter_budget(spec).extinction(); }

double extinction_ratio(const AtomCavitySpec& spec) { return scatter_budget(spec).extinction(); }

double scatter_fraction(const TwoLevelSpec& spec) { return scatter_budget(spec).scattered_fraction(); }

double scatter_fraction(const AtomCavitySpec& spec) { return scatter_budget(spec).scattered_fraction(); }

double purcell_ratio(const AtomCavitySpec& spec) { return scatter_budget(spec).purcell_ratio(); }

double purcell_ratio_estimate(const AtomCavitySpec& spec) {
  spec.validate();
  const double pi_strength = std::pow(cg_coefficient(2, 0, 0, 3, 0), 2);
  double sigma_strength = 0.0;
  for (int q : {-1, 1}) sigma_strength += std::pow(spec.second_mode_coupling * cg_coefficient(2, -q, q, 3, 0), 2);
  const double k2 = spec.cavity.kappa * spec.cavity.kappa;
  const double lorentz = k2 / (k2 + spec.second_mode_detuning * spec.second_mode_detuning);
  return 2.0 * cooperativity(spec.cavity) * sigma_strength / pi_strength * lorentz;
}

}  // namespace cavread
