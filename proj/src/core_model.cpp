#include "cavread/core_model.hpp"

#include <cmath>
#include <string>

#include "cavread/errors.hpp"

namespace cavread {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void CavityParams::validate() const {
  require(g >= 0.0 && kappa > 0.0 && gamma > 0.0 && std::isfinite(g) && std::isfinite(kappa) &&
              std::isfinite(gamma),
          "CavityParams: need g >= 0 and positive kappa and gamma");
}

double cooperativity(const CavityParams& p) {
  p.validate();
  return p.g * p.g / (2.0 * p.kappa * p.gamma);
}

double fln(double x) {
  require(x >= 0.0, "fln: argument must be >= 0");
  if (std::isinf(x)) return x;
  // 1 - sqrt(1 - y) = y / (1 + sqrt(1 - y)) with y = e^-x
  return x + std::log1p(std::sqrt(-std::expm1(-x)));
}

double helstrom_error(double overlap_sq) {
  require(overlap_sq >= 0.0 && overlap_sq <= 1.0, "helstrom_error: overlap_sq must lie in [0,1]");
  return 0.5 * overlap_sq / (1.0 + std::sqrt(1.0 - overlap_sq));
}

double knowledge_from_error(double epsilon) {
  require(epsilon >= 0.0 && epsilon <= 0.5, "knowledge_from_error: epsilon must lie in [0,1/2]");
  if (epsilon == 0.0) return kInfiniteKnowledge;
  return -std::log(2.0 * epsilon);
}

KnowledgeReport make_knowledge_report(double epsilon) {
  return KnowledgeReport{epsilon, knowledge_from_error(epsilon), std::nullopt, std::nullopt};
}

KnowledgeReport make_knowledge_report(double epsilon_0, double epsilon_1) {
  require(epsilon_0 >= 0.0 && epsilon_0 <= 1.0 && epsilon_1 >= 0.0 && epsilon_1 <= 1.0,
          "make_knowledge_report: per-state errors must lie in [0,1]");
  auto report = make_knowledge_report(0.5 * (epsilon_0 + epsilon_1));
  report.epsilon_0 = epsilon_0;
  report.epsilon_1 = epsilon_1;
  return report;
}

// ---------------------------------------------------------------------------

ChannelSet::ChannelSet(std::initializer_list<Channel> channels) {
  for (Channel c : channels) bits_.set(static_cast<std::size_t>(c));
}

ChannelSet ChannelSet::all() {
  ChannelSet s;
  s.bits_.set();
  return s;
}

ChannelSet ChannelSet::detectable() {
  return {Channel::TransmittedMain, Channel::ReflectedMain, Channel::TransmittedDetuned,
          Channel::ReflectedDetuned};
}

ChannelAmplitudeTable::ChannelAmplitudeTable(const Row& state0, const Row& state1,
                                             double norm_slack)
    : state0_(state0), state1_(state1) {
  require(norm_slack >= 0.0, "ChannelAmplitudeTable: negative normalisation slack");
  for (const Row* row : {&state0_, &state1_}) {
    double power = 0.0;
    for (double a : *row) {
      require(a >= 0.0 && std::isfinite(a), "ChannelAmplitudeTable: amplitudes must be >= 0");
      power += a * a;
    }
    require(power <= 1.0 + norm_slack,
            "ChannelAmplitudeTable: outgoing power exceeds the incident power");
  }
}

ChannelAmplitudeTable ChannelAmplitudeTable::from_power_fractions(const Row& power0,
                                                                  const Row& power1,
                                                                  double norm_slack) {
  Row a0{}, a1{};
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    require(power0[i] >= 0.0 && power1[i] >= 0.0,
            "ChannelAmplitudeTable: power fractions must be >= 0");
    a0[i] = std::sqrt(power0[i]);
    a1[i] = std::sqrt(power1[i]);
  }
  return ChannelAmplitudeTable(a0, a1, norm_slack);
}

ChannelAmplitudeTable paper_channel_table() {
  return ChannelAmplitudeTable::from_power_fractions(
      {0.127, 0.414, 0.459, 0.0, 0.0, 0.0}, {0.001, 0.99, 0.004, 0.001, 0.001, 0.004}, 5e-3);
}

ChannelAmplitudeTable ideal_fluorescence_table() {
  return ChannelAmplitudeTable({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0});
}

double zeta_from_channels(const ChannelAmplitudeTable& table, const ChannelSet& subset) {
  require(!subset.empty(), "zeta_from_channels: empty channel subset");
  double zeta = 0.0;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    const auto c = static_cast<Channel>(i);
    if (!subset.contains(c)) continue;
    const double d = table.amplitude(QubitState::Zero, c) - table.amplitude(QubitState::One, c);
    zeta += d * d;
  }
  return zeta;
}

double max_knowledge(double zeta, double n) {
  require(zeta >= 0.0 && n >= 0.0, "max_knowledge: zeta and n must be >= 0");
  return fln(zeta * n);
}

double free_space_bound(double m) {
  require(m >= 0.0, "free_space_bound: m must be >= 0");
  return fln(2.0 * m);
}

double cavity_bound_per_scatter(double C, double m) {
  require(C >= 1.0, "cavity_bound_per_scatter: cooperativity must be >= 1");
  require(m >= 0.0, "cavity_bound_per_scatter: m must be >= 0");
  return fln(2.0 * C * m);
}

double ideal_extinction(double C) {
  require(C > 0.0, "ideal_extinction: cooperativity must be > 0");
  return 1.0 / (4.0 * C * C);
}

double single_mode_scatter_ratio(double T0, double C) {
  require(T0 >= 0.0 && T0 <= 1.0, "single_mode_scatter_ratio: T0 must lie in [0,1]");
  require(C > 0.0, "single_mode_scatter_ratio: cooperativity must be > 0");
  return std::sqrt(T0) / C;
}

}  // namespace cavread
