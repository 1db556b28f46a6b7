#include "cavread/zeno_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numbers>
#include <vector>

#include "cavread/errors.hpp"
#include "cavread/rng.hpp"

namespace cavread {

namespace {

constexpr int kMinSteps = 10000;
constexpr double kMaxNTilde = 1e6;

struct Derivative {
  double rabi;
  double rate;
  BlochState operator()(const BlochState& s) const {
    return {-rate * s.u, -rate * s.v + rabi * s.w, -rabi * s.v};
  }
};

BlochState axpy(const BlochState& s, double h, const BlochState& k) {
  return {s.u + h * k.u, s.v + h * k.v, s.w + h * k.w};
}

}  // namespace

double BlochState::norm() const { return std::sqrt(u * u + v * v + w * w); }

double BlochState::coherence() const { return 0.5 * std::hypot(u, v); }

double ZenoConfig::rabi_frequency() const { return rabi.value_or(std::numbers::pi / tau_us); }

void ZenoConfig::validate() const {
  if (!(tau_us > 0.0) || !std::isfinite(tau_us)) throw DomainError("ZenoConfig: tau must be > 0");
  if (!(p_floor >= 0.0 && p_floor < p_ceiling && p_ceiling <= 1.0))
    throw DomainError("ZenoConfig: need 0 <= p_floor < p_ceiling <= 1");
  if (rabi && !std::isfinite(*rabi)) throw DomainError("ZenoConfig: rabi must be finite");
}

BlochState evolve_bloch(const BlochState& start, double rabi, double dephasing_rate,
                        double duration, int steps) {
  if (dephasing_rate < 0.0) throw DomainError("evolve_bloch: dephasing rate must be >= 0");
  if (duration < 0.0) throw DomainError("evolve_bloch: duration must be >= 0");
  if (steps <= 0) {
    const double stiff = 4.0 * dephasing_rate * duration;
    steps = static_cast<int>(std::max<double>(kMinSteps, std::ceil(stiff)));
  }
  const Derivative f{rabi, dephasing_rate};
  const double h = duration / steps;
  BlochState s = start;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(s);
    const auto k2 = f(axpy(s, 0.5 * h, k1));
    const auto k3 = f(axpy(s, 0.5 * h, k2));
    const auto k4 = f(axpy(s, h, k3));
    s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  }
  return s;
}

double bloch_transfer(const ZenoConfig& cfg, double n_tilde) {
  cfg.validate();
  if (!(n_tilde >= 0.0)) throw DomainError("bloch_transfer: n_tilde must be >= 0");
  if (std::isinf(n_tilde)) return 0.0;
  // Both preparations start at w = -1 in the frame of the prepared state.
  const auto end = evolve_bloch(BlochState{}, cfg.rabi_frequency(), n_tilde / cfg.tau_us,
                                cfg.tau_us);
  return std::clamp(0.5 * (1.0 + end.w), 0.0, 1.0);
}

McEstimate mc_zeno_transfer(const ZenoConfig& cfg, double n_tilde, std::uint64_t trials,
                            std::uint64_t seed) {
  cfg.validate();
  if (!(n_tilde >= 0.0) || !std::isfinite(n_tilde))
    throw DomainError("mc_zeno_transfer: n_tilde must be finite and >= 0");
  if (trials == 0) throw DomainError("mc_zeno_transfer: trials must be > 0");

  const double omega = cfg.rabi_frequency();
  const double tau = cfg.tau_us;
  constexpr int shards = 16;

  std::vector<std::future<std::array<double, 2>>> parts;
  for (int k = 0; k < shards; ++k) {
    const std::uint64_t count = trials / shards + (static_cast<std::uint64_t>(k) < trials % shards);
    parts.push_back(std::async(std::launch::async, [=] {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
      std::poisson_distribution<int> projections(n_tilde > 0.0 ? n_tilde : 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> times;
      double sum = 0.0, sum_sq = 0.0;
      for (std::uint64_t t = 0; t < count; ++t) {
        const int kcount = n_tilde > 0.0 ? projections(rng) : 0;
        times.resize(static_cast<std::size_t>(kcount));
        for (auto& x : times) x = unit(rng) * tau;
        std::sort(times.begin(), times.end());

        bool transferred = false;
        double last = 0.0;
        for (double x : times) {
          const double flip = std::pow(std::sin(0.5 * omega * (x - last)), 2);
          if (unit(rng) < flip) transferred = !transferred;
          last = x;
        }
        const double flip = std::pow(std::sin(0.5 * omega * (tau - last)), 2);
        const double p = transferred ? 1.0 - flip : flip;
        sum += p;
        sum_sq += p * p;
      }
      return std::array<double, 2>{sum, sum_sq};
    }));
  }
  double sum = 0.0, sum_sq = 0.0;
  for (auto& p : parts) {
    const auto r = p.get();
    sum += r[0];
    sum_sq += r[1];
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double apply_imperfections(double p_ideal, const ZenoConfig& cfg) {
  cfg.validate();
  if (!(p_ideal >= 0.0 && p_ideal <= 1.0))
    throw DomainError("apply_imperfections: probability must lie in [0,1]");
  return cfg.p_floor + (cfg.p_ceiling - cfg.p_floor) * p_ideal;
}

double infer_n_tilde(double p_obs, const ZenoConfig& cfg) {
  cfg.validate();
  if (!(p_obs > cfg.p_floor && p_obs <= cfg.p_ceiling))
    throw OutOfModelError("infer_n_tilde: observed transfer outside (p_floor, p_ceiling]");
  const auto model = [&](double nt) { return apply_imperfections(bloch_transfer(cfg, nt), cfg); };
  if (p_obs >= model(0.0)) return 0.0;

  double lo = 0.0, hi = 1.0;
  while (model(hi) > p_obs) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxNTilde)
      throw OutOfModelError("infer_n_tilde: observed transfer requires n_tilde > 1e6");
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (model(mid) > p_obs ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LinearFit fit_a0(std::span<const ZenoPoint> points) {
  if (points.size() < 2) throw DomainError("fit_a0: need at least two points");
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : points) {
    if (!(p.sigma > 0.0)) throw DomainError("fit_a0: sigma must be > 0");
    const double w = 1.0 / (p.sigma * p.sigma);
    sxy += w * p.n * p.n_tilde;
    sxx += w * p.n * p.n;
  }
  if (sxx == 0.0) throw DomainError("fit_a0: all points at n = 0");
  return {sxy / sxx, 1.0 / std::sqrt(sxx)};
}

double coherence_decay(double n_tilde) {
  if (!(n_tilde >= 0.0)) throw DomainError("coherence_decay: n_tilde must be >= 0");
  return std::exp(-n_tilde);
}

double zeno_knowledge(double n_tilde) {
  if (!(n_tilde >= 0.0)) throw DomainError("zeno_knowledge: n_tilde must be >= 0");
  return fln(2.0 * n_tilde);
}

}  // namespace cavread
