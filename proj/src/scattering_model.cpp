#include "cavread/scattering_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cavread/errors.hpp"

namespace cavread {

namespace {

constexpr double kMaxSInf = 1.0 - 1e-9;

struct Problem {
  std::span<const SurvivalPoint> data;
  FitOptions options;

  int parameter_count() const { return options.fixed_s_inf ? 1 : 2; }

  DepumpParams unpack(const Eigen::VectorXd& p) const {
    DepumpParams d;
    d.s_inf = options.fixed_s_inf ? *options.fixed_s_inf : p(0);
    d.nu = options.fixed_s_inf ? p(0) : p(1);
    return d;
  }

  double weight(const SurvivalPoint& pt) const { return options.weighted ? 1.0 / pt.sigma : 1.0; }

  Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
    const auto d = unpack(p);
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
      r(static_cast<Eigen::Index>(i)) = (data[i].S - survival_model(data[i].n, d)) * weight(data[i]);
    return r;
  }

  // Jacobian of the weighted model values (central differences).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(data.size()), p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double h = 1e-6 * std::max(std::abs(p(j)), 1e-3);
      Eigen::VectorXd up = p, down = p;
      up(j) += h;
      down(j) -= h;
      project(up);
      project(down);
      const double span = up(j) - down(j);
      // residual = (S - model) w, so d(model w) = -d(residual)
      J.col(j) = -(residuals(up) - residuals(down)) / span;
    }
    return J;
  }

  void project(Eigen::VectorXd& p) const {
    if (!options.fixed_s_inf) {
      p(0) = std::clamp(p(0), 0.0, kMaxSInf);
      p(1) = std::max(p(1), 0.0);
    } else {
      p(0) = std::max(p(0), 0.0);
    }
  }
};

struct Attempt {
  bool converged = false;
  Eigen::VectorXd params;
  double rss = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

double initial_nu(std::span<const SurvivalPoint> data, double s_inf) {
  double sum = 0.0;
  int count = 0;
  for (const auto& pt : data) {
    const double frac = (pt.S - s_inf) / (1.0 - s_inf);
    if (pt.n > 0.0 && frac > 0.0 && frac < 1.0) {
      sum += -std::log(frac) / pt.n;
      ++count;
    }
  }
  const double lambda = count > 0 ? sum / count : 1e-2;
  return std::max(lambda * (1.0 - s_inf), 1e-6);
}

Attempt gauss_newton(const Problem& prob, Eigen::VectorXd p) {
  Attempt a;
  prob.project(p);
  double rss = prob.residuals(p).squaredNorm();
  const double tol = prob.options.relative_tolerance;
  for (int it = 1; it <= prob.options.max_iterations; ++it) {
    a.iterations = it;
    const Eigen::VectorXd r = prob.residuals(p);
    const Eigen::MatrixXd J = prob.jacobian(p);
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(r);

    // Step halving keeps the residual from growing.
    double scale = 1.0;
    Eigen::VectorXd trial = p;
    double trial_rss = rss;
    for (int k = 0; k < 40; ++k, scale *= 0.5) {
      trial = p + scale * step;
      prob.project(trial);
      trial_rss = prob.residuals(trial).squaredNorm();
      if (trial_rss <= rss) break;
    }
    const Eigen::VectorXd applied = trial - p;
    if (trial_rss <= rss) {
      p = trial;
      rss = trial_rss;
    }
    if (applied.norm() <= tol * (p.norm() + tol) || rss < 1e-30) {
      a.converged = true;
      break;
    }
  }
  a.params = p;
  a.rss = rss;
  return a;
}

}  // namespace

void DepumpParams::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("DepumpParams: nu must be >= 0");
  if (!(gamma_ratio >= 0.0)) throw DomainError("DepumpParams: gamma_ratio must be >= 0");
  if (!(s_inf >= 0.0 && s_inf < 1.0)) throw DomainError("DepumpParams: s_inf must lie in [0,1)");
}

double depump_prob_per_scatter(double gamma_ratio) {
  if (!(gamma_ratio >= 0.0)) throw DomainError("depump_prob_per_scatter: ratio must be >= 0");
  if (std::isinf(gamma_ratio)) return 1.0;
  return (gamma_ratio + 0.4) / (gamma_ratio + 1.0);
}

double scatter_per_photon(double nu, double gamma_ratio) {
  if (!(nu >= 0.0)) throw DomainError("scatter_per_photon: nu must be >= 0");
  return nu / depump_prob_per_scatter(gamma_ratio);
}

double survival_model(double n, const DepumpParams& p) {
  p.validate();
  if (!(n >= 0.0)) throw DomainError("survival_model: n must be >= 0");
  const double lambda = p.nu / (1.0 - p.s_inf);
  return p.s_inf + (1.0 - p.s_inf) * std::exp(-lambda * n);
}

double survival_slope(double n, const DepumpParams& p) {
  p.validate();
  const double lambda = p.nu / (1.0 - p.s_inf);
  return -p.nu * std::exp(-lambda * n);
}

FitResult fit_survival(std::span<const SurvivalPoint> data, const FitOptions& options) {
  Problem prob{data, options};
  if (static_cast<int>(data.size()) < prob.parameter_count())
    throw DomainError("fit_survival: fewer data points than parameters");
  for (const auto& pt : data) {
    if (!(pt.n >= 0.0) || !std::isfinite(pt.S)) throw DomainError("fit_survival: bad data point");
    if (options.weighted && !(pt.sigma > 0.0))
      throw DomainError("fit_survival: weighted fit needs sigma > 0");
  }
  if (options.fixed_s_inf && !(*options.fixed_s_inf >= 0.0 && *options.fixed_s_inf < 1.0))
    throw DomainError("fit_survival: fixed s_inf must lie in [0,1)");

  std::vector<double> starts =
      options.fixed_s_inf ? std::vector<double>{*options.fixed_s_inf} : std::vector<double>{0.0, 0.2, 0.4};
  Attempt best;
  for (double s0 : starts) {
    Eigen::VectorXd p(prob.parameter_count());
    if (options.fixed_s_inf) {
      p << initial_nu(data, s0);
    } else {
      p << s0, initial_nu(data, s0);
    }
    const auto a = gauss_newton(prob, p);
    if (a.converged && a.rss < best.rss) best = a;
  }
  if (!best.converged)
    throw FitError("fit_survival: Gauss-Newton did not converge within " +
                   std::to_string(options.max_iterations) + " iterations");

  FitResult r;
  const auto d = prob.unpack(best.params);
  r.s_inf = d.s_inf;
  r.nu = d.nu;
  r.rss = best.rss;
  r.iterations = best.iterations;

  const Eigen::MatrixXd J = prob.jacobian(best.params);
  Eigen::MatrixXd cov = (J.transpose() * J).completeOrthogonalDecomposition().pseudoInverse();
  if (!options.weighted) {
    const double dof = static_cast<double>(data.size()) - prob.parameter_count();
    cov *= dof > 0.0 ? best.rss / dof : 0.0;
  }
  if (options.fixed_s_inf) {
    r.sigma_nu = std::sqrt(std::max(0.0, cov(0, 0)));
  } else {
    r.sigma_s_inf = std::sqrt(std::max(0.0, cov(0, 0)));
    r.sigma_nu = std::sqrt(std::max(0.0, cov(1, 1)));
  }
  return r;
}

double knowledge_exponent_per_scatter(double exponent_per_photon, double m_per_n) {
  if (!(exponent_per_photon >= 0.0)) throw DomainError("exponent per photon must be >= 0");
  if (!(m_per_n > 0.0)) throw DomainError("knowledge_exponent_per_scatter: m/n must be > 0");
  return exponent_per_photon / m_per_n;
}

}  // namespace cavread
