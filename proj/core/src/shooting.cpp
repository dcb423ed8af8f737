#include "geodex/shooting.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geodex/errors.hpp"

namespace geodex {

std::string to_string(ShootingStatus s) {
  switch (s) {
    case ShootingStatus::kConverged: return "converged";
    case ShootingStatus::kMaxIterations: return "max-iterations";
    case ShootingStatus::kSingularJacobian: return "singular-jacobian";
    case ShootingStatus::kIntegrationFailure: return "integration-failure";
  }
  return "unknown";
}

Eigen::VectorXd shoot_residual(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& v, const IntegratorConfig& cfg) {
  if (q.size() != p.size()) throw ConfigError("endpoints differ in dimension");
  try {
    return exp_map(im, p, v, cfg).end().q - q;
  } catch (const NumericError& e) {
    throw NumericError(std::string("residual evaluation failed: ") + e.what());
  }
}

namespace {

struct Trial {
  GeodesicPath path;
  Eigen::VectorXd residual;
  double norm = std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string error;
};

Trial evaluate(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q, const Eigen::VectorXd& v,
               const IntegratorConfig& cfg) {
  Trial t;
  try {
    t.path = exp_map(im, p, v, cfg);
    t.residual = t.path.end().q - q;
    t.norm = t.residual.norm();
    t.ok = std::isfinite(t.norm);
    if (!t.ok) t.error = "non-finite endpoint";
  } catch (const NumericError& e) {
    t.ok = false;
    t.error = e.what();
  }
  return t;
}

}  // namespace

ShootingResult log_map(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const ShootingConfig& cfg) {
  const int d = im.chart_dim();
  if (p.size() != d || q.size() != d) throw ConfigError("endpoints must match the chart dimension");
  ShootingResult result;

  Eigen::VectorXd v = cfg.seed ? *cfg.seed : Eigen::VectorXd(q - p);
  if (v.size() != d) throw ConfigError("shooting seed has wrong dimension");
  if ((q - p).norm() == 0.0) v.setZero();

  // A seed that cannot be integrated is shortened before giving up.
  Trial current = evaluate(im, p, q, v, cfg.integrator);
  const std::string first_error = current.error;
  for (int halving = 0; !current.ok && halving < cfg.max_halvings; ++halving) {
    v *= 0.5;
    current = evaluate(im, p, q, v, cfg.integrator);
  }
  if (!current.ok) {
    result.v = v;
    result.residual_norm = current.norm;
    result.status = ShootingStatus::kIntegrationFailure;
    result.message = "integration failed for the initial seed: " + first_error;
    return result;
  }

  int iterations = 0;
  while (current.norm > cfg.tolerance && iterations < cfg.max_iterations) {
    const double h = cfg.fd_step * std::max(v.norm(), 1.0);
    Eigen::MatrixXd jac(d, d);
    for (int c = 0; c < d; ++c) {
      Eigen::VectorXd vp = v;
      Eigen::VectorXd vm = v;
      vp(c) += h;
      vm(c) -= h;
      const Trial fp = evaluate(im, p, q, vp, cfg.integrator);
      const Trial fm = evaluate(im, p, q, vm, cfg.integrator);
      if (!fp.ok || !fm.ok) {
        result.status = ShootingStatus::kIntegrationFailure;
        result.message = "integration failed while differencing the shooting map: " + (fp.ok ? fm.error : fp.error);
        result.v = v;
        result.path = std::move(current.path);
        result.residual_norm = current.norm;
        result.iterations = iterations;
        return result;
      }
      jac.col(c) = (fp.residual - fm.residual) / (2.0 * h);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(d - 1) > 1e-12 * sv(0))) {
      std::ostringstream os;
      os << "singular shooting Jacobian (singular values " << sv(0) << " .. " << sv(d - 1)
         << "); try a different seed";
      result.status = ShootingStatus::kSingularJacobian;
      result.message = os.str();
      result.v = v;
      result.path = std::move(current.path);
      result.residual_norm = current.norm;
      result.iterations = iterations;
      return result;
    }
    const Eigen::VectorXd delta = -svd.solve(current.residual);

    // Step halving until the residual decreases; otherwise keep the best trial.
    double t = 1.0;
    Trial best;
    Eigen::VectorXd best_v = v;
    std::string trial_error;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, t *= 0.5) {
      const Eigen::VectorXd trial_v = v + t * delta;
      Trial trial = evaluate(im, p, q, trial_v, cfg.integrator);
      if (!trial.ok) trial_error = trial.error;
      if (trial.ok && trial.norm < best.norm) {
        best = std::move(trial);
        best_v = trial_v;
      }
      if (best.ok && best.norm < current.norm) break;
    }
    ++iterations;
    if (!best.ok) {
      result.status = ShootingStatus::kIntegrationFailure;
      result.message = "integration failed along the Newton direction: " + trial_error;
      break;
    }
    v = best_v;
    current = std::move(best);
  }

  result.v = v;
  result.path = std::move(current.path);
  result.residual_norm = current.norm;
  result.iterations = iterations;
  result.converged = current.norm <= cfg.tolerance;
  if (result.converged) {
    result.status = ShootingStatus::kConverged;
    result.message.clear();
  } else if (result.status != ShootingStatus::kIntegrationFailure) {
    std::ostringstream os;
    os << "no convergence after " << iterations << " iterations; best residual " << current.norm;
    result.status = ShootingStatus::kMaxIterations;
    result.message = os.str();
  }
  return result;
}

std::vector<ShootingResult> log_map_multi(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                          const ShootingConfig& cfg, int seeds, std::uint64_t rng_seed) {
  if (seeds < 1) throw ConfigError("at least one shooting seed is required");
  const Eigen::VectorXd base = cfg.seed ? *cfg.seed : Eigen::VectorXd(q - p);
  const double magnitude = 0.2 * (q - p).norm();
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ShootingResult> out;
  out.reserve(seeds);
  for (int s = 0; s < seeds; ++s) {
    ShootingConfig c = cfg;
    Eigen::VectorXd seed = base;
    if (s > 0) {
      Eigen::VectorXd dir(base.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
      if (dir.norm() > 0.0) seed += magnitude * dir / dir.norm();
    }
    c.seed = seed;
    out.push_back(log_map(im, p, q, c));
  }
  return out;
}

}  // namespace geodex
