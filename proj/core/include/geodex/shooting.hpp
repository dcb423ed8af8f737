#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/immersion.hpp"
#include "geodex/integrator.hpp"

namespace geodex {

struct ShootingConfig {
  IntegratorConfig integrator;
  double tolerance = 1e-8;
  int max_iterations = 50;
  /// Initial velocity; defaults to the chart-linear guess q - p.
  std::optional<Eigen::VectorXd> seed;
  /// Relative finite-difference step for the shooting Jacobian.
  double fd_step = 1e-5;
  int max_halvings = 8;
};

enum class ShootingStatus { kConverged, kMaxIterations, kSingularJacobian, kIntegrationFailure };

std::string to_string(ShootingStatus s);

/// Outcome of one Newton solve. Solver failures are reported here rather
/// than thrown so multi-seed callers can keep every branch.
struct ShootingResult {
  Eigen::VectorXd v;  // log_p(q) when converged
  GeodesicPath path;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  ShootingStatus status = ShootingStatus::kMaxIterations;
  std::string message;
};

/// exp_p(v) - q in chart coordinates.
Eigen::VectorXd shoot_residual(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& v, const IntegratorConfig& cfg);

/// Damped Newton shooting for exp_p(v) = q. Finds a locally
/// length-minimising geodesic, not necessarily the shortest one.
ShootingResult log_map(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const ShootingConfig& cfg = {});

/// Runs `seeds` solves: the configured (or default) seed first, then random
/// perturbations of it with magnitude 0.2 |q - p|.
std::vector<ShootingResult> log_map_multi(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                          const ShootingConfig& cfg, int seeds, std::uint64_t rng_seed);

}  // namespace geodex
