#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geodex/immersion.hpp"
#include "geodex/integrator.hpp"
#include "geodex/jet.hpp"
#include "geodex/shooting.hpp"

namespace geodex {

/// Chart points on a uniform grid over lambda in [0, 1].
struct DiscreteCurve {
  std::vector<Eigen::VectorXd> samples;

  int size() const noexcept { return static_cast<int>(samples.size()); }
  double spacing() const { return 1.0 / (size() - 1); }
  /// Central differences inside, second-order one-sided at the ends.
  std::vector<Eigen::VectorXd> velocities() const;
};

/// Curve given as a jet map in lambda: the input is a one-variable jet,
/// the output one jet per chart coordinate.
using SmoothCurve = std::function<std::vector<Jet>(const Jet& lambda)>;

/// Samples a smooth curve on `n` uniform points.
DiscreteCurve sample_curve(const SmoothCurve& curve, int n);

/// Trapezoid rule over <gamma', gamma'>^(1/2) on the sample grid.
double curve_length(const Immersion& im, const DiscreteCurve& c);
/// Same quadrature with exact curve velocities on an `n`-point grid.
double curve_length(const Immersion& im, const SmoothCurve& c, int n = 1000);
/// Uses the state momenta, <gamma', gamma'> = p g^-1 p.
double curve_length(const Immersion& im, const GeodesicPath& path);

/// <gamma', gamma'>_g at every grid point.
std::vector<double> energy_profile(const Immersion& im, const DiscreteCurve& c);
std::vector<double> energy_profile(const Immersion& im, const SmoothCurve& c, int n = 1000);
std::vector<double> energy_profile(const GeodesicPath& path);

/// Trapezoid integral of an energy profile over [0, 1].
double integrated_energy(std::span<const double> profile);

/// Population variance.
double profile_variance(std::span<const double> profile);
/// (max - min) / |mean|.
double relative_variation(std::span<const double> profile);

/// n >= 2 equally spaced chart points from p to q.
DiscreteCurve linear_interpolation(const Eigen::VectorXd& p, const Eigen::VectorXd& q, int n);

struct DistanceReport {
  double distance = 0.0;  // min over converged seeds
  int best_seed = -1;
  std::vector<ShootingResult> solves;
  std::vector<double> lengths;  // NaN where the solve failed
  int converged_count() const;
};

/// Lengths of converged solves and their minimum; never throws on failed
/// seeds (best_seed stays -1 when none converged).
DistanceReport summarize_solves(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                std::vector<ShootingResult> solves);

/// Shortest length among the geodesics found by `seeds` shooting solves.
/// This is an infimum over the found set only. Throws ConvergenceError
/// when no seed converges.
DistanceReport geodesic_distance(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                 const ShootingConfig& cfg = {}, int seeds = 1, std::uint64_t rng_seed = 0);

}  // namespace geodex
