#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/hamiltonian.hpp"
#include "geodex/immersion.hpp"

namespace geodex {

struct IntegratorConfig {
  double step = 1e-3;   // affine-parameter step
  double omega = 1e-2;  // binding strength between the two copies
  int order = 4;        // even, >= 2
  double drift_error = 1e-4;        // relative H drift that aborts integration
  double drift_warning = 1e-6;      // relative H drift that raises a warning
  double coherence_warning = 1e-6;  // copy gap that raises a warning
};

/// Discrete geodesic over lambda in [0, 1].
struct GeodesicPath {
  std::vector<PhasePoint> states;
  std::vector<double> lambdas;
  std::vector<double> energies;  // H at each state
  double step = 0.0;
  int order = 0;
  double omega = 0.0;
  double max_copy_gap = 0.0;
  std::vector<std::string> warnings;

  const PhasePoint& start() const { return states.front(); }
  const PhasePoint& end() const { return states.back(); }
  /// max_k |H_k - H_0| / max(|H_0|, 1e-12)
  double relative_drift() const;
};

using StepFunction = std::function<ExtendedPhasePoint(const ExtendedPhasePoint&, double)>;

/// One second-order Strang step
/// A(d/2) o B(d/2) o C(d) o B(d/2) o A(d/2) with exact sub-flows:
///   A: p -= d dH/dq(q, y),  x += d dH/dp(q, y)
///   B: q += d dH/dp(x, p),  y -= d dH/dq(x, p)
///   C: rotate (q - x, p - y) by 2 omega d, keeping q + x and p + y.
ExtendedPhasePoint tao_step_order2(const Immersion& im, const ExtendedPhasePoint& s, double step, double omega);

/// Triple-jump weight 1 / (2 - 2^(1/(order - 1))) lifting a symmetric
/// method of order `order - 2` to order `order`.
double triple_jump_weight(int order);

/// Recursive triple-jump composition of a symmetric second-order step.
StepFunction yoshida_compose(StepFunction base, int order);

struct Integration {
  GeodesicPath path;
  ExtendedPhasePoint final_state;
};

/// Integrates the extended system over lambda in [0, 1] with
/// ceil(1/step) equal steps.
Integration integrate(const Immersion& im, const ExtendedPhasePoint& start, const IntegratorConfig& cfg);

/// Geodesic from p with initial contravariant velocity v; the endpoint is exp_p(v).
GeodesicPath exp_map(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                     const IntegratorConfig& cfg = {});

}  // namespace geodex
