#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/curves.hpp"
#include "geodex/immersion.hpp"
#include "geodex/mlp.hpp"
#include "geodex/param_gradient.hpp"

namespace geodex {

/// gamma(lambda) = (1 - lambda) p + lambda q + lambda (1 - lambda) core(lambda).
/// The envelope pins both endpoints for every parameter value.
class CurveNetwork {
 public:
  CurveNetwork() = default;
  CurveNetwork(Eigen::VectorXd p, Eigen::VectorXd q, MlpNetwork core);

  /// core: 1 -> hidden (tanh) -> hidden (tanh) -> d (identity).
  static CurveNetwork random(const Eigen::VectorXd& p, const Eigen::VectorXd& q, int hidden, std::uint64_t seed);

  const Eigen::VectorXd& start() const noexcept { return p_; }
  const Eigen::VectorXd& end() const noexcept { return q_; }
  const MlpNetwork& core() const noexcept { return core_; }
  MlpNetwork& core() noexcept { return core_; }

  std::vector<Jet> operator()(const Jet& lambda) const;
  Eigen::VectorXd at(double lambda) const;
  SmoothCurve as_curve() const;

 private:
  Eigen::VectorXd p_;
  Eigen::VectorXd q_;
  MlpNetwork core_;
};

/// Trapezoid length on an `grid`-point lambda grid together with its
/// gradient over the core parameters. With `shift` in [0, 1) the nodes
/// become (k + shift) / (grid - 1), k < grid - 1, each with weight
/// 1 / (grid - 1): a shifted rectangle rule whose average over shifts is
/// the exact length. Training draws a new shift every step so the curve
/// cannot fit the quadrature nodes.
ParamGradient mllm_length_gradient(const Immersion& im, const CurveNetwork& curve, int grid,
                                   std::optional<double> shift = std::nullopt);

struct MllmConfig {
  int ensemble = 30;
  int steps = 2000;
  double learning_rate = 3e-4;
  int grid = 1000;
  int hidden = 32;
  std::uint64_t seed = 0;
};

struct MllmMember {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string message;
  double length = 0.0;
  std::vector<double> energy;  // <gamma', gamma'>_g on the grid
};

struct MllmResult {
  CurveNetwork best;
  double length = 0.0;
  int best_index = -1;
  std::vector<MllmMember> members;
};

/// Trains an ensemble of curve networks by Adam on the curve length and
/// keeps the shortest. Members whose loss or geometry breaks down are
/// marked failed; ConvergenceError when all fail.
MllmResult train_mllm(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const MllmConfig& cfg = {});

}  // namespace geodex
