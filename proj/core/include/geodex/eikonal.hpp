#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/curvature.hpp"
#include "geodex/immersion.hpp"
#include "geodex/jet.hpp"
#include "geodex/metric.hpp"
#include "geodex/mlp.hpp"
#include "geodex/sampling.hpp"
#include "geodex/weights_io.hpp"

namespace geodex {

/// Scalar function on the chart, evaluated on chart-coordinate jets.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual Jet operator()(std::span<const Jet> x) const = 0;
  /// Point where the field is not differentiable, if any.
  virtual std::optional<Eigen::VectorXd> source() const { return std::nullopt; }

  double value(const Eigen::VectorXd& x) const;
};

using FieldFunction = std::function<Jet(std::span<const Jet>)>;

class FunctionField : public ScalarField {
 public:
  explicit FunctionField(FieldFunction f, std::optional<Eigen::VectorXd> source = std::nullopt)
      : f_(std::move(f)), source_(std::move(source)) {}
  Jet operator()(std::span<const Jet> x) const override { return f_(x); }
  std::optional<Eigen::VectorXd> source() const override { return source_; }

 private:
  FieldFunction f_;
  std::optional<Eigen::VectorXd> source_;
};

/// phi(p) = |n(s(p)) - n(s(q))| for a scalar network n on standardised
/// inputs s(x). Vanishes at the source q and is nonnegative for every
/// parameter value.
class DistanceField : public ScalarField {
 public:
  DistanceField() = default;
  DistanceField(Eigen::VectorXd source, MlpNetwork net, Standardisation standardisation);

  /// Network d -> hidden... -> 1, tanh hidden layers, identity output.
  static DistanceField random(const Eigen::VectorXd& source, const DomainBox& box, std::span<const int> hidden,
                              std::uint64_t seed);

  Jet operator()(std::span<const Jet> x) const override;
  std::optional<Eigen::VectorXd> source() const override { return source_; }

  const Eigen::VectorXd& source_point() const noexcept { return source_; }
  const MlpNetwork& network() const noexcept { return net_; }
  MlpNetwork& network() noexcept { return net_; }
  const Standardisation& standardisation() const noexcept { return standardisation_; }

  /// Jets of the standardised inputs, seeded in chart coordinates.
  std::vector<Jet> standardised_inputs(std::span<const Jet> x) const;

 private:
  Eigen::VectorXd source_;
  MlpNetwork net_;
  Standardisation standardisation_;
};

/// Geometry needed by the residuals at one chart point.
struct LocalGeometry {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  std::vector<Eigen::MatrixXd> dg_inv;  // dg_inv[j](k, l) = d_j g^kl
  ChristoffelSymbols gamma;
  double scalar_curvature = 0.0;
  double psi = 1.0;
};

/// Curvature (and so psi) is skipped when alpha == 0.
LocalGeometry local_geometry(const Immersion& im, const Eigen::VectorXd& x, double alpha,
                             CurvatureClamp clamp = CurvatureClamp::kPositivePart);

/// g^ij d_i phi d_j phi - 1 from the gradient.
double eikonal_residual(const LocalGeometry& geo, const Eigen::VectorXd& grad);
/// <a, a>_g with v = g^-1 grad and a^k = v^j d_j v^k + Gamma^k_ij v^i v^j.
double flow_residual(const LocalGeometry& geo, const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess);

/// Throws NumericError within 1e-6 of the field's source.
double eikonal_residual(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x);
double flow_residual(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x);

/// v^i = g^ij d_j phi.
Eigen::VectorXd geodesic_flow(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x);

struct EikonalLossReport {
  double total = 0.0;          // eikonal_term + lambda * flow_term
  double eikonal_term = 0.0;   // mean psi eps^2
  double flow_term = 0.0;      // mean psi eps_flow
  std::vector<double> psi;     // per batch point
  int epoch = -1;
};

/// Mean over the batch of psi (eps^2 + lambda eps_flow).
EikonalLossReport curvature_scaled_loss(const Immersion& im, const ScalarField& field,
                                        std::span<const Eigen::VectorXd> batch, double lambda, double alpha,
                                        CurvatureClamp clamp = CurvatureClamp::kPositivePart);

struct EikonalTrainConfig {
  int epochs_max = 5000;
  int batch = 20000;
  double learning_rate = 3e-4;
  double lambda = 1e-3;
  double alpha = 0.1;
  CurvatureClamp clamp = CurvatureClamp::kPositivePart;
  std::vector<int> hidden = {64, 64, 64};
  std::uint64_t seed = 0;

  /// Radius of the ball around the source, in standardised units, kept
  /// out of the training batches.
  double source_exclusion = 1e-3;

  /// Stop when the mean loss over the last `window` epochs improves by less
  /// than `min_improvement` (relative) on the window before it.
  int window = 100;
  double min_improvement = 1e-3;

  /// Curvature-weighted half of each batch; false draws all uniformly.
  bool curvature_sampling = true;
  MhConfig sampler;

  /// Ring of points at geodesic distance `anchor_radius` from the source,
  /// reached by the exponential map. The network difference n(s(x)) -
  /// n(s(q)) at each ring point is pulled towards that distance. Reported
  /// separately from the residual loss; zero weight disables it. Skipped
  /// with a warning where the metric degenerates at the source.
  double anchor_weight = 10.0;
  double anchor_radius = 0.5;
  int anchor_points = 32;

  int validation_grid = 41;
};

struct EikonalEpoch {
  int epoch = 0;
  double total = 0.0;
  double eikonal_term = 0.0;
  double flow_term = 0.0;
  double anchor_term = 0.0;
  double objective = 0.0;  // total + anchor_weight * anchor_term
};

struct EikonalTraining {
  DistanceField field;
  std::vector<EikonalEpoch> history;
  bool converged = false;
  /// Residual loss on the validation grid before and after training.
  double initial_probe_loss = 0.0;
  double probe_loss = 0.0;
  std::vector<std::string> warnings;
};

using EikonalProgress = std::function<void(const EikonalEpoch&)>;

/// Adam on fresh batches from the mixed uniform / curvature sampler.
/// `init` resumes from an existing field (same source and standardisation).
/// The source may lie outside the domain, e.g. on a chart boundary.
EikonalTraining train_distance_field(const Immersion& im, const Eigen::VectorXd& source, const DomainBox& domain,
                                     const EikonalTrainConfig& cfg, std::optional<DistanceField> init = std::nullopt,
                                     const EikonalProgress& progress = {});

/// Grid of n x n points over a 2-D box, x fastest.
std::vector<Eigen::VectorXd> grid_points(const DomainBox& box, int n);

/// Residual loss on the validation grid, skipping the source neighbourhood.
double probe_loss(const Immersion& im, const DistanceField& field, const DomainBox& domain,
                  const EikonalTrainConfig& cfg);

struct FieldValidation {
  double mae = 0.0;
  double unit_speed_fraction = 0.0;  // share of points with |v|_g in [0.9, 1.1]
  int points = 0;
};

/// Compares the field with `oracle` on an n x n grid.
FieldValidation validate_field(const Immersion& im, const DistanceField& field, const DomainBox& domain, int n,
                               const std::function<double(const Eigen::VectorXd&)>& oracle);

}  // namespace geodex
