#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geodex/jet.hpp"
#include "geodex/mlp.hpp"

namespace geodex {

/// Jet coefficients for a batch: `samples` x `channels`, every entry a jet
/// of the same (dim, order). Storage is column-major in (channel) so one
/// (sample, coefficient) column holds all channels contiguously.
class JetBatch {
 public:
  JetBatch() = default;
  JetBatch(int samples, int channels, int dim, int order);

  int samples() const noexcept { return samples_; }
  int channels() const noexcept { return channels_; }
  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  int coefficients() const noexcept { return ncoef_; }

  double& at(int sample, int channel, int coeff) { return data_(channel, sample * ncoef_ + coeff); }
  double at(int sample, int channel, int coeff) const { return data_(channel, sample * ncoef_ + coeff); }

  Jet jet(int sample, int channel) const;
  void set_jet(int sample, int channel, const Jet& j);

  Eigen::MatrixXd& matrix() noexcept { return data_; }
  const Eigen::MatrixXd& matrix() const noexcept { return data_; }

 private:
  int samples_ = 0;
  int channels_ = 0;
  int dim_ = 0;
  int order_ = 0;
  int ncoef_ = 1;
  Eigen::MatrixXd data_;
};

struct ParamGradient {
  double loss_value = 0.0;
  Eigen::VectorXd gradient;
};

/// A scalar functional of the network's output jets. Returns the loss,
/// fills `adjoint` (same shape as `outputs`) with d loss / d coefficient and
/// `per_sample` with each sample's contribution.
using LossHead = std::function<double(const JetBatch& outputs, JetBatch& adjoint, std::span<double> per_sample)>;

/// Forward pass of the whole batch at the jet level.
JetBatch forward_batch(const MlpNetwork& net, const JetBatch& inputs);

/// Loss and its gradient over the network parameters, for losses built
/// from the outputs and their input derivatives (order <= 2).
///
/// Forward jets carry the input derivatives through each layer; the
/// parameter gradient is accumulated backwards layer by layer with the
/// closed-form adjoint of the affine map and of the jet-level activation.
ParamGradient loss_parameter_gradient(const MlpNetwork& net, const JetBatch& inputs, const LossHead& head);

}  // namespace geodex
