#include "geodex/param_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geodex/errors.hpp"

namespace geodex {
namespace {

constexpr int kChunkSamples = 2048;

using Array = Eigen::ArrayXd;

// Applies tanh to every jet stored in `z` (channels x samples*ncoef) in place.
void tanh_forward(Eigen::MatrixXd& z, int samples, int dim, int order) {
  const int ncoef = coefficient_count(dim, order);
  const int o2 = 1 + dim;
  const int o3 = o2 + dim * (dim + 1) / 2;
  for (int s = 0; s < samples; ++s) {
    auto block = z.middleCols(s * ncoef, ncoef);
    const Array t = block.col(0).array().tanh();
    const Array t1 = 1.0 - t * t;
    const Array t2 = -2.0 * t * t1;
    if (order >= 3) {
      const Array t3 = (6.0 * t * t - 2.0) * t1;
      for (int k = 0; k < dim; ++k) {
        for (int j = 0; j <= k; ++j) {
          for (int i = 0; i <= j; ++i) {
            const auto ui = block.col(1 + i).array();
            const auto uj = block.col(1 + j).array();
            const auto uk = block.col(1 + k).array();
            const auto uij = block.col(o2 + pair_index(i, j)).array();
            const auto uik = block.col(o2 + pair_index(i, k)).array();
            const auto ujk = block.col(o2 + pair_index(j, k)).array();
            auto out = block.col(o3 + triple_index(i, j, k)).array();
            out = t3 * ui * uj * uk + t2 * (uij * uk + uik * uj + ujk * ui) + t1 * out;
          }
        }
      }
    }
    if (order >= 2) {
      for (int j = 0; j < dim; ++j) {
        for (int i = 0; i <= j; ++i) {
          auto out = block.col(o2 + pair_index(i, j)).array();
          out = t2 * block.col(1 + i).array() * block.col(1 + j).array() + t1 * out;
        }
      }
    }
    if (order >= 1) {
      for (int i = 0; i < dim; ++i) block.col(1 + i).array() *= t1;
    }
    block.col(0) = t.matrix();
  }
}

// Given pre-activations `z` and adjoints of the tanh outputs, overwrites
// `adj` with adjoints of the pre-activations. Orders up to 2.
void tanh_backward(const Eigen::MatrixXd& z, Eigen::MatrixXd& adj, int samples, int dim, int order) {
  const int ncoef = coefficient_count(dim, order);
  const int o2 = 1 + dim;
  for (int s = 0; s < samples; ++s) {
    const auto u = z.middleCols(s * ncoef, ncoef);
    auto a = adj.middleCols(s * ncoef, ncoef);
    const Array t = u.col(0).array().tanh();
    const Array t1 = 1.0 - t * t;
    const Array t2 = -2.0 * t * t1;
    const Array t3 = (6.0 * t * t - 2.0) * t1;
    Array u0bar = a.col(0).array() * t1;
    if (order >= 1) {
      for (int i = 0; i < dim; ++i) u0bar += a.col(1 + i).array() * t2 * u.col(1 + i).array();
    }
    if (order >= 2) {
      std::vector<Array> uibar(dim);
      for (int i = 0; i < dim; ++i) uibar[i] = t1 * a.col(1 + i).array();
      for (int j = 0; j < dim; ++j) {
        for (int i = 0; i <= j; ++i) {
          const int n = o2 + pair_index(i, j);
          const Array abar = a.col(n).array();
          u0bar += abar * (t3 * u.col(1 + i).array() * u.col(1 + j).array() + t2 * u.col(n).array());
          uibar[i] += t2 * abar * u.col(1 + j).array();
          uibar[j] += t2 * abar * u.col(1 + i).array();
          a.col(n).array() = t1 * abar;
        }
      }
      for (int i = 0; i < dim; ++i) a.col(1 + i) = uibar[i].matrix();
    } else if (order >= 1) {
      for (int i = 0; i < dim; ++i) a.col(1 + i).array() *= t1;
    }
    a.col(0) = u0bar.matrix();
  }
}

void affine_forward(const DenseLayer& layer, const Eigen::MatrixXd& a, Eigen::MatrixXd& z, int samples, int ncoef) {
  z.noalias() = layer.weight * a;
  for (int s = 0; s < samples; ++s) z.col(s * ncoef) += layer.bias;
}

}  // namespace

JetBatch::JetBatch(int samples, int channels, int dim, int order)
    : samples_(samples),
      channels_(channels),
      dim_(dim),
      order_(order),
      ncoef_(coefficient_count(dim, order)),
      data_(Eigen::MatrixXd::Zero(channels, static_cast<Eigen::Index>(samples) * coefficient_count(dim, order))) {
  if (dim < 0 || dim > kMaxJetDim || order < 0 || order > kMaxJetOrder) {
    throw ConfigError("jet batch layout out of range");
  }
}

Jet JetBatch::jet(int sample, int channel) const {
  Jet j = Jet::constant(0.0, dim_, order_);
  auto c = j.coefficients();
  for (int n = 0; n < ncoef_; ++n) c[n] = at(sample, channel, n);
  return j;
}

void JetBatch::set_jet(int sample, int channel, const Jet& j) {
  if (j.dim() != dim_ || j.order() < order_) throw ConfigError("jet layout does not match batch");
  const auto c = j.coefficients();
  for (int n = 0; n < ncoef_; ++n) at(sample, channel, n) = c[n];
}

JetBatch forward_batch(const MlpNetwork& net, const JetBatch& inputs) {
  if (inputs.channels() != net.input_dim()) throw ConfigError("batch width does not match network input");
  const int ncoef = inputs.coefficients();
  JetBatch out(inputs.samples(), net.output_dim(), inputs.dim(), inputs.order());
  Eigen::MatrixXd a = inputs.matrix();
  Eigen::MatrixXd z;
  for (const auto& layer : net.layers()) {
    affine_forward(layer, a, z, inputs.samples(), ncoef);
    if (layer.activation == Activation::kTanh) tanh_forward(z, inputs.samples(), inputs.dim(), inputs.order());
    a.swap(z);
  }
  out.matrix() = std::move(a);
  return out;
}

ParamGradient loss_parameter_gradient(const MlpNetwork& net, const JetBatch& inputs, const LossHead& head) {
  if (inputs.samples() == 0) throw ConfigError("loss gradient needs a nonempty batch");
  if (inputs.order() > 2) throw ConfigError("parameter gradients support input jets up to order 2");

  const auto& layers = net.layers();
  const int nl = static_cast<int>(layers.size());
  const int ncoef = inputs.coefficients();
  std::vector<Eigen::MatrixXd> acts(nl + 1);
  std::vector<Eigen::MatrixXd> pre(nl);
  auto forward_chunk = [&](int first, int count) {
    acts[0] = inputs.matrix().middleCols(first * ncoef, count * ncoef);
    for (int l = 0; l < nl; ++l) {
      affine_forward(layers[l], acts[l], pre[l], count, ncoef);
      acts[l + 1] = pre[l];
      if (layers[l].activation == Activation::kTanh) tanh_forward(acts[l + 1], count, inputs.dim(), inputs.order());
    }
  };

  // A single chunk keeps its intermediates from the forward pass; larger
  // batches are recomputed chunk by chunk during the reverse sweep.
  const bool single_chunk = inputs.samples() <= kChunkSamples;
  JetBatch outputs;
  if (single_chunk) {
    if (inputs.channels() != net.input_dim()) throw ConfigError("batch width does not match network input");
    forward_chunk(0, inputs.samples());
    outputs = JetBatch(inputs.samples(), net.output_dim(), inputs.dim(), inputs.order());
    outputs.matrix() = acts[nl];
  } else {
    outputs = forward_batch(net, inputs);
  }
  JetBatch adjoint(outputs.samples(), outputs.channels(), outputs.dim(), outputs.order());
  std::vector<double> per_sample(outputs.samples(), 0.0);
  const double loss = head(outputs, adjoint, per_sample);
  if (!std::isfinite(loss)) {
    int bad = 0;
    while (bad < static_cast<int>(per_sample.size()) && std::isfinite(per_sample[bad])) ++bad;
    if (bad == static_cast<int>(per_sample.size())) bad = -1;
    throw TrainingError("non-finite loss" + (bad >= 0 ? " at sample " + std::to_string(bad) : std::string{}), bad);
  }

  std::vector<Eigen::MatrixXd> wgrad(nl);
  std::vector<Eigen::VectorXd> bgrad(nl);
  for (int l = 0; l < nl; ++l) {
    wgrad[l] = Eigen::MatrixXd::Zero(layers[l].weight.rows(), layers[l].weight.cols());
    bgrad[l] = Eigen::VectorXd::Zero(layers[l].bias.size());
  }

  // The summation order is fixed, so results are reproducible.
  for (int first = 0; first < inputs.samples(); first += kChunkSamples) {
    const int count = std::min(kChunkSamples, inputs.samples() - first);
    if (!single_chunk) forward_chunk(first, count);
    Eigen::MatrixXd adj = adjoint.matrix().middleCols(first * ncoef, count * ncoef);
    for (int l = nl - 1; l >= 0; --l) {
      if (layers[l].activation == Activation::kTanh) tanh_backward(pre[l], adj, count, inputs.dim(), inputs.order());
      wgrad[l].noalias() += adj * acts[l].transpose();
      for (int s = 0; s < count; ++s) bgrad[l] += adj.col(s * ncoef);
      if (l > 0) {
        Eigen::MatrixXd next = layers[l].weight.transpose() * adj;
        adj.swap(next);
      }
    }
  }

  ParamGradient result;
  result.loss_value = loss;
  result.gradient.resize(net.parameter_count());
  int n = 0;
  for (int l = 0; l < nl; ++l) {
    for (int r = 0; r < wgrad[l].rows(); ++r) {
      for (int c = 0; c < wgrad[l].cols(); ++c) result.gradient(n++) = wgrad[l](r, c);
    }
    for (int r = 0; r < bgrad[l].size(); ++r) result.gradient(n++) = bgrad[l](r);
  }
  if (!result.gradient.allFinite()) throw TrainingError("non-finite parameter gradient", -1);
  return result;
}

}  // namespace geodex
