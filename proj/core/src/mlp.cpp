#include "geodex/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "geodex/errors.hpp"
#include "geodex/param_gradient.hpp"

namespace geodex {

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "identity"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ParseError("unsupported activation '" + name + "'");
}

MlpNetwork::MlpNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weight.rows() != layer.bias.size()) {
      throw ConfigError("layer " + std::to_string(l) + ": bias length " + std::to_string(layer.bias.size()) +
                        " does not match weight rows " + std::to_string(layer.weight.rows()));
    }
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
      throw ConfigError("layer " + std::to_string(l) + ": input width " + std::to_string(layer.weight.cols()) +
                        " does not chain with previous output " + std::to_string(layers_[l - 1].weight.rows()));
    }
  }
}

MlpNetwork MlpNetwork::random(std::span<const int> widths, Activation hidden, Activation output,
                              std::uint64_t seed) {
  if (widths.size() < 2) throw ConfigError("network needs at least input and output widths");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer;
    layer.weight.resize(out, in);
    layer.bias.resize(out);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weight(r, c) = u(rng);
    }
    for (int r = 0; r < out; ++r) layer.bias(r) = u(rng);
    layer.activation = (l + 2 == widths.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return MlpNetwork(std::move(layers));
}

int MlpNetwork::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
int MlpNetwork::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

int MlpNetwork::parameter_count() const {
  int n = 0;
  for (const auto& layer : layers_) n += static_cast<int>(layer.weight.size() + layer.bias.size());
  return n;
}

Eigen::VectorXd MlpNetwork::parameters() const {
  Eigen::VectorXd theta(parameter_count());
  int n = 0;
  for (const auto& layer : layers_) {
    for (int r = 0; r < layer.weight.rows(); ++r) {
      for (int c = 0; c < layer.weight.cols(); ++c) theta(n++) = layer.weight(r, c);
    }
    for (int r = 0; r < layer.bias.size(); ++r) theta(n++) = layer.bias(r);
  }
  return theta;
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count()) throw ConfigError("parameter vector has wrong length");
  int n = 0;
  for (auto& layer : layers_) {
    for (int r = 0; r < layer.weight.rows(); ++r) {
      for (int c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = theta(n++);
    }
    for (int r = 0; r < layer.bias.size(); ++r) layer.bias(r) = theta(n++);
  }
}

Eigen::VectorXd MlpNetwork::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) throw ConfigError("network input has wrong dimension");
  Eigen::VectorXd a = x;
  for (const auto& layer : layers_) {
    Eigen::VectorXd z = layer.weight * a + layer.bias;
    if (layer.activation == Activation::kTanh) z = z.array().tanh().matrix();
    a = std::move(z);
  }
  return a;
}

std::vector<Jet> MlpNetwork::forward(std::span<const Jet> x) const {
  if (static_cast<int>(x.size()) != input_dim()) throw ConfigError("network input has wrong dimension");
  int dim = 0;
  int order = 0;
  for (const auto& j : x) {
    if (j.dim() > 0) {
      dim = j.dim();
      order = j.order();
      break;
    }
  }
  JetBatch in(1, input_dim(), dim, order);
  for (int c = 0; c < input_dim(); ++c) {
    in.set_jet(0, c, x[c].dim() == 0 ? Jet::constant(x[c].value(), dim, order) : x[c]);
  }
  const JetBatch out = forward_batch(*this, in);
  std::vector<Jet> y;
  y.reserve(out.channels());
  for (int c = 0; c < out.channels(); ++c) y.push_back(out.jet(0, c));
  return y;
}

}  // namespace geodex
