#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/jet.hpp"

namespace geodex {

enum class Activation { kTanh, kIdentity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kTanh;
};

/// Stack of affine layers with elementwise activations.
///
/// The flat parameter vector lists, layer by layer, the weight matrix in
/// row-major order followed by the bias.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  explicit MlpNetwork(std::vector<DenseLayer> layers);

  /// Layer widths `widths[0] -> ... -> widths.back()`; hidden layers use
  /// `hidden`, the last layer `output`. Entries ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static MlpNetwork random(std::span<const int> widths, Activation hidden, Activation output,
                           std::uint64_t seed);

  int input_dim() const;
  int output_dim() const;
  int parameter_count() const;
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Propagates input jets through the network. All inputs must share one
  /// jet layout.
  std::vector<Jet> forward(std::span<const Jet> x) const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace geodex
