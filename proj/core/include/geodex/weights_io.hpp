#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "geodex/immersion.hpp"
#include "geodex/mlp.hpp"

namespace geodex {

/// Affine input map onto the network's working range: (x - center) / scale.
struct Standardisation {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static Standardisation for_box(const DomainBox& box) { return {box.center(), box.half_width()}; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return (x - center).cwiseQuotient(scale); }
};

/// Optional metadata carried next to a network.
struct FieldHeader {
  std::string manifold;
  std::optional<Eigen::VectorXd> source;
  std::optional<DomainBox> domain;
  std::optional<Standardisation> standardisation;
  std::optional<double> checkpoint_loss;
};

struct WeightsFile {
  MlpNetwork network;
  std::optional<FieldHeader> header;
};

/// JSON text layout:
///
///   {"format": "geodex-mlp", "version": 1, "input_dim": n, "output_dim": m,
///    "layers": [{"weight": [[row], ...], "bias": [...], "activation": "tanh"|"identity"}, ...],
///    "header": {"manifold": ..., "source_point": [...], "domain_box": {"lower": [...], "upper": [...]},
///               "standardisation": {"center": [...], "scale": [...]}, "checkpoint_loss": x}}
///
/// Doubles are written in shortest round-trip form, so save -> load -> save
/// is byte-identical.
std::string format_weights(const WeightsFile& file);
WeightsFile parse_weights(const std::string& text);

WeightsFile read_weights(const std::string& path);
void write_weights(const std::string& path, const WeightsFile& file);

}  // namespace geodex
