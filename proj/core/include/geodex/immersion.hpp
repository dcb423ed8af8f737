#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/jet.hpp"
#include "geodex/mlp.hpp"

namespace geodex {

/// Axis-aligned box in chart coordinates.
struct DomainBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static DomainBox cube(int dim, double lo, double hi);

  int dim() const noexcept { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
  Eigen::VectorXd half_width() const { return 0.5 * (upper - lower); }
  double volume() const { return (upper - lower).prod(); }
};

/// Smooth map from chart coordinates into Euclidean ambient space. The
/// ambient metric is always the Euclidean one, so the induced metric is
/// the Gram matrix of the Jacobian.
class Immersion {
 public:
  virtual ~Immersion() = default;

  virtual std::string name() const = 0;
  virtual int chart_dim() const = 0;
  virtual int ambient_dim() const = 0;
  /// Box on which the chart is regular.
  virtual DomainBox domain() const = 0;
  virtual std::vector<Jet> map(std::span<const Jet> x) const = 0;

  Eigen::VectorXd map(const Eigen::VectorXd& x) const;
  /// Immersion jets with every chart coordinate seeded, up to `order`.
  std::vector<Jet> jets(const Eigen::VectorXd& x, int order) const;
};

using ImmersionPtr = std::shared_ptr<const Immersion>;

/// Identity map of R^d.
ImmersionPtr make_euclidean(int dim);

/// Round sphere of radius r in (theta, phi) coordinates, theta restricted to
/// [0.05, pi - 0.05] away from the poles.
ImmersionPtr make_sphere(double radius);

/// Graph surface (x, y) -> (x, y, f(x, y)) of the peaks function on [-3, 3]^2.
ImmersionPtr make_peaks();

/// Network forward pass as an immersion; domain defaults to [-1, 1]^d,
/// the range of a tanh-terminated encoder.
ImmersionPtr make_decoder(MlpNetwork net, std::string name = "decoder", std::optional<DomainBox> domain = std::nullopt);

/// Reads a decoder network from a weights file.
ImmersionPtr load_decoder(const std::string& path);

template <class T>
T peaks_height(const T& x, const T& y) {
  using std::exp;
  const T one_minus_x = 1.0 - x;
  const T a = 3.0 * one_minus_x * one_minus_x * exp(-(x * x) - (y + 1.0) * (y + 1.0));
  const T b = 10.0 * (x / 5.0 - x * x * x - y * y * y * y * y) * exp(-(x * x) - y * y);
  const T c = exp(-((x + 1.0) * (x + 1.0)) - y * y) / 3.0;
  return a - b - c;
}

}  // namespace geodex
