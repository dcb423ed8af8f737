#pragma once

#include <vector>

#include <Eigen/Dense>

#include "geodex/immersion.hpp"
#include "geodex/jet.hpp"

namespace geodex {

/// Smallest admissible singular value of the immersion Jacobian.
inline constexpr double kMinJacobianSingularValue = 1e-10;
/// Smallest admissible reciprocal condition number of the metric.
inline constexpr double kMinMetricRcond = 1e-12;

struct MetricTensor {
  Eigen::VectorXd point;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
};

/// Gamma^k_ij stored [k][i][j].
class ChristoffelSymbols {
 public:
  explicit ChristoffelSymbols(int dim = 0) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}
  int dim() const noexcept { return dim_; }
  double& operator()(int k, int i, int j) { return data_[(k * dim_ + i) * dim_ + j]; }
  double operator()(int k, int i, int j) const { return data_[(k * dim_ + i) * dim_ + j]; }

 private:
  int dim_;
  std::vector<double> data_;
};

/// Metric and inverse metric entries as jets of a given derivative order,
/// obtained from immersion jets one order higher.
struct MetricJets {
  int dim = 0;
  int order = 0;
  std::vector<Jet> g;      // row-major d x d
  std::vector<Jet> g_inv;  // row-major d x d

  const Jet& metric(int i, int j) const { return g[i * dim + j]; }
  const Jet& inverse(int i, int j) const { return g_inv[i * dim + j]; }
  Eigen::MatrixXd metric_value() const;
  Eigen::MatrixXd inverse_value() const;
};

/// Throws DegenerateMetricError when the Jacobian is (numerically) rank
/// deficient at `p`.
MetricJets metric_jets(const Immersion& im, const Eigen::VectorXd& p, int order);

/// Gamma^k_ij as jets one order below `m`, stored [k][i][j].
std::vector<Jet> christoffel_jets(const MetricJets& m);

MetricTensor induced_metric(const Immersion& im, const Eigen::VectorXd& p);
ChristoffelSymbols christoffel(const Immersion& im, const Eigen::VectorXd& p);

/// (nabla_v w)^k = v^j w^k_{,j} + Gamma^k_ij v^j w^i for a vector field `w`
/// given as a jet map R^d -> R^d.
Eigen::VectorXd covariant_derivative(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                                     const JetMap& w);

/// sqrt(det g).
double magnification_factor(const Immersion& im, const Eigen::VectorXd& p);

/// <v, w>_g = g_ij v^i w^j.
double inner_product(const Eigen::MatrixXd& g, const Eigen::VectorXd& v, const Eigen::VectorXd& w);

}  // namespace geodex
