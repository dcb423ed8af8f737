#pragma once

#include <vector>

#include <Eigen/Dense>

#include "geodex/immersion.hpp"

namespace geodex {

/// Riemann tensor R^l_ijk stored [l][i][j][k], Ricci tensor R_ij = R^m_imj
/// and the Ricci scalar R = g^ij R_ij.
struct CurvatureBundle {
  int dim = 0;
  std::vector<double> riemann;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;

  double riemann_at(int l, int i, int j, int k) const { return riemann[((l * dim + i) * dim + j) * dim + k]; }
};

/// Uses third derivatives of the immersion.
CurvatureBundle curvature_at(const Immersion& im, const Eigen::VectorXd& p);

/// Ricci scalar only.
double scalar_curvature(const Immersion& im, const Eigen::VectorXd& p);

/// How negative curvature enters the scaling function.
enum class CurvatureClamp {
  kPositivePart,  // max(R, 0)
  kAbsolute,      // |R|
};

/// psi(R; alpha) = 1 + alpha * log(1 + R+), R+ per `clamp`.
double psi(double scalar_r, double alpha, CurvatureClamp clamp = CurvatureClamp::kPositivePart);

}  // namespace geodex
