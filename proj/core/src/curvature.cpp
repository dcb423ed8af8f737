#include "geodex/curvature.hpp"

#include <cmath>

#include "geodex/errors.hpp"
#include "geodex/metric.hpp"

namespace geodex {

CurvatureBundle curvature_at(const Immersion& im, const Eigen::VectorXd& p) {
  const MetricJets m = metric_jets(im, p, 2);
  const auto gamma = christoffel_jets(m);  // order 1
  const int d = m.dim;
  const auto G = [&](int k, int i, int j) -> const Jet& { return gamma[(k * d + i) * d + j]; };

  CurvatureBundle out;
  out.dim = d;
  out.riemann.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          double r = G(l, i, k).d(j) - G(l, i, j).d(k);
          for (int a = 0; a < d; ++a) {
            r += G(l, j, a).value() * G(a, i, k).value() - G(l, k, a).value() * G(a, i, j).value();
          }
          out.riemann[((l * d + i) * d + j) * d + k] = r;
        }
      }
    }
  }
  out.ricci = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int a = 0; a < d; ++a) out.ricci(i, j) += out.riemann_at(a, i, a, j);
    }
  }
  const Eigen::MatrixXd g_inv = m.inverse_value();
  out.scalar = (g_inv.array() * out.ricci.array()).sum();
  if (!std::isfinite(out.scalar)) throw NumericError("non-finite scalar curvature");
  return out;
}

double scalar_curvature(const Immersion& im, const Eigen::VectorXd& p) { return curvature_at(im, p).scalar; }

double psi(double scalar_r, double alpha, CurvatureClamp clamp) {
  const double r = clamp == CurvatureClamp::kAbsolute ? std::abs(scalar_r) : std::max(scalar_r, 0.0);
  return 1.0 + alpha * std::log1p(r);
}

}  // namespace geodex
