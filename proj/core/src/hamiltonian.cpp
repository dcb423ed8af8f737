#include "geodex/hamiltonian.hpp"

#include "geodex/errors.hpp"
#include "geodex/metric.hpp"

namespace geodex {

double ExtendedPhasePoint::copy_gap() const {
  return std::max((q - x).lpNorm<Eigen::Infinity>(), (p - y).lpNorm<Eigen::Infinity>());
}

double hamiltonian(const Immersion& im, const PhasePoint& s) {
  const MetricTensor m = induced_metric(im, s.q);
  if (s.p.size() != s.q.size()) throw ConfigError("momentum and position dimensions differ");
  return 0.5 * s.p.dot(m.g_inv * s.p);
}

HamiltonRhs hamilton_rhs(const Immersion& im, const PhasePoint& s) {
  const int d = im.chart_dim();
  if (s.p.size() != d || s.q.size() != d) throw ConfigError("phase point has wrong dimension");
  const MetricJets m = metric_jets(im, s.q, 1);
  HamiltonRhs r{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Jet& gij = m.inverse(i, j);
      const double pp = s.p(i) * s.p(j);
      r.dq(i) += gij.value() * s.p(j);
      for (int k = 0; k < d; ++k) r.dp(k) -= 0.5 * gij.d(k) * pp;
    }
  }
  return r;
}

Eigen::VectorXd lower_index(const Immersion& im, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
  return induced_metric(im, q).g * v;
}

}  // namespace geodex
