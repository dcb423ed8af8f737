#include "geodex/metric.hpp"

#include <cmath>
#include <sstream>

#include "geodex/errors.hpp"

namespace geodex {
namespace {

std::string describe(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

// Inverse of a symmetric positive-definite jet matrix through an LDL^T
// factorization. The result is symmetric by construction.
std::vector<Jet> invert_spd(const std::vector<Jet>& a, int d) {
  std::vector<Jet> lower(static_cast<std::size_t>(d * d));
  std::vector<Jet> diag(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    Jet dj = a[j * d + j];
    for (int k = 0; k < j; ++k) dj -= lower[j * d + k] * lower[j * d + k] * diag[k];
    diag[j] = dj;
    const Jet inv_dj = reciprocal(dj);
    for (int i = j + 1; i < d; ++i) {
      Jet lij = a[i * d + j];
      for (int k = 0; k < j; ++k) lij -= lower[i * d + k] * lower[j * d + k] * diag[k];
      lower[i * d + j] = lij * inv_dj;
    }
  }
  // x = L^{-1}, unit lower triangular.
  std::vector<Jet> x(static_cast<std::size_t>(d * d));
  for (int j = 0; j < d; ++j) {
    x[j * d + j] = Jet(1.0);
    for (int i = j + 1; i < d; ++i) {
      Jet s(0.0);
      for (int k = j; k < i; ++k) s -= lower[i * d + k] * x[k * d + j];
      x[i * d + j] = s;
    }
  }
  std::vector<Jet> inv_diag;
  inv_diag.reserve(d);
  for (int k = 0; k < d; ++k) inv_diag.push_back(reciprocal(diag[k]));
  std::vector<Jet> out(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Jet s(0.0);
      for (int k = j; k < d; ++k) s += x[k * d + i] * x[k * d + j] * inv_diag[k];
      out[i * d + j] = s;
      out[j * d + i] = s;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd MetricJets::metric_value() const {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = metric(i, j).value();
  }
  return m;
}

Eigen::MatrixXd MetricJets::inverse_value() const {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = inverse(i, j).value();
  }
  return m;
}

MetricJets metric_jets(const Immersion& im, const Eigen::VectorXd& p, int order) {
  if (order < 0 || order + 1 > kMaxJetOrder) throw ConfigError("metric jets support derivative orders 0..2");
  const int d = im.chart_dim();
  if (!p.allFinite()) throw NumericError("non-finite chart point " + describe(p));
  const auto iota = im.jets(p, order + 1);

  MetricJets m;
  m.dim = d;
  m.order = order;
  m.g.assign(static_cast<std::size_t>(d * d), Jet::constant(0.0, d, order));
  std::vector<Jet> partials(static_cast<std::size_t>(d));
  for (const Jet& component : iota) {
    for (int i = 0; i < d; ++i) partials[i] = component.partial(i);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) m.g[i * d + j] += partials[i] * partials[j];
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) m.g[i * d + j] = m.g[j * d + i];
  }

  const Eigen::MatrixXd g0 = m.metric_value();
  if (!g0.allFinite()) throw NumericError("non-finite metric at " + describe(p));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g0, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  const double sigma = lmin > 0.0 ? std::sqrt(lmin) : 0.0;
  if (sigma <= kMinJacobianSingularValue || lmin / lmax < kMinMetricRcond) {
    std::ostringstream os;
    os << "degenerate metric at " << describe(p) << ": smallest singular value of the Jacobian is " << sigma;
    throw DegenerateMetricError(os.str(), sigma);
  }
  m.g_inv = invert_spd(m.g, d);
  return m;
}

std::vector<Jet> christoffel_jets(const MetricJets& m) {
  if (m.order < 1) throw ConfigError("Christoffel symbols need metric jets of order >= 1");
  const int d = m.dim;
  // dg[(i*d + j)*d + k] = g_ij,k
  std::vector<Jet> dg(static_cast<std::size_t>(d * d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) dg[(i * d + j) * d + k] = m.metric(i, j).partial(k);
    }
  }
  const auto at = [&](int i, int j, int k) -> const Jet& { return dg[(i * d + j) * d + k]; };
  std::vector<Jet> gamma(static_cast<std::size_t>(d * d * d));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        Jet s(0.0);
        for (int a = 0; a < d; ++a) s += m.inverse(k, a) * (at(a, i, j) + at(a, j, i) - at(i, j, a));
        s *= 0.5;
        gamma[(k * d + i) * d + j] = s;
        gamma[(k * d + j) * d + i] = s;
      }
    }
  }
  return gamma;
}

MetricTensor induced_metric(const Immersion& im, const Eigen::VectorXd& p) {
  const MetricJets m = metric_jets(im, p, 0);
  return {p, m.metric_value(), m.inverse_value()};
}

ChristoffelSymbols christoffel(const Immersion& im, const Eigen::VectorXd& p) {
  const MetricJets m = metric_jets(im, p, 1);
  const auto jets = christoffel_jets(m);
  const int d = m.dim;
  ChristoffelSymbols gamma(d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) gamma(k, i, j) = jets[(k * d + i) * d + j].value();
    }
  }
  return gamma;
}

Eigen::VectorXd covariant_derivative(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                                     const JetMap& w) {
  const int d = im.chart_dim();
  if (v.size() != d) throw ConfigError("tangent vector has wrong dimension");
  const auto wj = evaluate_with_jets(w, std::span<const double>(p.data(), static_cast<std::size_t>(d)), 1);
  if (static_cast<int>(wj.size()) != d) throw ConfigError("vector field must map R^d to R^d");
  const ChristoffelSymbols gamma = christoffel(im, p);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      out(k) += v(j) * wj[k].d(j);
      for (int i = 0; i < d; ++i) out(k) += gamma(k, i, j) * v(j) * wj[i].value();
    }
  }
  return out;
}

double magnification_factor(const Immersion& im, const Eigen::VectorXd& p) {
  const MetricTensor m = induced_metric(im, p);
  const double det = m.g.determinant();
  if (!(det > 0.0)) throw DegenerateMetricError("nonpositive metric determinant", 0.0);
  return std::sqrt(det);
}

double inner_product(const Eigen::MatrixXd& g, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return v.dot(g * w);
}

}  // namespace geodex
