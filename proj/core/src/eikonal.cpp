#include "geodex/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geodex/adam.hpp"
#include "geodex/errors.hpp"
#include "geodex/integrator.hpp"
#include "geodex/param_gradient.hpp"
#include "geodex/random.hpp"

namespace geodex {
namespace {

constexpr double kSourceTolerance = 1e-6;

struct Derivatives {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

Derivatives field_derivatives(const ScalarField& field, const Eigen::VectorXd& x, int order) {
  const auto seeds = seed_variables(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), order);
  const Jet f = field(seeds);
  const auto d = x.size();
  Derivatives out;
  out.value = f.value();
  out.grad = Eigen::VectorXd::Zero(d);
  out.hess = Eigen::MatrixXd::Zero(d, d);
  if (f.dim() == 0) return out;
  if (f.order() >= 1) {
    for (Eigen::Index i = 0; i < d; ++i) out.grad(i) = f.d(static_cast<int>(i));
  }
  if (f.order() >= 2) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) out.hess(i, j) = f.d(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

void check_off_source(const ScalarField& field, const Eigen::VectorXd& x) {
  const auto q = field.source();
  if (q && (x - *q).norm() < kSourceTolerance) {
    throw NumericError("field is not differentiable at its source point; keep evaluations off the source");
  }
}

// Intermediate quantities of the flow residual.
struct FlowTerms {
  double value = 0.0;
  Eigen::VectorXd v;   // g^-1 grad
  Eigen::MatrixXd dv;  // dv(j, k) = d_j v^k
  Eigen::VectorXd a;   // covariant acceleration of v along itself
};

FlowTerms flow_terms(const LocalGeometry& geo, const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
  const auto d = grad.size();
  FlowTerms t;
  t.v = geo.g_inv * grad;
  t.dv = (geo.g_inv * hess).transpose();
  for (Eigen::Index j = 0; j < d; ++j) t.dv.row(j) += (geo.dg_inv[static_cast<std::size_t>(j)] * grad).transpose();
  t.a = t.dv.transpose() * t.v;
  for (Eigen::Index k = 0; k < d; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        s += geo.gamma(static_cast<int>(k), static_cast<int>(i), static_cast<int>(j)) * t.v(i) * t.v(j);
      }
    }
    t.a(k) += s;
  }
  t.value = t.a.dot(geo.g * t.a);
  return t;
}

// Adjoints of the flow residual with respect to grad and hess.
void flow_adjoint(const LocalGeometry& geo, const FlowTerms& t, Eigen::VectorXd& grad_bar, Eigen::MatrixXd& hess_bar) {
  const auto d = t.v.size();
  const Eigen::VectorXd a_bar = 2.0 * (geo.g * t.a);
  Eigen::VectorXd v_bar = t.dv * a_bar;
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index m = 0; m < d; ++m) {
        const int kk = static_cast<int>(k);
        const int jj = static_cast<int>(j);
        const int mm = static_cast<int>(m);
        s += a_bar(k) * (geo.gamma(kk, jj, mm) + geo.gamma(kk, mm, jj)) * t.v(m);
      }
    }
    v_bar(j) += s;
  }
  const Eigen::VectorXd g_inv_abar = geo.g_inv * a_bar;
  grad_bar = geo.g_inv * v_bar;
  for (Eigen::Index j = 0; j < d; ++j) grad_bar += t.v(j) * (geo.dg_inv[static_cast<std::size_t>(j)] * a_bar);
  hess_bar = g_inv_abar * t.v.transpose();
}

double mean_of(const std::vector<EikonalEpoch>& h, std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t k = first; k < last; ++k) s += h[k].objective;
  return s / static_cast<double>(last - first);
}

}  // namespace

double ScalarField::value(const Eigen::VectorXd& x) const {
  std::vector<Jet> in(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) in[static_cast<std::size_t>(i)] = Jet(x(i));
  return (*this)(in).value();
}

DistanceField::DistanceField(Eigen::VectorXd source, MlpNetwork net, Standardisation standardisation)
    : source_(std::move(source)), net_(std::move(net)), standardisation_(std::move(standardisation)) {
  if (net_.output_dim() != 1) throw ConfigError("distance network must have a scalar output");
  if (net_.input_dim() != source_.size()) throw ConfigError("distance network input does not match the source");
  if (standardisation_.center.size() != source_.size() || standardisation_.scale.size() != source_.size()) {
    throw ConfigError("standardisation does not match the chart dimension");
  }
  if (!(standardisation_.scale.array() > 0.0).all()) throw ConfigError("standardisation scale must be positive");
}

DistanceField DistanceField::random(const Eigen::VectorXd& source, const DomainBox& box, std::span<const int> hidden,
                                    std::uint64_t seed) {
  std::vector<int> widths;
  widths.push_back(static_cast<int>(source.size()));
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  return DistanceField(source, MlpNetwork::random(widths, Activation::kTanh, Activation::kIdentity, seed),
                       Standardisation::for_box(box));
}

std::vector<Jet> DistanceField::standardised_inputs(std::span<const Jet> x) const {
  if (static_cast<Eigen::Index>(x.size()) != source_.size()) throw ConfigError("chart point has wrong dimension");
  std::vector<Jet> u;
  u.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    u.push_back((x[i] - standardisation_.center(k)) / standardisation_.scale(k));
  }
  return u;
}

Jet DistanceField::operator()(std::span<const Jet> x) const {
  const auto u = standardised_inputs(x);
  const Jet f = net_.forward(std::span<const Jet>(u))[0];
  // Same arithmetic path as x so that the field is exactly zero at the source.
  std::vector<Jet> q;
  q.reserve(x.size());
  for (Eigen::Index i = 0; i < source_.size(); ++i) q.push_back(Jet::constant(source_(i), x[0].dim(), x[0].order()));
  const auto uq = standardised_inputs(q);
  const double fq = net_.forward(std::span<const Jet>(uq))[0].value();
  return abs(f - fq);
}

LocalGeometry local_geometry(const Immersion& im, const Eigen::VectorXd& x, double alpha, CurvatureClamp clamp) {
  const MetricJets m = metric_jets(im, x, 1);
  const int d = m.dim;
  LocalGeometry geo;
  geo.g = m.metric_value();
  geo.g_inv = m.inverse_value();
  geo.dg_inv.assign(static_cast<std::size_t>(d), Eigen::MatrixXd(d, d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) geo.dg_inv[static_cast<std::size_t>(j)](k, l) = m.inverse(k, l).d(j);
    }
  }
  const auto gamma = christoffel_jets(m);
  geo.gamma = ChristoffelSymbols(d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) geo.gamma(k, i, j) = gamma[static_cast<std::size_t>((k * d + i) * d + j)].value();
    }
  }
  if (alpha != 0.0) {
    geo.scalar_curvature = scalar_curvature(im, x);
    geo.psi = psi(geo.scalar_curvature, alpha, clamp);
  }
  return geo;
}

double eikonal_residual(const LocalGeometry& geo, const Eigen::VectorXd& grad) {
  return grad.dot(geo.g_inv * grad) - 1.0;
}

double flow_residual(const LocalGeometry& geo, const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
  return flow_terms(geo, grad, hess).value;
}

double eikonal_residual(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x) {
  check_off_source(field, x);
  const Derivatives f = field_derivatives(field, x, 1);
  return eikonal_residual(local_geometry(im, x, 0.0), f.grad);
}

double flow_residual(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x) {
  check_off_source(field, x);
  const Derivatives f = field_derivatives(field, x, 2);
  return flow_residual(local_geometry(im, x, 0.0), f.grad, f.hess);
}

Eigen::VectorXd geodesic_flow(const Immersion& im, const ScalarField& field, const Eigen::VectorXd& x) {
  const Derivatives f = field_derivatives(field, x, 1);
  return induced_metric(im, x).g_inv * f.grad;
}

EikonalLossReport curvature_scaled_loss(const Immersion& im, const ScalarField& field,
                                        std::span<const Eigen::VectorXd> batch, double lambda, double alpha,
                                        CurvatureClamp clamp) {
  if (batch.empty()) throw ConfigError("loss batch is empty");
  if (lambda < 0.0 || alpha < 0.0) throw ConfigError("lambda and alpha must be nonnegative");
  EikonalLossReport r;
  r.psi.reserve(batch.size());
  for (const auto& x : batch) {
    check_off_source(field, x);
    const LocalGeometry geo = local_geometry(im, x, alpha, clamp);
    const Derivatives f = field_derivatives(field, x, 2);
    const double eps = eikonal_residual(geo, f.grad);
    r.eikonal_term += geo.psi * eps * eps;
    r.flow_term += geo.psi * flow_residual(geo, f.grad, f.hess);
    r.psi.push_back(geo.psi);
  }
  const auto n = static_cast<double>(batch.size());
  r.eikonal_term /= n;
  r.flow_term /= n;
  r.total = r.eikonal_term + lambda * r.flow_term;
  return r;
}

std::vector<Eigen::VectorXd> grid_points(const DomainBox& box, int n) {
  if (box.dim() != 2) throw ConfigError("grids are defined on 2-D charts");
  if (n < 2) throw ConfigError("grid needs at least two points per axis");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      Eigen::VectorXd x(2);
      x(0) = box.lower(0) + (box.upper(0) - box.lower(0)) * ix / (n - 1);
      x(1) = box.lower(1) + (box.upper(1) - box.lower(1)) * iy / (n - 1);
      pts.push_back(std::move(x));
    }
  }
  return pts;
}

double probe_loss(const Immersion& im, const DistanceField& field, const DomainBox& domain,
                  const EikonalTrainConfig& cfg) {
  const Standardisation& st = field.standardisation();
  const Eigen::VectorXd uq = st.apply(field.source_point());
  std::vector<Eigen::VectorXd> pts;
  for (auto& x : grid_points(domain, cfg.validation_grid)) {
    if ((st.apply(x) - uq).norm() >= cfg.source_exclusion && (x - field.source_point()).norm() >= kSourceTolerance) {
      pts.push_back(std::move(x));
    }
  }
  return curvature_scaled_loss(im, field, pts, cfg.lambda, cfg.alpha, cfg.clamp).total;
}

FieldValidation validate_field(const Immersion& im, const DistanceField& field, const DomainBox& domain, int n,
                               const std::function<double(const Eigen::VectorXd&)>& oracle) {
  FieldValidation out;
  int unit = 0;
  for (const auto& x : grid_points(domain, n)) {
    out.mae += std::abs(field.value(x) - oracle(x));
    const Eigen::VectorXd v = geodesic_flow(im, field, x);
    const double speed = std::sqrt(v.dot(induced_metric(im, x).g * v));
    if (speed >= 0.9 && speed <= 1.1) ++unit;
    ++out.points;
  }
  out.mae /= out.points;
  out.unit_speed_fraction = static_cast<double>(unit) / out.points;
  return out;
}

EikonalTraining train_distance_field(const Immersion& im, const Eigen::VectorXd& source, const DomainBox& domain,
                                     const EikonalTrainConfig& cfg, std::optional<DistanceField> init,
                                     const EikonalProgress& progress) {
  const int d = im.chart_dim();
  if (source.size() != d || domain.dim() != d) throw ConfigError("source and domain must match the chart dimension");
  if (!source.allFinite()) throw ConfigError("source point must be finite");
  if (cfg.batch < 1 || cfg.epochs_max < 0) throw ConfigError("batch size must be positive and epochs nonnegative");
  if (cfg.window < 1) throw ConfigError("convergence window must be positive");
  if (cfg.lambda < 0.0 || cfg.alpha < 0.0 || cfg.anchor_weight < 0.0) {
    throw ConfigError("lambda, alpha and the anchor weight must be nonnegative");
  }

  EikonalTraining result;
  if (init) {
    if ((init->source_point() - source).norm() != 0.0) throw ConfigError("resumed field has a different source");
    result.field = std::move(*init);
  } else {
    result.field = DistanceField::random(source, domain, cfg.hidden, derive_seed(cfg.seed, 1));
  }
  DistanceField& field = result.field;
  const Standardisation st = field.standardisation();
  const Eigen::VectorXd uq = st.apply(source);

  std::mt19937_64 rng(derive_seed(cfg.seed, 2));
  DensityEstimate density;
  if (cfg.curvature_sampling) {
    MhConfig mh = cfg.sampler;
    mh.seed = derive_seed(cfg.seed, 3);
    density = kde_fit(mh_sample(im, domain, mh).points, domain);
  }

  // Anchor ring: endpoints of unit-speed geodesics from the source run for
  // affine length r, so each lies at distance r from the source.
  std::vector<Eigen::VectorXd> anchors;
  std::vector<double> anchor_target;
  if (cfg.anchor_weight > 0.0 && cfg.anchor_points > 0) {
    if (!(cfg.anchor_radius > 0.0)) throw ConfigError("anchor radius must be positive");
    Eigen::MatrixXd gq;
    try {
      gq = induced_metric(im, source).g;
    } catch (const NumericError& e) {
      result.warnings.push_back(std::string("no anchor ring: ") + e.what());
    }
    auto add = [&](const Eigen::VectorXd& dir) {
      if (gq.size() == 0) return;
      const Eigen::VectorXd u = dir / std::sqrt(dir.dot(gq * dir));
      Eigen::VectorXd x;
      try {
        x = exp_map(im, source, cfg.anchor_radius * u, IntegratorConfig{}).end().q;
      } catch (const NumericError&) {
        return;
      }
      if (!domain.contains(x)) return;
      anchors.push_back(x);
      anchor_target.push_back(cfg.anchor_radius);
    };
    if (d == 2) {
      for (int a = 0; a < cfg.anchor_points; ++a) {
        const double t = 2.0 * std::numbers::pi * a / cfg.anchor_points;
        Eigen::VectorXd dir(2);
        dir << std::cos(t), std::sin(t);
        add(dir);
      }
    } else {
      for (int i = 0; i < d; ++i) {
        for (double s : {-1.0, 1.0}) add(s * Eigen::VectorXd::Unit(d, i));
      }
    }
  }
  const int n_anchor = static_cast<int>(anchors.size());

  result.initial_probe_loss = probe_loss(im, field, domain, cfg);
  AdamOptimizer adam(cfg.learning_rate);
  Eigen::VectorXd theta = field.network().parameters();
  const int o2 = 1 + d;

  for (int epoch = 0; epoch < cfg.epochs_max; ++epoch) {
    std::vector<Eigen::VectorXd> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch));
    for (auto& x : training_sampler(domain, density, cfg.batch, rng, epoch == 0 ? &result.warnings : nullptr)) {
      if ((st.apply(x) - uq).norm() >= cfg.source_exclusion) batch.push_back(std::move(x));
    }
    const int nb = static_cast<int>(batch.size());
    if (nb == 0) throw TrainingError("training batch is empty after excluding the source neighbourhood", -1, epoch);
    std::vector<LocalGeometry> geo;
    geo.reserve(batch.size());
    for (const auto& x : batch) geo.push_back(local_geometry(im, x, cfg.alpha, cfg.clamp));

    const int total_samples = nb + n_anchor + 1;
    JetBatch inputs(total_samples, d, d, 2);
    auto put = [&](int s, const Eigen::VectorXd& x) {
      const Eigen::VectorXd u = st.apply(x);
      for (int i = 0; i < d; ++i) {
        inputs.at(s, i, 0) = u(i);
        inputs.at(s, i, 1 + i) = 1.0 / st.scale(i);
      }
    };
    for (int s = 0; s < nb; ++s) put(s, batch[static_cast<std::size_t>(s)]);
    for (int a = 0; a < n_anchor; ++a) put(nb + a, anchors[static_cast<std::size_t>(a)]);
    put(nb + n_anchor, source);

    EikonalEpoch rec;
    rec.epoch = epoch;
    const LossHead head = [&](const JetBatch& out, JetBatch& adj, std::span<double> per) {
      const int src = nb + n_anchor;
      const double fq = out.at(src, 0, 0);
      double eik = 0.0;
      double flow = 0.0;
      double anchor = 0.0;
      Eigen::VectorXd grad(d), grad_bar(d);
      Eigen::MatrixXd hess(d, d), hess_bar(d, d);
      for (int s = 0; s < nb; ++s) {
        const double sgn = out.at(s, 0, 0) - fq < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < d; ++i) {
          grad(i) = sgn * out.at(s, 0, 1 + i);
          for (int j = 0; j <= i; ++j) hess(i, j) = hess(j, i) = sgn * out.at(s, 0, o2 + pair_index(j, i));
        }
        const LocalGeometry& g = geo[static_cast<std::size_t>(s)];
        const double eps = eikonal_residual(g, grad);
        const FlowTerms t = flow_terms(g, grad, hess);
        const double w = g.psi / nb;
        eik += w * eps * eps;
        flow += w * t.value;
        per[s] = w * (eps * eps + cfg.lambda * t.value);
        flow_adjoint(g, t, grad_bar, hess_bar);
        grad_bar = w * (4.0 * eps * t.v + cfg.lambda * grad_bar);
        hess_bar *= w * cfg.lambda;
        for (int i = 0; i < d; ++i) {
          adj.at(s, 0, 1 + i) = sgn * grad_bar(i);
          for (int j = 0; j <= i; ++j) {
            const double h = i == j ? hess_bar(i, i) : hess_bar(i, j) + hess_bar(j, i);
            adj.at(s, 0, o2 + pair_index(j, i)) = sgn * h;
          }
        }
      }
      for (int a = 0; a < n_anchor; ++a) {
        const int s = nb + a;
        // Signed on purpose: with |.| a plane through the source is a
        // stationary point, since ring points on either side of its zero
        // line get pushed in opposite directions.
        const double r = out.at(s, 0, 0) - fq - anchor_target[static_cast<std::size_t>(a)];
        anchor += r * r / n_anchor;
        per[s] = cfg.anchor_weight * r * r / n_anchor;
        const double bar = cfg.anchor_weight * 2.0 * r / n_anchor;
        adj.at(s, 0, 0) += bar;
        adj.at(src, 0, 0) -= bar;
      }
      per[src] = 0.0;
      rec.eikonal_term = eik;
      rec.flow_term = flow;
      rec.total = eik + cfg.lambda * flow;
      rec.anchor_term = anchor;
      rec.objective = rec.total + cfg.anchor_weight * anchor;
      return rec.objective;
    };

    ParamGradient pg;
    try {
      pg = loss_parameter_gradient(field.network(), inputs, head);
    } catch (const TrainingError& e) {
      std::ostringstream os;
      os << e.what() << " in epoch " << epoch;
      if (e.sample() >= 0 && e.sample() < nb) {
        os << " (sample at " << batch[static_cast<std::size_t>(e.sample())].transpose() << ")";
      }
      throw TrainingError(os.str(), e.sample(), epoch);
    }
    adam.step(theta, pg.gradient);
    field.network().set_parameters(theta);
    result.history.push_back(rec);
    if (progress) progress(rec);

    const auto n = result.history.size();
    const auto w = static_cast<std::size_t>(cfg.window);
    if (n >= 2 * w) {
      const double prev = mean_of(result.history, n - 2 * w, n - w);
      const double cur = mean_of(result.history, n - w, n);
      if (prev - cur < cfg.min_improvement * prev) {
        result.converged = true;
        break;
      }
    }
  }
  result.probe_loss = probe_loss(im, field, domain, cfg);
  return result;
}

}  // namespace geodex
