#include "geodex/integrator.hpp"

#include <cmath>
#include <sstream>

#include "geodex/errors.hpp"

namespace geodex {
namespace {

bool finite(const ExtendedPhasePoint& s) {
  return s.q.allFinite() && s.p.allFinite() && s.x.allFinite() && s.y.allFinite();
}

void flow_a(const Immersion& im, ExtendedPhasePoint& s, double h) {
  const HamiltonRhs r = hamilton_rhs(im, {s.q, s.y});
  s.p += h * r.dp;
  s.x += h * r.dq;
}

void flow_b(const Immersion& im, ExtendedPhasePoint& s, double h) {
  const HamiltonRhs r = hamilton_rhs(im, {s.x, s.p});
  s.q += h * r.dq;
  s.y += h * r.dp;
}

void flow_c(ExtendedPhasePoint& s, double h, double omega) {
  const double c = std::cos(2.0 * omega * h);
  const double sn = std::sin(2.0 * omega * h);
  const Eigen::VectorXd sum_q = s.q + s.x;
  const Eigen::VectorXd sum_p = s.p + s.y;
  const Eigen::VectorXd dq = s.q - s.x;
  const Eigen::VectorXd dp = s.p - s.y;
  const Eigen::VectorXd rq = c * dq + sn * dp;
  const Eigen::VectorXd rp = -sn * dq + c * dp;
  s.q = 0.5 * (sum_q + rq);
  s.p = 0.5 * (sum_p + rp);
  s.x = 0.5 * (sum_q - rq);
  s.y = 0.5 * (sum_p - rp);
}

}  // namespace

double GeodesicPath::relative_drift() const {
  if (energies.empty()) return 0.0;
  const double scale = std::max(std::abs(energies.front()), 1e-12);
  double worst = 0.0;
  for (double e : energies) worst = std::max(worst, std::abs(e - energies.front()) / scale);
  return worst;
}

ExtendedPhasePoint tao_step_order2(const Immersion& im, const ExtendedPhasePoint& s, double step, double omega) {
  if (!(step > 0.0) && !(step < 0.0)) throw ConfigError("integration step must be nonzero");
  if (!(omega > 0.0)) throw ConfigError("binding strength omega must be positive");
  ExtendedPhasePoint out = s;
  flow_a(im, out, 0.5 * step);
  flow_b(im, out, 0.5 * step);
  flow_c(out, step, omega);
  flow_b(im, out, 0.5 * step);
  flow_a(im, out, 0.5 * step);
  if (!finite(out)) throw IntegrationError("integration blow-up: non-finite state", -1, 0.0);
  return out;
}

double triple_jump_weight(int order) {
  if (order < 4 || order % 2 != 0) throw ConfigError("triple-jump order must be even and >= 4");
  return 1.0 / (2.0 - std::pow(2.0, 1.0 / (order - 1)));
}

StepFunction yoshida_compose(StepFunction base, int order) {
  if (order < 2 || order % 2 != 0) {
    throw ConfigError("integrator order must be an even integer >= 2, got " + std::to_string(order));
  }
  if (order == 2) return base;
  StepFunction inner = yoshida_compose(std::move(base), order - 2);
  const double w = triple_jump_weight(order);
  return [inner, w](const ExtendedPhasePoint& s, double h) {
    return inner(inner(inner(s, w * h), (1.0 - 2.0 * w) * h), w * h);
  };
}

Integration integrate(const Immersion& im, const ExtendedPhasePoint& start, const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0) || cfg.step > 1.0) throw ConfigError("integration step must lie in (0, 1]");
  const int d = im.chart_dim();
  if (start.q.size() != d || start.p.size() != d || start.x.size() != d || start.y.size() != d) {
    throw ConfigError("initial state has wrong dimension");
  }
  const int n = static_cast<int>(std::ceil(1.0 / cfg.step - 1e-9));
  const double h = 1.0 / n;
  const Immersion* imp = &im;
  const double omega = cfg.omega;
  const StepFunction step = yoshida_compose(
      [imp, omega](const ExtendedPhasePoint& s, double dt) { return tao_step_order2(*imp, s, dt, omega); }, cfg.order);

  Integration out;
  GeodesicPath& path = out.path;
  path.step = h;
  path.order = cfg.order;
  path.omega = cfg.omega;
  path.states.reserve(n + 1);
  path.lambdas.reserve(n + 1);
  path.energies.reserve(n + 1);

  ExtendedPhasePoint s = start;
  bool drift_warned = false;
  bool gap_warned = false;
  for (int k = 0; k <= n; ++k) {
    const double lambda = static_cast<double>(k) / n;
    try {
      if (k > 0) s = step(s, h);
      path.energies.push_back(hamiltonian(im, s.primary()));
    } catch (const DegenerateMetricError& e) {
      std::ostringstream os;
      os << e.what() << " (at lambda " << lambda << ", step " << k << ")";
      throw DegenerateMetricError(os.str(), e.smallest_singular_value());
    } catch (const NumericError& e) {
      std::ostringstream os;
      os << "integration failed at step " << k << " (lambda " << lambda << "): " << e.what();
      throw IntegrationError(os.str(), k, lambda);
    }
    path.states.push_back(s.primary());
    path.lambdas.push_back(lambda);
    path.max_copy_gap = std::max(path.max_copy_gap, s.copy_gap());

    const double scale = std::max(std::abs(path.energies.front()), 1e-12);
    const double drift = std::abs(path.energies.back() - path.energies.front()) / scale;
    if (drift > cfg.drift_error) {
      std::ostringstream os;
      os << "relative Hamiltonian drift " << drift << " exceeds " << cfg.drift_error << " at step " << k;
      throw IntegrationError(os.str(), k, lambda);
    }
    if (drift > cfg.drift_warning && !drift_warned) {
      std::ostringstream os;
      os << "relative Hamiltonian drift " << drift << " exceeds " << cfg.drift_warning << " at step " << k;
      path.warnings.push_back(os.str());
      drift_warned = true;
    }
    if (path.max_copy_gap > cfg.coherence_warning && !gap_warned) {
      std::ostringstream os;
      os << "phase-space copies separated by " << path.max_copy_gap << " at step " << k;
      path.warnings.push_back(os.str());
      gap_warned = true;
    }
  }
  out.final_state = s;
  return out;
}

GeodesicPath exp_map(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                     const IntegratorConfig& cfg) {
  if (p.size() != im.chart_dim() || v.size() != im.chart_dim()) {
    throw ConfigError("point and velocity must match the chart dimension");
  }
  const Eigen::VectorXd momentum = lower_index(im, p, v);
  return integrate(im, ExtendedPhasePoint::from({p, momentum}), cfg).path;
}

}  // namespace geodex
