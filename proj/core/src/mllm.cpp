#include "geodex/mllm.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "geodex/adam.hpp"
#include "geodex/errors.hpp"
#include "geodex/metric.hpp"
#include "geodex/random.hpp"

namespace geodex {

CurveNetwork::CurveNetwork(Eigen::VectorXd p, Eigen::VectorXd q, MlpNetwork core)
    : p_(std::move(p)), q_(std::move(q)), core_(std::move(core)) {
  if (p_.size() != q_.size()) throw ConfigError("curve endpoints differ in dimension");
  if (core_.input_dim() != 1 || core_.output_dim() != p_.size()) {
    throw ConfigError("curve core must map R -> R^d");
  }
}

CurveNetwork CurveNetwork::random(const Eigen::VectorXd& p, const Eigen::VectorXd& q, int hidden,
                                  std::uint64_t seed) {
  if (hidden < 1) throw ConfigError("curve core needs a positive hidden width");
  const int widths[] = {1, hidden, hidden, static_cast<int>(p.size())};
  return CurveNetwork(p, q, MlpNetwork::random(widths, Activation::kTanh, Activation::kIdentity, seed));
}

std::vector<Jet> CurveNetwork::operator()(const Jet& lambda) const {
  const Jet in[] = {lambda};
  const auto c = core_.forward(std::span<const Jet>(in));
  const Jet envelope = lambda * (1.0 - lambda);
  std::vector<Jet> out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.push_back((1.0 - lambda) * p_(k) + lambda * q_(k) + envelope * c[i]);
  }
  return out;
}

Eigen::VectorXd CurveNetwork::at(double lambda) const {
  Eigen::VectorXd in(1);
  in(0) = lambda;
  return (1.0 - lambda) * p_ + lambda * q_ + lambda * (1.0 - lambda) * core_.forward(in);
}

SmoothCurve CurveNetwork::as_curve() const {
  return [self = *this](const Jet& lambda) { return self(lambda); };
}

ParamGradient mllm_length_gradient(const Immersion& im, const CurveNetwork& curve, int grid,
                                   std::optional<double> shift) {
  if (grid < 2) throw ConfigError("length grid needs at least two points");
  if (shift && !(*shift >= 0.0 && *shift < 1.0)) throw ConfigError("grid shift must lie in [0, 1)");
  const int d = static_cast<int>(curve.start().size());
  const double h = 1.0 / (grid - 1);
  const int nodes = shift ? grid - 1 : grid;
  const double offset = shift.value_or(0.0);
  JetBatch inputs(nodes, 1, 1, 1);
  for (int k = 0; k < nodes; ++k) {
    inputs.at(k, 0, 0) = (k + offset) * h;
    inputs.at(k, 0, 1) = 1.0;
  }
  const Eigen::VectorXd& p = curve.start();
  const Eigen::VectorXd& q = curve.end();

  const LossHead head = [&](const JetBatch& out, JetBatch& adj, std::span<double> per_sample) {
    double total = 0.0;
    Eigen::VectorXd gamma(d), velocity(d), c(d), dc(d), de_dgamma(d);
    for (int k = 0; k < nodes; ++k) {
      const double lambda = (k + offset) * h;
      const double weight = (!shift && (k == 0 || k == grid - 1)) ? 0.5 * h : h;
      const double env = lambda * (1.0 - lambda);
      for (int i = 0; i < d; ++i) {
        c(i) = out.at(k, i, 0);
        dc(i) = out.at(k, i, 1);
      }
      gamma = (1.0 - lambda) * p + lambda * q + env * c;
      velocity = (q - p) + (1.0 - 2.0 * lambda) * c + env * dc;
      const MetricJets m = metric_jets(im, gamma, 1);
      const Eigen::MatrixXd g = m.metric_value();
      const Eigen::VectorXd gv = g * velocity;
      const double energy = velocity.dot(gv);
      const double speed = std::sqrt(std::max(energy, 0.0));
      per_sample[k] = weight * speed;
      total += per_sample[k];
      if (!(speed > 0.0)) continue;
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) s += velocity(i) * velocity(j) * m.metric(i, j).d(a);
        }
        de_dgamma(a) = s;
      }
      const double dl_de = weight / (2.0 * speed);
      for (int i = 0; i < d; ++i) {
        const double de_dv = 2.0 * gv(i);
        adj.at(k, i, 0) = dl_de * (env * de_dgamma(i) + (1.0 - 2.0 * lambda) * de_dv);
        adj.at(k, i, 1) = dl_de * env * de_dv;
      }
    }
    return total;
  };
  return loss_parameter_gradient(curve.core(), inputs, head);
}

MllmResult train_mllm(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const MllmConfig& cfg) {
  if (cfg.ensemble < 1) throw ConfigError("ensemble size must be positive");
  if (cfg.steps < 0) throw ConfigError("step count must be nonnegative");
  if (p.size() != im.chart_dim() || q.size() != im.chart_dim()) {
    throw ConfigError("endpoints must match the chart dimension");
  }
  MllmResult result;
  result.length = std::numeric_limits<double>::infinity();
  result.members.resize(cfg.ensemble);
  for (int e = 0; e < cfg.ensemble; ++e) {
    MllmMember& member = result.members[e];
    member.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(e));
    CurveNetwork curve = CurveNetwork::random(p, q, cfg.hidden, member.seed);
    AdamOptimizer adam(cfg.learning_rate);
    Eigen::VectorXd theta = curve.core().parameters();
    std::mt19937_64 rng(derive_seed(member.seed, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    try {
      for (int step = 0; step < cfg.steps; ++step) {
        const ParamGradient pg = mllm_length_gradient(im, curve, cfg.grid, unit(rng));
        adam.step(theta, pg.gradient);
        curve.core().set_parameters(theta);
      }
      const SmoothCurve smooth = curve.as_curve();
      member.energy = energy_profile(im, smooth, cfg.grid);
      member.length = curve_length(im, smooth, cfg.grid);
      if (!std::isfinite(member.length)) throw NumericError("non-finite curve length");
    } catch (const NumericError& err) {
      member.failed = true;
      member.message = err.what();
      member.length = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (member.length < result.length) {
      result.length = member.length;
      result.best_index = e;
      result.best = curve;
    }
  }
  if (result.best_index < 0) throw ConvergenceError("every ML-LM ensemble member failed");
  return result;
}

}  // namespace geodex
