#include "geodex/sampling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "geodex/errors.hpp"
#include "geodex/random.hpp"

namespace geodex {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void check_box(const DomainBox& box) {
  if (box.dim() == 0 || box.upper.size() != box.dim()) throw ConfigError("domain box is empty or malformed");
  if (!box.lower.allFinite() || !box.upper.allFinite() || !(box.upper.array() > box.lower.array()).all()) {
    throw ConfigError("domain box must be finite with lower < upper");
  }
}

}  // namespace

int MhConfig::kept_per_chain() const {
  if (thin < 1) return 0;
  const int post = steps_per_chain - burn_in;
  return post > 0 ? (post + thin - 1) / thin : 0;
}

Eigen::VectorXd uniform_draw(const DomainBox& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(box.dim());
  for (int i = 0; i < box.dim(); ++i) x(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
  return x;
}

std::vector<double> gelman_rubin(const std::vector<std::vector<Eigen::VectorXd>>& chains) {
  const auto m = static_cast<int>(chains.size());
  if (m < 2 || chains.front().size() < 2) return {};
  const auto n = static_cast<int>(chains.front().size());
  const auto d = chains.front().front().size();
  std::vector<double> out(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> means(m), vars(m);
    double grand = 0.0;
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (const auto& x : chains[c]) s += x(k);
      means[c] = s / n;
      double v = 0.0;
      for (const auto& x : chains[c]) v += (x(k) - means[c]) * (x(k) - means[c]);
      vars[c] = v / (n - 1);
      grand += means[c];
    }
    grand /= m;
    double b = 0.0;
    double w = 0.0;
    for (int c = 0; c < m; ++c) {
      b += (means[c] - grand) * (means[c] - grand);
      w += vars[c];
    }
    b *= static_cast<double>(n) / (m - 1);
    w /= m;
    const double pooled = (n - 1.0) / n * w + b / n;
    out[static_cast<std::size_t>(k)] = w > 0.0 ? std::sqrt(pooled / w) : 1.0;
  }
  return out;
}

SampleSet metropolis_hastings(const DomainBox& box, const TargetWeight& weight, const MhConfig& cfg) {
  check_box(box);
  if (cfg.chains < 1) throw ConfigError("at least one chain is required");
  if (cfg.burn_in < 0 || cfg.steps_per_chain < 1) throw ConfigError("chain lengths must be positive");
  if (cfg.thin < 1) throw ConfigError("thinning interval must be >= 1");
  if (!(cfg.proposal_sigma > 0.0)) throw ConfigError("proposal sigma must be positive");
  const int kept = cfg.kept_per_chain();
  if (kept < 1) {
    std::ostringstream os;
    os << "empty sample set: burn-in " << cfg.burn_in << " leaves nothing of " << cfg.steps_per_chain
       << " steps per chain";
    throw ConfigError(os.str());
  }

  const int d = box.dim();
  std::vector<std::vector<Eigen::VectorXd>> chains(cfg.chains);
  long accepted = 0;
  long proposed = 0;
  for (int c = 0; c < cfg.chains; ++c) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x = uniform_draw(box, rng);
    double wx = weight(x);
    if (!(wx > 0.0) || !std::isfinite(wx)) throw SamplingError("target weight must be positive and finite in the box");
    auto& chain = chains[c];
    chain.reserve(kept);
    Eigen::VectorXd y(d);
    for (int step = 0; step < cfg.steps_per_chain; ++step) {
      for (int i = 0; i < d; ++i) y(i) = x(i) + cfg.proposal_sigma * normal(rng);
      const double u = unit(rng);
      ++proposed;
      if (box.contains(y)) {
        const double wy = weight(y);
        if (!std::isfinite(wy) || wy < 0.0) throw SamplingError("target weight is not a finite nonnegative number");
        if (u * wx < wy) {
          x = y;
          wx = wy;
          ++accepted;
        }
      }
      if (step >= cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0) chain.push_back(x);
    }
  }

  SampleSet out;
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  if (out.acceptance_rate < cfg.min_acceptance) {
    std::ostringstream os;
    os << "acceptance rate " << out.acceptance_rate << " is below " << cfg.min_acceptance
       << "; try a smaller proposal sigma than " << cfg.proposal_sigma;
    throw SamplingError(os.str());
  }
  out.gelman_rubin = gelman_rubin(chains);
  for (int c = 0; c < cfg.chains; ++c) {
    for (auto& x : chains[c]) {
      out.points.push_back(std::move(x));
      out.chain_ids.push_back(c);
    }
  }
  return out;
}

SampleSet mh_sample(const Immersion& im, const DomainBox& box, const MhConfig& cfg) {
  if (box.dim() != im.chart_dim()) throw ConfigError("domain box does not match the chart dimension");
  const Immersion* imp = &im;
  const double alpha = cfg.alpha;
  const CurvatureClamp clamp = cfg.clamp;
  return metropolis_hastings(
      box, [imp, alpha, clamp](const Eigen::VectorXd& x) { return psi(scalar_curvature(*imp, x), alpha, clamp); }, cfg);
}

Eigen::VectorXd scott_bandwidth(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) return {};
  const auto n = static_cast<double>(samples.size());
  const auto d = samples.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& x : samples) mean += x;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& x : samples) var += (x - mean).cwiseAbs2();
  Eigen::VectorXd h(d);
  const double factor = std::pow(n, -1.0 / (static_cast<double>(d) + 4.0));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double sd = samples.size() > 1 ? std::sqrt(var(i) / (n - 1.0)) : 0.0;
    h(i) = factor * (sd > 0.0 ? sd : 1.0);
  }
  return h;
}

DensityEstimate kde_fit(const std::vector<Eigen::VectorXd>& samples, std::optional<DomainBox> box,
                        std::optional<Eigen::VectorXd> bandwidth) {
  DensityEstimate est;
  est.centers = samples;
  est.box = std::move(box);
  if (samples.empty()) return est;
  const auto d = samples.front().size();
  for (const auto& x : samples) {
    if (x.size() != d) throw ConfigError("KDE samples differ in dimension");
  }
  est.bandwidth = bandwidth ? *bandwidth : scott_bandwidth(samples);
  if (est.bandwidth.size() != d || !(est.bandwidth.array() > 0.0).all()) {
    throw ConfigError("KDE bandwidth must be positive in every coordinate");
  }
  if (est.box) {
    if (est.box->dim() != d) throw ConfigError("KDE box does not match the sample dimension");
    double mass = 0.0;
    for (const auto& c : samples) {
      double m = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        m *= normal_cdf((est.box->upper(i) - c(i)) / est.bandwidth(i)) -
             normal_cdf((est.box->lower(i) - c(i)) / est.bandwidth(i));
      }
      mass += m;
    }
    est.normalisation = mass / static_cast<double>(samples.size());
    if (!(est.normalisation > 0.0)) throw NumericError("KDE has no mass inside the box");
  }
  return est;
}

double kde_pdf(const DensityEstimate& est, const Eigen::VectorXd& x) {
  if (est.empty()) return 0.0;
  if (est.box && !est.box->contains(x)) return 0.0;
  const auto d = est.bandwidth.size();
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) / est.bandwidth.prod();
  double sum = 0.0;
  for (const auto& c : est.centers) {
    const double q = (x - c).cwiseQuotient(est.bandwidth).squaredNorm();
    sum += std::exp(-0.5 * q);
  }
  return norm * sum / (static_cast<double>(est.centers.size()) * est.normalisation);
}

Eigen::VectorXd kde_draw(const DensityEstimate& est, const DomainBox& box, std::mt19937_64& rng) {
  if (est.empty()) throw ConfigError("cannot draw from an empty density estimate");
  std::uniform_int_distribution<std::size_t> pick(0, est.centers.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(est.bandwidth.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Eigen::VectorXd& c = est.centers[pick(rng)];
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = c(i) + est.bandwidth(i) * normal(rng);
    if (box.contains(x)) return x;
  }
  throw SamplingError("KDE draws keep landing outside the domain box");
}

std::vector<Eigen::VectorXd> training_sampler(const DomainBox& box, const DensityEstimate& est, int n,
                                              std::mt19937_64& rng, std::vector<std::string>* warnings) {
  check_box(box);
  if (n < 0) throw ConfigError("sample count must be nonnegative");
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  if (est.empty()) {
    if (warnings) warnings->push_back("density estimate has no centers; drawing all samples uniformly");
    for (int k = 0; k < n; ++k) out.push_back(uniform_draw(box, rng));
    return out;
  }
  const int n_uniform = n / 2;
  for (int k = 0; k < n_uniform; ++k) out.push_back(uniform_draw(box, rng));
  for (int k = n_uniform; k < n; ++k) out.push_back(kde_draw(est, box, rng));
  return out;
}

}  // namespace geodex
