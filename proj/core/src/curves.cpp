#include "geodex/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geodex/errors.hpp"
#include "geodex/metric.hpp"

namespace geodex {
namespace {

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * h;
}

double speed_squared(const Immersion& im, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const MetricTensor m = induced_metric(im, x);
  return inner_product(m.g, v, v);
}

void check_curve(const DiscreteCurve& c) {
  if (c.size() < 2) throw ConfigError("a discrete curve needs at least two samples");
}

std::vector<double> sqrt_all(std::vector<double> e) {
  for (double& x : e) x = std::sqrt(std::max(x, 0.0));
  return e;
}

}  // namespace

std::vector<Eigen::VectorXd> DiscreteCurve::velocities() const {
  check_curve(*this);
  const int n = size();
  const double h = spacing();
  std::vector<Eigen::VectorXd> v(n);
  if (n == 2) {
    v[0] = v[1] = (samples[1] - samples[0]) / h;
    return v;
  }
  v[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
  v[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
  for (int k = 1; k + 1 < n; ++k) v[k] = (samples[k + 1] - samples[k - 1]) / (2.0 * h);
  return v;
}

DiscreteCurve sample_curve(const SmoothCurve& curve, int n) {
  if (n < 2) throw ConfigError("curve grid needs at least two points");
  DiscreteCurve c;
  c.samples.reserve(n);
  for (int k = 0; k < n; ++k) {
    const auto x = curve(Jet(static_cast<double>(k) / (n - 1)));
    Eigen::VectorXd p(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) p(static_cast<Eigen::Index>(i)) = x[i].value();
    c.samples.push_back(std::move(p));
  }
  return c;
}

std::vector<double> energy_profile(const Immersion& im, const DiscreteCurve& c) {
  const auto v = c.velocities();
  std::vector<double> e(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) e[k] = speed_squared(im, c.samples[k], v[k]);
  return e;
}

std::vector<double> energy_profile(const Immersion& im, const SmoothCurve& c, int n) {
  if (n < 2) throw ConfigError("curve grid needs at least two points");
  std::vector<double> e(n);
  for (int k = 0; k < n; ++k) {
    const Jet lambda = Jet::variable(static_cast<double>(k) / (n - 1), 0, 1, 1);
    const auto x = c(lambda);
    const auto d = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd p(d), v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      p(i) = x[i].value();
      v(i) = x[i].order() >= 1 && x[i].dim() == 1 ? x[i].d(0) : 0.0;
    }
    e[k] = speed_squared(im, p, v);
  }
  return e;
}

std::vector<double> energy_profile(const GeodesicPath& path) {
  std::vector<double> e(path.energies.size());
  std::transform(path.energies.begin(), path.energies.end(), e.begin(), [](double h) { return 2.0 * h; });
  return e;
}

double curve_length(const Immersion& im, const DiscreteCurve& c) {
  const auto s = sqrt_all(energy_profile(im, c));
  return trapezoid(s, c.spacing());
}

double curve_length(const Immersion& im, const SmoothCurve& c, int n) {
  const auto s = sqrt_all(energy_profile(im, c, n));
  return trapezoid(s, 1.0 / (n - 1));
}

double curve_length(const Immersion&, const GeodesicPath& path) {
  if (path.states.size() < 2) throw ConfigError("geodesic path has fewer than two states");
  const auto s = sqrt_all(energy_profile(path));
  double total = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) total += 0.5 * (s[k] + s[k - 1]) * (path.lambdas[k] - path.lambdas[k - 1]);
  return total;
}

double integrated_energy(std::span<const double> profile) {
  if (profile.size() < 2) return 0.0;
  return trapezoid(profile, 1.0 / static_cast<double>(profile.size() - 1));
}

double profile_variance(std::span<const double> profile) {
  if (profile.empty()) return 0.0;
  const double mean = std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(profile.size());
  double s = 0.0;
  for (double e : profile) s += (e - mean) * (e - mean);
  return s / static_cast<double>(profile.size());
}

double relative_variation(std::span<const double> profile) {
  if (profile.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  const double mean = std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(profile.size());
  return (*hi - *lo) / std::max(std::abs(mean), 1e-300);
}

DiscreteCurve linear_interpolation(const Eigen::VectorXd& p, const Eigen::VectorXd& q, int n) {
  if (n < 2) throw ConfigError("linear interpolation needs n >= 2");
  if (p.size() != q.size()) throw ConfigError("endpoints differ in dimension");
  DiscreteCurve c;
  c.samples.reserve(n);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      c.samples.push_back(p);
    } else if (k == n - 1) {
      c.samples.push_back(q);
    } else {
      const double t = static_cast<double>(k) / (n - 1);
      c.samples.push_back((1.0 - t) * p + t * q);
    }
  }
  return c;
}

int DistanceReport::converged_count() const {
  return static_cast<int>(std::count_if(solves.begin(), solves.end(), [](const auto& s) { return s.converged; }));
}

DistanceReport summarize_solves(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                std::vector<ShootingResult> solves) {
  DistanceReport report;
  report.solves = std::move(solves);
  report.distance = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < report.solves.size(); ++s) {
    const ShootingResult& r = report.solves[s];
    if (!r.converged) {
      report.lengths.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double len = (p - q).norm() == 0.0 ? 0.0 : curve_length(im, r.path);
    report.lengths.push_back(len);
    if (len < report.distance) {
      report.distance = len;
      report.best_seed = static_cast<int>(s);
    }
  }
  return report;
}

DistanceReport geodesic_distance(const Immersion& im, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                 const ShootingConfig& cfg, int seeds, std::uint64_t rng_seed) {
  DistanceReport report = summarize_solves(im, p, q, log_map_multi(im, p, q, cfg, seeds, rng_seed));
  if (report.best_seed < 0) {
    std::string msg = "no geodesic found: all " + std::to_string(seeds) + " shooting seeds failed";
    if (!report.solves.empty() && !report.solves.front().message.empty()) msg += " (" + report.solves.front().message + ")";
    throw ConvergenceError(msg);
  }
  return report;
}

}  // namespace geodex
