// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from closed forms and finite
// differences in oracles.hpp, never from the library under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "geodex/curvature.hpp"
#include "geodex/curves.hpp"
#include "geodex/eikonal.hpp"
#include "geodex/immersion.hpp"
#include "geodex/integrator.hpp"
#include "geodex/metric.hpp"
#include "geodex/mllm.hpp"
#include "geodex/mlp.hpp"
#include "geodex/param_gradient.hpp"
#include "geodex/sampling.hpp"
#include "geodex/shooting.hpp"
#include "oracles.hpp"

using namespace geodex;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::Vector2d v2(double a, double b) { return Eigen::Vector2d(a, b); }

// Random start inside the inner half of the chart with |v|_g = speed.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_start(const Immersion& im, std::mt19937_64& rng, double speed) {
  const DomainBox box = im.domain();
  const Eigen::VectorXd h = 0.5 * box.half_width();
  const Eigen::VectorXd x = oracle::uniform_point(rng, box.center() - h, box.center() + h);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(x.size());
  for (int i = 0; i < v.size(); ++i) v(i) = n(rng);
  v *= speed / std::sqrt(v.dot(induced_metric(im, x).g * v));
  return {x, v};
}

// ---------------------------------------------------------------- criteria

void flat_space(Outcome& o) {
  const auto t0 = Clock::now();
  const auto e = make_euclidean(2);
  double worst_exp = 0.0;
  int worst_iter = 0;
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd p = oracle::uniform_point(rng, v2(-2, -2), v2(2, 2));
    const Eigen::VectorXd v = oracle::uniform_point(rng, v2(-1, -1), v2(1, 1));
    worst_exp = std::max(worst_exp, (exp_map(*e, p, v).end().q - (p + v)).norm());
    const Eigen::VectorXd q = oracle::uniform_point(rng, v2(-2, -2), v2(2, 2));
    const ShootingResult s = log_map(*e, p, q);
    o.require(s.converged, "log_map converged");
    o.require((s.v - (q - p)).norm() <= 1e-9, "log_map returns q - p");
    worst_iter = std::max(worst_iter, s.iterations);
  }
  const double t = seconds_since(t0);
  o.detail << "max |exp_p(v) - (p+v)| = " << worst_exp << ", max Newton iterations = " << worst_iter
           << ", runtime " << t << " s";
  o.require(worst_exp <= 1e-9, "endpoint within 1e-9");
  o.require(worst_iter <= 2, "at most 2 Newton iterations");
  o.require(t < 1.0, "runtime < 1 s");
}

void energy_conservation(Outcome& o) {
  const auto t0 = Clock::now();
  const std::vector<ImmersionPtr> ims = {make_sphere(1.0), make_peaks()};
  double worst = 0.0;
  std::mt19937_64 rng(2);
  for (const auto& im : ims) {
    for (int k = 0; k < 10; ++k) {
      const auto [x, v] = random_start(*im, rng, 0.5);
      const GeodesicPath path = exp_map(*im, x, v);
      o.require(path.states.size() == 1001u, "1000 steps");
      worst = std::max(worst, path.relative_drift());
    }
  }
  // Order check at steps where the drift stands clear of rounding noise.
  double min_ratio = 1e300;
  const std::vector<std::pair<ImmersionPtr, std::pair<Eigen::Vector2d, Eigen::Vector2d>>> runs = {
      {make_peaks(), {v2(0.3, -0.7), v2(0.3, 0.8)}},
      {make_sphere(1.0), {v2(0.5, 0.0), v2(1.0, 1.5)}},
  };
  for (const auto& [im, start] : runs) {
    std::vector<double> drift;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      IntegratorConfig cfg;
      cfg.step = h;
      cfg.drift_error = 1.0;
      drift.push_back(exp_map(*im, start.first, start.second, cfg).relative_drift());
    }
    min_ratio = std::min({min_ratio, drift[0] / drift[1], drift[1] / drift[2]});
  }
  const double t = seconds_since(t0);
  o.detail << "max relative H drift over 20 runs = " << worst << ", min drift ratio per halving = " << min_ratio
           << ", runtime " << t << " s";
  o.require(worst <= 1e-6, "drift <= 1e-6");
  o.require(min_ratio >= 8.0, "halving ratio >= 8");
  o.require(t < 10.0, "runtime < 10 s");
}

void sphere_geodesy(Outcome& o) {
  const auto s = make_sphere(1.0);
  const double equator = geodesic_distance(*s, v2(pi / 2, -0.5), v2(pi / 2, 0.5)).distance;
  const Eigen::Vector2d a(0.6, 1.0);
  const Eigen::Vector2d b(2.1, 1.0);
  const double meridian = geodesic_distance(*s, a, b).distance;
  const double angle = oracle::central_angle(a, b);
  double ricci_err = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    const auto sr = make_sphere(r);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd x = oracle::uniform_point(rng, sr->domain().lower, sr->domain().upper);
      ricci_err = std::max(ricci_err, std::abs(scalar_curvature(*sr, x) - 2.0 / (r * r)));
    }
  }
  o.detail << "equator d = " << equator << ", meridian d = " << meridian << " vs central angle " << angle
           << ", max |R - 2/r^2| = " << ricci_err;
  o.require(std::abs(equator - 1.0) <= 1e-4, "equator distance 1 +- 1e-4");
  o.require(std::abs(meridian - angle) <= 1e-4, "meridian distance +- 1e-4");
  o.require(ricci_err <= 1e-6, "Ricci scalar +- 1e-6");
}

void peaks_curvature(Outcome& o) {
  const auto im = make_peaks();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd x = oracle::uniform_point(rng, im->domain().lower, im->domain().upper);
    const double ref = oracle::graph_scalar_curvature(oracle::peaks_v, x);
    worst = std::max(worst, std::abs(scalar_curvature(*im, x) - ref) / std::max(1.0, std::abs(ref)));
  }
  o.detail << "max error vs graph-surface formula over 100 points = " << worst;
  o.require(worst <= 1e-5, "within 1e-5");
}

void derivatives(Outcome& o) {
  const std::vector<int> decoder_widths = {2, 16, 5};
  const std::vector<ImmersionPtr> ims = {
      make_euclidean(2), make_sphere(1.0), make_peaks(),
      make_decoder(MlpNetwork::random(decoder_widths, Activation::kTanh, Activation::kTanh, 5))};
  std::mt19937_64 rng(5);
  double worst[3] = {0.0, 0.0, 0.0};
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (const auto& im : ims) {
    for (int k = 0; k < 25; ++k) {
      const Eigen::VectorXd x = oracle::uniform_point(rng, im->domain().lower, im->domain().upper);
      const auto jets = im->jets(x, 3);
      for (int a = 0; a < im->ambient_dim(); ++a) {
        const oracle::ScalarFn f = [&](const Eigen::VectorXd& y) { return im->map(y)(a); };
        const Jet& j = jets[static_cast<std::size_t>(a)];
        for (int i = 0; i < 2; ++i) {
          worst[0] = std::max(worst[0], rel(j.d(i), oracle::derivative(f, x, {i})));
          for (int l = i; l < 2; ++l) {
            worst[1] = std::max(worst[1], rel(j.d(i, l), oracle::derivative(f, x, {i, l})));
            for (int m = l; m < 2; ++m) worst[2] = std::max(worst[2], rel(j.d(i, l, m), oracle::derivative(f, x, {i, l, m})));
          }
        }
      }
    }
  }

  // Parameter gradient of a loss on first and second input derivatives.
  const std::vector<int> widths = {2, 6, 6, 1};
  const MlpNetwork net = MlpNetwork::random(widths, Activation::kTanh, Activation::kIdentity, 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JetBatch in(8, 2, 2, 2);
  for (int s = 0; s < in.samples(); ++s) {
    for (int i = 0; i < 2; ++i) {
      in.at(s, i, 0) = u(rng);
      in.at(s, i, 1 + i) = 1.0;
    }
  }
  auto loss = [](const JetBatch& out, JetBatch* adj) {
    double total = 0.0;
    const int n = out.samples();
    for (int s = 0; s < n; ++s) {
      const double gx = out.at(s, 0, 1);
      const double gy = out.at(s, 0, 2);
      const double lap = out.at(s, 0, 3 + pair_index(0, 0)) + out.at(s, 0, 3 + pair_index(1, 1));
      const double eps = gx * gx + gy * gy - 1.0;
      total += (eps * eps + 0.1 * lap * lap) / n;
      if (adj) {
        adj->at(s, 0, 1) = 4.0 * eps * gx / n;
        adj->at(s, 0, 2) = 4.0 * eps * gy / n;
        adj->at(s, 0, 3 + pair_index(0, 0)) = 0.2 * lap / n;
        adj->at(s, 0, 3 + pair_index(1, 1)) = 0.2 * lap / n;
      }
    }
    return total;
  };
  const LossHead head = [&](const JetBatch& out, JetBatch& adj, std::span<double>) { return loss(out, &adj); };
  const ParamGradient g = loss_parameter_gradient(net, in, head);
  const Eigen::VectorXd theta = net.parameters();
  double grad_err = 0.0;
  for (int k = 0; k < theta.size(); ++k) {
    auto at = [&](double h) {
      MlpNetwork n2 = net;
      Eigen::VectorXd t = theta;
      t(k) += h;
      n2.set_parameters(t);
      return loss(forward_batch(n2, in), nullptr);
    };
    grad_err = std::max(grad_err, rel(g.gradient(k), (at(1e-5) - at(-1e-5)) / 2e-5));
  }
  o.detail << "max relative jet error by order = " << worst[0] << " / " << worst[1] << " / " << worst[2]
           << ", max parameter-gradient error = " << grad_err << " over " << theta.size() << " parameters";
  o.require(worst[0] <= 1e-5 && worst[1] <= 1e-4 && worst[2] <= 1e-3, "jet derivatives");
  o.require(grad_err <= 1e-4, "parameter gradient");
}

void energy_profiles(Outcome& o) {
  const auto t0 = Clock::now();
  const auto s = make_sphere(1.0);
  const Eigen::Vector2d p(1.2, 0.0);
  const Eigen::Vector2d q(1.6, 0.8);
  const ShootingResult shot = log_map(*s, p, q);
  o.require(shot.converged, "shooting converged");
  const int rows = static_cast<int>(shot.path.states.size());
  const double d = curve_length(*s, shot.path);
  MllmConfig cfg;
  cfg.ensemble = 5;
  cfg.seed = 7;
  const MllmResult ml = train_mllm(*s, p, q, cfg);
  const auto lin = energy_profile(*s, linear_interpolation(p, q, rows));
  const auto ml_e = energy_profile(*s, ml.best.as_curve(), rows);
  const auto sym = energy_profile(shot.path);
  const double t = seconds_since(t0);
  o.detail << "energy variance linear " << profile_variance(lin) << ", ML-LM " << profile_variance(ml_e)
           << ", symplectic " << profile_variance(sym) << "; symplectic relative variation " << relative_variation(sym)
           << "; ML-LM length " << ml.length << " vs shooting distance " << d << ", runtime " << t << " s";
  o.require(profile_variance(lin) > 0.0, "var(linear) > 0");
  o.require(profile_variance(ml_e) > profile_variance(sym), "var(ML-LM) > var(symplectic)");
  o.require(relative_variation(sym) <= 1e-4, "symplectic relative variation <= 1e-4");
  o.require(ml.length >= d - 1e-3, "ML-LM length >= distance - 1e-3");
  o.require(t < 300.0, "runtime < 5 min");
}

void eikonal_benchmark(Outcome& o) {
  const auto t0 = Clock::now();
  const auto e = make_euclidean(2);
  const DomainBox box = DomainBox::cube(2, -3.0, 3.0);
  EikonalTrainConfig cfg;
  cfg.batch = 2000;
  cfg.seed = 7;
  const EikonalTraining tr = train_distance_field(*e, Eigen::Vector2d::Zero(), box, cfg);
  double mae = 0.0;
  int unit = 0;
  int aligned = 0;
  int n = 0;
  for (int j = 0; j < 41; ++j) {
    for (int i = 0; i < 41; ++i) {
      const Eigen::Vector2d x(-3.0 + 0.15 * i, -3.0 + 0.15 * j);
      mae += std::abs(tr.field.value(x) - x.norm());
      // The chart metric is the identity, so |v|_g is the Euclidean norm.
      const Eigen::VectorXd v = geodesic_flow(*e, tr.field, x);
      const double speed = v.norm();
      if (speed >= 0.9 && speed <= 1.1) ++unit;
      if (x.norm() > 0.0 && v.dot(x) >= std::cos(5.0 * pi / 180.0) * speed * x.norm()) ++aligned;
      ++n;
    }
  }
  mae /= n;
  const double t = seconds_since(t0);
  o.detail << "batch 2000, " << tr.history.size() << " epochs (" << (tr.converged ? "converged" : "epoch limit")
           << "), MAE = " << mae << ", unit-speed share = " << static_cast<double>(unit) / n
           << ", share of flow within 5 deg of radial = " << static_cast<double>(aligned) / n << ", runtime " << t
           << " s";
  o.require(mae <= 5e-2, "MAE <= 5e-2");
  o.require(unit >= 0.95 * n, "|v|_g in [0.9, 1.1] at >= 95% of points");
  o.require(t <= 900.0, "runtime <= 15 min");
}

void sampler(Outcome& o) {
  const auto im = make_peaks();
  MhConfig cfg;
  cfg.alpha = 1.0;
  cfg.seed = 8;
  const SampleSet s = mh_sample(*im, im->domain(), cfg);
  std::mt19937_64 rng(9);
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& x : s.points) a.push_back(psi(scalar_curvature(*im, x), 1.0));
  while (b.size() < a.size()) b.push_back(psi(scalar_curvature(*im, uniform_draw(im->domain(), rng)), 1.0));
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    return std::pair{m, s2 / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  const double na = static_cast<double>(a.size());
  const double se2a = va / na;
  const double se2b = vb / na;
  const double tstat = (ma - mb) / std::sqrt(se2a + se2b);
  const double dof = (se2a + se2b) * (se2a + se2b) / (se2a * se2a / (na - 1) + se2b * se2b / (na - 1));
  const double p_t = boost::math::cdf(boost::math::complement(boost::math::students_t(dof), tstat));

  // Uniformity on the flat chart, thinned to near-independent draws.
  const DomainBox box = DomainBox::cube(2, -3.0, 3.0);
  MhConfig ec;
  ec.seed = 10;
  ec.thin = 100;
  ec.steps_per_chain = ec.burn_in + 100 * 625;
  const SampleSet u = mh_sample(*make_euclidean(2), box, ec);
  std::vector<int> counts(16, 0);
  for (const auto& x : u.points) {
    const int i = std::min(3, static_cast<int>((x(0) + 3.0) / 1.5));
    const int j = std::min(3, static_cast<int>((x(1) + 3.0) / 1.5));
    ++counts[static_cast<std::size_t>(4 * j + i)];
  }
  const double expected = static_cast<double>(u.points.size()) / 16.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p_chi = boost::math::cdf(boost::math::complement(boost::math::chi_squared(15.0), chi2));

  o.detail << "peaks: mean psi MH " << ma << " vs uniform " << mb << " (n = " << a.size() << " each), p = " << p_t
           << "; euclidean: chi-square " << chi2 << " on " << u.points.size() << " draws, p = " << p_chi;
  o.require(a.size() == 5000u, "5000 MH samples");
  o.require(ma > mb && p_t < 0.01, "one-sided t-test p < 0.01");
  o.require(p_chi > 0.01, "uniformity chi-square passes at 1%");
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  FILE* pipe = popen((std::string(GEODEX_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void determinism(Outcome& o) {
  const auto w1 = oracle::temp_path("acceptance_a.json");
  const auto w2 = oracle::temp_path("acceptance_b.json");
  const std::vector<std::string> commands = {
      "shoot --manifold peaks --p 0.3,-0.7 --v 0.3,0.8",
      "connect --manifold sphere --p 1.2,0 --q 1.6,0.8 --seeds 3 --seed 5",
      "compare --manifold sphere --p 1.2,0 --q 1.6,0.8 --ensemble 2 --steps 100 --seed 5",
      "curvature-field --manifold peaks --grid 41 --alpha 1",
      "sample-curvature --manifold peaks --alpha 1 --seed 5",
      "train-eikonal --manifold peaks --source 0,0 --epochs 20 --batch 300 --seed 5 --weights " + w1.string(),
  };
  int identical = 0;
  for (const auto& c : commands) {
    const CliRun a = run_cli(c);
    const CliRun b = run_cli(c);
    const bool same = a.code == 0 && b.code == 0 && !a.out.empty() && a.out == b.out;
    if (same) ++identical;
    o.require(same, c);
  }
  const CliRun e1 = run_cli("eval-field --manifold peaks --weights " + w1.string() + " --grid 21");
  const CliRun e2 = run_cli("eval-field --manifold peaks --weights " + w1.string() + " --grid 21");
  o.require(e1.code == 0 && e1.out == e2.out, "eval-field");
  if (e1.code == 0 && e1.out == e2.out) ++identical;
  std::filesystem::remove(w1);
  std::filesystem::remove(w2);
  o.detail << identical << " of " << commands.size() + 1 << " commands gave byte-identical CSV on repeat";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"flat-space exactness", flat_space},
      {"energy conservation", energy_conservation},
      {"sphere geodesy", sphere_geodesy},
      {"peaks curvature", peaks_curvature},
      {"derivative correctness", derivatives},
      {"energy profiles of three curves", energy_profiles},
      {"eikonal benchmark", eikonal_benchmark},
      {"curvature sampler", sampler},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k + 1 << " " << criteria[k].first << ": " << o.detail.str()
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
