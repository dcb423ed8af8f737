#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "geodex/curves.hpp"
#include "geodex/errors.hpp"
#include "geodex/integrator.hpp"
#include "geodex/metric.hpp"
#include "geodex/mllm.hpp"
#include "oracles.hpp"

using namespace geodex;
using std::numbers::pi;

namespace {

SmoothCurve equator_arc(double phi0, double phi1) {
  return [=](const Jet& t) { return std::vector<Jet>{Jet(pi / 2), phi0 + (phi1 - phi0) * t}; };
}

DiscreteCurve reversed(const DiscreteCurve& c) {
  DiscreteCurve r;
  r.samples.assign(c.samples.rbegin(), c.samples.rend());
  return r;
}

}  // namespace

TEST(LinearInterpolation, Examples) {
  const Eigen::Vector2d p(0.1, -0.3);
  const Eigen::Vector2d q(1.7, 2.9);
  const DiscreteCurve c = linear_interpolation(p, q, 11);
  ASSERT_EQ(c.size(), 11);
  EXPECT_EQ(c.samples.front(), p);
  EXPECT_EQ(c.samples.back(), q);
  EXPECT_LE((c.samples[5] - 0.5 * (p + q)).norm(), 1e-15);
  const DiscreteCurve two = linear_interpolation(p, q, 2);
  ASSERT_EQ(two.size(), 2);
  EXPECT_EQ(two.samples[0], p);
  EXPECT_EQ(two.samples[1], q);
  EXPECT_THROW(linear_interpolation(p, q, 1), ConfigError);
}

TEST(CurveLength, EuclideanStraightLine) {
  EXPECT_NEAR(curve_length(*make_euclidean(2), linear_interpolation(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4), 1000)),
              5.0, 1e-12);
}

TEST(CurveLength, SphereEquatorQuarterArc) {
  const auto s = make_sphere(1.0);
  EXPECT_NEAR(curve_length(*s, equator_arc(0.0, pi / 2)), pi / 2, 1e-5);
  EXPECT_NEAR(curve_length(*s, sample_curve(equator_arc(0.0, pi / 2), 1000)), pi / 2, 1e-5);
}

TEST(CurveLength, ReversalPreservesLength) {
  const auto p = make_peaks();
  SmoothCurve wiggle = [](const Jet& t) {
    return std::vector<Jet>{-1.0 + 2.0 * t, 0.5 * sin(3.0 * t) - 0.2};
  };
  const DiscreteCurve c = sample_curve(wiggle, 1000);
  EXPECT_NEAR(curve_length(*p, c), curve_length(*p, reversed(c)), 1e-10);
}

TEST(CurveLength, GeodesicPathUsesMomenta) {
  const auto s = make_sphere(1.0);
  const GeodesicPath path = exp_map(*s, Eigen::Vector2d(pi / 2, 0.0), Eigen::Vector2d(0.0, 1.0));
  EXPECT_NEAR(curve_length(*s, path), 1.0, 1e-10);
}

TEST(EnergyProfile, EuclideanLineIsConstant) {
  const Eigen::Vector2d p(1.0, 1.0);
  const Eigen::Vector2d q(-2.0, 3.0);
  for (double e : energy_profile(*make_euclidean(2), linear_interpolation(p, q, 200))) {
    EXPECT_NEAR(e, (q - p).squaredNorm(), 1e-10);
  }
}

TEST(EnergyProfile, SymplecticPeaksGeodesicIsFlat) {
  const GeodesicPath path = exp_map(*make_peaks(), Eigen::Vector2d(-0.5, 0.4), Eigen::Vector2d(0.6, -0.3));
  EXPECT_LE(relative_variation(energy_profile(path)), 1e-4);
}

TEST(EnergyProfile, ChordOffEquatorVaries) {
  const auto s = make_sphere(1.0);
  const auto e = energy_profile(*s, linear_interpolation(Eigen::Vector2d(0.6, -1.0), Eigen::Vector2d(1.2, 1.0), 500));
  EXPECT_GT(profile_variance(e), 1e-6);
}

TEST(EnergyProfile, CauchySchwarzOnEvaluatedCurves) {
  const auto im = make_peaks();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double a = u(rng);
    const double b = u(rng);
    SmoothCurve c = [=](const Jet& t) { return std::vector<Jet>{a + 2.0 * t * t, b - sin(2.0 * t)}; };
    const double len = curve_length(*im, c);
    const double energy = integrated_energy(energy_profile(*im, c));
    EXPECT_LE(len * len, energy * (1.0 + 1e-9));
  }
}

TEST(ProfileStatistics, Definitions) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 6.0};
  EXPECT_DOUBLE_EQ(profile_variance(v), 3.5);
  EXPECT_DOUBLE_EQ(relative_variation(v), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(integrated_energy(std::vector<double>{2.0, 2.0, 2.0}), 2.0);
}

TEST(GeodesicDistance, EuclideanAndSphere) {
  EXPECT_NEAR(geodesic_distance(*make_euclidean(2), Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)).distance, 5.0,
              1e-9);
  const auto s = make_sphere(1.0);
  EXPECT_NEAR(geodesic_distance(*s, Eigen::Vector2d(pi / 2, 0.0), Eigen::Vector2d(pi / 2, 1.0)).distance, 1.0, 1e-4);
  const Eigen::Vector2d a(pi / 2, 0.0);
  const Eigen::Vector2d b(pi / 3, 0.0);
  EXPECT_NEAR(geodesic_distance(*s, a, b).distance, oracle::central_angle(a, b), 1e-4);
}

TEST(GeodesicDistance, NearAntipodalWithSeveralSeeds) {
  const auto s = make_sphere(1.0);
  const Eigen::Vector2d p(pi / 2, -1.55);
  const Eigen::Vector2d q(pi / 2 + 0.02, 1.55);
  const DistanceReport r = geodesic_distance(*s, p, q, {}, 5, 7);
  EXPECT_EQ(r.solves.size(), 5u);
  EXPECT_GE(r.converged_count(), 1);
  EXPECT_LE(r.distance, pi);
  EXPECT_NEAR(r.distance, oracle::central_angle(p, q), 1e-4);
}

TEST(GeodesicDistance, AllSeedsFailingThrows) {
  ShootingConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(geodesic_distance(*make_peaks(), Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), cfg, 2, 1),
               ConvergenceError);
}

TEST(GeodesicDistance, SymmetricOnRandomSpherePairs) {
  // Away from antipodes the sphere has one minimising geodesic, so both
  // directions must find the same length. On peaks a single seed can land on
  // different local geodesics and the found minimum need not be symmetric.
  const auto s = make_sphere(1.0);
  std::mt19937_64 rng(29);
  const Eigen::VectorXd c = s->domain().center();
  const Eigen::VectorXd h = 0.4 * s->domain().half_width();
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd p = oracle::uniform_point(rng, c - h, c + h);
    const Eigen::VectorXd q = oracle::uniform_point(rng, c - h, c + h);
    const double pq = geodesic_distance(*s, p, q).distance;
    const double qp = geodesic_distance(*s, q, p).distance;
    EXPECT_NEAR(pq, qp, 1e-4);
    EXPECT_NEAR(pq, oracle::central_angle(p, q), 1e-4);
  }
}

TEST(GeodesicDistance, SphereTriangleInequality) {
  const auto s = make_sphere(1.0);
  std::mt19937_64 rng(31);
  const Eigen::Vector2d lo(0.8, -1.0);
  const Eigen::Vector2d hi(2.3, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd a = oracle::uniform_point(rng, lo, hi);
    const Eigen::VectorXd b = oracle::uniform_point(rng, lo, hi);
    const Eigen::VectorXd c = oracle::uniform_point(rng, lo, hi);
    const double ab = geodesic_distance(*s, a, b).distance;
    const double bc = geodesic_distance(*s, b, c).distance;
    const double ac = geodesic_distance(*s, a, c).distance;
    EXPECT_LE(ac, ab + bc + 1e-3);
    EXPECT_NEAR(ab, oracle::central_angle(a, b), 1e-4);
  }
}

TEST(CurveNetwork, EndpointsArePinned) {
  const Eigen::Vector2d p(0.3, -1.0);
  const Eigen::Vector2d q(-2.0, 0.5);
  const CurveNetwork c = CurveNetwork::random(p, q, 8, 5);
  EXPECT_EQ(c.at(0.0), p);
  EXPECT_LE((c.at(1.0) - q).norm(), 1e-15);
}

TEST(CurveNetwork, LengthGradientMatchesFiniteDifferences) {
  const auto im = make_peaks();
  CurveNetwork c = CurveNetwork::random(Eigen::Vector2d(-0.5, 0.2), Eigen::Vector2d(0.7, -0.4), 6, 9);
  const ParamGradient g = mllm_length_gradient(*im, c, 200);
  EXPECT_NEAR(g.loss_value, curve_length(*im, c.as_curve(), 200), 1e-12);
  const Eigen::VectorXd theta = c.core().parameters();
  for (int k = 0; k < theta.size(); k += 3) {
    const double h = 1e-6;
    Eigen::VectorXd tp = theta;
    Eigen::VectorXd tm = theta;
    tp(k) += h;
    tm(k) -= h;
    CurveNetwork cp = c;
    CurveNetwork cm = c;
    cp.core().set_parameters(tp);
    cm.core().set_parameters(tm);
    const double fd = (curve_length(*im, cp.as_curve(), 200) - curve_length(*im, cm.as_curve(), 200)) / (2.0 * h);
    EXPECT_NEAR(g.gradient(k), fd, 1e-6 * std::max(1.0, std::abs(fd))) << k;
  }
}

TEST(CurveNetwork, ShiftedGridGradientMatchesFiniteDifferences) {
  const auto im = make_sphere(1.0);
  CurveNetwork c = CurveNetwork::random(Eigen::Vector2d(1.2, 0.0), Eigen::Vector2d(1.6, 0.8), 6, 10);
  const double shift = 0.37;
  auto rectangle = [&](const CurveNetwork& curve) {
    // Independent shifted rectangle rule on the speed sqrt(<g', g'>).
    const int n = 99;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double lam = (k + shift) / n;
      const double h = 1e-6;
      const Eigen::VectorXd dg = (curve.at(lam + h) - curve.at(lam - h)) / (2.0 * h);
      const Eigen::MatrixXd g = induced_metric(*im, curve.at(lam)).g;
      total += std::sqrt(dg.dot(g * dg)) / n;
    }
    return total;
  };
  const ParamGradient g = mllm_length_gradient(*im, c, 100, shift);
  EXPECT_NEAR(g.loss_value, rectangle(c), 1e-8);
  const Eigen::VectorXd theta = c.core().parameters();
  for (int k = 0; k < theta.size(); k += 5) {
    const double h = 1e-5;
    CurveNetwork cp = c;
    CurveNetwork cm = c;
    Eigen::VectorXd tp = theta;
    Eigen::VectorXd tm = theta;
    tp(k) += h;
    tm(k) -= h;
    cp.core().set_parameters(tp);
    cm.core().set_parameters(tm);
    const double fd = (rectangle(cp) - rectangle(cm)) / (2.0 * h);
    EXPECT_NEAR(g.gradient(k), fd, 1e-5 * std::max(1.0, std::abs(fd))) << k;
  }
  EXPECT_THROW(mllm_length_gradient(*im, c, 100, 1.0), ConfigError);
}

TEST(Mllm, EuclideanConvergesToSegmentLength) {
  MllmConfig cfg;
  cfg.ensemble = 2;
  cfg.steps = 1500;
  cfg.learning_rate = 3e-3;
  cfg.grid = 200;
  cfg.seed = 4;
  const Eigen::Vector2d p(-1.0, 0.5);
  const Eigen::Vector2d q(2.0, -1.5);
  const MllmResult r = train_mllm(*make_euclidean(2), p, q, cfg);
  EXPECT_NEAR(r.length, (q - p).norm(), 1e-3);
  ASSERT_EQ(r.members.size(), 2u);
  EXPECT_NE(r.members[0].seed, r.members[1].seed);
}

TEST(Mllm, SphereLengthBoundsAndEnergyVariance) {
  const auto s = make_sphere(1.0);
  const Eigen::Vector2d p(pi / 2, -0.6);
  const Eigen::Vector2d q(pi / 2, 0.6);
  MllmConfig cfg;
  cfg.ensemble = 2;
  cfg.steps = 300;
  cfg.grid = 200;
  cfg.seed = 11;
  const MllmResult r = train_mllm(*s, p, q, cfg);
  const DistanceReport d = geodesic_distance(*s, p, q);
  for (const auto& m : r.members) {
    ASSERT_FALSE(m.failed) << m.message;
    EXPECT_GE(m.length, d.distance - 1e-3);
    EXPECT_LE(m.length * m.length, integrated_energy(m.energy) * (1.0 + 1e-9));
  }
  const double symplectic = profile_variance(energy_profile(d.solves[static_cast<std::size_t>(d.best_seed)].path));
  EXPECT_GT(profile_variance(r.members[static_cast<std::size_t>(r.best_index)].energy), symplectic);
}

TEST(Mllm, SameSeedSameResult) {
  MllmConfig cfg;
  cfg.ensemble = 2;
  cfg.steps = 20;
  cfg.grid = 50;
  cfg.seed = 3;
  const auto im = make_peaks();
  const MllmResult a = train_mllm(*im, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), cfg);
  const MllmResult b = train_mllm(*im, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), cfg);
  EXPECT_EQ(a.length, b.length);
  EXPECT_EQ(a.best.core().parameters(), b.best.core().parameters());
}
