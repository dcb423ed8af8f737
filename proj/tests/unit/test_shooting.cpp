#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "geodex/errors.hpp"
#include "geodex/integrator.hpp"
#include "geodex/metric.hpp"
#include "geodex/shooting.hpp"
#include "oracles.hpp"

using namespace geodex;
using std::numbers::pi;

TEST(ShootResidual, EuclideanExamples) {
  const auto e = make_euclidean(2);
  const Eigen::Vector2d p(1.0, -1.0);
  const Eigen::Vector2d q(2.5, 0.5);
  EXPECT_LE(shoot_residual(*e, p, q, q - p, {}).norm(), 1e-12);
  EXPECT_LE((shoot_residual(*e, p, q, Eigen::Vector2d::Zero(), {}) - (p - q)).norm(), 1e-15);
}

TEST(ShootResidual, SphereEquator) {
  const auto s = make_sphere(1.0);
  EXPECT_LE(shoot_residual(*s, Eigen::Vector2d(pi / 2, 0.0), Eigen::Vector2d(pi / 2, 1.0), Eigen::Vector2d(0.0, 1.0), {})
                .norm(),
            1e-9);
}

TEST(LogMap, EuclideanWithinTwoNewtonSteps) {
  const auto e = make_euclidean(2);
  const Eigen::Vector2d p(0.0, 0.0);
  const Eigen::Vector2d q(3.0, 4.0);
  ShootingConfig cfg;
  cfg.seed = Eigen::Vector2d(-1.0, 0.5);
  const ShootingResult r = log_map(*e, p, q, cfg);
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_EQ(r.status, ShootingStatus::kConverged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_LE((r.v - (q - p)).norm(), 1e-8);
}

TEST(LogMap, CoincidentPointsGiveZeroVelocity) {
  const Eigen::Vector2d p(0.7, 1.1);
  const ShootingResult r = log_map(*make_sphere(1.0), p, p);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.v.norm(), 0.0);
}

TEST(LogMap, SphereMeridian) {
  const ShootingResult r = log_map(*make_sphere(1.0), Eigen::Vector2d(pi / 2, 0.0), Eigen::Vector2d(pi / 3, 0.0));
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_NEAR(r.v(0), -pi / 6, 1e-7);
  EXPECT_NEAR(r.v(1), 0.0, 1e-7);
  for (const auto& st : r.path.states) EXPECT_NEAR(st.q(1), 0.0, 1e-9);
}

TEST(LogMap, RoundTripOnBuiltins) {
  const std::vector<ImmersionPtr> ims = {make_euclidean(2), make_sphere(1.0), make_peaks()};
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const auto& im : ims) {
    const DomainBox box = im->domain();
    const Eigen::VectorXd c = box.center();
    const Eigen::VectorXd h = 0.5 * box.half_width();
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd p = oracle::uniform_point(rng, c - h, c + h);
      Eigen::Vector2d v(n(rng), n(rng));
      const Eigen::MatrixXd g = induced_metric(*im, p).g;
      v *= 0.5 * std::uniform_real_distribution<double>(0.2, 1.0)(rng) / std::sqrt(v.dot(g * v));
      const Eigen::VectorXd q = exp_map(*im, p, v).end().q;
      ShootingConfig cfg;
      cfg.seed = Eigen::VectorXd(v / 2.0);
      const ShootingResult r = log_map(*im, p, q, cfg);
      ASSERT_TRUE(r.converged) << im->name() << ": " << r.message;
      EXPECT_LE((r.v - v).norm(), 1e-6) << im->name();
      EXPECT_LE(r.path.relative_drift(), 1e-6) << im->name();
    }
  }
}

TEST(LogMap, FailuresAreReportedNotThrown) {
  ShootingConfig cfg;
  cfg.max_iterations = 1;
  cfg.tolerance = 1e-300;
  const ShootingResult r = log_map(*make_peaks(), Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.5, 1.2), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.status, ShootingStatus::kMaxIterations);
  EXPECT_FALSE(r.message.empty());
  EXPECT_EQ(to_string(r.status), "max-iterations");
}

TEST(LogMap, IntegrationFailureIsReported) {
  // A coarse step makes the first trial blow the drift bound.
  ShootingConfig cfg;
  cfg.integrator.step = 0.25;
  const ShootingResult r = log_map(*make_peaks(), Eigen::Vector2d(0.3, -0.7), Eigen::Vector2d(2.5, 2.8), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.status, ShootingStatus::kIntegrationFailure);
  EXPECT_NE(r.message.find("drift"), std::string::npos) << r.message;
}

TEST(LogMapMulti, SeedsAreReproducible) {
  const auto s = make_sphere(1.0);
  const Eigen::Vector2d p(1.0, -0.5);
  const Eigen::Vector2d q(2.0, 0.8);
  const auto a = log_map_multi(*s, p, q, {}, 3, 42);
  const auto b = log_map_multi(*s, p, q, {}, 3, 42);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].converged, b[k].converged);
    EXPECT_EQ(a[k].v, b[k].v);
  }
  ASSERT_TRUE(a[0].converged);
  EXPECT_EQ(a[0].v, log_map(*s, p, q).v);
}
