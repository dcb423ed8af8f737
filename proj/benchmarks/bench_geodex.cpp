#include <vector>

#include <benchmark/benchmark.h>

#include "geodex/curvature.hpp"
#include "geodex/eikonal.hpp"
#include "geodex/hamiltonian.hpp"
#include "geodex/immersion.hpp"
#include "geodex/integrator.hpp"
#include "geodex/jet.hpp"
#include "geodex/metric.hpp"
#include "geodex/mlp.hpp"
#include "geodex/shooting.hpp"

using namespace geodex;

namespace {

void BM_PeaksJets(benchmark::State& state) {
  const auto im = make_peaks();
  const Eigen::Vector2d x(0.3, -0.7);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(im->jets(x, order));
}
BENCHMARK(BM_PeaksJets)->Arg(1)->Arg(2)->Arg(3);

void BM_NetworkJets(benchmark::State& state) {
  const std::vector<int> widths = {2, 64, 64, 64, 1};
  const MlpNetwork net = MlpNetwork::random(widths, Activation::kTanh, Activation::kIdentity, 1);
  const std::vector<double> x = {0.4, -1.1};
  const auto in = seed_variables(x, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(std::span<const Jet>(in)));
}
BENCHMARK(BM_NetworkJets);

void BM_Metric(benchmark::State& state) {
  const auto im = make_peaks();
  const Eigen::Vector2d x(0.3, -0.7);
  for (auto _ : state) benchmark::DoNotOptimize(induced_metric(*im, x));
}
BENCHMARK(BM_Metric);

void BM_ScalarCurvature(benchmark::State& state) {
  const auto im = make_peaks();
  const Eigen::Vector2d x(0.3, -0.7);
  for (auto _ : state) benchmark::DoNotOptimize(scalar_curvature(*im, x));
}
BENCHMARK(BM_ScalarCurvature);

void BM_TaoStep(benchmark::State& state) {
  const auto im = make_peaks();
  const Eigen::Vector2d q(0.3, -0.7);
  const auto s = ExtendedPhasePoint::from({q, lower_index(*im, q, Eigen::Vector2d(0.3, 0.8))});
  for (auto _ : state) benchmark::DoNotOptimize(tao_step_order2(*im, s, 1e-3, 1e-2));
}
BENCHMARK(BM_TaoStep);

void BM_ExpMap(benchmark::State& state) {
  const auto im = make_sphere(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(*im, Eigen::Vector2d(1.2, 0.0), Eigen::Vector2d(0.4, 0.8)));
}
BENCHMARK(BM_ExpMap)->Unit(benchmark::kMillisecond);

void BM_Shooting(benchmark::State& state) {
  const auto im = make_sphere(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(log_map(*im, Eigen::Vector2d(1.2, 0.0), Eigen::Vector2d(1.6, 0.8)));
}
BENCHMARK(BM_Shooting)->Unit(benchmark::kMillisecond);

void BM_EikonalLoss(benchmark::State& state) {
  const auto im = make_peaks();
  const std::vector<int> widths = {2, 64, 64, 64, 1};
  const DistanceField field(Eigen::Vector2d::Zero(),
                            MlpNetwork::random(widths, Activation::kTanh, Activation::kIdentity, 2),
                            Standardisation::for_box(im->domain()));
  const auto batch = grid_points(im->domain(), 20);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_scaled_loss(*im, field, batch, 1e-3, 0.1));
}
BENCHMARK(BM_EikonalLoss)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
