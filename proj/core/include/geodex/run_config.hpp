#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "geodex/eikonal.hpp"
#include "geodex/immersion.hpp"
#include "geodex/integrator.hpp"
#include "geodex/mllm.hpp"
#include "geodex/sampling.hpp"
#include "geodex/shooting.hpp"

namespace geodex {

struct ManifoldSpec {
  std::string kind = "euclidean";  // euclidean | sphere | peaks | decoder
  int dim = 2;
  double radius = 1.0;
  std::string decoder_path;
};

/// Stable identifier recorded in weights headers, e.g. "sphere(r=1)".
std::string manifold_id(const ManifoldSpec& spec);
ImmersionPtr make_manifold(const ManifoldSpec& spec);

/// Everything a command can be configured with. Defaults: step 1e-3,
/// omega 1e-2, order 4, lambda 1e-3, alpha 0.1, learning rate 3e-4,
/// batch 20000, domain [-3, 3]^2 for the flat and peaks charts.
struct RunConfig {
  ManifoldSpec manifold;
  std::optional<DomainBox> domain;  // the manifold's own box when empty
  IntegratorConfig integrator;
  ShootingConfig shooting;
  int seeds = 1;
  MllmConfig mllm;
  EikonalTrainConfig eikonal;
  MhConfig sampler;
  double alpha = 0.1;
  /// Treatment of negative curvature in psi for every command.
  CurvatureClamp clamp = CurvatureClamp::kPositivePart;
  int grid = 41;
  std::optional<std::uint64_t> seed;
  std::string output;  // empty writes to stdout
};

/// Overrides fields present in a JSON object:
///
///   {"manifold": {"kind", "dim", "radius", "decoder"},
///    "domain": {"lower": [...], "upper": [...]},
///    "integrator": {"delta", "omega", "order", "drift_error", "drift_warning"},
///    "solver": {"tolerance", "max_iterations", "seeds", "fd_step", "max_halvings"},
///    "mllm": {"ensemble", "steps", "learning_rate", "grid", "hidden"},
///    "eikonal": {"epochs", "batch", "learning_rate", "lambda", "alpha", "hidden",
///                "window", "min_improvement", "curvature_sampling",
///                "anchor_weight", "anchor_radius", "anchor_points"},
///    "sampler": {"chains", "steps_per_chain", "burn_in", "thin", "sigma", "alpha"},
///    "alpha", "curvature_clamp", "grid", "seed", "output"}
///
/// "curvature_clamp" is "positive" (the default) or "absolute".
///
/// Unknown keys and wrong types raise ParseError.
void apply_config_json(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

/// "positive" or "absolute"; anything else is a ConfigError.
CurvatureClamp parse_clamp(const std::string& name);

DomainBox resolve_domain(const RunConfig& cfg, const Immersion& im);

}  // namespace geodex
