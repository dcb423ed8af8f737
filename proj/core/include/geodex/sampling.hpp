#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geodex/curvature.hpp"
#include "geodex/immersion.hpp"

namespace geodex {

struct MhConfig {
  int chains = 8;
  int steps_per_chain = 1125;  // including burn-in
  int burn_in = 500;
  int thin = 1;  // keep every thin-th post-burn-in state
  double proposal_sigma = 0.3;
  double alpha = 0.1;
  CurvatureClamp clamp = CurvatureClamp::kPositivePart;
  std::uint64_t seed = 0;
  /// Lowest acceptable acceptance rate.
  double min_acceptance = 0.01;

  int kept_per_chain() const;
};

struct SampleSet {
  std::vector<Eigen::VectorXd> points;  // chain-major
  std::vector<int> chain_ids;
  double acceptance_rate = 0.0;
  /// Potential scale reduction per coordinate; empty with a single chain.
  std::vector<double> gelman_rubin;
};

/// Unnormalised target weight, positive inside the box.
using TargetWeight = std::function<double(const Eigen::VectorXd&)>;

/// Random-walk Metropolis-Hastings with isotropic Gaussian proposals,
/// restricted to `box` (proposals outside are rejected). Chains start
/// uniformly in the box and run on independent streams derived from
/// cfg.seed; pooled output is ordered by chain.
SampleSet metropolis_hastings(const DomainBox& box, const TargetWeight& weight, const MhConfig& cfg);

/// Target psi(R; alpha) of the Ricci scalar of `im`.
SampleSet mh_sample(const Immersion& im, const DomainBox& box, const MhConfig& cfg);

/// Between/within-chain potential scale reduction for each coordinate.
std::vector<double> gelman_rubin(const std::vector<std::vector<Eigen::VectorXd>>& chains);

/// Gaussian product-kernel density estimate, optionally truncated to a box
/// and renormalised there.
struct DensityEstimate {
  std::vector<Eigen::VectorXd> centers;
  Eigen::VectorXd bandwidth;
  std::optional<DomainBox> box;
  /// Total kernel mass (inside the box when truncated) divided by the
  /// number of centers.
  double normalisation = 1.0;

  bool empty() const noexcept { return centers.empty(); }
};

/// Scott's rule: n^(-1/(d+4)) times the per-coordinate sample standard
/// deviation (1 where the deviation vanishes).
Eigen::VectorXd scott_bandwidth(const std::vector<Eigen::VectorXd>& samples);

DensityEstimate kde_fit(const std::vector<Eigen::VectorXd>& samples, std::optional<DomainBox> box = std::nullopt,
                        std::optional<Eigen::VectorXd> bandwidth = std::nullopt);

/// Zero outside the box of a truncated estimate.
double kde_pdf(const DensityEstimate& est, const Eigen::VectorXd& x);

/// Random center plus Gaussian jitter, redrawn until inside `box`.
Eigen::VectorXd kde_draw(const DensityEstimate& est, const DomainBox& box, std::mt19937_64& rng);

Eigen::VectorXd uniform_draw(const DomainBox& box, std::mt19937_64& rng);

/// floor(n/2) uniform draws followed by ceil(n/2) KDE draws. An empty
/// estimate falls back to n uniform draws and appends a warning.
std::vector<Eigen::VectorXd> training_sampler(const DomainBox& box, const DensityEstimate& est, int n,
                                              std::mt19937_64& rng, std::vector<std::string>* warnings = nullptr);

}  // namespace geodex
