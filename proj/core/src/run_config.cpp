#include "geodex/run_config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geodex/csv.hpp"
#include "geodex/errors.hpp"

namespace geodex {
namespace {

using nlohmann::json;

// Reads an object's keys into fields, rejecting keys nobody claimed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ParseError("config section '" + name_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.push_back(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ParseError("config key '" + name_ + "." + key + "': " + e.what());
    }
  }

  const json* sub(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.push_back(key);
    return &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ParseError("unknown config key '" + (name_.empty() ? key : name_ + "." + key) + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::vector<std::string> seen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string manifold_id(const ManifoldSpec& spec) {
  if (spec.kind == "euclidean") return "euclidean(d=" + std::to_string(spec.dim) + ")";
  if (spec.kind == "sphere") return "sphere(r=" + format_double(spec.radius) + ")";
  if (spec.kind == "peaks") return "peaks";
  if (spec.kind == "decoder") return "decoder(" + spec.decoder_path + ")";
  throw ConfigError("unknown manifold '" + spec.kind + "' (expected euclidean, sphere, peaks or decoder)");
}

ImmersionPtr make_manifold(const ManifoldSpec& spec) {
  if (spec.kind == "euclidean") return make_euclidean(spec.dim);
  if (spec.kind == "sphere") {
    if (!(spec.radius > 0.0)) throw ConfigError("sphere radius must be positive");
    return make_sphere(spec.radius);
  }
  if (spec.kind == "peaks") return make_peaks();
  if (spec.kind == "decoder") {
    if (spec.decoder_path.empty()) throw ConfigError("decoder manifold needs a weights path");
    return load_decoder(spec.decoder_path);
  }
  throw ConfigError("unknown manifold '" + spec.kind + "' (expected euclidean, sphere, peaks or decoder)");
}

CurvatureClamp parse_clamp(const std::string& name) {
  if (name == "positive") return CurvatureClamp::kPositivePart;
  if (name == "absolute") return CurvatureClamp::kAbsolute;
  throw ConfigError("unknown curvature clamp '" + name + "' (expected positive or absolute)");
}

void apply_config_json(RunConfig& cfg, const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(root, "");
  if (const json* m = top.sub("manifold")) {
    Section s(*m, "manifold");
    s.get("kind", cfg.manifold.kind);
    s.get("dim", cfg.manifold.dim);
    s.get("radius", cfg.manifold.radius);
    s.get("decoder", cfg.manifold.decoder_path);
    s.finish();
  }
  if (const json* m = top.sub("domain")) {
    Section s(*m, "domain");
    std::vector<double> lo, hi;
    s.get("lower", lo);
    s.get("upper", hi);
    s.finish();
    if (lo.empty() || lo.size() != hi.size()) throw ParseError("domain needs lower and upper of equal length");
    cfg.domain = DomainBox{to_vector(lo), to_vector(hi)};
  }
  if (const json* m = top.sub("integrator")) {
    Section s(*m, "integrator");
    s.get("delta", cfg.integrator.step);
    s.get("omega", cfg.integrator.omega);
    s.get("order", cfg.integrator.order);
    s.get("drift_error", cfg.integrator.drift_error);
    s.get("drift_warning", cfg.integrator.drift_warning);
    s.finish();
  }
  if (const json* m = top.sub("solver")) {
    Section s(*m, "solver");
    s.get("tolerance", cfg.shooting.tolerance);
    s.get("max_iterations", cfg.shooting.max_iterations);
    s.get("seeds", cfg.seeds);
    s.get("fd_step", cfg.shooting.fd_step);
    s.get("max_halvings", cfg.shooting.max_halvings);
    s.finish();
  }
  if (const json* m = top.sub("mllm")) {
    Section s(*m, "mllm");
    s.get("ensemble", cfg.mllm.ensemble);
    s.get("steps", cfg.mllm.steps);
    s.get("learning_rate", cfg.mllm.learning_rate);
    s.get("grid", cfg.mllm.grid);
    s.get("hidden", cfg.mllm.hidden);
    s.finish();
  }
  if (const json* m = top.sub("eikonal")) {
    Section s(*m, "eikonal");
    s.get("epochs", cfg.eikonal.epochs_max);
    s.get("batch", cfg.eikonal.batch);
    s.get("learning_rate", cfg.eikonal.learning_rate);
    s.get("lambda", cfg.eikonal.lambda);
    s.get("alpha", cfg.eikonal.alpha);
    s.get("hidden", cfg.eikonal.hidden);
    s.get("window", cfg.eikonal.window);
    s.get("min_improvement", cfg.eikonal.min_improvement);
    s.get("curvature_sampling", cfg.eikonal.curvature_sampling);
    s.get("anchor_weight", cfg.eikonal.anchor_weight);
    s.get("anchor_radius", cfg.eikonal.anchor_radius);
    s.get("anchor_points", cfg.eikonal.anchor_points);
    s.finish();
  }
  if (const json* m = top.sub("sampler")) {
    Section s(*m, "sampler");
    s.get("chains", cfg.sampler.chains);
    s.get("steps_per_chain", cfg.sampler.steps_per_chain);
    s.get("burn_in", cfg.sampler.burn_in);
    s.get("thin", cfg.sampler.thin);
    s.get("sigma", cfg.sampler.proposal_sigma);
    s.get("alpha", cfg.sampler.alpha);
    s.finish();
  }
  top.get("alpha", cfg.alpha);
  if (root.contains("curvature_clamp")) {
    std::string name;
    top.get("curvature_clamp", name);
    try {
      cfg.clamp = parse_clamp(name);
    } catch (const ConfigError& e) {
      throw ParseError(e.what());
    }
    cfg.sampler.clamp = cfg.clamp;
    cfg.eikonal.clamp = cfg.clamp;
  }
  top.get("grid", cfg.grid);
  if (root.contains("seed")) {
    std::uint64_t seed = 0;
    top.get("seed", seed);
    cfg.seed = seed;
  }
  top.get("output", cfg.output);
  top.finish();
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_json(cfg, ss.str());
}

DomainBox resolve_domain(const RunConfig& cfg, const Immersion& im) {
  if (!cfg.domain) return im.domain();
  if (cfg.domain->dim() != im.chart_dim()) throw ConfigError("domain box does not match the chart dimension");
  return *cfg.domain;
}

}  // namespace geodex
