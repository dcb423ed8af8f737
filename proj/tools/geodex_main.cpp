// geodex: command-line front end for the geometry library.
//
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure,
// 4 non-convergence, 1 unexpected internal error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geodex/csv.hpp"
#include "geodex/curvature.hpp"
#include "geodex/curves.hpp"
#include "geodex/eikonal.hpp"
#include "geodex/errors.hpp"
#include "geodex/integrator.hpp"
#include "geodex/metric.hpp"
#include "geodex/mllm.hpp"
#include "geodex/run_config.hpp"
#include "geodex/sampling.hpp"
#include "geodex/shooting.hpp"
#include "geodex/weights_io.hpp"

namespace {

using geodex::CsvWriter;
using geodex::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNoConvergence = 4;

/// Flags shared by every subcommand. Unset flags leave the config-file or
/// default value in place.
struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> manifold;
  std::optional<int> dim;
  std::optional<double> radius;
  std::optional<std::string> decoder;
  std::optional<std::vector<double>> domain;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<double> omega;
  std::optional<int> order;
  std::optional<std::string> clamp;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; explicit flags override it");
  cmd->add_option("--manifold", f.manifold, "euclidean | sphere | peaks | decoder");
  cmd->add_option("--dim", f.dim, "chart dimension of the euclidean manifold");
  cmd->add_option("--radius", f.radius, "sphere radius");
  cmd->add_option("--decoder", f.decoder, "weights file of a decoder manifold");
  cmd->add_option("--domain", f.domain, "chart box as lo1,hi1,lo2,hi2,...")->delimiter(',');
  cmd->add_option("-o,--output", f.output, "output CSV path (default stdout)");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--curvature-clamp", f.clamp, "negative curvature in psi: positive | absolute");
}

void add_integrator(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--delta", f.delta, "integration step");
  cmd->add_option("--omega", f.omega, "binding strength of the doubled phase space");
  cmd->add_option("--order", f.order, "even integrator order >= 2");
}

RunConfig build_config(const CommonFlags& f) {
  RunConfig cfg;
  if (f.config) geodex::apply_config_file(cfg, *f.config);
  if (f.manifold) cfg.manifold.kind = *f.manifold;
  if (f.dim) cfg.manifold.dim = *f.dim;
  if (f.radius) cfg.manifold.radius = *f.radius;
  if (f.decoder) cfg.manifold.decoder_path = *f.decoder;
  if (f.domain) {
    const auto& v = *f.domain;
    if (v.empty() || v.size() % 2 != 0) throw geodex::ConfigError("--domain needs lo,hi pairs");
    const auto d = static_cast<Eigen::Index>(v.size() / 2);
    geodex::DomainBox box{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    for (Eigen::Index i = 0; i < d; ++i) {
      box.lower(i) = v[static_cast<std::size_t>(2 * i)];
      box.upper(i) = v[static_cast<std::size_t>(2 * i + 1)];
    }
    cfg.domain = box;
  }
  if (f.output) cfg.output = *f.output;
  if (f.seed) cfg.seed = *f.seed;
  if (f.delta) cfg.integrator.step = *f.delta;
  if (f.omega) cfg.integrator.omega = *f.omega;
  if (f.order) cfg.integrator.order = *f.order;
  if (f.clamp) {
    cfg.clamp = geodex::parse_clamp(*f.clamp);
    cfg.sampler.clamp = cfg.clamp;
    cfg.eikonal.clamp = cfg.clamp;
  }
  return cfg;
}

std::uint64_t require_seed(const RunConfig& cfg, const char* command) {
  if (!cfg.seed) throw geodex::ConfigError(std::string(command) + " requires --seed");
  return *cfg.seed;
}

Eigen::VectorXd to_point(const std::vector<double>& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw geodex::ConfigError(std::string(what) + " has " + std::to_string(v.size()) + " coordinates, the chart has " +
                              std::to_string(dim));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

std::vector<std::string> indexed(const std::string& prefix, int d) {
  std::vector<std::string> names;
  for (int i = 1; i <= d; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

std::vector<std::string> coordinate_names(int d) {
  if (d == 2) return {"x", "y"};
  return indexed("x", d);
}

/// Buffers output and writes it to the configured destination at the end.
class Output {
 public:
  explicit Output(std::string path) : path_(std::move(path)) {}
  std::ostream& stream() { return buffer_; }
  void commit() {
    if (path_.empty() || path_ == "-") {
      std::cout << buffer_.str() << std::flush;
      return;
    }
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw geodex::ConfigError("cannot write '" + path_ + "'");
    out << buffer_.str();
  }

 private:
  std::string path_;
  std::ostringstream buffer_;
};

void write_path(std::ostream& os, const geodex::GeodesicPath& path, int d) {
  std::vector<std::string> header{"lambda"};
  for (auto& n : indexed("q", d)) header.push_back(n);
  for (auto& n : indexed("p", d)) header.push_back(n);
  header.push_back("H");
  CsvWriter csv(os, header);
  std::vector<double> row(header.size());
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    std::size_t c = 0;
    row[c++] = path.lambdas[k];
    for (int i = 0; i < d; ++i) row[c++] = path.states[k].q(i);
    for (int i = 0; i < d; ++i) row[c++] = path.states[k].p(i);
    row[c++] = path.energies[k];
    csv.row(row);
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------- commands

int run_shoot(const RunConfig& cfg, const std::vector<double>& p_in, const std::vector<double>& v_in) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const int d = im->chart_dim();
  const Eigen::VectorXd p = to_point(p_in, d, "--p");
  const Eigen::VectorXd v = to_point(v_in, d, "--v");
  const auto path = geodex::exp_map(*im, p, v, cfg.integrator);
  print_warnings(path.warnings);
  Output out(cfg.output);
  write_path(out.stream(), path, d);
  out.commit();
  std::cerr << "relative H drift " << path.relative_drift() << '\n';
  return kExitOk;
}

int run_connect(const RunConfig& cfg, const std::vector<double>& p_in, const std::vector<double>& q_in,
                const std::string& report_path) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const int d = im->chart_dim();
  const Eigen::VectorXd p = to_point(p_in, d, "--p");
  const Eigen::VectorXd q = to_point(q_in, d, "--q");
  geodex::ShootingConfig sc = cfg.shooting;
  sc.integrator = cfg.integrator;
  auto solves = geodex::log_map_multi(*im, p, q, sc, cfg.seeds, cfg.seed.value_or(0));
  const auto report = geodex::summarize_solves(*im, p, q, std::move(solves));

  std::ostringstream rep;
  {
    std::vector<std::string> header{"seed", "converged", "iterations", "residual_norm", "length"};
    for (auto& n : indexed("v", d)) header.push_back(n);
    CsvWriter csv(rep, header);
    for (std::size_t s = 0; s < report.solves.size(); ++s) {
      const auto& r = report.solves[s];
      std::vector<double> row{static_cast<double>(s), r.converged ? 1.0 : 0.0, static_cast<double>(r.iterations),
                              r.residual_norm, report.lengths[s]};
      for (int i = 0; i < d; ++i) row.push_back(r.v.size() == d ? r.v(i) : std::nan(""));
      csv.row(row);
    }
  }
  if (report_path.empty()) {
    std::cerr << rep.str();
  } else {
    Output r(report_path);
    r.stream() << rep.str();
    r.commit();
  }
  for (std::size_t s = 0; s < report.solves.size(); ++s) {
    const auto& r = report.solves[s];
    if (!r.converged) std::cerr << "seed " << s << ": " << geodex::to_string(r.status) << ": " << r.message << '\n';
  }

  const int ok = report.converged_count();
  const int total = static_cast<int>(report.solves.size());
  if (ok == 0) {
    std::cerr << "no geodesic found: 0 of " << total << " seeds converged\n";
    return kExitNoConvergence;
  }
  const auto& best = report.solves[static_cast<std::size_t>(report.best_seed)];
  print_warnings(best.path.warnings);
  Output out(cfg.output);
  write_path(out.stream(), best.path, d);
  out.commit();
  std::cerr << "distance " << geodex::format_double(report.distance) << " (seed " << report.best_seed << "), " << ok
            << " of " << total << " seeds converged\n";
  return ok == total ? kExitOk : kExitNoConvergence;
}

int run_compare(const RunConfig& cfg, const std::vector<double>& p_in, const std::vector<double>& q_in) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const int d = im->chart_dim();
  const Eigen::VectorXd p = to_point(p_in, d, "--p");
  const Eigen::VectorXd q = to_point(q_in, d, "--q");
  geodex::MllmConfig mc = cfg.mllm;
  mc.seed = require_seed(cfg, "compare");

  geodex::ShootingConfig sc = cfg.shooting;
  sc.integrator = cfg.integrator;
  const auto shot = geodex::log_map(*im, p, q, sc);
  if (!shot.converged) {
    std::cerr << "shooting failed: " << shot.message << '\n';
    return kExitNoConvergence;
  }
  const auto& path = shot.path;
  const int rows = static_cast<int>(path.states.size());
  const auto linear = geodex::linear_interpolation(p, q, rows);
  const auto linear_e = geodex::energy_profile(*im, linear);
  const auto mllm = geodex::train_mllm(*im, p, q, mc);
  const auto curve = mllm.best.as_curve();
  const auto mllm_samples = geodex::sample_curve(curve, rows);
  const auto mllm_e = geodex::energy_profile(*im, curve, rows);
  const auto sym_e = geodex::energy_profile(path);

  std::vector<std::string> header{"lambda"};
  for (const char* name : {"linear", "mllm", "symplectic"}) {
    for (int i = 1; i <= d; ++i) header.push_back(std::string(name) + "_q" + std::to_string(i));
    header.push_back(std::string(name) + "_E");
  }
  Output out(cfg.output);
  CsvWriter csv(out.stream(), header);
  std::vector<double> row;
  for (int k = 0; k < rows; ++k) {
    row.clear();
    row.push_back(path.lambdas[static_cast<std::size_t>(k)]);
    for (int i = 0; i < d; ++i) row.push_back(linear.samples[static_cast<std::size_t>(k)](i));
    row.push_back(linear_e[static_cast<std::size_t>(k)]);
    for (int i = 0; i < d; ++i) row.push_back(mllm_samples.samples[static_cast<std::size_t>(k)](i));
    row.push_back(mllm_e[static_cast<std::size_t>(k)]);
    for (int i = 0; i < d; ++i) row.push_back(path.states[static_cast<std::size_t>(k)].q(i));
    row.push_back(sym_e[static_cast<std::size_t>(k)]);
    csv.row(row);
  }
  out.commit();

  std::cerr << "length: linear " << geodex::curve_length(*im, linear) << ", mllm " << mllm.length << ", symplectic "
            << geodex::curve_length(*im, path) << '\n'
            << "energy variance: linear " << geodex::profile_variance(linear_e) << ", mllm "
            << geodex::profile_variance(mllm_e) << ", symplectic " << geodex::profile_variance(sym_e) << '\n';
  for (std::size_t m = 0; m < mllm.members.size(); ++m) {
    if (mllm.members[m].failed) std::cerr << "mllm member " << m << " failed: " << mllm.members[m].message << '\n';
  }
  return kExitOk;
}

int run_curvature_field(const RunConfig& cfg) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const auto box = geodex::resolve_domain(cfg, *im);
  Output out(cfg.output);
  CsvWriter csv(out.stream(), {"x", "y", "R", "psi", "MF"});
  for (const auto& x : geodex::grid_points(box, cfg.grid)) {
    const double r = geodex::scalar_curvature(*im, x);
    csv.row({x(0), x(1), r, geodex::psi(r, cfg.alpha, cfg.clamp), geodex::magnification_factor(*im, x)});
  }
  out.commit();
  return kExitOk;
}

int run_sample_curvature(RunConfig cfg) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const auto box = geodex::resolve_domain(cfg, *im);
  cfg.sampler.seed = require_seed(cfg, "sample-curvature");
  const auto samples = geodex::mh_sample(*im, box, cfg.sampler);
  const int d = im->chart_dim();
  std::vector<std::string> header = coordinate_names(d);
  header.push_back("R");
  header.push_back("psi");
  Output out(cfg.output);
  CsvWriter csv(out.stream(), header);
  std::vector<double> row;
  for (const auto& x : samples.points) {
    row.assign(x.data(), x.data() + x.size());
    const double r = geodex::scalar_curvature(*im, x);
    row.push_back(r);
    row.push_back(geodex::psi(r, cfg.sampler.alpha, cfg.sampler.clamp));
    csv.row(row);
  }
  out.commit();
  std::cerr << samples.points.size() << " samples, acceptance rate " << samples.acceptance_rate;
  if (!samples.gelman_rubin.empty()) {
    std::cerr << ", potential scale reduction";
    for (double r : samples.gelman_rubin) std::cerr << ' ' << r;
  }
  std::cerr << '\n';
  return kExitOk;
}

void check_header_manifold(const geodex::WeightsFile& file, const std::string& expected) {
  if (!file.header) throw geodex::ConfigError("weights file has no field header");
  if (file.header->manifold != expected) {
    throw geodex::ConfigError("weights were trained on '" + file.header->manifold + "', not on '" + expected + "'");
  }
}

geodex::DistanceField field_from_file(const geodex::WeightsFile& file) {
  const auto& h = *file.header;
  if (!h.source || !h.standardisation) throw geodex::ConfigError("field header lacks source or standardisation");
  return geodex::DistanceField(*h.source, file.network, *h.standardisation);
}

struct TrainFlags {
  std::optional<std::vector<double>> source;
  std::string weights;
  std::optional<std::string> resume;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> learning_rate;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> anchor_weight;
  std::optional<double> anchor_radius;
  bool uniform_only = false;
  bool verbose = false;
};

int run_train_eikonal(RunConfig cfg, const TrainFlags& f) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const int d = im->chart_dim();
  const std::string id = geodex::manifold_id(cfg.manifold);
  geodex::EikonalTrainConfig tc = cfg.eikonal;
  tc.seed = require_seed(cfg, "train-eikonal");
  tc.sampler = cfg.sampler;
  if (f.epochs) tc.epochs_max = *f.epochs;
  if (f.batch) tc.batch = *f.batch;
  if (f.learning_rate) tc.learning_rate = *f.learning_rate;
  if (f.lambda) tc.lambda = *f.lambda;
  if (f.alpha) tc.alpha = *f.alpha;
  if (f.anchor_weight) tc.anchor_weight = *f.anchor_weight;
  if (f.anchor_radius) tc.anchor_radius = *f.anchor_radius;
  if (f.uniform_only) tc.curvature_sampling = false;

  std::optional<geodex::DistanceField> init;
  std::optional<double> checkpoint;
  geodex::DomainBox box = geodex::resolve_domain(cfg, *im);
  if (f.resume) {
    const auto file = geodex::read_weights(*f.resume);
    check_header_manifold(file, id);
    init = field_from_file(file);
    checkpoint = file.header->checkpoint_loss;
    if (file.header->domain) box = *file.header->domain;
  }
  Eigen::VectorXd source;
  if (f.source) {
    source = to_point(*f.source, d, "--source");
  } else if (init) {
    source = init->source_point();
  } else {
    throw geodex::ConfigError("train-eikonal requires --source");
  }

  geodex::EikonalProgress progress;
  if (f.verbose) {
    progress = [](const geodex::EikonalEpoch& e) {
      if (e.epoch % 100 == 0) {
        std::cerr << "epoch " << e.epoch << " loss " << e.total << " anchor " << e.anchor_term << '\n';
      }
    };
  }
  const auto result = geodex::train_distance_field(*im, source, box, tc, init, progress);
  print_warnings(result.warnings);
  if (checkpoint) {
    const double rel = std::abs(result.initial_probe_loss - *checkpoint) / std::max(std::abs(*checkpoint), 1e-300);
    std::cerr << "resumed at probe loss " << result.initial_probe_loss << " (checkpoint " << *checkpoint
              << ", relative difference " << rel << ")\n";
    if (rel > 0.01) throw geodex::NumericError("resumed field does not reproduce the checkpoint loss");
  }

  geodex::WeightsFile file;
  file.network = result.field.network();
  geodex::FieldHeader header;
  header.manifold = id;
  header.source = source;
  header.domain = box;
  header.standardisation = result.field.standardisation();
  header.checkpoint_loss = result.probe_loss;
  file.header = header;
  geodex::write_weights(f.weights, file);

  Output out(cfg.output);
  CsvWriter csv(out.stream(), {"epoch", "total", "eikonal", "flow", "anchor", "objective"});
  for (const auto& e : result.history) {
    csv.row({static_cast<double>(e.epoch), e.total, e.eikonal_term, e.flow_term, e.anchor_term, e.objective});
  }
  out.commit();
  std::cerr << result.history.size() << " epochs, " << (result.converged ? "converged" : "epoch limit reached")
            << ", probe loss " << result.probe_loss << '\n';
  return kExitOk;
}

int run_eval_field(const RunConfig& cfg, const std::string& weights, const std::vector<std::vector<double>>& points,
                   bool grid_given) {
  const auto im = geodex::make_manifold(cfg.manifold);
  const int d = im->chart_dim();
  const auto file = geodex::read_weights(weights);
  check_header_manifold(file, geodex::manifold_id(cfg.manifold));
  const auto field = field_from_file(file);
  if (field.source_point().size() != d) throw geodex::ConfigError("field dimension does not match the manifold");

  std::vector<Eigen::VectorXd> xs;
  if (!points.empty() && !grid_given) {
    for (const auto& p : points) xs.push_back(to_point(p, d, "--point"));
  } else {
    geodex::DomainBox box = file.header->domain ? *file.header->domain : im->domain();
    if (cfg.domain) box = geodex::resolve_domain(cfg, *im);
    xs = geodex::grid_points(box, cfg.grid);
  }

  std::vector<std::string> header = coordinate_names(d);
  header.push_back("phi");
  for (auto& n : indexed("v", d)) header.push_back(n);
  header.push_back("eps");
  Output out(cfg.output);
  CsvWriter csv(out.stream(), header);
  std::vector<double> row;
  for (const auto& x : xs) {
    const Eigen::VectorXd v = geodex::geodesic_flow(*im, field, x);
    const Eigen::MatrixXd g = geodex::induced_metric(*im, x).g;
    row.assign(x.data(), x.data() + x.size());
    row.push_back(field.value(x));
    for (int i = 0; i < d; ++i) row.push_back(v(i));
    row.push_back(v.dot(g * v) - 1.0);
    csv.row(row);
  }
  out.commit();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodex: geodesics, curvature and distance fields on immersed manifolds"};
  app.require_subcommand(1);

  CommonFlags shoot_f, connect_f, compare_f, field_f, sample_f, train_f, eval_f;
  std::vector<double> p, q, v;

  auto* shoot = app.add_subcommand("shoot", "integrate the geodesic from p with initial velocity v");
  add_common(shoot, shoot_f);
  add_integrator(shoot, shoot_f);
  shoot->add_option("--p", p, "start point")->required()->delimiter(',');
  shoot->add_option("--v", v, "initial contravariant velocity")->required()->delimiter(',');

  std::optional<int> seeds;
  std::optional<double> tolerance;
  std::optional<int> max_iterations;
  std::string report_path;
  auto* connect = app.add_subcommand("connect", "shoot for the geodesic from p to q");
  add_common(connect, connect_f);
  add_integrator(connect, connect_f);
  connect->add_option("--p", p, "start point")->required()->delimiter(',');
  connect->add_option("--q", q, "end point")->required()->delimiter(',');
  connect->add_option("--seeds", seeds, "number of shooting seeds");
  connect->add_option("--tolerance", tolerance, "residual tolerance");
  connect->add_option("--max-iterations", max_iterations, "Newton iteration limit");
  connect->add_option("--report", report_path, "per-seed report CSV (default stderr)");

  std::optional<int> ensemble;
  std::optional<int> mllm_steps;
  auto* compare = app.add_subcommand("compare", "linear, ML-LM and symplectic curves between p and q");
  add_common(compare, compare_f);
  add_integrator(compare, compare_f);
  compare->add_option("--p", p, "start point")->required()->delimiter(',');
  compare->add_option("--q", q, "end point")->required()->delimiter(',');
  compare->add_option("--ensemble", ensemble, "ML-LM ensemble size");
  compare->add_option("--steps", mllm_steps, "Adam steps per ML-LM member");

  std::optional<int> grid;
  std::optional<double> alpha;
  auto* field = app.add_subcommand("curvature-field", "Ricci scalar, psi and magnification factor on a grid");
  add_common(field, field_f);
  field->add_option("--grid", grid, "points per axis");
  field->add_option("--alpha", alpha, "psi scaling");

  std::optional<int> chains, burn_in, steps_per_chain, thin;
  std::optional<double> sigma;
  auto* sample = app.add_subcommand("sample-curvature", "Metropolis-Hastings draws weighted by psi(R)");
  add_common(sample, sample_f);
  sample->add_option("--chains", chains, "number of chains");
  sample->add_option("--burn-in", burn_in, "discarded steps per chain");
  sample->add_option("--steps-per-chain", steps_per_chain, "total steps per chain");
  sample->add_option("--thin", thin, "keep every n-th post-burn-in state");
  sample->add_option("--sigma", sigma, "proposal standard deviation");
  sample->add_option("--alpha", alpha, "psi scaling of the target");

  TrainFlags tf;
  auto* train = app.add_subcommand("train-eikonal", "train a neural distance field from a source point");
  add_common(train, train_f);
  train->add_option("--source", tf.source, "source point")->delimiter(',');
  train->add_option("--weights", tf.weights, "output weights file")->required();
  train->add_option("--resume", tf.resume, "continue from a weights file");
  train->add_option("--epochs", tf.epochs, "maximum epochs");
  train->add_option("--batch", tf.batch, "samples per epoch");
  train->add_option("--lr", tf.learning_rate, "Adam learning rate");
  train->add_option("--lambda", tf.lambda, "flow residual weight");
  train->add_option("--alpha", tf.alpha, "curvature scaling of the loss");
  train->add_option("--anchor-weight", tf.anchor_weight, "weight of the source ring anchor (0 disables)");
  train->add_option("--anchor-radius", tf.anchor_radius, "geodesic radius of the anchor ring");
  train->add_flag("--uniform-only", tf.uniform_only, "draw every batch point uniformly");
  train->add_flag("--verbose", tf.verbose, "print progress every 100 epochs");

  std::string weights;
  std::vector<std::vector<double>> points;
  auto* eval = app.add_subcommand("eval-field", "evaluate a trained field on a grid or at points");
  add_common(eval, eval_f);
  eval->add_option("--weights", weights, "weights file")->required();
  eval->add_option("--grid", grid, "points per axis (default)");
  eval->add_option("--point", points, "evaluation point, repeatable")->delimiter(',')->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (shoot->parsed()) return run_shoot(build_config(shoot_f), p, v);
    if (connect->parsed()) {
      RunConfig cfg = build_config(connect_f);
      if (seeds) cfg.seeds = *seeds;
      if (tolerance) cfg.shooting.tolerance = *tolerance;
      if (max_iterations) cfg.shooting.max_iterations = *max_iterations;
      return run_connect(cfg, p, q, report_path);
    }
    if (compare->parsed()) {
      RunConfig cfg = build_config(compare_f);
      if (ensemble) cfg.mllm.ensemble = *ensemble;
      if (mllm_steps) cfg.mllm.steps = *mllm_steps;
      return run_compare(cfg, p, q);
    }
    if (field->parsed()) {
      RunConfig cfg = build_config(field_f);
      if (grid) cfg.grid = *grid;
      if (alpha) cfg.alpha = *alpha;
      return run_curvature_field(cfg);
    }
    if (sample->parsed()) {
      RunConfig cfg = build_config(sample_f);
      if (chains) cfg.sampler.chains = *chains;
      if (burn_in) cfg.sampler.burn_in = *burn_in;
      if (steps_per_chain) cfg.sampler.steps_per_chain = *steps_per_chain;
      if (thin) cfg.sampler.thin = *thin;
      if (sigma) cfg.sampler.proposal_sigma = *sigma;
      if (alpha) cfg.sampler.alpha = *alpha;
      return run_sample_curvature(cfg);
    }
    if (train->parsed()) return run_train_eikonal(build_config(train_f), tf);
    if (eval->parsed()) {
      RunConfig cfg = build_config(eval_f);
      if (grid) cfg.grid = *grid;
      return run_eval_field(cfg, weights, points, grid.has_value());
    }
  } catch (const geodex::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const geodex::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const geodex::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
