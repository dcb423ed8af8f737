#include "geodex/immersion.hpp"

#include <cmath>
#include <numbers>

#include "geodex/errors.hpp"
#include "geodex/weights_io.hpp"

namespace geodex {

DomainBox DomainBox::cube(int dim, double lo, double hi) {
  return {Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

bool DomainBox::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Eigen::VectorXd Immersion::map(const Eigen::VectorXd& x) const {
  if (x.size() != chart_dim()) throw ConfigError(name() + ": chart point has wrong dimension");
  std::vector<Jet> in;
  in.reserve(x.size());
  for (double v : x) in.emplace_back(v);
  const auto out = map(std::span<const Jet>(in));
  Eigen::VectorXd y(out.size());
  for (std::size_t a = 0; a < out.size(); ++a) y(static_cast<Eigen::Index>(a)) = out[a].value();
  return y;
}

std::vector<Jet> Immersion::jets(const Eigen::VectorXd& x, int order) const {
  if (x.size() != chart_dim()) throw ConfigError(name() + ": chart point has wrong dimension");
  const auto seeds = seed_variables(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), order);
  return map(std::span<const Jet>(seeds));
}

namespace {

class Euclidean final : public Immersion {
 public:
  explicit Euclidean(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxJetDim) throw ConfigError("euclidean dimension must lie in [1, 8]");
  }
  std::string name() const override { return "euclidean"; }
  int chart_dim() const override { return dim_; }
  int ambient_dim() const override { return dim_; }
  DomainBox domain() const override { return DomainBox::cube(dim_, -3.0, 3.0); }
  std::vector<Jet> map(std::span<const Jet> x) const override { return {x.begin(), x.end()}; }

 private:
  int dim_;
};

class Sphere final : public Immersion {
 public:
  explicit Sphere(double r) : r_(r) {
    if (!(r > 0.0)) throw ConfigError("sphere radius must be positive");
  }
  std::string name() const override { return "sphere"; }
  int chart_dim() const override { return 2; }
  int ambient_dim() const override { return 3; }
  DomainBox domain() const override {
    DomainBox box;
    box.lower = Eigen::Vector2d(0.05, -std::numbers::pi);
    box.upper = Eigen::Vector2d(std::numbers::pi - 0.05, std::numbers::pi);
    return box;
  }
  std::vector<Jet> map(std::span<const Jet> x) const override {
    const Jet st = sin(x[0]);
    return {r_ * st * cos(x[1]), r_ * st * sin(x[1]), r_ * cos(x[0])};
  }

 private:
  double r_;
};

class Peaks final : public Immersion {
 public:
  std::string name() const override { return "peaks"; }
  int chart_dim() const override { return 2; }
  int ambient_dim() const override { return 3; }
  DomainBox domain() const override { return DomainBox::cube(2, -3.0, 3.0); }
  std::vector<Jet> map(std::span<const Jet> x) const override { return {x[0], x[1], peaks_height(x[0], x[1])}; }
};

class Decoder final : public Immersion {
 public:
  Decoder(MlpNetwork net, std::string name, DomainBox domain)
      : net_(std::move(net)), name_(std::move(name)), domain_(std::move(domain)) {
    if (net_.input_dim() > kMaxJetDim) throw ConfigError("decoder latent dimension exceeds 8");
    if (net_.output_dim() < net_.input_dim()) throw ConfigError("decoder output must not be narrower than its input");
    if (domain_.dim() != net_.input_dim()) throw ConfigError("decoder domain does not match latent dimension");
  }
  std::string name() const override { return name_; }
  int chart_dim() const override { return net_.input_dim(); }
  int ambient_dim() const override { return net_.output_dim(); }
  DomainBox domain() const override { return domain_; }
  std::vector<Jet> map(std::span<const Jet> x) const override { return net_.forward(x); }

 private:
  MlpNetwork net_;
  std::string name_;
  DomainBox domain_;
};

}  // namespace

ImmersionPtr make_euclidean(int dim) { return std::make_shared<Euclidean>(dim); }
ImmersionPtr make_sphere(double radius) { return std::make_shared<Sphere>(radius); }
ImmersionPtr make_peaks() { return std::make_shared<Peaks>(); }

ImmersionPtr make_decoder(MlpNetwork net, std::string name, std::optional<DomainBox> domain) {
  const int d = net.input_dim();
  DomainBox box = domain ? *domain : DomainBox::cube(d, -1.0, 1.0);
  return std::make_shared<Decoder>(std::move(net), std::move(name), std::move(box));
}

ImmersionPtr load_decoder(const std::string& path) {
  WeightsFile file = read_weights(path);
  std::optional<DomainBox> domain;
  if (file.header && file.header->domain) domain = file.header->domain;
  return make_decoder(std::move(file.network), "decoder", domain);
}

}  // namespace geodex
