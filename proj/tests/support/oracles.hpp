#pragma once

// Independent reference computations for the tests: finite differences on
// plain double functions and closed forms for the built-in charts.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <unistd.h>

namespace oracle {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::VectorXd unit(int d, int i) { return Eigen::VectorXd::Unit(d, i); }

// Nested central differences D_i D_j ... f with step h; `idx` lists the
// differentiation directions (1 to 3 of them).
inline double nested_central(const ScalarFn& f, const Eigen::VectorXd& x, const std::vector<int>& idx, double h) {
  const int n = static_cast<int>(idx.size());
  const auto d = static_cast<int>(x.size());
  double sum = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Eigen::VectorXd y = x;
    double sign = 1.0;
    for (int t = 0; t < n; ++t) {
      const bool plus = (mask >> t) & 1;
      y += (plus ? h : -h) * unit(d, idx[static_cast<std::size_t>(t)]);
      if (!plus) sign = -sign;
    }
    sum += sign * f(y);
  }
  return sum / std::pow(2.0 * h, n);
}

// One Richardson step on nested central differences: O(h^4) error.
inline double derivative(const ScalarFn& f, const Eigen::VectorXd& x, const std::vector<int>& idx, double h = 1e-2) {
  const double coarse = nested_central(f, x, idx, h);
  const double fine = nested_central(f, x, idx, h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

inline Eigen::VectorXd gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h = 1e-2) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) g(i) = derivative(f, x, {i}, h);
  return g;
}

inline Eigen::MatrixXd hessian(const ScalarFn& f, const Eigen::VectorXd& x, double h = 1e-2) {
  const auto d = x.size();
  Eigen::MatrixXd H(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) H(i, j) = derivative(f, x, {i, j}, h);
  }
  return H;
}

// Jacobian J(a, i) = d f_a / d x_i.
inline Eigen::MatrixXd jacobian(const VectorFn& f, const Eigen::VectorXd& x, double h = 1e-3) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    for (int a = 0; a < f0.size(); ++a) {
      J(a, i) = derivative([&](const Eigen::VectorXd& y) { return f(y)(a); }, x, {i}, h);
    }
  }
  return J;
}

// Pullback metric from a finite-difference Jacobian.
inline Eigen::MatrixXd metric_fd(const VectorFn& immersion, const Eigen::VectorXd& x, double h = 1e-3) {
  const Eigen::MatrixXd J = jacobian(immersion, x, h);
  return J.transpose() * J;
}

// Gamma^k_ij = g^kl (d_i g_jl + d_j g_il - d_l g_ij) / 2 with every metric
// derivative taken by differences of metric samples.
inline double christoffel_fd(const VectorFn& immersion, const Eigen::VectorXd& x, int k, int i, int j,
                             double h = 1e-3) {
  const auto d = static_cast<int>(x.size());
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) {
    const Eigen::MatrixXd gp = metric_fd(immersion, x + h * unit(d, m));
    const Eigen::MatrixXd gm = metric_fd(immersion, x - h * unit(d, m));
    const Eigen::MatrixXd gp2 = metric_fd(immersion, x + 0.5 * h * unit(d, m));
    const Eigen::MatrixXd gm2 = metric_fd(immersion, x - 0.5 * h * unit(d, m));
    dg[static_cast<std::size_t>(m)] = (4.0 * (gp2 - gm2) / h - (gp - gm) / (2.0 * h)) / 3.0;
  }
  const Eigen::MatrixXd ginv = metric_fd(immersion, x).inverse();
  double s = 0.0;
  for (int l = 0; l < d; ++l) {
    s += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  }
  return s;
}

// Plain-double peaks height, written out independently of the library.
inline double peaks(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
         std::exp(-(x + 1.0) * (x + 1.0) - y * y) / 3.0;
}

inline double peaks_v(const Eigen::VectorXd& p) { return peaks(p(0), p(1)); }

// Ricci scalar of a graph surface: 2 K with K = det(Hess f) / (1 + |grad f|^2)^2.
inline double graph_scalar_curvature(const ScalarFn& f, const Eigen::VectorXd& p) {
  const Eigen::VectorXd g = gradient(f, p);
  const Eigen::MatrixXd H = hessian(f, p);
  const double w = 1.0 + g.squaredNorm();
  return 2.0 * H.determinant() / (w * w);
}

// Round sphere of radius r in (theta, phi).
inline Eigen::VectorXd sphere_map(const Eigen::VectorXd& c, double r = 1.0) {
  Eigen::VectorXd y(3);
  y << r * std::sin(c(0)) * std::cos(c(1)), r * std::sin(c(0)) * std::sin(c(1)), r * std::cos(c(0));
  return y;
}

// Great-circle distance between two (theta, phi) points on the unit sphere.
inline double central_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::cos(a(0)) * std::cos(b(0)) + std::sin(a(0)) * std::sin(b(0)) * std::cos(a(1) - b(1));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline Eigen::VectorXd uniform_point(std::mt19937_64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(lo.size());
  for (int i = 0; i < lo.size(); ++i) x(i) = lo(i) + u(rng) * (hi(i) - lo(i));
  return x;
}

// |a - b| <= tol * max(1, |b|)
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("geodex_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace oracle
