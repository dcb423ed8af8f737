#include "geodex/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "geodex/errors.hpp"

namespace geodex {
namespace {

int second_offset(int dim) { return 1 + dim; }
int third_offset(int dim) { return 1 + dim + dim * (dim + 1) / 2; }

void sort3(int& i, int& j, int& k) {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
}

struct Layout {
  int dim;
  int order;
};

// Merged layout for a binary operation. Constants (dim 0) adopt the other
// operand's layout; mismatched orders truncate to the lower one.
Layout merge(const Jet& a, const Jet& b) {
  if (b.dim() == 0) return {a.dim(), a.order()};
  if (a.dim() == 0) return {b.dim(), b.order()};
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
  }
  return {a.dim(), std::min(a.order(), b.order())};
}

void require_finite(const Jet& r, const char* primitive, double input) {
  for (double c : r.coefficients()) {
    if (!std::isfinite(c)) {
      throw DomainError(primitive, "non-finite result at argument " + std::to_string(input));
    }
  }
}

}  // namespace

Jet::Jet(int dim, int order) noexcept
    : dim_(static_cast<std::uint8_t>(dim)),
      order_(static_cast<std::uint8_t>(order)),
      count_(static_cast<std::uint8_t>(coefficient_count(dim, order))) {
  std::fill_n(c_.begin(), count_, 0.0);
}

Jet::Jet(const Jet& other) noexcept : dim_(other.dim_), order_(other.order_), count_(other.count_) {
  std::copy_n(other.c_.begin(), count_, c_.begin());
}

Jet& Jet::operator=(const Jet& other) noexcept {
  dim_ = other.dim_;
  order_ = other.order_;
  count_ = other.count_;
  std::copy_n(other.c_.begin(), count_, c_.begin());
  return *this;
}

Jet Jet::constant(double value, int dim, int order) {
  if (dim < 0 || dim > kMaxJetDim || order < 0 || order > kMaxJetOrder) {
    throw std::invalid_argument("jet layout out of range: dim " + std::to_string(dim) + ", order " +
                                std::to_string(order));
  }
  Jet j(dim, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(double value, int index, int dim, int order) {
  Jet j = constant(value, dim, order);
  if (index < 0 || index >= dim) throw std::invalid_argument("seed index out of range");
  if (order >= 1) j.c_[1 + index] = 1.0;
  return j;
}

double Jet::d(int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  return c_[second_offset(dim_) + pair_index(i, j)];
}

double Jet::d(int i, int j, int k) const noexcept {
  sort3(i, j, k);
  return c_[third_offset(dim_) + triple_index(i, j, k)];
}

Jet Jet::partial(int i) const {
  if (order_ == 0 || dim_ == 0) return Jet::constant(0.0, dim_, 0);
  Jet r(dim_, order_ - 1);
  r.c_[0] = d(i);
  if (r.order_ >= 1) {
    for (int j = 0; j < dim_; ++j) r.c_[1 + j] = d(i, j);
  }
  if (r.order_ >= 2) {
    const int off = second_offset(dim_);
    for (int b = 0; b < dim_; ++b) {
      for (int a = 0; a <= b; ++a) r.c_[off + pair_index(a, b)] = d(i, a, b);
    }
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(dim_, order);
  std::copy_n(c_.begin(), r.count_, r.c_.begin());
  return r;
}

Jet& Jet::add_scaled(double scale, const Jet& other) {
  if (other.dim_ == 0) {
    c_[0] += scale * other.c_[0];
    return *this;
  }
  const Layout l = merge(*this, other);
  if (dim_ == 0) {
    const double v = c_[0];
    *this = Jet(l.dim, l.order);
    c_[0] = v;
  } else if (order_ > l.order) {
    *this = truncated(l.order);
  }
  for (int n = 0; n < count_; ++n) c_[n] += scale * other.c_[n];
  return *this;
}

Jet Jet::compose(double h0, double h1, double h2, double h3) const {
  Jet r(dim_, order_);
  r.c_[0] = h0;
  const int d = dim_;
  if (order_ >= 1) {
    for (int i = 0; i < d; ++i) r.c_[1 + i] = h1 * c_[1 + i];
  }
  if (order_ >= 2) {
    const int o2 = second_offset(d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int n = o2 + pair_index(i, j);
        r.c_[n] = h2 * c_[1 + i] * c_[1 + j] + h1 * c_[n];
      }
    }
  }
  if (order_ >= 3) {
    const int o2 = second_offset(d);
    const int o3 = third_offset(d);
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
          const double ui = c_[1 + i], uj = c_[1 + j], uk = c_[1 + k];
          const double uij = c_[o2 + pair_index(i, j)];
          const double uik = c_[o2 + pair_index(i, k)];
          const double ujk = c_[o2 + pair_index(j, k)];
          const int n = o3 + triple_index(i, j, k);
          r.c_[n] = h3 * ui * uj * uk + h2 * (uij * uk + uik * uj + ujk * ui) + h1 * c_[n];
        }
      }
    }
  }
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (b.dim_ == 0) {
    Jet r = a;
    r *= b.c_[0];
    return r;
  }
  if (a.dim_ == 0) {
    Jet r = b;
    r *= a.c_[0];
    return r;
  }
  const Layout l = merge(a, b);
  Jet r(l.dim, l.order);
  const int d = l.dim;
  const double* x = a.c_.data();
  const double* y = b.c_.data();
  r.c_[0] = x[0] * y[0];
  if (l.order >= 1) {
    for (int i = 0; i < d; ++i) r.c_[1 + i] = x[1 + i] * y[0] + x[0] * y[1 + i];
  }
  if (l.order >= 2) {
    const int o2 = second_offset(d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int n = o2 + pair_index(i, j);
        r.c_[n] = x[n] * y[0] + x[1 + i] * y[1 + j] + x[1 + j] * y[1 + i] + x[0] * y[n];
      }
    }
  }
  if (l.order >= 3) {
    const int o2 = second_offset(d);
    const int o3 = third_offset(d);
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
          const int ij = o2 + pair_index(i, j);
          const int ik = o2 + pair_index(i, k);
          const int jk = o2 + pair_index(j, k);
          const int n = o3 + triple_index(i, j, k);
          r.c_[n] = x[n] * y[0] + x[ij] * y[1 + k] + x[ik] * y[1 + j] + x[jk] * y[1 + i] +
                    x[1 + i] * y[jk] + x[1 + j] * y[ik] + x[1 + k] * y[ij] + x[0] * y[n];
        }
      }
    }
  }
  return r;
}

Jet& Jet::operator+=(const Jet& rhs) { return add_scaled(1.0, rhs); }
Jet& Jet::operator-=(const Jet& rhs) { return add_scaled(-1.0, rhs); }

Jet& Jet::operator*=(const Jet& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet& Jet::operator/=(const Jet& rhs) {
  *this = *this * reciprocal(rhs);
  return *this;
}

Jet& Jet::operator*=(double rhs) noexcept {
  for (int n = 0; n < count_; ++n) c_[n] *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw DomainError("division", "division by zero");
  return *this *= (1.0 / rhs);
}

Jet Jet::operator-() const noexcept {
  Jet r = *this;
  for (int n = 0; n < r.count_; ++n) r.c_[n] = -r.c_[n];
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) {
  if (b.dim() == 0) {
    Jet r = a;
    return r /= b.value();
  }
  return a * reciprocal(b);
}
Jet operator+(Jet a, double b) { return a += b; }
Jet operator+(double a, Jet b) { return b += a; }
Jet operator-(Jet a, double b) { return a -= b; }
Jet operator-(double a, const Jet& b) {
  Jet r = -b;
  return r += a;
}
Jet operator*(Jet a, double b) { return a *= b; }
Jet operator*(double a, Jet b) { return b *= a; }
Jet operator/(Jet a, double b) { return a /= b; }
Jet operator/(double a, const Jet& b) { return reciprocal(b) *= a; }

Jet reciprocal(const Jet& x) {
  const double v = x.value();
  if (v == 0.0) throw DomainError("division", "reciprocal of zero");
  const double r = 1.0 / v;
  Jet out = x.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
  require_finite(out, "division", v);
  return out;
}

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  Jet out = x.compose(e, e, e, e);
  require_finite(out, "exp", x.value());
  return out;
}

Jet log(const Jet& x) {
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("log", "nonpositive argument " + std::to_string(v));
  const double r = 1.0 / v;
  Jet out = x.compose(std::log(v), r, -r * r, 2.0 * r * r * r);
  require_finite(out, "log", v);
  return out;
}

Jet tanh(const Jet& x) {
  const double t = std::tanh(x.value());
  const double h1 = 1.0 - t * t;
  return x.compose(t, h1, -2.0 * t * h1, (6.0 * t * t - 2.0) * h1);
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  return x.compose(s, c, -s, -c);
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  return x.compose(c, -s, -c, s);
}

Jet sqrt(const Jet& x) {
  const double v = x.value();
  if (v < 0.0 || (v == 0.0 && x.order() > 0 && x.dim() > 0)) {
    throw DomainError("sqrt", "argument " + std::to_string(v) + " outside differentiable domain");
  }
  const double s = std::sqrt(v);
  if (x.order() == 0 || x.dim() == 0) return x.compose(s, 0.0, 0.0, 0.0);
  Jet out = x.compose(s, 0.5 / s, -0.25 / (v * s), 0.375 / (v * v * s));
  require_finite(out, "sqrt", v);
  return out;
}

Jet pow(const Jet& x, double exponent) {
  const double v = x.value();
  const double n = exponent;
  const auto term = [v](double coeff, double power) { return coeff == 0.0 ? 0.0 : coeff * std::pow(v, power); };
  Jet out = x.compose(std::pow(v, n), term(n, n - 1.0), term(n * (n - 1.0), n - 2.0),
                      term(n * (n - 1.0) * (n - 2.0), n - 3.0));
  require_finite(out, "power", v);
  return out;
}

// At exactly zero the derivative is taken from the right.
Jet abs(const Jet& x) {
  const double s = x.value() < 0.0 ? -1.0 : 1.0;
  return x * s;
}

std::vector<Jet> seed_variables(std::span<const double> point, int order) {
  const int d = static_cast<int>(point.size());
  if (d > kMaxJetDim) throw std::invalid_argument("at most 8 seed variables are supported");
  std::vector<Jet> x;
  x.reserve(point.size());
  for (int i = 0; i < d; ++i) x.push_back(Jet::variable(point[i], i, d, order));
  return x;
}

std::vector<Jet> evaluate_with_jets(const JetMap& f, std::span<const double> point, int order) {
  const auto x = seed_variables(point, order);
  return f(x);
}

}  // namespace geodex
