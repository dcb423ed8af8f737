#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace geodex {

inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetCoeffs = 1 + 8 + 36 + 120;

/// Position of the unique pair (i <= j) inside the second-order block.
constexpr int pair_index(int i, int j) noexcept { return j * (j + 1) / 2 + i; }

/// Position of the unique triple (i <= j <= k) inside the third-order block.
constexpr int triple_index(int i, int j, int k) noexcept {
  return k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i;
}

constexpr int coefficient_count(int dim, int order) noexcept {
  int n = 1;
  if (order >= 1) n += dim;
  if (order >= 2) n += dim * (dim + 1) / 2;
  if (order >= 3) n += dim * (dim + 1) * (dim + 2) / 6;
  return n;
}

/// Truncated multivariate Taylor expansion carrying partial derivatives up
/// to third order in at most eight seed variables.
///
/// Only the unique entries of the symmetric derivative tensors are stored:
/// value, then first partials, then second partials ordered by
/// pair_index, then third partials ordered by triple_index. Mixed partials
/// are therefore symmetric by construction.
///
/// A jet with dim() == 0 is a plain constant and combines with jets of any
/// dimension. Combining jets of different orders truncates to the lower
/// order.
class Jet {
 public:
  Jet() noexcept : dim_(0), order_(0), count_(1) { c_[0] = 0.0; }
  Jet(double value) noexcept : dim_(0), order_(0), count_(1) { c_[0] = value; }  // NOLINT

  Jet(const Jet& other) noexcept;
  Jet& operator=(const Jet& other) noexcept;

  static Jet constant(double value, int dim, int order);
  static Jet variable(double value, int index, int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  int size() const noexcept { return count_; }

  double value() const noexcept { return c_[0]; }
  double d(int i) const noexcept { return c_[1 + i]; }
  double d(int i, int j) const noexcept;
  double d(int i, int j, int k) const noexcept;

  std::span<const double> coefficients() const noexcept { return {c_.data(), static_cast<std::size_t>(count_)}; }
  std::span<double> coefficients() noexcept { return {c_.data(), static_cast<std::size_t>(count_)}; }

  /// Jet of the partial derivative along seed `i`, one order lower.
  Jet partial(int i) const;

  /// Same value and derivatives, truncated to `order`.
  Jet truncated(int order) const;

  /// this += scale * other, without a temporary.
  Jet& add_scaled(double scale, const Jet& other);

  /// h(this) given h and its first three derivatives at value().
  Jet compose(double h0, double h1, double h2, double h3) const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs) noexcept { c_[0] += rhs; return *this; }
  Jet& operator-=(double rhs) noexcept { c_[0] -= rhs; return *this; }
  Jet& operator*=(double rhs) noexcept;
  Jet& operator/=(double rhs);

  Jet operator-() const noexcept;

  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  Jet(int dim, int order) noexcept;

  std::uint8_t dim_;
  std::uint8_t order_;
  std::uint8_t count_;
  std::array<double, kMaxJetCoeffs> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double b);
Jet operator+(double a, Jet b);
Jet operator-(Jet a, double b);
Jet operator-(double a, const Jet& b);
Jet operator*(Jet a, double b);
Jet operator*(double a, Jet b);
Jet operator/(Jet a, double b);
Jet operator/(double a, const Jet& b);

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet tanh(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double exponent);
Jet abs(const Jet& x);
Jet reciprocal(const Jet& x);

using JetMap = std::function<std::vector<Jet>(std::span<const Jet>)>;

/// Seeds every coordinate of `point` as an independent variable and
/// evaluates `f`, returning one jet per output.
std::vector<Jet> evaluate_with_jets(const JetMap& f, std::span<const double> point, int order);

std::vector<Jet> seed_variables(std::span<const double> point, int order);

}  // namespace geodex
