#pragma once

#include <Eigen/Dense>

namespace geodex {

/// Adam with bias-corrected moments.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate = 3e-4, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  long steps() const noexcept { return t_; }
  double learning_rate() const noexcept { return lr_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

}  // namespace geodex
