#pragma once

#include <Eigen/Dense>

#include "geodex/immersion.hpp"

namespace geodex {

/// Chart position and covariant conjugate momentum.
struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

/// Doubled phase space (q, p, x, y) of the extended Hamiltonian
/// H(q, y) + H(x, p) + omega * (|q - x|^2 + |p - y|^2) / 2.
struct ExtendedPhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  /// Copies start identical: x = q, y = p.
  static ExtendedPhasePoint from(const PhasePoint& s) { return {s.q, s.p, s.q, s.p}; }
  PhasePoint primary() const { return {q, p}; }
  /// max(|q - x|_inf, |p - y|_inf)
  double copy_gap() const;
};

/// H = g^ij p_i p_j / 2.
double hamiltonian(const Immersion& im, const PhasePoint& s);

struct HamiltonRhs {
  Eigen::VectorXd dq;  // g^ij p_j
  Eigen::VectorXd dp;  // -(1/2) g^jk_{,i} p_j p_k
};

HamiltonRhs hamilton_rhs(const Immersion& im, const PhasePoint& s);

/// Index lowering of a contravariant velocity: p_i = g_ij v^j.
Eigen::VectorXd lower_index(const Immersion& im, const Eigen::VectorXd& q, const Eigen::VectorXd& v);

}  // namespace geodex
