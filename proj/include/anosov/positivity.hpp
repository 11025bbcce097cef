#pragma once

// theta-positivity in SO(p,q), p < q: the block forms Q, J, K, positive
// unipotents for theta = {alpha_1, ..., alpha_{p-1}}, positive triples and
// the directness margins of their flags.

#include "anosov/errors.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace anosov {

struct PositivityContext {
  int p = 0, q = 0, d = 0;
  Eigen::MatrixXd Q;  // [[0, 0, kK], [0, J, 0], [k(-1)^p K, 0, 0]], k = (-1)^(p+1)
  Eigen::MatrixXd J;  // (q-p+2) square, signature (1, q-p+1)
  Eigen::MatrixXd K;  // (p-1) square antidiagonal, entries (-1)^(i-1)

  /// Validates 2 <= p < q and the signature of Q.
  PositivityContext(int p, int q);

  int cone_dim() const { return q - p + 2; }
  /// q_J(v) = v^T J v / 2.
  double qj(const Eigen::VectorXd& v) const { return 0.5 * v.dot(J * v); }
  /// v in the open cone: q_J(v) > 0 and v_1 > 0.
  bool in_cone(const Eigen::VectorXd& v) const;
  /// Reduced expression (s_1 s_2 ... s_{p-1})^{p-1} of the longest element
  /// of W(theta) (type B_{p-1}); entries are root indices 1..p-1.
  std::vector<int> reduced_expression() const;
};

/// exp(v) for v in c_{alpha_i}: i <= p-2 takes a scalar (entries v at
/// (i, i+1) and (d-i, d-i+1), 1-based); i = p-1 takes a vector of size
/// q-p+2. ConeViolation when the parameter is outside the open cone
/// (unless check is false).
Eigen::MatrixXd positive_unipotent(const PositivityContext& ctx, int i, double t, bool check = true);
Eigen::MatrixXd positive_unipotent(const PositivityContext& ctx, const Eigen::VectorXd& v,
                                   bool check = true);

struct PositiveParameters {
  std::vector<double> scalars;            // one per occurrence of a root index <= p-2
  std::vector<Eigen::VectorXd> vectors;   // one per occurrence of p-1
};

/// All scalars 1; cone vectors (c, 0, ..., 0, c') with q_J = 1.
PositiveParameters unit_parameters(const PositivityContext& ctx);
PositiveParameters random_parameters(const PositivityContext& ctx, std::mt19937_64& rng);
PositiveParameters scale_parameters(const PositiveParameters& par, double c);

struct PositiveTriple {
  Eigen::MatrixXd s;                // product over the reduced expression
  Eigen::MatrixXd f1, f2, f3;       // full flags as bases (column prefixes)
  std::vector<double> coefficient;  // alpha_{d-k} of s e_{d-k+1}, k = 1..p-2
  std::vector<double> expected;     // sum of the parameters with i_t = k
  std::vector<double> margins;      // |det| of the stacked unit frames, k = 1..p-2
  std::vector<double> margins_det;  // same determinant from the coefficient route
};

PositiveTriple positive_triple(const PositivityContext& ctx, const PositiveParameters& par);

/// ||M^T Q M - Q||_max.
double form_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q);
/// ||(M - I)^d||_max after scaling M - I to unit max entry.
double unipotency_residual(const Eigen::MatrixXd& m);

}  // namespace anosov
