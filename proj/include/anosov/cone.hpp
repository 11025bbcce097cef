#pragma once

// Limit cone samples, the dual-norm upper bound for critical exponents in
// the symmetric space, and the counting estimate of h^X.

#include "anosov/entropy.hpp"
#include "anosov/representation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace anosov {

struct ConeSample {
  Eigen::VectorXd direction;  // a(g) / |a(g)|
  Eigen::VectorXd jordan;     // normalized log-moduli of eigenvalues (empty unless requested)
  Word word;
  int length = 0;
};

struct ConeShell {
  int length = 0;
  std::uint64_t count = 0;
  Eigen::VectorXd mean;        // normalized mean direction
  double max_angle = 0;        // largest angle to the mean direction
  Eigen::VectorXd coord_min, coord_max;
};

struct ConeOptions {
  int max_len = 6;
  int threads = 1;
  Budget* budget = nullptr;
  bool jordan = false;
  std::size_t keep = 2000;  // samples kept from the last shell (evenly strided)
};

struct ConeSummary {
  std::vector<ConeShell> shells;    // lengths 1..max_len
  std::vector<ConeSample> samples;  // from the last shell
};

ConeSummary limit_cone_sample(const Representation& rep, const ConeOptions& opt);

/// Normalized Jordan direction of a matrix (sorted log |eigenvalue|, zero sum).
Eigen::VectorXd jordan_direction(const Eigen::MatrixXd& m);

/// Minimize ||phi||^*_X over conv{phi_j} + cone{beta_k}. Functionals and the
/// norm are written in an orthonormal basis of E: ||a||_X^2 = a^T N a and
/// ||phi||^* = sqrt(phi^T N^{-1} phi).
struct DualNormProblem {
  Eigen::MatrixXd norm;                  // N, k x k SPD
  std::vector<Eigen::VectorXd> generators;
  std::vector<Eigen::VectorXd> cone;     // generators of (E^+)^*
  std::vector<std::string> names;

  int dim() const { return static_cast<int>(norm.rows()); }
  double dual_norm(const Eigen::VectorXd& phi) const;
  void validate() const;
};

struct DualNormSolution {
  double value = 0;
  Eigen::VectorXd weights;     // on the generators, in the simplex
  Eigen::VectorXd cone_coeffs; // >= 0
  Eigen::VectorXd minimizer;   // phi in E^*
  int iterations = 0;
  bool converged = false;
};

DualNormSolution hx_upper_bound(const DualNormProblem& problem, std::uint64_t seed = 1,
                                int restarts = 10, int max_iter = 200000);

/// Minimal dual norm over conv{phi_j} alone, by exhaustive active sets.
DualNormSolution hull_min_norm(const DualNormProblem& problem);
/// Dual norm of the plain barycenter of the generators.
double barycenter_dual_norm(const DualNormProblem& problem);

/// Orthonormal basis of E inside R^d (columns): the zero-sum hyperplane for
/// SL_d, or span(e_i - e_{d+1-i}), i <= rank, for SO(p,q) with rank = p.
Eigen::MatrixXd sl_cartan_basis(int d);
Eigen::MatrixXd so_cartan_basis(int d, int rank);

/// ||a||_X^2 = c |a|^2 on R^d with c fixed so that the m-dimensional
/// irreducible SL_2 block (padded by zeros) has ||a|| equal to the
/// hyperbolic translation length: c = 12 / (m (m^2 - 1)).
Eigen::MatrixXd hyperbolic_norm(int d, int m);

/// Simple roots of SL_d (alpha_i = e_i - e_{i+1}) and of SO(p,q) with
/// rank r (alpha_i, i < r, and eps_r), as functionals on R^d.
std::vector<Eigen::VectorXd> sl_simple_roots(int d);
std::vector<Eigen::VectorXd> so_simple_roots(int d, int rank);

/// Restricts functionals and norm on R^d to the basis of E.
DualNormProblem make_problem(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& x_norm,
                             const std::vector<Eigen::VectorXd>& generators,
                             const std::vector<Eigen::VectorXd>& cone,
                             const std::vector<std::string>& names = {});

/// Abstract SO(p,q) problem in E = R^p: generators alpha_1..alpha_{p-2},
/// eps_{p-1}; norm normalized on the signature (p, p-1) block.
DualNormProblem so_positive_problem(int p);

/// Counting estimate of the exponent of Theta(a) = ||a||_X.
EntropyReport hx_estimate(const Representation& rep, const Eigen::MatrixXd& x_norm,
                          const EntropyOptions& opt);

}  // namespace anosov
