#pragma once

// Limit sets of projective Anosov representations: boundary samples from
// sphere attractors, box-counting dimension, Lipschitz diagnostics in affine
// charts, the p-Jacobian identity, hyperconvexity and H^{p,q} signatures.

#include "anosov/cartan.hpp"
#include "anosov/group.hpp"
#include "anosov/representation.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace anosov {

struct LimitSample {
  Eigen::VectorXd point;  // U_1(rho(gamma)), unit and sign-canonical
  Word word;
  double residual = 0;    // d(U_1(gamma), U_1(gamma')) for the prefix gamma'
};

struct BoundarySampleOptions {
  int threads = 1;
  Budget* budget = nullptr;
  std::size_t stride = 1;  // keep every stride-th sphere element of each shard
};

struct BoundarySample {
  int length = 0;
  std::vector<LimitSample> samples;
  std::uint64_t visited = 0;
  std::uint64_t no_gap = 0;  // elements skipped for s_1/s_2 < 1 + 1e-10
  double median_residual = 0;
};

BoundarySample boundary_sample(const Representation& rep, int length,
                               const BoundarySampleOptions& opt = {});

std::vector<Eigen::VectorXd> sample_points(const BoundarySample& s);

/// Isometric Veronese image of [v] (v v^T in an orthonormal basis of
/// symmetric matrices): ||ver(v) - ver(w)|| = sqrt(2) sin angle(v, w).
Eigen::VectorXd veronese(const Eigen::VectorXd& v);

struct BoxDimensionOptions {
  double eps_max = 0.1;
  double eps_min = 1e-6;
  int per_decade = 4;
  double saturation = 10;  // window stops once N(eps) > points / saturation
  double min_decades = 1.5;
  std::size_t min_points = 10000;
};

struct BoxDimension {
  std::vector<double> scales;
  std::vector<std::uint64_t> counts;
  std::size_t window_lo = 0, window_hi = 0;  // regression uses [lo, hi)
  double slope = 0;
  double std_error = 0;
  std::size_t points = 0;
};

/// Box counting on the Veronese image with cubes of side eps, a proxy for
/// Hausdorff dimension. EstimationError when fewer than min_points points
/// or when the usable window spans fewer than min_decades.
BoxDimension box_dimension(const std::vector<Eigen::VectorXd>& points,
                           const BoxDimensionOptions& opt = {});

/// Left endpoints of the level-`level` middle-thirds intervals of [0,1],
/// placed on the projective line as (cos(theta), sin(theta)) with theta = x * span.
std::vector<Eigen::VectorXd> cantor_points(int level, double span = 0.7853981633974483);

struct LipschitzOptions {
  int center = -1;          // sample index of the chart center; -1: nearest to the mean direction
  double radius = 0.3;      // neighbourhood of the chart center (sin-angle)
  double eps_max = 0.05;    // largest pair scale, in chart units
  int per_decade = 3;
  double slope_threshold = 0.25;
  std::size_t max_points = 200000;
  std::size_t min_points = 50;
};

struct LipschitzReport {
  std::vector<double> scales;
  std::vector<double> ratio;   // max transverse / base displacement at each scale
  double slope = 0;            // d log ratio / d log(1/eps)
  double growth_per_decade = 1;
  std::string verdict;         // "bounded" or "exploding"
  std::size_t points = 0;
  Eigen::VectorXd center;
};

/// Chart coordinates already split into base u and transverse w (rows).
LipschitzReport lipschitz_graph(const std::vector<double>& u, const Eigen::MatrixXd& w,
                                const LipschitzOptions& opt = {});
/// Affine chart about the sample closest to the mean direction; the base
/// axis is the chord of the local cloud.
LipschitzReport lipschitz_diagnostic(const std::vector<Eigen::VectorXd>& points,
                                     const LipschitzOptions& opt = {});

/// Omega_{l,V}(phi_1..phi_p) as a volume, for v spanning l and tangent images
/// phi_i(v) as columns.
double omega_volume(const Eigen::VectorXd& v, const Eigen::MatrixXd& phi_v);

struct JacobianTrial {
  double lhs = 0, rhs = 0, residual = 0;
};
/// Both sides of g^* Omega_{gl,gV} = exp(-J^u_p(B(g,(l,V)))) Omega_{l,V} for
/// one flag (first column of frame spans l; all p+1 columns span V).
JacobianTrial ps_jacobian_trial(const Eigen::MatrixXd& g, const Eigen::MatrixXd& frame);

struct JacobianReport {
  double max_residual = 0;
  int trials = 0;
  int resampled = 0;
};
/// Random g in SL_d with condition number at most 1e6 and random flags.
JacobianReport ps_jacobian_identity(int d, int p, int trials, std::uint64_t seed);

/// Sine of the smallest principal angle between span(x, y) and Z;
/// ConfigError when x and y (or x or y and span Z) coincide within 1e-8.
double directness_margin(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& z);

/// Flag of a boundary point along a seeded random ray: top-k attractor of
/// the ray prefix of the given length.
Eigen::MatrixXd ray_flag(const Representation& rep, std::uint64_t seed, int length, int k);

struct HyperconvexReport {
  int p = 2;
  std::vector<double> margins;
  double min_margin = 0;
  double median_margin = 0;
};
/// Directness of xi^1(x) + xi^1(y) + xi^{d-p}(z) over seeded random triples.
HyperconvexReport hyperconvex_check(const Representation& rep, int p, int triples,
                                    std::uint64_t seed, int ray_length = 14);

/// (positive, negative) eigenvalue counts of X^T Q X for orthonormalized X;
/// {-1, -1} when |det| is below tol relative to the spectrum.
std::pair<int, int> restricted_signature(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x,
                                         double tol = 1e-9);

struct SignatureReport {
  int triples = 0;
  int two_one = 0;
  int degenerate = 0;
  std::vector<std::pair<int, int>> signatures;
  double max_isotropy = 0;  // max |x^T Q x| over the sampled points
  double fraction() const { return triples - degenerate > 0 ? double(two_one) / (triples - degenerate) : 0.0; }
};
/// Q is oriented so that it has at most as many positive as negative
/// eigenvalues (signature (p, q) with p <= q). AssertionFailure when a
/// sampled point is not isotropic within 1e-6.
SignatureReport hpq_signature_check(const Representation& rep, const Eigen::MatrixXd& q,
                                    int triples, std::uint64_t seed, int ray_length = 14);
SignatureReport signature_of_triples(const Eigen::MatrixXd& q,
                                     const std::vector<std::array<Eigen::VectorXd, 3>>& triples);

/// Numerical rank (s_i / s_1 > tol) of the matrix with the points as columns.
int weak_irreducibility_rank(const std::vector<Eigen::VectorXd>& points, double tol = 1e-8);

}  // namespace anosov
