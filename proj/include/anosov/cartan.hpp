#pragma once

// Pointwise flag geometry of PGL_d(R): Cartan projections, attractors,
// projective distance, Iwasawa cocycle, Gromov products, basins and the
// ellipsoid cover of a basin image.

#include "anosov/errors.hpp"
#include "anosov/representation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace anosov {

/// a(g) = (log s_1, ..., log s_d), nonincreasing, shifted to zero sum.
using CartanVector = Eigen::VectorXd;
/// p orthonormal columns in R^d.
using Frame = Eigen::MatrixXd;

/// log of the largest singular value, with power-of-two rescaling so that
/// entries of any finite magnitude are handled.
double log_top_singular(const Eigen::MatrixXd& m);

/// L(p) = log s_1(L^p M) for p = 1..levels; L(p) = s_1 + ... + s_p in log terms.
Eigen::VectorXd log_compound_norms(const Eigen::MatrixXd& m, int levels);

CartanVector cartan_project(const Eigen::MatrixXd& m);
/// Cartan vector from plain log singular values (JacobiSVD), for comparison.
CartanVector cartan_project_svd(const Eigen::MatrixXd& m);
/// Sorted vector of all p-fold sums of the coordinates of a.
Eigen::VectorXd p_sums(const Eigen::VectorXd& a, int p);

/// s_p / s_{p+1} of m (may be +inf).
double gap_ratio(const Eigen::MatrixXd& m, int p);
/// Top-p left singular frame U_p(m); NoGapError when s_p/s_{p+1} < 1 + 1e-10.
Frame attractor(const Eigen::MatrixXd& m, int p);

/// sin of the angle between two lines, ||v ^ w|| / (||v|| ||w||).
double proj_distance(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// log ||M x_1 ^ ... ^ M x_p|| for an orthonormal frame x.
double iwasawa(const Eigen::MatrixXd& m, const Frame& x);

/// -log |det [X W]| for orthonormal X (d x p) and W (d x (d-p)): minus the log
/// sine of the angle between the p-volume of X and the annihilator picture
/// of W in the p-th exterior power. NonTransverseError below 1e-10.
double gromov_product(const Frame& x, const Frame& w);
/// For full flags given as orthonormal bases (column prefixes are the flag
/// subspaces): one value per requested p, pairing x^p with y^{d-p}.
std::vector<double> gromov_products(const Eigen::MatrixXd& x_flag, const Eigen::MatrixXd& y_flag,
                                    const std::vector<int>& ps);

/// sin of the minimal angle between the line [x] and U_{d-1}(M^{-1}).
double basin_sine(const Eigen::MatrixXd& m, const Eigen::VectorXd& x);
bool basin_membership(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, double alpha);
/// (1/sin alpha) s_2/s_1 - d(U_1(M), M x); nonnegative for basin members.
double basin_contraction_slack(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, double alpha);
/// Uniform random unit vector in the basin B_{a_1, alpha}(M) (rejection).
Eigen::VectorXd sample_basin(const Eigen::MatrixXd& m, double alpha, std::mt19937_64& rng);

struct EllipsoidCover {
  Eigen::VectorXd center;     // u_1(M)
  Eigen::MatrixXd chart;      // columns u_2..u_d: chart coordinates c_i = <w,u_i>/<w,u_1>
  Eigen::VectorXd beta;       // beta_2..beta_d, beta_i = (1/sin alpha) s_i/s_1
  int p = 2;
  double radius = 0;          // sqrt(d) beta_p
  double count_bound = 0;     // 2^{2p} beta_2...beta_{p-1} / beta_p^{p-2}
  std::vector<std::int64_t> steps;  // grid points per chart axis

  double grid_count() const;
  /// Chart coordinates of [w].
  Eigen::VectorXd chart_coords(const Eigen::VectorXd& w) const;
  /// Nearest grid ball center, in chart coordinates.
  Eigen::VectorXd nearest_center(const Eigen::VectorXd& c) const;
  /// All centers (ConfigError when more than `limit`).
  std::vector<Eigen::VectorXd> centers(std::size_t limit = 1000000) const;
};

EllipsoidCover ellipsoid_cover(const Eigen::MatrixXd& m, double alpha, int p);

struct CoverAudit {
  std::size_t samples = 0;
  double max_ellipsoid = 0;   // max of sum (c_i / beta_i)^2, must stay < 1
  double max_ball_ratio = 0;  // max distance to nearest center / radius, must stay <= 1
};
/// Samples basin points, maps them by M and checks ellipsoid and ball
/// membership; AssertionFailure if any sample escapes.
CoverAudit cover_audit(const EllipsoidCover& cover, const Eigen::MatrixXd& m, double alpha,
                       std::size_t samples, std::mt19937_64& rng);

/// Cartan vector of a word image, computed by propagating compounds letter by
/// letter (accurate far beyond the range of a single SVD).
CartanVector cartan_of_word(const Representation& rep, const Word& w);

/// Log compound norms along a depth-first traversal. The compound images
/// of each word are propagated multiplicatively from the parent, so L(p) of
/// long products never comes from minors of an ill-conditioned matrix.
class CartanTracker {
 public:
  /// levels: how many L(p) to track (d-1 gives full Cartan vectors).
  /// By default the top singular value of each compound is refined by power
  /// iteration from the parent's top singular vector; exact = true uses a
  /// full symmetric eigensolve at every node instead.
  CartanTracker(const Representation& rep, int max_depth, int levels = -1, bool exact = false);

  int dim() const { return d_; }
  int levels() const { return levels_; }
  /// Sets depth n to (depth n-1) * image(x) and updates L at depth n.
  void push(int depth, Letter x);
  /// L(1..levels) at a depth (depth 0 is the identity).
  const Eigen::VectorXd& log_norms(int depth) const { return logs_[static_cast<std::size_t>(depth)]; }
  /// Zero-sum Cartan vector at a depth; requires levels == d-1.
  CartanVector cartan(int depth) const;
  /// Writes the Cartan vector into out (size d) without allocating.
  void cartan_into(int depth, double* out) const;
  /// Current (scaled) matrix of the p-th compound at a depth; the true
  /// compound is this times 2^exponent(depth, p).
  const Eigen::MatrixXd& compound(int depth, int p) const;
  std::int64_t exponent(int depth, int p) const;

 private:
  double power_top(const Eigen::MatrixXd& c, const Eigen::VectorXd& start, Eigen::VectorXd& u,
                   std::size_t level);

  int d_, levels_, max_depth_;
  bool exact_;
  std::vector<std::vector<Eigen::VectorXd>> vec_;      // [depth][p-1] top left singular vectors
  std::vector<Eigen::VectorXd> scratch_;
  std::vector<std::vector<Eigen::MatrixXd>> gen_;      // [letter][p-1]
  std::vector<std::vector<Eigen::MatrixXd>> cur_;      // [depth][p-1]
  std::vector<std::vector<std::int64_t>> exp_;         // [depth][p-1]
  std::vector<Eigen::VectorXd> logs_;                  // [depth]
  std::vector<Eigen::MatrixXd> gram_;                  // scratch per level
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solver_;
};

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
double top_eigenvalue_psd(const Eigen::MatrixXd& g,
                          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>* solver = nullptr);

}  // namespace anosov
