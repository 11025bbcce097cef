#include "anosov/cartan.hpp"

#include "anosov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace anosov {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Scales m by a power of two so that its largest entry lies in [0.5, 1);
// returns the exponent removed.
int rescale(Eigen::MatrixXd& m) {
  const double mx = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(mx)) throw OverflowError("non-finite matrix entry in Cartan computation");
  if (mx == 0.0) return 0;
  int e = 0;
  std::frexp(mx, &e);
  if (e != 0) m *= std::ldexp(1.0, -e);
  return e;
}

}  // namespace

double top_eigenvalue_psd(const Eigen::MatrixXd& g,
                          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>* solver) {
  const Eigen::Index n = g.rows();
  if (n == 1) return g(0, 0);
  if (n == 2) {
    const double a = g(0, 0), b = g(0, 1), c = g(1, 1);
    return 0.5 * (a + c + std::hypot(a - c, 2 * b));
  }
  if (n == 3) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(Eigen::Matrix3d(g), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(2);
  }
  if (solver) {
    solver->compute(g, Eigen::EigenvaluesOnly);
    return solver->eigenvalues()(n - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(n - 1);
}

double log_top_singular(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = m;
  const int e = rescale(s);
  const double lam = top_eigenvalue_psd(s.transpose() * s);
  if (!(lam > 0)) throw OverflowError("zero matrix in log_top_singular");
  return 0.5 * std::log(lam) + e * kLn2;
}

Eigen::VectorXd log_compound_norms(const Eigen::MatrixXd& m, int levels) {
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd out(levels);
  Eigen::MatrixXd s = m;
  const int e = rescale(s);
  if (d > 8) {
    // Compounds are too large here; fall back to singular values of the
    // rescaled matrix.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
    double acc = 0;
    for (int p = 1; p <= levels; ++p) {
      acc += std::log(svd.singularValues()(p - 1)) + e * kLn2;
      out(p - 1) = acc;
    }
    return out;
  }
  for (int p = 1; p <= levels; ++p) out(p - 1) = log_top_singular(compound_matrix(s, p)) + p * e * kLn2;
  return out;
}

CartanVector cartan_project(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d) throw ConfigError("cartan_project needs a square matrix");
  Eigen::VectorXd l = log_compound_norms(m, d);
  CartanVector a(d);
  double prev = 0;
  for (int i = 0; i < d; ++i) {
    a(i) = l(i) - prev;
    prev = l(i);
  }
  a.array() -= a.mean();
  return a;
}

CartanVector cartan_project_svd(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = m;
  const int e = rescale(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
  CartanVector a = svd.singularValues().array().log() + e * kLn2;
  a.array() -= a.mean();
  return a;
}

Eigen::VectorXd p_sums(const Eigen::VectorXd& a, int p) {
  const auto idx = subsets(static_cast<int>(a.size()), p);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double s = 0;
    for (int i : idx[k]) s += a(i);
    out(static_cast<Eigen::Index>(k)) = s;
  }
  std::sort(out.data(), out.data() + out.size(), std::greater<double>());
  return out;
}

double gap_ratio(const Eigen::MatrixXd& m, int p) {
  const CartanVector a = cartan_project(m);
  return std::exp(a(p - 1) - a(p));
}

Frame attractor(const Eigen::MatrixXd& m, int p) {
  const int d = static_cast<int>(m.rows());
  if (p < 1 || p > d) throw ConfigError("attractor index out of range");
  if (p == d) return Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd s = m;
  rescale(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (!(sv(p - 1) >= (1.0 + 1e-10) * sv(p)))
    throw NoGapError("no index-" + std::to_string(p) + " gap (s_p/s_{p+1} = " +
                     std::to_string(sv(p) > 0 ? sv(p - 1) / sv(p) : INFINITY) + ")");
  Frame u = svd.matrixU().leftCols(p);
  if (p == 1) {
    Eigen::VectorXd v = u.col(0);
    sign_canonicalize(v);
    u.col(0) = v;
  }
  return u;
}

double proj_distance(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  const double nv = v.norm(), nw = w.norm();
  if (nv == 0 || nw == 0) throw ConfigError("proj_distance of a zero vector");
  const Eigen::VectorXd vu = v / nv, wu = w / nw;
  const Eigen::VectorXd perp = wu - vu.dot(wu) * vu;
  return std::min(1.0, perp.norm());
}

double iwasawa(const Eigen::MatrixXd& m, const Frame& x) {
  Eigen::MatrixXd mx = m * x;
  const int e = rescale(mx);
  return log_wedge_norm(mx) + static_cast<double>(x.cols()) * e * kLn2;
}

double gromov_product(const Frame& x, const Frame& w) {
  const Eigen::Index d = x.rows();
  if (w.rows() != d || x.cols() + w.cols() != d) throw ConfigError("gromov_product shape mismatch");
  Eigen::MatrixXd s(d, d);
  s << x, w;
  const double det = std::abs(s.determinant());
  if (!(det > 1e-10)) throw NonTransverseError("flags are not transverse");
  return -std::log(det);
}

std::vector<double> gromov_products(const Eigen::MatrixXd& x_flag, const Eigen::MatrixXd& y_flag,
                                    const std::vector<int>& ps) {
  const int d = static_cast<int>(x_flag.rows());
  std::vector<double> out;
  for (int p : ps) {
    if (p < 1 || p >= d) throw ConfigError("gromov_products index out of range");
    out.push_back(gromov_product(x_flag.leftCols(p), y_flag.leftCols(d - p)));
  }
  return out;
}

namespace {

Eigen::VectorXd top_right_singular(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = m;
  rescale(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
  return svd.matrixV().col(0);
}

}  // namespace

double basin_sine(const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  return std::abs(top_right_singular(m).dot(x.normalized()));
}

bool basin_membership(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, double alpha) {
  if (!(alpha > 0 && alpha <= M_PI / 2)) throw ConfigError("basin angle must lie in (0, pi/2]");
  return basin_sine(m, x) > std::sin(alpha);
}

double basin_contraction_slack(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, double alpha) {
  const CartanVector a = cartan_project(m);
  const Frame u = attractor(m, 1);
  return std::exp(a(1) - a(0)) / std::sin(alpha) - proj_distance(u.col(0), m * x);
}

Eigen::VectorXd sample_basin(const Eigen::MatrixXd& m, double alpha, std::mt19937_64& rng) {
  const Eigen::VectorXd v1 = top_right_singular(m);
  const double sa = std::sin(alpha);
  std::normal_distribution<double> n(0.0, 1.0);
  const int d = static_cast<int>(m.rows());
  for (int tries = 0; tries < 10000000; ++tries) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = n(rng);
    x.normalize();
    if (std::abs(x.dot(v1)) > sa) return x;
  }
  throw AssertionFailure("basin sampling failed");
}

// ---------------------------------------------------------------------------

double EllipsoidCover::grid_count() const {
  double c = 1;
  for (auto s : steps) c *= static_cast<double>(s);
  return c;
}

Eigen::VectorXd EllipsoidCover::chart_coords(const Eigen::VectorXd& w) const {
  return chart.transpose() * w / center.dot(w);
}

Eigen::VectorXd EllipsoidCover::nearest_center(const Eigen::VectorXd& c) const {
  const double bp = beta(p - 2);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const auto n = steps[static_cast<std::size_t>(i)];
    if (n <= 1 && i >= p - 2) continue;
    // Centers -beta_i + beta_p (2k + 1), k = 0..n-1.
    double k = std::floor((c(i) + beta(i)) / (2 * bp));
    k = std::clamp(k, 0.0, static_cast<double>(n - 1));
    out(i) = -beta(i) + bp * (2 * k + 1);
  }
  return out;
}

std::vector<Eigen::VectorXd> EllipsoidCover::centers(std::size_t limit) const {
  if (grid_count() > static_cast<double>(limit)) throw ConfigError("too many cover centers");
  const double bp = beta(p - 2);
  std::vector<Eigen::VectorXd> out;
  std::vector<std::int64_t> k(steps.size(), 0);
  while (true) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(steps.size()));
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (static_cast<int>(i) < p - 2) c(static_cast<Eigen::Index>(i)) = -beta(static_cast<Eigen::Index>(i)) + bp * (2.0 * k[i] + 1);
    out.push_back(c);
    std::size_t i = 0;
    while (i < k.size() && ++k[i] >= steps[i]) k[i++] = 0;
    if (i == k.size()) break;
  }
  return out;
}

EllipsoidCover ellipsoid_cover(const Eigen::MatrixXd& m, double alpha, int p) {
  const int d = static_cast<int>(m.rows());
  if (p < 2 || p > d) throw ConfigError("ellipsoid_cover needs p in [2, d]");
  if (!(alpha > 0 && alpha <= M_PI / 2)) throw ConfigError("basin angle must lie in (0, pi/2]");
  Eigen::MatrixXd s = m;
  rescale(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullU);
  const CartanVector a = cartan_project(m);
  EllipsoidCover c;
  c.p = p;
  c.center = svd.matrixU().col(0);
  c.chart = svd.matrixU().rightCols(d - 1);
  c.beta.resize(d - 1);
  for (int i = 1; i < d; ++i) c.beta(i - 1) = std::exp(a(i) - a(0)) / std::sin(alpha);
  const double bp = c.beta(p - 2);
  c.radius = std::sqrt(static_cast<double>(d)) * bp;
  double prod = std::pow(2.0, 2 * p);
  for (int i = 0; i < p - 2; ++i) prod *= c.beta(i) / bp;
  c.count_bound = prod;
  c.steps.assign(static_cast<std::size_t>(d - 1), 1);
  for (int i = 0; i < p - 2; ++i)
    c.steps[static_cast<std::size_t>(i)] =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c.beta(i) / bp - 1e-12)));
  if (c.grid_count() > c.count_bound * (1 + 1e-12))
    throw AssertionFailure("cover grid exceeds its count bound");
  return c;
}

CoverAudit cover_audit(const EllipsoidCover& cover, const Eigen::MatrixXd& m, double alpha,
                       std::size_t samples, std::mt19937_64& rng) {
  CoverAudit r;
  r.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const Eigen::VectorXd x = sample_basin(m, alpha, rng);
    const Eigen::VectorXd w = m * x;
    const Eigen::VectorXd c = cover.chart_coords(w);
    const double ell = (c.array() / cover.beta.array()).square().sum();
    const Eigen::VectorXd ctr = cover.nearest_center(c);
    const double dist = (c - ctr).norm();
    Eigen::VectorXd ctr_point = cover.center + cover.chart * ctr;
    const double pdist = proj_distance(ctr_point, w);
    r.max_ellipsoid = std::max(r.max_ellipsoid, ell);
    r.max_ball_ratio = std::max(r.max_ball_ratio, std::max(dist, pdist) / cover.radius);
  }
  if (!(r.max_ellipsoid < 1.0 + 1e-9) || !(r.max_ball_ratio <= 1.0 + 1e-9))
    throw AssertionFailure("ellipsoid cover audit failed");
  return r;
}

// ---------------------------------------------------------------------------

CartanTracker::CartanTracker(const Representation& rep, int max_depth, int levels, bool exact)
    : d_(rep.dim()), levels_(levels < 0 ? rep.dim() - 1 : levels), max_depth_(max_depth),
      exact_(exact) {
  if (levels_ > d_ - 1 || levels_ < 0) throw ConfigError("CartanTracker levels out of range");
  if (d_ > 12) throw DimensionError("CartanTracker supports d <= 12");
  const int nl = rep.spec().letters();
  gen_.resize(static_cast<std::size_t>(nl));
  for (int l = 0; l < nl; ++l)
    for (int p = 1; p <= levels_; ++p)
      gen_[static_cast<std::size_t>(l)].push_back(compound_matrix(rep.image(static_cast<Letter>(l)), p));
  cur_.resize(static_cast<std::size_t>(max_depth) + 1);
  exp_.assign(static_cast<std::size_t>(max_depth) + 1, std::vector<std::int64_t>(static_cast<std::size_t>(levels_), 0));
  logs_.assign(static_cast<std::size_t>(max_depth) + 1, Eigen::VectorXd::Zero(levels_));
  for (auto& level : cur_)
    for (int p = 1; p <= levels_; ++p) {
      const auto n = binomial(d_, p);
      level.push_back(Eigen::MatrixXd::Identity(n, n));
    }
  vec_.resize(static_cast<std::size_t>(max_depth) + 1);
  for (auto& level : vec_)
    for (int p = 1; p <= levels_; ++p) {
      const auto n = binomial(d_, p);
      level.push_back(Eigen::VectorXd::Unit(n, 0));
    }
  for (int p = 1; p <= levels_; ++p) {
    const auto n = binomial(d_, p);
    gram_.emplace_back(n, n);
    scratch_.emplace_back(n);
    solver_.emplace_back(static_cast<Eigen::Index>(n));
  }
}

void CartanTracker::push(int depth, Letter x) {
  const auto di = static_cast<std::size_t>(depth);
  for (int p = 0; p < levels_; ++p) {
    const auto pi = static_cast<std::size_t>(p);
    Eigen::MatrixXd& c = cur_[di][pi];
    c.noalias() = cur_[di - 1][pi] * gen_[x][pi];
    const double mx = c.cwiseAbs().maxCoeff();
    if (!std::isfinite(mx) || mx == 0.0) throw OverflowError("compound product out of range");
    int e = 0;
    std::frexp(mx, &e);
    if (e != 0) c *= std::ldexp(1.0, -e);
    exp_[di][pi] = exp_[di - 1][pi] + e;
    double lam = 0;
    Eigen::VectorXd& u = vec_[di][pi];
    if (exact_ || c.rows() <= 2 || depth == 1) {
      Eigen::MatrixXd& g = gram_[pi];
      g.noalias() = c * c.transpose();
      if (c.rows() <= 3 && !exact_ && depth > 1) {
        lam = top_eigenvalue_psd(g);
        u = vec_[di - 1][pi];
      } else {
        solver_[pi].compute(g);
        const Eigen::Index n = g.rows();
        lam = solver_[pi].eigenvalues()(n - 1);
        u = solver_[pi].eigenvectors().col(n - 1);
      }
    } else {
      lam = power_top(c, vec_[di - 1][pi], u, pi);
    }
    logs_[di](p) = 0.5 * std::log(lam) + static_cast<double>(exp_[di][pi]) * kLn2;
  }
}

double CartanTracker::power_top(const Eigen::MatrixXd& c, const Eigen::VectorXd& start,
                                Eigen::VectorXd& u, std::size_t level) {
  // Power iteration on C C^T warm-started from the parent's top left
  // singular vector; falls back to a full eigensolve if it stalls.
  Eigen::VectorXd& v = scratch_[level];
  u = start;
  v.noalias() = c.transpose() * u;
  double lam = v.squaredNorm();
  for (int it = 0; it < 60; ++it) {
    u.noalias() = c * v;
    const double nu = u.norm();
    if (!(nu > 0)) break;
    u /= nu;
    v.noalias() = c.transpose() * u;
    const double next = v.squaredNorm();
    if (next - lam <= 1e-15 * next) return std::max(lam, next);
    lam = next;
  }
  Eigen::MatrixXd& g = gram_[level];
  g.noalias() = c * c.transpose();
  solver_[level].compute(g);
  const Eigen::Index n = g.rows();
  u = solver_[level].eigenvectors().col(n - 1);
  return solver_[level].eigenvalues()(n - 1);
}

CartanVector CartanTracker::cartan(int depth) const {
  CartanVector a(d_);
  cartan_into(depth, a.data());
  return a;
}

void CartanTracker::cartan_into(int depth, double* out) const {
  if (levels_ != d_ - 1) throw ConfigError("full Cartan vectors need levels = d - 1");
  const Eigen::VectorXd& l = logs_[static_cast<std::size_t>(depth)];
  double prev = 0, sum = 0;
  for (int i = 0; i < d_; ++i) {
    const double li = i < d_ - 1 ? l(i) : 0.0;
    out[i] = li - prev;
    prev = li;
    sum += out[i];
  }
  const double mean = sum / d_;
  for (int i = 0; i < d_; ++i) out[i] -= mean;
}

const Eigen::MatrixXd& CartanTracker::compound(int depth, int p) const {
  return cur_[static_cast<std::size_t>(depth)][static_cast<std::size_t>(p - 1)];
}

std::int64_t CartanTracker::exponent(int depth, int p) const {
  return exp_[static_cast<std::size_t>(depth)][static_cast<std::size_t>(p - 1)];
}

CartanVector cartan_of_word(const Representation& rep, const Word& w) {
  if (w.empty()) return CartanVector::Zero(rep.dim());
  CartanTracker t(rep, static_cast<int>(w.size()), -1, true);
  for (std::size_t i = 0; i < w.size(); ++i) t.push(static_cast<int>(i + 1), w[i]);
  return t.cartan(static_cast<int>(w.size()));
}

}  // namespace anosov
