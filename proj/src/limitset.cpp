#include "anosov/limitset.hpp"

#include "anosov/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_set>

namespace anosov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return kNaN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

struct LineFit {
  double slope = 0, se = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - my - f.slope * (x[i] - mx);
      ssr += e * e;
    }
    f.se = std::sqrt(ssr / (n - 2) / sxx);
  }
  return f;
}

// Top left singular vector and s_1/s_2 of a rescaled matrix.
bool top_line(const Eigen::MatrixXd& m, Eigen::VectorXd& u) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (!(sv(0) >= (1.0 + 1e-10) * sv(1))) return false;
  u = svd.matrixU().col(0);
  sign_canonicalize(u);
  return true;
}

struct ShardSamples {
  std::vector<LimitSample> samples;
  std::uint64_t visited = 0, no_gap = 0;
};

}  // namespace

BoundarySample boundary_sample(const Representation& rep, int length,
                               const BoundarySampleOptions& opt) {
  if (length < 1) throw ConfigError("boundary sample length must be >= 1");
  if (opt.stride < 1) throw ConfigError("stride must be >= 1");
  const GroupSpec& spec = rep.spec();
  const int shards = spec.letters();
  const int d = rep.dim();
  std::vector<ShardSamples> parts(static_cast<std::size_t>(shards));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    try {
      std::vector<Eigen::MatrixXd> mat(static_cast<std::size_t>(length) + 1, Eigen::MatrixXd::Identity(d, d));
      Eigen::VectorXd prev_u, u;
      bool prev_ok = false;
      for (int s = next++; s < shards; s = next++) {
        ShardSamples& out = parts[static_cast<std::size_t>(s)];
        std::size_t counter = 0;
        walk_shard(
            spec, static_cast<Letter>(s), length,
            [&](const Word& w) {
              const auto n = w.size();
              mat[n].noalias() = mat[n - 1] * rep.image(w.back());
              mat[n] /= mat[n].cwiseAbs().maxCoeff();
              if (static_cast<int>(n) == length - 1) prev_ok = top_line(mat[n], prev_u);
              if (static_cast<int>(n) < length) return true;
              ++out.visited;
              if (counter++ % opt.stride != 0) return false;
              if (!top_line(mat[n], u)) {
                ++out.no_gap;
                return false;
              }
              LimitSample ls;
              ls.point = u;
              ls.word = w;
              ls.residual = length == 1 || !prev_ok ? kNaN : proj_distance(u, prev_u);
              out.samples.push_back(std::move(ls));
              return false;
            },
            opt.budget);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      next = shards;
    }
  };
  const int nthreads = std::max(1, std::min(opt.threads, shards));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  BoundarySample res;
  res.length = length;
  std::vector<double> resid;
  for (auto& p : parts) {
    res.visited += p.visited;
    res.no_gap += p.no_gap;
    for (auto& s : p.samples) {
      resid.push_back(s.residual);
      res.samples.push_back(std::move(s));
    }
  }
  res.median_residual = median(std::move(resid));
  return res;
}

std::vector<Eigen::VectorXd> sample_points(const BoundarySample& s) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(s.samples.size());
  for (const auto& x : s.samples) out.push_back(x.point);
  return out;
}

Eigen::VectorXd veronese(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  const Eigen::VectorXd u = v.normalized();
  Eigen::VectorXd out(d * (d + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    out(k++) = u(i) * u(i);
    for (Eigen::Index j = i + 1; j < d; ++j) out(k++) = std::sqrt(2.0) * u(i) * u(j);
  }
  return out;
}

BoxDimension box_dimension(const std::vector<Eigen::VectorXd>& points, const BoxDimensionOptions& opt) {
  if (points.size() < opt.min_points)
    throw EstimationError("box dimension needs at least " + std::to_string(opt.min_points) +
                          " points, got " + std::to_string(points.size()));
  std::vector<Eigen::VectorXd> ver;
  ver.reserve(points.size());
  for (const auto& p : points) ver.push_back(veronese(p));
  BoxDimension out;
  out.points = points.size();
  const double limit = static_cast<double>(points.size()) / opt.saturation;
  std::unordered_set<std::uint64_t> cells;
  cells.reserve(points.size() * 2);
  for (int k = 0;; ++k) {
    const double eps = opt.eps_max * std::pow(10.0, -static_cast<double>(k) / opt.per_decade);
    if (eps < opt.eps_min * (1 - 1e-12)) break;
    cells.clear();
    for (const auto& x : ver) {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto c = static_cast<std::int64_t>(std::floor(x(i) / eps));
        std::uint64_t z = static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h ^= z ^ (z >> 31);
      }
      cells.insert(h);
    }
    out.scales.push_back(eps);
    out.counts.push_back(cells.size());
    if (static_cast<double>(cells.size()) > limit) break;
  }
  out.window_lo = 0;
  out.window_hi = out.counts.size();
  while (out.window_hi > 0 && static_cast<double>(out.counts[out.window_hi - 1]) > limit) --out.window_hi;
  const double decades = out.window_hi > out.window_lo + 1
                             ? std::log10(out.scales[out.window_lo] / out.scales[out.window_hi - 1])
                             : 0.0;
  if (decades < opt.min_decades - 1e-9)
    throw EstimationError("insufficient scale range: " + std::to_string(decades) + " decades");
  std::vector<double> x, y;
  for (std::size_t i = out.window_lo; i < out.window_hi; ++i) {
    x.push_back(-std::log(out.scales[i]));
    y.push_back(std::log(static_cast<double>(out.counts[i])));
  }
  const LineFit f = fit_line(x, y);
  out.slope = f.slope;
  out.std_error = f.se;
  return out;
}

std::vector<Eigen::VectorXd> cantor_points(int level, double span) {
  if (level < 0 || level > 30) throw ConfigError("cantor level out of range");
  std::vector<double> xs{0.0};
  double len = 1.0;
  for (int l = 0; l < level; ++l) {
    len /= 3.0;
    std::vector<double> nx;
    nx.reserve(xs.size() * 2);
    for (double x : xs) {
      nx.push_back(x);
      nx.push_back(x + 2 * len);
    }
    xs.swap(nx);
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(xs.size());
  for (double x : xs) {
    Eigen::VectorXd v(2);
    v << std::cos(x * span), std::sin(x * span);
    out.push_back(v);
  }
  return out;
}

LipschitzReport lipschitz_graph(const std::vector<double>& u, const Eigen::MatrixXd& w,
                                const LipschitzOptions& opt) {
  const std::size_t n = u.size();
  if (static_cast<std::size_t>(w.rows()) != n) throw ConfigError("chart coordinate sizes differ");
  if (n < opt.min_points) throw EstimationError("chart degeneracy: too few points in the chart");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  std::vector<double> us(n);
  for (std::size_t i = 0; i < n; ++i) us[i] = u[order[i]];
  std::vector<double> gaps;
  for (std::size_t i = 1; i < n; ++i) gaps.push_back(us[i] - us[i - 1]);
  const double gap = median(gaps);
  if (!(us.back() - us.front() > 0)) throw EstimationError("chart degeneracy: zero base extent");
  LipschitzReport rep;
  rep.points = n;
  const double eps_min = std::max(4 * gap, 1e-12);
  for (int k = 0;; ++k) {
    const double eps = opt.eps_max * std::pow(10.0, -static_cast<double>(k) / opt.per_decade);
    if (eps < eps_min) break;
    double best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::lower_bound(us.begin() + static_cast<std::ptrdiff_t>(i), us.end(), us[i] + eps);
      if (it == us.end()) break;
      const auto j = static_cast<std::size_t>(it - us.begin());
      const double du = us[j] - us[i];
      if (du > 2 * eps) continue;
      const double dw = (w.row(static_cast<Eigen::Index>(order[j])) - w.row(static_cast<Eigen::Index>(order[i]))).norm();
      best = std::max(best, dw / du);
    }
    if (best < 0) continue;
    rep.scales.push_back(eps);
    rep.ratio.push_back(best);
  }
  if (rep.scales.size() < 3) throw EstimationError("chart degeneracy: fewer than 3 usable scales");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rep.scales.size(); ++i) {
    x.push_back(-std::log(rep.scales[i]));
    y.push_back(std::log(std::max(rep.ratio[i], 1e-300)));
  }
  rep.slope = fit_line(x, y).slope;
  rep.growth_per_decade = std::pow(10.0, rep.slope);
  rep.verdict = rep.slope > opt.slope_threshold ? "exploding" : "bounded";
  return rep;
}

LipschitzReport lipschitz_diagnostic(const std::vector<Eigen::VectorXd>& points,
                                     const LipschitzOptions& opt) {
  if (points.empty()) throw ConfigError("no points for the Lipschitz diagnostic");
  const Eigen::Index d = points.front().size();
  if (d < 2) throw ConfigError("Lipschitz diagnostic needs d >= 2");
  std::size_t ci = 0;
  if (opt.center >= 0) {
    ci = static_cast<std::size_t>(opt.center);
    if (ci >= points.size()) throw ConfigError("chart center index out of range");
  } else {
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, d);
    for (const auto& p : points) m2.noalias() += p * p.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m2);
    const Eigen::VectorXd mean = es.eigenvectors().col(d - 1);
    double best = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double c = std::abs(mean.dot(points[i].normalized()));
      if (c > best) {
        best = c;
        ci = i;
      }
    }
  }
  const Eigen::VectorXd x0 = points[ci].normalized();
  // Orthonormal complement of x0.
  Eigen::MatrixXd full(d, d);
  full.col(0) = x0;
  full.rightCols(d - 1) = Eigen::MatrixXd::Identity(d, d).leftCols(d - 1);
  if (std::abs(x0(d - 1)) < 0.5) full.rightCols(d - 1) = Eigen::MatrixXd::Identity(d, d).rightCols(d - 1);
  const Eigen::MatrixXd q = orthonormalize(full);
  const Eigen::MatrixXd basis = q.rightCols(d - 1);
  std::vector<Eigen::VectorXd> local;
  for (const auto& p : points) {
    const Eigen::VectorXd v = p.normalized();
    if (proj_distance(v, x0) >= opt.radius) continue;
    local.push_back(basis.transpose() * v / v.dot(x0));
  }
  if (local.size() > opt.max_points) {
    std::vector<Eigen::VectorXd> thin;
    const double step = static_cast<double>(local.size()) / static_cast<double>(opt.max_points);
    for (std::size_t k = 0; k < opt.max_points; ++k)
      thin.push_back(local[static_cast<std::size_t>(static_cast<double>(k) * step)]);
    local.swap(thin);
  }
  if (local.size() < opt.min_points)
    throw EstimationError("chart degeneracy: " + std::to_string(local.size()) + " points near the chart center");
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < local.size(); ++i)
    if (local[i].norm() > local[a].norm()) a = i;
  for (std::size_t i = 0; i < local.size(); ++i)
    if ((local[i] - local[a]).norm() > (local[b] - local[a]).norm()) b = i;
  const Eigen::VectorXd chord = local[b] - local[a];
  if (!(chord.norm() > 1e-12)) throw EstimationError("chart degeneracy: the local cloud is a point");
  const Eigen::VectorXd e = chord.normalized();
  std::vector<double> u(local.size());
  Eigen::MatrixXd w(static_cast<Eigen::Index>(local.size()), d - 1);
  for (std::size_t i = 0; i < local.size(); ++i) {
    u[i] = local[i].dot(e);
    w.row(static_cast<Eigen::Index>(i)) = (local[i] - u[i] * e).transpose();
  }
  LipschitzReport rep = lipschitz_graph(u, w, opt);
  rep.center = x0;
  return rep;
}

double omega_volume(const Eigen::VectorXd& v, const Eigen::MatrixXd& phi_v) {
  const Eigen::Index p = phi_v.cols();
  Eigen::MatrixXd m(v.size(), p + 1);
  m.col(0) = v;
  m.rightCols(p) = phi_v;
  return std::exp(log_wedge_norm(m) - static_cast<double>(p + 1) * std::log(v.norm()));
}

JacobianTrial ps_jacobian_trial(const Eigen::MatrixXd& g, const Eigen::MatrixXd& frame) {
  const Eigen::Index p = frame.cols() - 1;
  if (p < 1 || frame.cols() > frame.rows()) throw ConfigError("flag frame must have 2..d columns");
  const Eigen::VectorXd v = frame.col(0);
  // phi_i(v): the remaining columns moved into the orthogonal complement of l in V.
  Eigen::MatrixXd phi = frame.rightCols(p);
  const Eigen::VectorXd vu = v.normalized();
  for (Eigen::Index i = 0; i < p; ++i) phi.col(i) -= vu.dot(phi.col(i)) * vu;
  const Eigen::VectorXd gv = g * v;
  Eigen::MatrixXd gphi = g * phi;
  const Eigen::VectorXd gvu = gv.normalized();
  for (Eigen::Index i = 0; i < p; ++i) gphi.col(i) -= gvu.dot(gphi.col(i)) * gvu;
  JacobianTrial t;
  t.lhs = omega_volume(gv, gphi);
  const double omega1 = iwasawa(g, vu);
  const double omega_p1 = iwasawa(g, orthonormalize(frame));
  const double j = static_cast<double>(p + 1) * omega1 - omega_p1;
  t.rhs = std::exp(-j) * omega_volume(v, phi);
  t.residual = std::abs(t.lhs - t.rhs) / std::abs(t.rhs);
  return t;
}

JacobianReport ps_jacobian_identity(int d, int p, int trials, std::uint64_t seed) {
  if (d < 2 || p < 1 || p > d - 1) throw ConfigError("ps_jacobian_identity needs 1 <= p <= d-1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(0.0, std::log(1e6));
  JacobianReport rep;
  while (rep.trials < trials) {
    Eigen::VectorXd a(d);
    for (int i = 0; i < d; ++i) a(i) = spread(rng);
    a.array() -= a.mean();
    const Eigen::MatrixXd g = random_orthogonal(d, rng) * a.array().exp().matrix().asDiagonal() *
                              random_orthogonal(d, rng).transpose();
    // Both sides are multilinear in phi, so an orthonormal frame loses nothing.
    const Eigen::MatrixXd frame = orthonormalize(gaussian_matrix(d, p + 1, rng));
    const JacobianTrial t = ps_jacobian_trial(g, frame);
    if (!(t.rhs > 1e-250) || !std::isfinite(t.residual)) {
      ++rep.resampled;
      if (rep.resampled > 100 * trials) throw EstimationError("Jacobian identity: conditioning failure");
      continue;
    }
    rep.max_residual = std::max(rep.max_residual, t.residual);
    ++rep.trials;
  }
  return rep;
}

double directness_margin(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& z) {
  if (x.size() != y.size() || x.size() != z.rows()) throw ConfigError("directness_margin shape mismatch");
  if (z.cols() + 2 != x.size()) throw ConfigError("directness_margin needs dim Z = d - 2");
  if (proj_distance(x, y) < 1e-8) throw ConfigError("sample collision: x and y coincide");
  const Eigen::MatrixXd zq = orthonormalize(z);
  Eigen::MatrixXd xy(x.size(), 2);
  xy << x, y;
  const Eigen::MatrixXd a = orthonormalize(xy);
  if (zq.cols() == 0) return 1.0;
  for (const Eigen::VectorXd& v : {x, y})
    if (min_angle_sine(Eigen::MatrixXd(v.normalized()), zq) < 1e-8)
      throw ConfigError("sample collision: a line lies in Z");
  return zq.cols() <= a.cols() ? min_angle_sine(zq, a) : min_angle_sine(a, zq);
}

Eigen::MatrixXd ray_flag(const Representation& rep, std::uint64_t seed, int length, int k) {
  const Word w = ray_prefixes(rep.spec(), seed, length).back();
  return attractor(rep.evaluate(w), k);
}

HyperconvexReport hyperconvex_check(const Representation& rep, int p, int triples, std::uint64_t seed,
                                    int ray_length) {
  const int d = rep.dim();
  if (p < 2 || p > d - 1) throw ConfigError("hyperconvexity index p must lie in [2, d-1]");
  std::mt19937_64 rng(seed);
  HyperconvexReport out;
  out.p = p;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < triples; ++t) {
    const auto sx = rng(), sy = rng(), sz = rng();
    const Eigen::VectorXd x = ray_flag(rep, sx, ray_length, 1).col(0);
    const Eigen::VectorXd y = ray_flag(rep, sy, ray_length, 1).col(0);
    const Eigen::MatrixXd z = ray_flag(rep, sz, ray_length, d - p);
    if (p != 2) {
      // xi^1(x) + xi^1(y) + xi^{d-p}(z) has dimension d - p + 2; directness is
      // measured on the pair of subspaces span(x, y) and Z.
      Eigen::MatrixXd xy(d, 2);
      xy << x, y;
      const double m = min_angle_sine(orthonormalize(xy), orthonormalize(z));
      out.margins.push_back(m);
    } else {
      out.margins.push_back(directness_margin(x, y, z));
    }
    out.min_margin = std::min(out.min_margin, out.margins.back());
  }
  out.median_margin = median(out.margins);
  return out;
}

std::pair<int, int> restricted_signature(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x, double tol) {
  const Eigen::MatrixXd xo = orthonormalize(x);
  const Eigen::MatrixXd g = xo.transpose() * q * xo;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(q.cwiseAbs().maxCoeff(), 1e-300);
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < tol * scale) return {-1, -1};
    (ev(i) > 0 ? pos : neg)++;
  }
  return {pos, neg};
}

SignatureReport signature_of_triples(const Eigen::MatrixXd& q,
                                     const std::vector<std::array<Eigen::VectorXd, 3>>& triples) {
  SignatureReport r;
  for (const auto& t : triples) {
    ++r.triples;
    Eigen::MatrixXd x(q.rows(), 3);
    x << t[0], t[1], t[2];
    for (const auto& v : t)
      r.max_isotropy = std::max(r.max_isotropy, std::abs(v.normalized().dot(q * v.normalized())));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.colwise().normalized());
    const auto sg = svd.singularValues();
    if (sg(2) < 1e-8 * sg(0)) {
      ++r.degenerate;
      r.signatures.push_back({-1, -1});
      continue;
    }
    const auto s = restricted_signature(q, x);
    r.signatures.push_back(s);
    if (s.first < 0)
      ++r.degenerate;
    else if (s == std::make_pair(2, 1))
      ++r.two_one;
  }
  return r;
}

SignatureReport hpq_signature_check(const Representation& rep, const Eigen::MatrixXd& q_in, int triples,
                                    std::uint64_t seed, int ray_length) {
  const int d = rep.dim();
  if (q_in.rows() != d || q_in.cols() != d) throw ConfigError("form dimension does not match");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_in);
  int pos = 0;
  for (Eigen::Index i = 0; i < d; ++i) pos += es.eigenvalues()(i) > 0;
  const Eigen::MatrixXd q = 2 * pos > d ? Eigen::MatrixXd(-q_in) : q_in;
  std::mt19937_64 rng(seed);
  std::vector<std::array<Eigen::VectorXd, 3>> ts;
  for (int t = 0; t < triples; ++t) {
    std::array<Eigen::VectorXd, 3> tr;
    for (auto& v : tr) v = ray_flag(rep, rng(), ray_length, 1).col(0);
    ts.push_back(tr);
  }
  SignatureReport r = signature_of_triples(q, ts);
  const double scale = q.cwiseAbs().maxCoeff();
  if (r.max_isotropy > 1e-6 * scale)
    throw AssertionFailure("boundary samples are not isotropic: |x^T Q x| = " + std::to_string(r.max_isotropy));
  return r;
}

int weak_irreducibility_rank(const std::vector<Eigen::VectorXd>& points, double tol) {
  if (points.empty()) return 0;
  const Eigen::Index d = points.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = points[i].normalized().transpose();
  Eigen::MatrixXd r;
  if (m.rows() > d) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  } else {
    r = m;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

}  // namespace anosov
