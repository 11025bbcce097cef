#include "anosov/cone.hpp"

#include "anosov/linalg.hpp"
#include "anosov/traverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace anosov {

// ---------------------------------------------------------------------------
// Limit cone

namespace {

struct ConeAcc {
  std::vector<Eigen::VectorXd> sum, lo, hi;
  std::vector<std::uint64_t> count;
  std::vector<ConeSample> samples;
  std::uint64_t last_seen = 0;
};

}  // namespace

Eigen::VectorXd jordan_direction(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  Eigen::VectorXd l = es.eigenvalues().cwiseAbs().array().log().matrix();
  std::sort(l.data(), l.data() + l.size(), std::greater<double>());
  l.array() -= l.mean();
  const double n = l.norm();
  if (n > 0) l /= n;
  return l;
}

ConeSummary limit_cone_sample(const Representation& rep, const ConeOptions& opt) {
  const int d = rep.dim();
  const int L = opt.max_len;
  if (L < 1) throw ConfigError("max_len must be >= 1");
  const std::uint64_t last = sphere_sizes(rep.spec(), L, opt.budget).back();
  const std::uint64_t stride = std::max<std::uint64_t>(1, last / std::max<std::size_t>(opt.keep, 1));
  TraverseOptions topt;
  topt.max_len = L;
  topt.threads = opt.threads;
  topt.budget = opt.budget;
  topt.levels = d - 1;
  const auto n = static_cast<std::size_t>(L) + 1;
  auto parts = traverse_shards<ConeAcc>(
      rep, topt,
      [&] {
        ConeAcc a;
        a.sum.assign(n, Eigen::VectorXd::Zero(d));
        a.lo.assign(n, Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity()));
        a.hi.assign(n, Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity()));
        a.count.assign(n, 0);
        return a;
      },
      [&](ConeAcc& acc, const Word& w, const CartanTracker& t, int depth) {
        Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 12, 1> a(d);
        t.cartan_into(depth, a.data());
        const double nrm = a.norm();
        if (nrm > 0) a /= nrm;
        const auto k = static_cast<std::size_t>(depth);
        acc.sum[k] += a;
        acc.lo[k] = acc.lo[k].cwiseMin(a);
        acc.hi[k] = acc.hi[k].cwiseMax(a);
        ++acc.count[k];
        if (depth == L && acc.last_seen++ % stride == 0) {
          ConeSample s;
          s.direction = a;
          s.word = w;
          s.length = depth;
          if (opt.jordan) s.jordan = jordan_direction(rep.evaluate(w));
          acc.samples.push_back(std::move(s));
        }
        return true;
      });
  ConeSummary out;
  for (int len = 1; len <= L; ++len) {
    const auto k = static_cast<std::size_t>(len);
    ConeShell sh;
    sh.length = len;
    sh.mean = Eigen::VectorXd::Zero(d);
    sh.coord_min = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    sh.coord_max = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    for (const auto& p : parts) {
      sh.count += p.count[k];
      sh.mean += p.sum[k];
      sh.coord_min = sh.coord_min.cwiseMin(p.lo[k]);
      sh.coord_max = sh.coord_max.cwiseMax(p.hi[k]);
    }
    if (sh.mean.norm() > 0) sh.mean.normalize();
    out.shells.push_back(sh);
  }
  for (auto& p : parts)
    for (auto& s : p.samples) out.samples.push_back(std::move(s));
  // The largest angle to the mean is only tracked on the kept samples.
  if (!out.samples.empty()) {
    auto& sh = out.shells.back();
    for (const auto& s : out.samples)
      sh.max_angle = std::max(sh.max_angle, std::acos(std::clamp(s.direction.dot(sh.mean), -1.0, 1.0)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dual-norm problems

double DualNormProblem::dual_norm(const Eigen::VectorXd& phi) const {
  return std::sqrt(std::max(0.0, phi.dot(norm.llt().solve(phi))));
}

void DualNormProblem::validate() const {
  const int k = dim();
  if (k < 1 || norm.cols() != k) throw ConfigError("norm matrix must be square");
  if (k > 8) throw DimensionError("dual-norm solver supports dim E <= 8");
  if ((norm - norm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm.cwiseAbs().maxCoeff())
    throw ConfigError("norm matrix is not symmetric");
  if (norm.llt().info() != Eigen::Success) throw ConfigError("norm matrix is not positive definite");
  if (generators.empty()) throw ConfigError("dual-norm problem needs at least one generator");
  for (const auto& g : generators)
    if (g.size() != k) throw ConfigError("generator dimension mismatch");
  for (const auto& c : cone)
    if (c.size() != k) throw ConfigError("cone generator dimension mismatch");
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(Eigen::VectorXd& w) {
  std::vector<double> u(w.data(), w.data() + w.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  w = (w.array() - theta).max(0.0).matrix();
}

}  // namespace

DualNormSolution hx_upper_bound(const DualNormProblem& pr, std::uint64_t seed, int restarts, int max_iter) {
  pr.validate();
  const int k = pr.dim();
  const int J = static_cast<int>(pr.generators.size());
  const int K = static_cast<int>(pr.cone.size());
  Eigen::MatrixXd a(k, J + K);
  for (int j = 0; j < J; ++j) a.col(j) = pr.generators[static_cast<std::size_t>(j)];
  for (int c = 0; c < K; ++c) a.col(J + c) = pr.cone[static_cast<std::size_t>(c)];
  const Eigen::MatrixXd ninv = pr.norm.llt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd h = a.transpose() * ninv * a;  // f(x) = x^T H x
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double lip = 2 * std::max(es.eigenvalues().maxCoeff(), 1e-300);
  auto project = [&](Eigen::VectorXd& x) {
    Eigen::VectorXd w = x.head(J);
    project_simplex(w);
    x.head(J) = w;
    for (int c = 0; c < K; ++c) x(J + c) = std::max(0.0, x(J + c));
  };
  auto f = [&](const Eigen::VectorXd& x) { return x.dot(h * x); };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DualNormSolution best;
  best.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Eigen::VectorXd x(J + K);
    if (r == 0) {
      x.head(J).setConstant(1.0 / J);
      x.tail(K).setZero();
    } else {
      for (int i = 0; i < J + K; ++i) x(i) = unif(rng);
      project(x);
    }
    // Accelerated projected gradient with adaptive restart.
    Eigen::VectorXd y = x, xprev = x;
    double tk = 1, fprev = f(x);
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      Eigen::VectorXd xn = y - (2.0 / lip) * (h * y);
      project(xn);
      const double fn = f(xn);
      if (fn > fprev && tk > 1) {
        y = x;
        tk = 1;
        continue;
      }
      const double tn = 0.5 * (1 + std::sqrt(1 + 4 * tk * tk));
      y = xn + ((tk - 1) / tn) * (xn - x);
      const double step = (xn - x).norm();
      const double gain = fprev - fn;
      x = xn;
      tk = tn;
      fprev = fn;
      if (gain < 1e-10 * std::max(fn, 1e-300) || step < 1e-14) {
        // Stationarity: the projected gradient step from x barely moves it.
        Eigen::VectorXd pg = x - (2.0 / lip) * (h * x);
        project(pg);
        if ((pg - x).norm() < 1e-10 * std::max(1.0, x.norm())) {
          converged = true;
          break;
        }
      }
    }
    const double val = std::sqrt(std::max(0.0, f(x)));
    if (val < best.value) {
      best.value = val;
      best.weights = x.head(J);
      best.cone_coeffs = x.tail(K);
      best.minimizer = a * x;
      best.iterations = it;
      best.converged = converged;
    }
  }
  return best;
}

DualNormSolution hull_min_norm(const DualNormProblem& pr) {
  pr.validate();
  const int J = static_cast<int>(pr.generators.size());
  if (J > 16) throw DimensionError("hull_min_norm supports at most 16 generators");
  const Eigen::MatrixXd ninv = pr.norm.llt().solve(Eigen::MatrixXd::Identity(pr.dim(), pr.dim()));
  Eigen::MatrixXd g(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j)
      g(i, j) = pr.generators[static_cast<std::size_t>(i)].dot(ninv * pr.generators[static_cast<std::size_t>(j)]);
  DualNormSolution best;
  best.value = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << J); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < J; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const int s = static_cast<int>(idx.size());
    // KKT system [G 1; 1^T 0] [w; mu] = [0; 1].
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) kkt(a, b) = g(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      kkt(a, s) = kkt(s, a) = 1;
    }
    rhs(s) = 1;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if ((sol.head(s).array() < -1e-14).any()) continue;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(J);
    for (int a = 0; a < s; ++a) w(idx[static_cast<std::size_t>(a)]) = std::max(0.0, sol(a));
    const double val = std::sqrt(std::max(0.0, w.dot(g * w)));
    if (val < best.value) {
      best.value = val;
      best.weights = w;
      best.minimizer = Eigen::VectorXd::Zero(pr.dim());
      for (int j = 0; j < J; ++j) best.minimizer += w(j) * pr.generators[static_cast<std::size_t>(j)];
      best.converged = true;
    }
  }
  best.cone_coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pr.cone.size()));
  return best;
}

double barycenter_dual_norm(const DualNormProblem& pr) {
  pr.validate();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(pr.dim());
  for (const auto& g : pr.generators) b += g;
  b /= static_cast<double>(pr.generators.size());
  return pr.dual_norm(b);
}

Eigen::MatrixXd sl_cartan_basis(int d) {
  if (d < 2) throw ConfigError("SL_d Cartan basis needs d >= 2");
  Eigen::MatrixXd m(d, d - 1);
  for (int j = 0; j < d - 1; ++j) {
    m.col(j).setZero();
    m.col(j).head(j + 1).setOnes();
    m(j + 1, j) = -(j + 1);
  }
  return m.colwise().normalized();
}

Eigen::MatrixXd so_cartan_basis(int d, int rank) {
  if (rank < 1 || 2 * rank > d) throw ConfigError("SO Cartan basis: rank out of range");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, rank);
  for (int i = 0; i < rank; ++i) {
    m(i, i) = 1 / std::sqrt(2.0);
    m(d - 1 - i, i) = -1 / std::sqrt(2.0);
  }
  return m;
}

Eigen::MatrixXd hyperbolic_norm(int d, int m) {
  if (m < 2 || m > d) throw ConfigError("hyperbolic_norm: block size out of range");
  const double c = 12.0 / (static_cast<double>(m) * (static_cast<double>(m) * m - 1));
  return c * Eigen::MatrixXd::Identity(d, d);
}

std::vector<Eigen::VectorXd> sl_simple_roots(int d) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i + 1 < d; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
    a(i) = 1;
    a(i + 1) = -1;
    out.push_back(a);
  }
  return out;
}

std::vector<Eigen::VectorXd> so_simple_roots(int d, int rank) {
  if (rank < 1 || 2 * rank > d) throw ConfigError("SO simple roots: rank out of range");
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i + 1 < rank; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
    a(i) = 1;
    a(i + 1) = -1;
    out.push_back(a);
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e(rank - 1) = 1;
  out.push_back(e);
  return out;
}

DualNormProblem make_problem(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& x_norm,
                             const std::vector<Eigen::VectorXd>& generators,
                             const std::vector<Eigen::VectorXd>& cone, const std::vector<std::string>& names) {
  DualNormProblem p;
  p.norm = basis.transpose() * x_norm * basis;
  p.norm = 0.5 * (p.norm + p.norm.transpose());
  for (const auto& g : generators) p.generators.push_back(basis.transpose() * g);
  for (const auto& c : cone) p.cone.push_back(basis.transpose() * c);
  p.names = names;
  p.validate();
  return p;
}

DualNormProblem so_positive_problem(int p) {
  if (p < 2 || p > 8) throw ConfigError("so_positive_problem needs 2 <= p <= 8");
  DualNormProblem pr;
  const double c = 6.0 / ((2.0 * p - 1) * p * (p - 1));
  pr.norm = c * Eigen::MatrixXd::Identity(p, p);
  for (int i = 0; i + 2 < p; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
    a(i) = 1;
    a(i + 1) = -1;
    pr.generators.push_back(a);
    pr.names.push_back("alpha" + std::to_string(i + 1));
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
  e(p - 2) = 1;
  pr.generators.push_back(e);
  pr.names.push_back("eps" + std::to_string(p - 1));
  for (int i = 0; i + 1 < p; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
    a(i) = 1;
    a(i + 1) = -1;
    pr.cone.push_back(a);
  }
  Eigen::VectorXd ep = Eigen::VectorXd::Zero(p);
  ep(p - 1) = 1;
  pr.cone.push_back(ep);
  pr.validate();
  return pr;
}

EntropyReport hx_estimate(const Representation& rep, const Eigen::MatrixXd& x_norm, const EntropyOptions& opt) {
  const int d = rep.dim();
  if (x_norm.rows() != d || x_norm.cols() != d) throw ConfigError("norm matrix dimension mismatch");
  if (Eigen::LLT<Eigen::MatrixXd>(x_norm).info() != Eigen::Success)
    throw ConfigError("norm matrix is not positive definite");
  Observable o;
  o.name = "norm_X";
  o.dim = d;
  o.levels = d - 1;
  o.f = [x_norm, d](const double* a) {
    const Eigen::Map<const Eigen::VectorXd> v(a, d);
    return std::sqrt(v.dot(x_norm * v));
  };
  return critical_exponents(rep, {o}, opt).front();
}

}  // namespace anosov
