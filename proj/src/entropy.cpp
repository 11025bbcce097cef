#include "anosov/entropy.hpp"

#include "anosov/traverse.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace anosov {

// ---------------------------------------------------------------------------
// Functionals

namespace {

void check_index(int d, int p, int lo, int hi, const char* what) {
  if (d < 2) throw ConfigError("functionals need d >= 2");
  if (p < lo || p > hi)
    throw ConfigError(std::string(what) + " index " + std::to_string(p) + " out of range for d = " +
                      std::to_string(d));
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

Functional Functional::epsilon(int d, int p) {
  check_index(d, p, 1, d, "epsilon");
  Functional f{Eigen::VectorXd::Zero(d), "eps" + std::to_string(p)};
  f.coeffs(p - 1) = 1;
  return f;
}

Functional Functional::alpha(int d, int p) {
  check_index(d, p, 1, d - 1, "alpha");
  Functional f{Eigen::VectorXd::Zero(d), "alpha" + std::to_string(p)};
  f.coeffs(p - 1) = 1;
  f.coeffs(p) = -1;
  return f;
}

Functional Functional::omega(int d, int p) {
  check_index(d, p, 1, d, "omega");
  Functional f{Eigen::VectorXd::Zero(d), "omega" + std::to_string(p)};
  f.coeffs.head(p).setOnes();
  return f;
}

Functional Functional::unstable_jacobian(int d, int p) {
  check_index(d, p, 1, d - 1, "J");
  Functional f = omega(d, 1).scaled(p + 1) - omega(d, p + 1);
  f.name = "J" + std::to_string(p);
  return f;
}

Functional Functional::from_coeffs(const std::vector<double>& c, std::string name) {
  Functional f{Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())),
               std::move(name)};
  if (f.name.empty()) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "]";
    f.name = os.str();
  }
  return f;
}

Functional Functional::parse(const std::string& text, int d) {
  const std::string src = trim(text);
  if (src.empty()) throw ConfigError("empty functional");
  if (src.front() == '[') {
    if (src.back() != ']') throw ConfigError("unterminated coefficient list: " + src);
    std::vector<double> c;
    std::stringstream ss(src.substr(1, src.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) c.push_back(std::stod(item));
    if (static_cast<int>(c.size()) != d)
      throw ConfigError("coefficient list has " + std::to_string(c.size()) + " entries, need " +
                        std::to_string(d));
    return from_coeffs(c, src);
  }
  Functional acc{Eigen::VectorXd::Zero(d), src};
  std::size_t i = 0;
  bool first = true;
  while (i < src.size()) {
    while (i < src.size() && src[i] == ' ') ++i;
    double sign = 1;
    if (src[i] == '+' || src[i] == '-') {
      sign = src[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw ConfigError("expected + or - in functional: " + src);
    }
    first = false;
    while (i < src.size() && src[i] == ' ') ++i;
    double scale = 1;
    std::size_t j = i;
    while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
    if (j > i) {
      scale = std::stod(src.substr(i, j - i));
      i = j;
      while (i < src.size() && src[i] == ' ') ++i;
      if (i < src.size() && src[i] == '*') ++i;
      while (i < src.size() && src[i] == ' ') ++i;
    }
    j = i;
    while (j < src.size() && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;
    const std::string name = src.substr(i, j - i);
    std::size_t k = j;
    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
    if (k == j || name.empty()) throw ConfigError("bad term in functional: " + src);
    const int idx = std::stoi(src.substr(j, k - j));
    Functional term;
    if (name == "eps" || name == "epsilon" || name == "e")
      term = epsilon(d, idx);
    else if (name == "alpha" || name == "a")
      term = alpha(d, idx);
    else if (name == "omega" || name == "w")
      term = omega(d, idx);
    else if (name == "J")
      term = unstable_jacobian(d, idx);
    else
      throw ConfigError("unknown functional '" + name + "'");
    acc.coeffs += sign * scale * term.coeffs;
    i = k;
    while (i < src.size() && src[i] == ' ') ++i;
  }
  return acc;
}

Functional Functional::scaled(double c) const {
  std::ostringstream os;
  os << c << "*" << name;
  return Functional{c * coeffs, os.str()};
}

Functional Functional::operator+(const Functional& o) const {
  if (o.dim() != dim()) throw ConfigError("functional dimensions differ");
  return Functional{coeffs + o.coeffs, name + "+" + o.name};
}

Functional Functional::operator-(const Functional& o) const {
  if (o.dim() != dim()) throw ConfigError("functional dimensions differ");
  return Functional{coeffs - o.coeffs, name + "-(" + o.name + ")"};
}

Functional Functional::dual() const {
  return Functional{-coeffs.reverse(), name + "*"};
}

int Functional::levels_needed() const {
  int k = 0;
  for (int i = 1; i < dim(); ++i)
    if (std::abs(coeffs(i - 1) - coeffs(i)) > 0) k = i;
  return k;
}

Observable Observable::linear(const Functional& phi) {
  Observable o;
  o.name = phi.name;
  o.dim = phi.dim();
  o.levels = phi.levels_needed();
  o.f = [phi](const double* a) { return phi(a); };
  return o;
}

Observable Observable::min_of(const std::vector<Functional>& phis) {
  if (phis.empty()) throw ConfigError("min of an empty functional list");
  Observable o;
  o.dim = phis.front().dim();
  o.name = "min(";
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (phis[i].dim() != o.dim) throw ConfigError("functional dimensions differ");
    o.name += (i ? "," : "") + phis[i].name;
  }
  o.name += ")";
  o.levels = o.dim - 1;
  o.f = [phis](const double* a) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : phis) m = std::min(m, p(a));
    return m;
  };
  return o;
}

// ---------------------------------------------------------------------------
// Histograms

void ShellHistogram::init(int max_len, double fine) {
  fine_bin = fine;
  const auto n = static_cast<std::size_t>(max_len) + 1;
  count.assign(n, {});
  sum.assign(n, {});
  min_value.assign(n, std::numeric_limits<double>::infinity());
  shell_count.assign(n, 0);
  nonpositive = 0;
}

void ShellHistogram::add(int shell, double value) {
  const auto n = static_cast<std::size_t>(shell);
  ++shell_count[n];
  min_value[n] = std::min(min_value[n], value);
  if (!(value > 0)) {
    ++nonpositive;
    return;
  }
  const auto k = static_cast<std::size_t>(value / fine_bin);
  if (k >= count[n].size()) {
    if (k > 100000000) throw OverflowError("histogram value out of range");
    count[n].resize(k + 1 + k / 4, 0);
    sum[n].resize(k + 1 + k / 4, 0.0);
  }
  ++count[n][k];
  sum[n][k] += value;
}

void ShellHistogram::merge(const ShellHistogram& o) {
  for (std::size_t n = 0; n < count.size(); ++n) {
    if (o.count[n].size() > count[n].size()) {
      count[n].resize(o.count[n].size(), 0);
      sum[n].resize(o.sum[n].size(), 0.0);
    }
    for (std::size_t k = 0; k < o.count[n].size(); ++k) {
      count[n][k] += o.count[n][k];
      sum[n][k] += o.sum[n][k];
    }
    min_value[n] = std::min(min_value[n], o.min_value[n]);
    shell_count[n] += o.shell_count[n];
  }
  nonpositive += o.nonpositive;
}

double ShellHistogram::log_shell_sum(int n, double s) const {
  const auto& c = count[static_cast<std::size_t>(n)];
  const auto& sm = sum[static_cast<std::size_t>(n)];
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k]) mx = std::max(mx, std::log(static_cast<double>(c[k])) - s * sm[k] / static_cast<double>(c[k]));
  if (!std::isfinite(mx)) return mx;
  double acc = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k])
      acc += std::exp(std::log(static_cast<double>(c[k])) - s * sm[k] / static_cast<double>(c[k]) - mx);
  return mx + std::log(acc);
}

std::vector<ShellHistogram> collect_histograms(const Representation& rep,
                                               const std::vector<Observable>& obs,
                                               const EntropyOptions& opt) {
  const int d = rep.dim();
  int levels = 0;
  for (const auto& o : obs) {
    if (o.dim != d) throw ConfigError("observable dimension does not match the representation");
    levels = std::max(levels, o.levels);
  }
  if (levels == 0) throw EstimationError("functional vanishes on E: nonpositive functional");
  TraverseOptions topt;
  topt.max_len = opt.max_len;
  topt.threads = opt.threads;
  topt.budget = opt.budget;
  topt.levels = levels;
  auto parts = traverse_shards<std::vector<ShellHistogram>>(
      rep, topt,
      [&] {
        std::vector<ShellHistogram> v(obs.size());
        for (auto& h : v) h.init(opt.max_len, opt.fine_bin);
        return v;
      },
      [&](std::vector<ShellHistogram>& acc, const Word&, const CartanTracker& t, int depth) {
        std::array<double, 12> a{};
        // Cartan vector from L(1..levels); unused tail coordinates are
        // filled consistently but never read by the observables.
        const Eigen::VectorXd& l = t.log_norms(depth);
        double prev = 0;
        for (int i = 0; i < d; ++i) {
          const double li = i < levels ? l(i) : (i == d - 1 ? 0.0 : prev);
          a[static_cast<std::size_t>(i)] = li - prev;
          prev = li;
        }
        if (levels == d - 1) {
          double mean = 0;
          for (int i = 0; i < d; ++i) mean += a[static_cast<std::size_t>(i)];
          mean /= d;
          for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] -= mean;
        }
        for (std::size_t k = 0; k < obs.size(); ++k) acc[k].add(depth, obs[k].f(a.data()));
        return true;
      });
  std::vector<ShellHistogram> out(obs.size());
  for (auto& h : out) h.init(opt.max_len, opt.fine_bin);
  for (const auto& part : parts)
    for (std::size_t k = 0; k < obs.size(); ++k) out[k].merge(part[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Estimators

namespace {

struct Ols {
  double slope = 0, intercept = 0, se = 0;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo,
        std::size_t hi) {
  const double m = static_cast<double>(hi - lo);
  double sx = 0, sy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Ols r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (m > 2) {
    double ssr = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double e = y[i] - r.intercept - r.slope * x[i];
      ssr += e * e;
    }
    r.se = std::sqrt(ssr / (m - 2) / sxx);
  }
  return r;
}

template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Smallest bracket [0, hi] with f(0) > 0 > f(hi).
template <class F>
double upper_bracket(F f) {
  double hi = 1.0;
  for (int it = 0; it < 60 && f(hi) > 0; ++it) hi *= 2;
  if (f(hi) > 0) throw EstimationError("shell rate does not change sign");
  return hi;
}

}  // namespace

ExponentEstimate counting_estimate(const ShellHistogram& h, const EntropyOptions& opt) {
  ExponentEstimate e;
  e.method = "counting";
  const int L = h.max_len();
  e.max_len = L;
  if (h.nonpositive) throw EstimationError("nonpositive functional value on an enumerated element");
  const double ratio = opt.bin / h.fine_bin;
  const auto r = static_cast<std::size_t>(std::llround(ratio));
  if (r == 0 || std::abs(ratio - static_cast<double>(r)) > 1e-6 * ratio)
    throw ConfigError("bin width must be a multiple of the fine bin width");
  std::size_t nb = 0;
  for (int n = 1; n <= L; ++n) nb = std::max(nb, h.count[static_cast<std::size_t>(n)].size());
  std::vector<std::uint64_t> total(nb, 0);
  for (int n = 1; n <= L; ++n) {
    const auto& c = h.count[static_cast<std::size_t>(n)];
    for (std::size_t k = 0; k < c.size(); ++k) total[k] += c[k];
  }
  e.t_comp = h.min_value[static_cast<std::size_t>(L)];
  // N at coarse edges t_k = k bin.
  std::uint64_t cum = 0;
  std::size_t fine = 0;
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * opt.bin;
    if (t > e.t_comp) break;
    for (; fine < k * r && fine < nb; ++fine) cum += total[fine];
    if (cum >= opt.min_count) {
      e.t.push_back(t);
      e.log_count.push_back(std::log(static_cast<double>(cum)));
    }
  }
  if (e.t.size() < 4) throw EstimationError("insufficient range: fewer than 4 regression points");
  e.t_min = e.t.front();
  e.t_max = e.t.back();
  if (e.log_count.back() - e.log_count.front() < opt.min_log_span)
    throw EstimationError("insufficient range: log-count span " +
                          std::to_string(e.log_count.back() - e.log_count.front()) + " < " +
                          std::to_string(opt.min_log_span));
  const Ols full = ols(e.t, e.log_count, 0, e.t.size());
  const Ols upper = ols(e.t, e.log_count, e.t.size() / 2, e.t.size());
  e.h_hat = full.slope;
  e.std_error = full.se;
  e.systematic = std::abs(full.slope - upper.slope);
  e.uncertainty = e.std_error + e.systematic;
  return e;
}

ExponentEstimate shell_rate_estimate(const ShellHistogram& h, const EntropyOptions& opt) {
  ExponentEstimate e;
  e.method = "shell-rate";
  const int L = h.max_len();
  e.max_len = L;
  e.t_comp = h.min_value[static_cast<std::size_t>(L)];
  if (h.nonpositive) throw EstimationError("nonpositive functional value on an enumerated element");
  const int k = std::min(opt.rate_shells, L);
  if (k < 2) throw EstimationError("shell-rate estimate needs at least two shells");
  std::vector<double> ns;
  for (int n = L - k + 1; n <= L; ++n) ns.push_back(n);
  auto rate_fit = [&](double s) {
    std::vector<double> y;
    for (int n = L - k + 1; n <= L; ++n) y.push_back(h.log_shell_sum(n, s));
    return ols(ns, y, 0, ns.size());
  };
  auto rate = [&](double s) { return rate_fit(s).slope; };
  auto last = [&](double s) { return h.log_shell_sum(L, s) - h.log_shell_sum(L - 1, s); };
  if (!(rate(0) > 0)) throw EstimationError("shell sizes are not growing");
  const double root = bisect(rate, 0.0, upper_bracket(rate));
  const double root_last = bisect(last, 0.0, upper_bracket(last));
  const double ds = 1e-4 * std::max(1.0, root);
  const double deriv = (rate(root + ds) - rate(root - ds)) / (2 * ds);
  e.h_hat = root;
  e.std_error = deriv != 0 ? rate_fit(root).se / std::abs(deriv) : 0.0;
  e.systematic = std::abs(root_last - root);
  e.uncertainty = e.std_error + e.systematic;
  for (int i = 0; i <= 40; ++i) {
    const double s = 2.0 * root * i / 40.0;
    e.s_grid.push_back(s);
    e.rate.push_back(rate(s));
  }
  return e;
}

EntropyReport estimate_from_histogram(const ShellHistogram& h, const Observable& obs,
                                      const EntropyOptions& opt) {
  EntropyReport r;
  r.name = obs.name;
  r.counting = counting_estimate(h, opt);
  r.series = shell_rate_estimate(h, opt);
  const double u = std::hypot(r.counting.uncertainty, r.series.uncertainty);
  r.agree = std::abs(r.counting.h_hat - r.series.h_hat) <= 2 * u;
  for (auto c : h.shell_count) r.elements += c;
  return r;
}

std::vector<EntropyReport> critical_exponents(const Representation& rep,
                                              const std::vector<Observable>& obs,
                                              const EntropyOptions& opt) {
  const auto hs = collect_histograms(rep, obs, opt);
  std::vector<EntropyReport> out;
  for (std::size_t k = 0; k < obs.size(); ++k) out.push_back(estimate_from_histogram(hs[k], obs[k], opt));
  return out;
}

EntropyReport critical_exponent(const Representation& rep, const Functional& phi,
                                const EntropyOptions& opt) {
  auto r = critical_exponents(rep, {Observable::linear(phi)}, opt).front();
  r.coeffs = phi.coeffs;
  return r;
}

// ---------------------------------------------------------------------------
// Affinity exponent

double affinity_log_term(const Eigen::VectorXd& a, double s) {
  const int d = static_cast<int>(a.size());
  if (d < 2) throw ConfigError("affinity series needs d >= 2");
  if (s < 0) throw ConfigError("affinity exponent argument must be nonnegative");
  const int p = std::min(d, static_cast<int>(std::floor(s)) + 2);
  double acc = 0;
  for (int i = 2; i <= p - 1; ++i) acc += a(i - 1) - a(0);
  return acc + (s - (p - 2)) * (a(p - 1) - a(0));
}

namespace {

struct AffAcc {
  std::vector<double> sum, comp;  // [shell * G + j], Neumaier pairs
};

}  // namespace

AffinityEstimate affinity_exponent(const Representation& rep, const EntropyOptions& opt,
                                   double s_step) {
  const int d = rep.dim();
  if (d < 2) throw ConfigError("affinity exponent needs d >= 2");
  const int per_unit = static_cast<int>(std::lround(1.0 / s_step));
  if (per_unit < 1 || std::abs(per_unit * s_step - 1.0) > 1e-9)
    throw ConfigError("s_step must divide 1");
  // The last piece is continued one unit past d-1 so a root near d-1 is bracketed.
  const int G = d * per_unit + 1;
  const int L = opt.max_len;
  TraverseOptions topt;
  topt.max_len = L;
  topt.threads = opt.threads;
  topt.budget = opt.budget;
  topt.levels = d - 1;
  const auto cells = static_cast<std::size_t>(L + 1) * static_cast<std::size_t>(G);
  auto parts = traverse_shards<AffAcc>(
      rep, topt, [&] { return AffAcc{std::vector<double>(cells, 0.0), std::vector<double>(cells, 0.0)}; },
      [&](AffAcc& acc, const Word&, const CartanTracker& t, int depth) {
        std::array<double, 12> a{};
        t.cartan_into(depth, a.data());
        const std::size_t base = static_cast<std::size_t>(depth) * static_cast<std::size_t>(G);
        double head = 0;  // sum_{i=2}^{p-1} (a_i - a_1)
        int j = 0;
        for (int p = 2; p <= d; ++p) {
          const double b = a[static_cast<std::size_t>(p - 1)] - a[0];
          const double step = std::exp(s_step * b);
          double psi = std::exp(head);
          const int j_end = p == d ? G - 1 : (p - 1) * per_unit;
          for (; j <= j_end; ++j) {
            const double y = psi;
            double& s = acc.sum[base + static_cast<std::size_t>(j)];
            double& c = acc.comp[base + static_cast<std::size_t>(j)];
            const double tsum = s + y;
            c += std::abs(s) >= std::abs(y) ? (s - tsum) + y : (y - tsum) + s;
            s = tsum;
            psi *= step;
          }
          head += b;
        }
        return true;
      });
  AffinityEstimate out;
  out.log_shell_sums.assign(static_cast<std::size_t>(L + 1), std::vector<double>(static_cast<std::size_t>(G), 0.0));
  for (int n = 1; n <= L; ++n)
    for (int j = 0; j < G; ++j) {
      const std::size_t idx = static_cast<std::size_t>(n) * static_cast<std::size_t>(G) + static_cast<std::size_t>(j);
      double s = 0, c = 0;
      for (const auto& part : parts) {
        const double y = part.sum[idx] + part.comp[idx];
        const double tsum = s + y;
        c += std::abs(s) >= std::abs(y) ? (s - tsum) + y : (y - tsum) + s;
        s = tsum;
      }
      out.log_shell_sums[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = std::log(s + c);
    }
  const int k = std::min(opt.rate_shells, L);
  if (k < 2) throw EstimationError("affinity estimate needs at least two shells");
  std::vector<double> ns;
  for (int n = L - k + 1; n <= L; ++n) ns.push_back(n);
  ExponentEstimate& e = out.estimate;
  e.method = "affinity";
  e.max_len = L;
  std::vector<double> se(static_cast<std::size_t>(G)), last(static_cast<std::size_t>(G));
  for (int j = 0; j < G; ++j) {
    std::vector<double> y;
    for (int n = L - k + 1; n <= L; ++n) y.push_back(out.log_shell_sums[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)]);
    const Ols f = ols(ns, y, 0, ns.size());
    e.s_grid.push_back(j * s_step);
    e.rate.push_back(f.slope);
    se[static_cast<std::size_t>(j)] = f.se;
    last[static_cast<std::size_t>(j)] = y.back() - y[y.size() - 2];
  }
  for (int j = 1; j < G; ++j)
    if (e.rate[static_cast<std::size_t>(j)] > e.rate[static_cast<std::size_t>(j - 1)] + 1e-12) out.monotone = false;
  auto root_of = [&](const std::vector<double>& r) {
    if (!(r[0] > 0)) throw EstimationError("affinity series converges at s = 0");
    for (int j = 1; j < G; ++j) {
      const double r0 = r[static_cast<std::size_t>(j - 1)], r1 = r[static_cast<std::size_t>(j)];
      if (r0 > 0 && r1 <= 0) return (j - 1 + r0 / (r0 - r1)) * s_step;
    }
    return std::numeric_limits<double>::infinity();
  };
  const double root = root_of(e.rate);
  const double root_last = root_of(last);
  e.h_hat = root;
  if (std::isfinite(root)) {
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(root / s_step), static_cast<std::size_t>(G - 2));
    const double deriv = (e.rate[j + 1] - e.rate[j]) / s_step;
    e.std_error = deriv != 0 ? se[j] / std::abs(deriv) : 0.0;
    e.systematic = std::isfinite(root_last) ? std::abs(root_last - root) : std::numeric_limits<double>::infinity();
    out.piece = std::min(d, static_cast<int>(std::floor(root)) + 2);
  } else {
    e.std_error = e.systematic = std::numeric_limits<double>::infinity();
    out.piece = d + 1;
  }
  e.uncertainty = e.std_error + e.systematic;
  return out;
}

// ---------------------------------------------------------------------------
// Relations between exponents

MinCheck min_check(const std::vector<EntropyReport>& each, const EntropyReport& min_report) {
  MinCheck c;
  double u_max = 0;
  for (const auto& r : each) {
    c.h_each.push_back(r.counting.h_hat);
    if (r.counting.h_hat >= c.h_max) {
      c.h_max = r.counting.h_hat;
      u_max = r.counting.uncertainty;
    }
  }
  c.h_min = min_report.counting.h_hat;
  c.tolerance = 2 * std::hypot(u_max, min_report.counting.uncertainty);
  c.holds = std::abs(c.h_min - c.h_max) <= c.tolerance;
  return c;
}

MinCheck entropy_min_check(const Representation& rep, const std::vector<Functional>& phis,
                           const EntropyOptions& opt) {
  std::vector<Observable> obs;
  for (const auto& p : phis) obs.push_back(Observable::linear(p));
  obs.push_back(Observable::min_of(phis));
  auto reports = critical_exponents(rep, obs, opt);
  const EntropyReport last = reports.back();
  reports.pop_back();
  return min_check(reports, last);
}

SumCheck sum_check(const EntropyReport& phi, const EntropyReport& psi, const EntropyReport& sum) {
  SumCheck c;
  c.h_phi = phi.counting.h_hat;
  c.h_psi = psi.counting.h_hat;
  c.h_sum = sum.counting.h_hat;
  c.bound = c.h_phi * c.h_psi / (c.h_phi + c.h_psi);
  c.slack = c.bound - c.h_sum;
  // Propagate the individual uncertainties through the harmonic mean.
  const double s = c.h_phi + c.h_psi;
  const double dphi = c.h_psi * c.h_psi / (s * s), dpsi = c.h_phi * c.h_phi / (s * s);
  const double ub = std::hypot(dphi * phi.counting.uncertainty, dpsi * psi.counting.uncertainty);
  c.tolerance = 2 * std::hypot(ub, sum.counting.uncertainty);
  c.holds = c.h_sum <= c.bound + c.tolerance;
  return c;
}

SumCheck entropy_sum_check(const Representation& rep, const Functional& phi, const Functional& psi,
                           const EntropyOptions& opt) {
  const auto r = critical_exponents(
      rep, {Observable::linear(phi), Observable::linear(psi), Observable::linear(phi + psi)}, opt);
  return sum_check(r[0], r[1], r[2]);
}

}  // namespace anosov
