#include "anosov/traverse.hpp"

#include <cmath>
#include <limits>

namespace anosov {

namespace {

struct GapAcc {
  std::vector<std::uint64_t> count;
  std::vector<double> min_gap;
  std::vector<double> sum_rate;
};

}  // namespace

GapReport anosov_gap_report(const Representation& rep, int p, int max_len, int threads,
                            Budget* budget) {
  const int d = rep.dim();
  if (p < 1 || p >= d) throw ConfigError("gap index p must satisfy 1 <= p < d");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  TraverseOptions opt;
  opt.max_len = max_len;
  opt.threads = threads;
  opt.budget = budget;
  opt.levels = std::min(p + 1, d - 1);
  const auto n = static_cast<std::size_t>(max_len) + 1;
  auto parts = traverse_shards<GapAcc>(
      rep, opt,
      [&] {
        return GapAcc{std::vector<std::uint64_t>(n, 0),
                      std::vector<double>(n, std::numeric_limits<double>::infinity()),
                      std::vector<double>(n, 0.0)};
      },
      [&](GapAcc& acc, const Word&, const CartanTracker& t, int depth) {
        const Eigen::VectorXd& l = t.log_norms(depth);
        const double lp = l(p - 1);
        const double lprev = p >= 2 ? l(p - 2) : 0.0;
        const double lnext = p + 1 <= d - 1 ? l(p) : 0.0;
        const double gap = 2 * lp - lprev - lnext;
        const auto k = static_cast<std::size_t>(depth);
        ++acc.count[k];
        acc.min_gap[k] = std::min(acc.min_gap[k], gap);
        acc.sum_rate[k] += gap / depth;
        return true;
      });
  GapReport r;
  r.p = p;
  for (int len = 1; len <= max_len; ++len) {
    GapShell s;
    s.length = len;
    s.min_gap = std::numeric_limits<double>::infinity();
    double sum = 0;
    for (const auto& a : parts) {
      const auto k = static_cast<std::size_t>(len);
      s.count += a.count[k];
      s.min_gap = std::min(s.min_gap, a.min_gap[k]);
      sum += a.sum_rate[k];
    }
    s.min_rate = s.min_gap / len;
    s.mean_rate = s.count ? sum / static_cast<double>(s.count) : 0.0;
    r.shells.push_back(s);
  }
  // Least-squares slope of the shell minima over the upper half of lengths.
  const int lo = std::max(1, max_len / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (int len = lo; len <= max_len; ++len) {
    const double y = r.shells[static_cast<std::size_t>(len - 1)].min_gap;
    sx += len;
    sy += y;
    sxx += static_cast<double>(len) * len;
    sxy += len * y;
    ++m;
  }
  r.mu_hat = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx)
                    : r.shells.back().min_rate;
  r.c_hat = 0;
  for (const auto& s : r.shells) r.c_hat = std::max(r.c_hat, r.mu_hat * s.length - s.min_gap);
  r.anosov = r.mu_hat > 1e-3 && r.shells.back().min_gap > 1e-6;
  return r;
}

}  // namespace anosov
