#pragma once

// Critical exponents of functionals of the Cartan projection: orbit-counting
// regression, shell-rate root of the Dirichlet series, the broken affinity
// series, and the min / sum entropy relations.

#include "anosov/cartan.hpp"
#include "anosov/group.hpp"
#include "anosov/representation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace anosov {

/// Linear form phi(a) = sum c_i a_i on E.
struct Functional {
  Eigen::VectorXd coeffs;
  std::string name;

  double operator()(const double* a) const { return coeffs.dot(Eigen::Map<const Eigen::VectorXd>(a, coeffs.size())); }
  double operator()(const Eigen::VectorXd& a) const { return coeffs.dot(a); }
  int dim() const { return static_cast<int>(coeffs.size()); }

  static Functional epsilon(int d, int p);
  static Functional alpha(int d, int p);
  static Functional omega(int d, int p);
  /// J^u_p = (p+1) omega_1 - omega_{p+1}.
  static Functional unstable_jacobian(int d, int p);
  static Functional from_coeffs(const std::vector<double>& c, std::string name = "");
  /// Parses "alpha1", "eps2", "omega1", "J2", "-eps2", "eps1-eps2", "2*alpha1",
  /// sums and differences of those, or a bracketed coefficient list "[1,-1,0]".
  static Functional parse(const std::string& text, int d);

  Functional scaled(double c) const;
  Functional operator+(const Functional& o) const;
  Functional operator-(const Functional& o) const;
  /// phi o i with i(a) = -(a_d, ..., a_1): the functional seen by the dual representation.
  Functional dual() const;
  /// Number of compound levels L(1..k) that determine phi on E
  /// (0 when phi vanishes on E).
  int levels_needed() const;
};

/// A 1-homogeneous function of the Cartan vector (linear or a min of linear forms).
struct Observable {
  std::string name;
  int dim = 0;
  int levels = 0;  // compound levels required
  std::function<double(const double* a)> f;

  static Observable linear(const Functional& phi);
  static Observable min_of(const std::vector<Functional>& phis);
};

struct EntropyOptions {
  int max_len = 8;
  int threads = 1;
  Budget* budget = nullptr;
  double bin = 0.25;         // regression bin width
  double fine_bin = 1e-3;    // storage resolution; bin must be a multiple
  std::uint64_t min_count = 10;
  double min_log_span = 5.0; // required span of log N over the window
  int rate_shells = 4;       // shells in the shell-rate regression
};

/// Per-shell histogram of one observable. Bin k covers [k w, (k+1) w); each
/// bin keeps the count and the sum of the values that fell in it.
struct ShellHistogram {
  double fine_bin = 1e-3;
  std::vector<std::vector<std::uint64_t>> count;  // [shell][bin]
  std::vector<std::vector<double>> sum;           // [shell][bin]
  std::vector<double> min_value;                  // [shell]
  std::vector<std::uint64_t> shell_count;         // [shell]
  std::uint64_t nonpositive = 0;

  void init(int max_len, double fine);
  void add(int shell, double value);
  void merge(const ShellHistogram& o);
  int max_len() const { return static_cast<int>(count.size()) - 1; }
  /// log sum_{|g| = n} exp(-s value(g)), from bin means.
  double log_shell_sum(int n, double s) const;
};

/// Single traversal feeding several observables.
std::vector<ShellHistogram> collect_histograms(const Representation& rep,
                                               const std::vector<Observable>& obs,
                                               const EntropyOptions& opt);

struct ExponentEstimate {
  std::string method;  // "counting" or "shell-rate" or "affinity"
  double h_hat = 0;
  double std_error = 0;
  double systematic = 0;
  double uncertainty = 0;  // std_error + systematic
  double t_min = 0, t_max = 0, t_comp = 0;
  std::vector<double> t, log_count;            // counting regression points
  std::vector<double> s_grid, rate;            // shell-rate curve P(s)
  int max_len = 0;
};

/// log N(t) regression on [t_min, t_comp].
ExponentEstimate counting_estimate(const ShellHistogram& h, const EntropyOptions& opt);
/// Root of the extrapolated shell rate P(s) = d/dn log Z_n(s).
ExponentEstimate shell_rate_estimate(const ShellHistogram& h, const EntropyOptions& opt);

struct EntropyReport {
  std::string name;
  Eigen::VectorXd coeffs;  // empty for non-linear observables
  ExponentEstimate counting;
  ExponentEstimate series;
  bool agree = false;      // |h1 - h2| <= 2 sqrt(u1^2 + u2^2)
  std::uint64_t elements = 0;
};

EntropyReport estimate_from_histogram(const ShellHistogram& h, const Observable& obs,
                                      const EntropyOptions& opt);
EntropyReport critical_exponent(const Representation& rep, const Functional& phi,
                                const EntropyOptions& opt);
std::vector<EntropyReport> critical_exponents(const Representation& rep,
                                              const std::vector<Observable>& obs,
                                              const EntropyOptions& opt);

/// log of the affinity-series term at s for a Cartan vector a (sorted, d >= 2).
double affinity_log_term(const Eigen::VectorXd& a, double s);

struct AffinityEstimate {
  ExponentEstimate estimate;
  int piece = 0;            // p with h_Aff in [p-2, p-1]
  bool monotone = true;     // P(s) nonincreasing on the grid
  std::vector<std::vector<double>> log_shell_sums;  // [shell][grid point]
};

AffinityEstimate affinity_exponent(const Representation& rep, const EntropyOptions& opt,
                                   double s_step = 0.05);

struct MinCheck {
  double h_min = 0;          // counting estimate of h(min phi_i)
  std::vector<double> h_each;
  double h_max = 0;
  double tolerance = 0;
  bool holds = false;        // |h_min - h_max| <= tolerance
};
/// The same checks from reports of one traversal.
MinCheck min_check(const std::vector<EntropyReport>& each, const EntropyReport& min_report);
MinCheck entropy_min_check(const Representation& rep, const std::vector<Functional>& phis,
                           const EntropyOptions& opt);

struct SumCheck {
  double h_phi = 0, h_psi = 0, h_sum = 0;
  double bound = 0;          // h_phi h_psi / (h_phi + h_psi)
  double slack = 0;          // bound - h_sum
  double tolerance = 0;
  bool holds = false;        // h_sum <= bound + tolerance
};
SumCheck sum_check(const EntropyReport& phi, const EntropyReport& psi, const EntropyReport& sum);
SumCheck entropy_sum_check(const Representation& rep, const Functional& phi, const Functional& psi,
                           const EntropyOptions& opt);

}  // namespace anosov
