#include "anosov/cli.hpp"

#include "anosov/cartan.hpp"
#include "anosov/cone.hpp"
#include "anosov/entropy.hpp"
#include "anosov/limitset.hpp"
#include "anosov/linalg.hpp"
#include "anosov/positivity.hpp"
#include "anosov/traverse.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#ifndef ANOSOV_VERSION
#define ANOSOV_VERSION "dev"
#endif

namespace anosov::cli {

using nlohmann::json;

namespace {

struct CommandSpec {
  int default_len;
  std::set<std::string> params;
  std::map<std::string, double> tolerances;
};

const std::map<std::string, CommandSpec>& command_table() {
  static const std::map<std::string, CommandSpec> t = {
      {"enumerate", {6, {"group", "oracle_len"}, {}}},
      {"gap", {8, {"p"}, {}}},
      {"entropy",
       {8, {"functionals", "affinity", "min_checks", "sum_checks", "expect", "estimator"}, {}}},
      {"limitset",
       {8,
        {"sample_length", "hyperconvex_triples", "hyperconvex_p", "affinity", "expect_dimension",
         "csv_limit", "estimator"},
        {{"bracket", 0.2}}}},
      {"dichotomy",
       {9, {"genus", "sample_length", "estimator"}, {{"hitchin", 0.15}, {"barbot", 0.3}}}},
      {"hx", {8, {"norms", "functionals", "estimator"}, {{"hx", 0.1}, {"closed_form", 1e-8}}}},
      {"positivity",
       {14,
        {"groups", "triples", "hpq_triples"},
        {{"coefficient", 1e-10}, {"form", 1e-12}, {"unipotent", 1e-8}, {"margin_routes", 1e-10}}}},
      {"verify",
       {6,
        {"trials", "cover_samples", "jacobian_max_dim", "oracle_len", "free_len"},
        {{"jacobian", 1e-8}, {"cocycle", 1e-8}, {"basin", 1e-10}, {"cartan", 1e-8}}}},
  };
  return t;
}

const CommandSpec& spec_of(const std::string& cmd) {
  const auto& t = command_table();
  auto it = t.find(cmd);
  if (it == t.end()) throw ConfigError("unknown command '" + cmd + "'");
  return it->second;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json estimate_json(const ExponentEstimate& e) {
  return {{"method", e.method},         {"h", e.h_hat},          {"std_error", e.std_error},
          {"systematic", e.systematic}, {"uncertainty", e.uncertainty}, {"t_min", e.t_min},
          {"t_max", e.t_max},           {"t_comp", e.t_comp},    {"max_len", e.max_len}};
}

json report_json(const EntropyReport& r) {
  json j = {{"name", r.name},
            {"counting", estimate_json(r.counting)},
            {"series", estimate_json(r.series)},
            {"agree", r.agree},
            {"elements", r.elements}};
  if (r.coeffs.size()) j["coeffs"] = vec_json(r.coeffs);
  return j;
}

std::string file_safe(const std::string& s) {
  std::string o;
  for (char c : s) o += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return o;
}

// Rows of a CSV file kept in memory until the run writes its artifacts.
struct Csv {
  std::string name;
  std::string header;
  std::vector<std::string> rows;
  template <class... Ts>
  void row(const Ts&... xs) {
    std::ostringstream os;
    os << std::setprecision(17);
    bool first = true;
    ((os << (first ? "" : ",") << xs, first = false), ...);
    rows.push_back(os.str());
  }
};

class Context {
 public:
  explicit Context(const ExperimentConfig& c)
      : cfg(c),
        budget(c.budget_elements, c.budget_seconds),
        spec(spec_of(c.command)),
        len(c.max_len > 0 ? c.max_len : spec.default_len) {
    for (const auto& [k, v] : spec.tolerances) tol[k] = v;
    for (const auto& [k, v] : c.tolerances.items()) tol[k] = v.get<double>();
  }

  const ExperimentConfig& cfg;
  Budget budget;
  const CommandSpec& spec;
  int len;
  std::map<std::string, double> tol;
  json summary = json::object();
  std::vector<Check> checks;
  std::deque<Csv> csvs;

  const json& params() const { return cfg.params; }

  Representation rep(const json& fallback) const {
    return build_representation(cfg.representation.is_null() ? fallback : cfg.representation);
  }

  EntropyOptions entropy_options(int max_len) {
    EntropyOptions o;
    o.max_len = max_len;
    o.threads = cfg.threads;
    o.budget = &budget;
    if (params().contains("estimator")) {
      const json& e = params().at("estimator");
      reject_unknown(e, {"bin", "fine_bin", "min_count", "min_log_span", "rate_shells"}, "estimator");
      o.bin = get_or(e, "bin", o.bin);
      o.fine_bin = get_or(e, "fine_bin", o.fine_bin);
      o.min_count = get_or(e, "min_count", o.min_count);
      o.min_log_span = get_or(e, "min_log_span", o.min_log_span);
      o.rate_shells = get_or(e, "rate_shells", o.rate_shells);
    }
    return o;
  }

  void check(std::string name, double value, const std::string& rel, double threshold) {
    Check c{std::move(name), value, threshold, rel, false};
    if (rel == "<=")
      c.pass = value <= threshold;
    else if (rel == ">=")
      c.pass = value >= threshold;
    else if (rel == "<")
      c.pass = value < threshold;
    else if (rel == ">")
      c.pass = value > threshold;
    else
      c.pass = value == threshold;
    checks.push_back(c);
  }

  void check_within(const std::string& name, double value, double target, double t) {
    check(name + " |value-" + num(target) + "|", std::abs(value - target), "<=", t);
  }

  Csv& csv(const std::string& name, const std::string& header) {
    csvs.push_back({name, header, {}});
    return csvs.back();
  }

  static std::string num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  }
};

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> bfs_sphere_sizes(const Representation& anchor, int max_len) {
  std::set<DedupKey> seen;
  std::vector<Eigen::Matrix2d> frontier{Eigen::Matrix2d::Identity()};
  seen.insert(dedup_key(frontier[0]));
  std::vector<std::uint64_t> sizes{1};
  const int nl = anchor.spec().letters();
  for (int n = 1; n <= max_len; ++n) {
    std::vector<Eigen::Matrix2d> next;
    for (const auto& m : frontier)
      for (int l = 0; l < nl; ++l) {
        Eigen::Matrix2d g = m * anchor.image(static_cast<Letter>(l));
        if (seen.insert(dedup_key(g)).second) next.push_back(g);
      }
    sizes.push_back(next.size());
    frontier = std::move(next);
  }
  return sizes;
}

GroupSpec parse_group(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const int n = colon == std::string::npos ? 2 : std::stoi(s.substr(colon + 1));
  if (kind == "surface") return GroupSpec::surface(n);
  if (kind == "free") return GroupSpec::free(n);
  throw ConfigError("group must be 'surface:<g>' or 'free:<k>'");
}

void cmd_enumerate(Context& cx) {
  GroupSpec spec = GroupSpec::surface(2);
  if (cx.params().contains("group"))
    spec = parse_group(cx.params().at("group").get<std::string>());
  else if (!cx.cfg.representation.is_null())
    spec = build_representation(cx.cfg.representation).spec();
  const auto sizes = sphere_sizes(spec, cx.len, &cx.budget);
  auto& csv = cx.csv("spheres.csv", "length,count");
  json arr = json::array();
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    csv.row(n, sizes[n]);
    arr.push_back(sizes[n]);
  }
  cx.summary["group"] = spec.describe();
  cx.summary["sphere_sizes"] = arr;
  if (sizes.size() > 2)
    cx.summary["growth_ratio"] = static_cast<double>(sizes.back()) / static_cast<double>(sizes[sizes.size() - 2]);
  // Independent counts: closed form for free groups, matrix BFS otherwise.
  std::vector<std::uint64_t> oracle{1};
  if (spec.kind == GroupKind::Free) {
    const std::uint64_t k2 = static_cast<std::uint64_t>(spec.letters());
    std::uint64_t s = k2;
    for (int n = 1; n <= cx.len; ++n, s *= k2 - 1) oracle.push_back(s);
  } else {
    const int ol = std::min(cx.len, get_or(cx.params(), "oracle_len", 5));
    oracle = bfs_sphere_sizes(fuchsian(spec.rank), ol);
  }
  for (std::size_t n = 1; n < oracle.size(); ++n)
    cx.check("sphere " + std::to_string(n) + " count vs oracle " + std::to_string(oracle[n]),
             static_cast<double>(sizes[n]), "==", static_cast<double>(oracle[n]));
}

void cmd_gap(Context& cx) {
  const Representation rep = cx.rep({{"family", "fuchsian"}});
  const int p = get_or(cx.params(), "p", 1);
  const GapReport g = anosov_gap_report(rep, p, cx.len, cx.cfg.threads, &cx.budget);
  auto& csv = cx.csv("gap.csv", "length,count,min_gap,min_rate,mean_rate");
  for (const auto& s : g.shells) csv.row(s.length, s.count, s.min_gap, s.min_rate, s.mean_rate);
  cx.summary["representation"] = rep.name();
  cx.summary["p"] = p;
  cx.summary["mu_hat"] = g.mu_hat;
  cx.summary["c_hat"] = g.c_hat;
  cx.summary["anosov"] = g.anosov;
}

std::vector<std::string> string_list(const json& j, const char* key, std::vector<std::string> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<std::string>>();
}

void regression_csv(Context& cx, const EntropyReport& r) {
  auto& c = cx.csv("entropy_" + file_safe(r.name) + ".csv", "t,log_count");
  for (std::size_t i = 0; i < r.counting.t.size(); ++i) c.row(r.counting.t[i], r.counting.log_count[i]);
  auto& s = cx.csv("rate_" + file_safe(r.name) + ".csv", "s,rate");
  for (std::size_t i = 0; i < r.series.s_grid.size(); ++i) s.row(r.series.s_grid[i], r.series.rate[i]);
}

json affinity_json(const AffinityEstimate& a) {
  json j = estimate_json(a.estimate);
  j["piece"] = a.piece;
  j["monotone"] = a.monotone;
  return j;
}

void cmd_entropy(Context& cx) {
  const Representation rep = cx.rep({{"family", "fuchsian"}});
  const int d = rep.dim();
  const EntropyOptions opt = cx.entropy_options(cx.len);
  std::vector<Observable> obs;
  std::vector<std::string> names;
  auto add = [&](const Observable& o) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == o.name) return i;
    obs.push_back(o);
    names.push_back(o.name);
    return names.size() - 1;
  };
  for (const auto& f : string_list(cx.params(), "functionals", {"alpha1"}))
    add(Observable::linear(Functional::parse(f, d)));
  struct MinJob {
    std::vector<std::size_t> each;
    std::size_t min;
  };
  struct SumJob {
    std::size_t phi, psi, sum;
  };
  std::vector<MinJob> mins;
  std::vector<SumJob> sums;
  if (cx.params().contains("min_checks"))
    for (const auto& group : cx.params().at("min_checks")) {
      std::vector<Functional> phis;
      MinJob job;
      for (const auto& f : group.get<std::vector<std::string>>()) {
        phis.push_back(Functional::parse(f, d));
        job.each.push_back(add(Observable::linear(phis.back())));
      }
      job.min = add(Observable::min_of(phis));
      mins.push_back(job);
    }
  if (cx.params().contains("sum_checks"))
    for (const auto& pair : cx.params().at("sum_checks")) {
      const auto fs = pair.get<std::vector<std::string>>();
      if (fs.size() != 2) throw ConfigError("sum_checks entries are pairs of functionals");
      const Functional a = Functional::parse(fs[0], d), b = Functional::parse(fs[1], d);
      sums.push_back({add(Observable::linear(a)), add(Observable::linear(b)), add(Observable::linear(a + b))});
    }
  const auto reports = critical_exponents(rep, obs, opt);
  cx.summary["representation"] = rep.name();
  cx.summary["max_len"] = cx.len;
  json rs = json::array();
  for (const auto& r : reports) {
    rs.push_back(report_json(r));
    regression_csv(cx, r);
    cx.check(r.name + " estimators |h1-h2| - 2 hypot(u1,u2)",
             std::abs(r.counting.h_hat - r.series.h_hat) -
                 2 * std::hypot(r.counting.uncertainty, r.series.uncertainty),
             "<=", 0.0);
  }
  cx.summary["exponents"] = rs;
  if (cx.params().contains("expect"))
    for (const auto& [name, w] : cx.params().at("expect").items()) {
      bool found = false;
      for (const auto& r : reports)
        if (r.name == name || r.name == Functional::parse(name, d).name) {
          cx.check_within(r.name + " counting", r.counting.h_hat, w.at(0).get<double>(), w.at(1).get<double>());
          found = true;
        }
      if (!found) throw ConfigError("expect refers to unknown functional '" + name + "'");
    }
  json mj = json::array();
  for (const auto& job : mins) {
    std::vector<EntropyReport> each;
    for (auto i : job.each) each.push_back(reports[i]);
    const MinCheck m = min_check(each, reports[job.min]);
    mj.push_back({{"min", reports[job.min].name}, {"h_min", m.h_min}, {"h_max", m.h_max},
                  {"h_each", m.h_each}, {"tolerance", m.tolerance}, {"holds", m.holds}});
    cx.check(reports[job.min].name + " |h_min-h_max| - tolerance", std::abs(m.h_min - m.h_max) - m.tolerance,
             "<=", 0.0);
  }
  if (!mins.empty()) cx.summary["min_checks"] = mj;
  json sj = json::array();
  for (const auto& job : sums) {
    const SumCheck s = sum_check(reports[job.phi], reports[job.psi], reports[job.sum]);
    sj.push_back({{"sum", reports[job.sum].name}, {"h_phi", s.h_phi}, {"h_psi", s.h_psi},
                  {"h_sum", s.h_sum}, {"bound", s.bound}, {"slack", s.slack},
                  {"tolerance", s.tolerance}, {"holds", s.holds}});
    cx.check(reports[job.sum].name + " h_sum - bound - tolerance", s.h_sum - s.bound - s.tolerance, "<=", 0.0);
  }
  if (!sums.empty()) cx.summary["sum_checks"] = sj;
  if (get_or(cx.params(), "affinity", false)) {
    const AffinityEstimate a = affinity_exponent(rep, opt);
    cx.summary["affinity"] = affinity_json(a);
  }
}

// Boundary sample, box dimension, Lipschitz verdict and (optionally) the
// affinity bracket for one representation.
json limit_block(Context& cx, const Representation& rep, int length, const std::string& tag,
                 std::vector<Eigen::VectorXd>* keep = nullptr) {
  BoundarySampleOptions bo;
  bo.threads = cx.cfg.threads;
  bo.budget = &cx.budget;
  const BoundarySample bs = boundary_sample(rep, length, bo);
  const BoundarySample prev = boundary_sample(rep, std::max(1, length - 2), bo);
  const auto pts = sample_points(bs);
  json j = {{"representation", rep.name()},
            {"sample_length", length},
            {"points", pts.size()},
            {"no_gap", bs.no_gap},
            {"median_residual", bs.median_residual},
            {"median_residual_prev", prev.median_residual}};
  cx.check(tag + "median residual decay ratio", bs.median_residual / std::max(prev.median_residual, 1e-300),
           "<=", 0.5);
  const int rank = weak_irreducibility_rank(pts);
  j["rank"] = rank;
  const BoxDimension bd = box_dimension(pts);
  j["box_dimension"] = {{"slope", bd.slope},
                        {"std_error", bd.std_error},
                        {"eps_hi", bd.scales[bd.window_lo]},
                        {"eps_lo", bd.scales[bd.window_hi - 1]}};
  auto& bc = cx.csv(tag + "box.csv", "eps,count,in_window");
  for (std::size_t i = 0; i < bd.scales.size(); ++i)
    bc.row(bd.scales[i], bd.counts[i], i >= bd.window_lo && i < bd.window_hi ? 1 : 0);
  if (rank <= 2) {
    // The limit set lies in a projective line: nothing transverse to test.
    j["lipschitz"] = {{"verdict", "n/a-line"}};
  } else {
    const LipschitzReport lr = lipschitz_diagnostic(pts);
    j["lipschitz"] = {{"verdict", lr.verdict}, {"slope", lr.slope}, {"points", lr.points}};
    auto& lc = cx.csv(tag + "lipschitz.csv", "eps,ratio");
    for (std::size_t i = 0; i < lr.scales.size(); ++i) lc.row(lr.scales[i], lr.ratio[i]);
  }
  if (keep) *keep = pts;
  return j;
}

void cmd_limitset(Context& cx) {
  const Representation rep = cx.rep({{"family", "hitchin"}});
  const int T = get_or(cx.params(), "sample_length", 6);
  std::vector<Eigen::VectorXd> pts;
  json j = limit_block(cx, rep, T, "", &pts);
  const std::size_t limit = get_or<std::size_t>(cx.params(), "csv_limit", 20000);
  auto& sc = cx.csv("samples.csv", "index,coords");
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / std::max<std::size_t>(limit, 1));
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (Eigen::Index k = 0; k < pts[i].size(); ++k) os << (k ? " " : "") << pts[i](k);
    sc.row(i, os.str());
  }
  if (cx.params().contains("expect_dimension")) {
    const auto w = cx.params().at("expect_dimension");
    cx.check_within("box dimension", j["box_dimension"]["slope"].get<double>(), w.at(0).get<double>(),
                    w.at(1).get<double>());
  }
  const int triples = get_or(cx.params(), "hyperconvex_triples", 0);
  if (triples > 0) {
    const int p = get_or(cx.params(), "hyperconvex_p", 2);
    const HyperconvexReport h = hyperconvex_check(rep, p, triples, cx.cfg.seed);
    j["hyperconvex"] = {{"p", p}, {"triples", triples}, {"min_margin", h.min_margin}, {"median_margin", h.median_margin}};
  }
  if (get_or(cx.params(), "affinity", false)) {
    const AffinityEstimate a = affinity_exponent(rep, cx.entropy_options(cx.len));
    j["affinity"] = affinity_json(a);
    const double slack = a.estimate.h_hat - j["box_dimension"]["slope"].get<double>();
    j["bracket_slack"] = slack;
    cx.check("box dimension - h_Aff", -slack, "<=", cx.tol.at("bracket"));
  }
  cx.summary = j;
}

void cmd_dichotomy(Context& cx) {
  const int genus = get_or(cx.params(), "genus", 2);
  const int T = get_or(cx.params(), "sample_length", 6);
  const Representation hit = build_representation({{"family", "hitchin"}, {"genus", genus}, {"k", 2}});
  const Representation bar = build_representation({{"family", "barbot"}, {"genus", genus}});
  const EntropyOptions opt = cx.entropy_options(cx.len);
  const auto alpha = Observable::linear(Functional::alpha(3, 1));
  struct Side {
    const char* tag;
    const Representation* rep;
    double target;
    double tol;
    const char* verdict;
  };
  const Side sides[] = {{"hitchin", &hit, 1.0, cx.tol.at("hitchin"), "bounded"},
                        {"barbot", &bar, 2.0, cx.tol.at("barbot"), "n/a-line"}};
  for (const auto& s : sides) {
    const EntropyReport r = critical_exponents(*s.rep, {alpha}, opt).front();
    regression_csv(cx, r);
    json j = report_json(r);
    j["window"] = {s.target - s.tol, s.target + s.tol};
    j["limit_set"] = limit_block(cx, *s.rep, T, std::string(s.tag) + "_");
    cx.check_within(std::string(s.tag) + " h(alpha1) counting", r.counting.h_hat, s.target, s.tol);
    cx.check_within(std::string(s.tag) + " h(alpha1) shell-rate", r.series.h_hat, s.target, s.tol);
    cx.check(std::string(s.tag) + " estimators |h1-h2| - 2 hypot(u1,u2)",
             std::abs(r.counting.h_hat - r.series.h_hat) -
                 2 * std::hypot(r.counting.uncertainty, r.series.uncertainty),
             "<=", 0.0);
    const std::string verdict = j["limit_set"]["lipschitz"]["verdict"].get<std::string>();
    cx.check(std::string(s.tag) + " lipschitz verdict is " + s.verdict + " (got " + verdict + ")",
             verdict == s.verdict ? 1 : 0, "==", 1);
    if (std::string(s.tag) == "barbot")
      cx.check("barbot weak irreducibility rank", j["limit_set"]["rank"].get<int>(), "==", 2);
    cx.summary[s.tag] = j;
  }
}

Eigen::MatrixXd norm_matrix(const json& n, int d) {
  if (n.contains("matrix")) {
    const auto rows = n.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != d) throw ConfigError("norm matrix must be d x d");
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d)
        throw ConfigError("norm matrix must be d x d");
      for (int k = 0; k < d; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return m;
  }
  const std::string preset = get_or<std::string>(n, "preset", "hyperbolic");
  if (preset != "hyperbolic") throw ConfigError("unknown norm preset '" + preset + "'");
  return hyperbolic_norm(d, get_or(n, "m", d));
}

DualNormProblem bound_problem(const json& b, const Eigen::MatrixXd& x, int d) {
  reject_unknown(b, {"problem", "p", "basis", "rank", "generators", "cone"}, "bound");
  if (get_or<std::string>(b, "problem", "") == "so_positive") return so_positive_problem(get_or(b, "p", 3));
  const std::string basis = get_or<std::string>(b, "basis", "sl");
  const int rank = get_or(b, "rank", 1);
  std::vector<Eigen::VectorXd> gens, cone;
  std::vector<std::string> names;
  for (const auto& f : string_list(b, "generators", {"alpha1"})) {
    const Functional phi = Functional::parse(f, d);
    gens.push_back(phi.coeffs);
    names.push_back(phi.name);
  }
  const std::string cone_kind = get_or<std::string>(b, "cone", "simple_roots");
  if (cone_kind == "simple_roots")
    cone = basis == "so" ? so_simple_roots(d, rank) : sl_simple_roots(d);
  else if (cone_kind != "none")
    throw ConfigError("cone must be 'simple_roots' or 'none'");
  if (basis == "so") return make_problem(so_cartan_basis(d, rank), x, gens, cone, names);
  if (basis != "sl") throw ConfigError("basis must be 'sl' or 'so'");
  return make_problem(sl_cartan_basis(d), x, gens, cone, names);
}

void cmd_hx(Context& cx) {
  const Representation rep = cx.rep({{"family", "fuchsian"}});
  const int d = rep.dim();
  json norms = cx.params().contains("norms") ? cx.params().at("norms")
                                              : json::array({json{{"preset", "hyperbolic"}, {"m", d}}});
  std::vector<Observable> obs;
  std::vector<Eigen::MatrixXd> xs;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    reject_unknown(norms[i], {"name", "preset", "m", "matrix", "bound"}, "norms entry");
    const Eigen::MatrixXd x = norm_matrix(norms[i], d);
    if (Eigen::LLT<Eigen::MatrixXd>(x).info() != Eigen::Success)
      throw ConfigError("norm matrix is not positive definite");
    xs.push_back(x);
    Observable o;
    o.name = get_or<std::string>(norms[i], "name", "norm" + std::to_string(i));
    o.dim = d;
    o.levels = d - 1;
    o.f = [x, d](const double* a) {
      const Eigen::Map<const Eigen::VectorXd> v(a, d);
      return std::sqrt(v.dot(x * v));
    };
    obs.push_back(o);
  }
  for (const auto& f : string_list(cx.params(), "functionals", {}))
    obs.push_back(Observable::linear(Functional::parse(f, d)));
  const auto reports = critical_exponents(rep, obs, cx.entropy_options(cx.len));
  cx.summary["representation"] = rep.name();
  cx.summary["max_len"] = cx.len;
  json out = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EntropyReport& r = reports[i];
    regression_csv(cx, r);
    json j = report_json(r);
    cx.check(r.name + " estimators |h1-h2| - 2 hypot(u1,u2)",
             std::abs(r.counting.h_hat - r.series.h_hat) -
                 2 * std::hypot(r.counting.uncertainty, r.series.uncertainty),
             "<=", 0.0);
    if (i < xs.size()) {
      const json b = norms[i].contains("bound") ? norms[i].at("bound") : json{{"basis", "sl"}};
      const DualNormProblem pr = bound_problem(b, xs[i], d);
      const DualNormSolution sol = hx_upper_bound(pr, cx.cfg.seed);
      const DualNormSolution hull = hull_min_norm(pr);
      j["bound"] = {{"value", sol.value},
                    {"weights", vec_json(sol.weights)},
                    {"cone_coeffs", vec_json(sol.cone_coeffs)},
                    {"minimizer", vec_json(sol.minimizer)},
                    {"converged", sol.converged},
                    {"iterations", sol.iterations},
                    {"hull_min_norm", hull.value},
                    {"hull_weights", vec_json(hull.weights)},
                    {"barycenter_norm", barycenter_dual_norm(pr)},
                    {"generators", pr.names}};
      cx.check(r.name + " h^X - bound", r.counting.h_hat - sol.value, "<=", cx.tol.at("hx"));
      cx.check(r.name + " bound solver converged", sol.converged ? 1 : 0, "==", 1);
      cx.check(r.name + " min cone coefficient", sol.cone_coeffs.size() ? sol.cone_coeffs.minCoeff() : 0.0, ">=",
               0.0);
      cx.check(r.name + " |sum of weights - 1|", std::abs(sol.weights.sum() - 1), "<=", 1e-12);
      // With the cone inactive the minimum is the closed-form hull minimum.
      if (pr.cone.empty() || get_or<std::string>(b, "problem", "") == "so_positive")
        cx.check(r.name + " |solver - closed form|", std::abs(sol.value - hull.value), "<=",
                 cx.tol.at("closed_form"));
    }
    out.push_back(j);
  }
  cx.summary["exponents"] = out;
}

void cmd_positivity(Context& cx) {
  std::vector<std::pair<int, int>> groups = {{2, 3}, {3, 4}, {3, 5}, {4, 5}, {4, 7}, {5, 6}};
  if (cx.params().contains("groups")) groups = cx.params().at("groups").get<std::vector<std::pair<int, int>>>();
  const int trials = get_or(cx.params(), "triples", 1000);
  std::mt19937_64 rng(cx.cfg.seed);
  auto& csv = cx.csv("positivity.csv", "p,q,max_coefficient_error,max_form_residual,max_unipotency,min_margin");
  json gj = json::array();
  for (auto [p, q] : groups) {
    const PositivityContext ctx(p, q);
    const std::string tag = "SO(" + std::to_string(p) + "," + std::to_string(q) + ") ";
    double coef = 0, form = 0, unip = 0, route = 0, min_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const PositiveTriple tr = positive_triple(ctx, random_parameters(ctx, rng));
      form = std::max(form, form_residual(tr.s, ctx.Q));
      unip = std::max(unip, unipotency_residual(tr.s));
      for (std::size_t k = 0; k < tr.coefficient.size(); ++k) {
        coef = std::max(coef, std::abs(tr.coefficient[k] - tr.expected[k]));
        route = std::max(route, std::abs(tr.margins[k] - tr.margins_det[k]));
        min_margin = std::min(min_margin, tr.margins[k]);
      }
    }
    // Single unipotents, including the boundary vector (1, 0, ..., 0).
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(ctx.cone_dim());
    e1(0) = 1;
    for (int i = 1; i <= p - 2; ++i) form = std::max(form, form_residual(positive_unipotent(ctx, i, 1.7), ctx.Q));
    form = std::max(form, form_residual(positive_unipotent(ctx, e1, false), ctx.Q));
    bool rejected = false;
    try {
      positive_unipotent(ctx, e1);
    } catch (const ConeViolation&) {
      rejected = true;
    }
    const PositiveTriple unit = positive_triple(ctx, unit_parameters(ctx));
    double unit_err = 0;
    for (std::size_t k = 0; k < unit.coefficient.size(); ++k)
      unit_err = std::max(unit_err, std::abs(unit.coefficient[k] - static_cast<double>(p - 1)));
    csv.row(p, q, coef, form, unip, std::isfinite(min_margin) ? min_margin : 0.0);
    json j = {{"p", p}, {"q", q}, {"triples", trials}, {"max_coefficient_error", coef},
              {"max_form_residual", form}, {"max_unipotency", unip}, {"max_margin_route_diff", route},
              {"boundary_rejected", rejected}, {"unit_coefficients", unit.coefficient}};
    if (p > 2) {
      j["min_margin"] = min_margin;
      cx.check(tag + "coefficient identity", coef, "<=", cx.tol.at("coefficient"));
      cx.check(tag + "min directness margin", min_margin, ">", 0.0);
      cx.check(tag + "margin routes", route, "<=", cx.tol.at("margin_routes"));
      cx.check(tag + "unit-parameter coefficients = p-1", unit_err, "<=", cx.tol.at("coefficient"));
    }
    cx.check(tag + "Q preservation", form, "<=", cx.tol.at("form"));
    cx.check(tag + "unipotency", unip, "<=", cx.tol.at("unipotent"));
    cx.check(tag + "boundary vector rejected", rejected ? 1 : 0, "==", 1);
    gj.push_back(j);
  }
  cx.summary["groups"] = gj;
  const int hpq = get_or(cx.params(), "hpq_triples", 300);
  const Representation rep = cx.rep({{"family", "so_fuchsian"}, {"p", 3}});
  if (hpq > 0 && rep.form()) {
    const SignatureReport s = hpq_signature_check(rep, *rep.form(), hpq, cx.cfg.seed, cx.len);
    cx.summary["hpq"] = {{"representation", rep.name()}, {"triples", s.triples}, {"two_one", s.two_one},
                         {"degenerate", s.degenerate}, {"fraction", s.fraction()},
                         {"max_isotropy", s.max_isotropy}};
    cx.check("hpq fraction of (2,1) triples", s.fraction(), "==", 1.0);
  }
}

// ---------------------------------------------------------------------------
// verify

template <class Scalar>
Eigen::VectorXd oracle_cartan(const Eigen::MatrixXd& m) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd(m.cast<Scalar>());
  const auto& s = svd.singularValues();
  Eigen::VectorXd a(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) a(i) = static_cast<double>(std::log(s(i)));
  return a.array() - a.mean();
}

template <class Scalar>
Eigen::VectorXd oracle_cartan_word(const Representation& rep, const Word& w) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M acc = M::Identity(rep.dim(), rep.dim());
  for (Letter l : w) acc = acc * rep.image(l).cast<Scalar>();
  Eigen::JacobiSVD<M> svd(acc);
  const auto& s = svd.singularValues();
  Eigen::VectorXd a(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) a(i) = static_cast<double>(std::log(s(i)));
  return a.array() - a.mean();
}

constexpr double kOracleSpread = 18.0;

Eigen::MatrixXd conditioned_matrix(int d, double log_cond, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd a(d);
  for (int i = 0; i < d; ++i) a(i) = log_cond * u(rng);
  a(0) = log_cond;
  a(d - 1) = 0;
  a.array() -= a.mean();
  return random_orthogonal(d, rng) * a.array().exp().matrix().asDiagonal() * random_orthogonal(d, rng).transpose();
}

void cmd_verify(Context& cx) {
  const int trials = get_or(cx.params(), "trials", 1000);
  const std::size_t cover_samples = get_or<std::size_t>(cx.params(), "cover_samples", 100000);
  const int dmax = get_or(cx.params(), "jacobian_max_dim", 6);
  std::mt19937_64 rng(cx.cfg.seed);
  const bool extended = cx.cfg.precision == "extended";
  json j;

  double jac = 0;
  json jj = json::array();
  for (int d = 2; d <= dmax; ++d)
    for (int p = 1; p < d; ++p) {
      const JacobianReport r = ps_jacobian_identity(d, p, trials, cx.cfg.seed * 1000 + static_cast<std::uint64_t>(10 * d + p));
      jj.push_back({{"d", d}, {"p", p}, {"trials", r.trials}, {"max_residual", r.max_residual}, {"resampled", r.resampled}});
      jac = std::max(jac, r.max_residual);
    }
  j["jacobian"] = jj;
  cx.check("Jacobian identity max residual", jac, "<", cx.tol.at("jacobian"));

  double cocycle = 0;
  for (int t = 0; t < trials; ++t) {
    const int d = 2 + t % (dmax - 1);
    const int p = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d - 1));
    const Eigen::MatrixXd g = conditioned_matrix(d, 6.0, rng), h = conditioned_matrix(d, 6.0, rng);
    const Eigen::MatrixXd x = orthonormalize(gaussian_matrix(d, p, rng));
    const Eigen::MatrixXd hx = orthonormalize(Eigen::MatrixXd(h * x));
    cocycle = std::max(cocycle, std::abs(iwasawa(g * h, x) - iwasawa(g, hx) - iwasawa(h, x)));
  }
  j["cocycle_max_residual"] = cocycle;
  cx.check("Iwasawa cocycle additivity", cocycle, "<", cx.tol.at("cocycle"));

  double slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const int d = 2 + t % (dmax - 1);
    const Eigen::MatrixXd m = conditioned_matrix(d, 5.0, rng);
    const double alpha = 0.2 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng);
    slack = std::min(slack, basin_contraction_slack(m, sample_basin(m, alpha, rng), alpha));
  }
  j["basin_min_slack"] = slack;
  cx.check("basin contraction slack", slack, ">=", -cx.tol.at("basin"));

  const Eigen::MatrixXd cm = conditioned_matrix(4, 6.0, rng);
  const EllipsoidCover cover = ellipsoid_cover(cm, 0.5, 2);
  const CoverAudit audit = cover_audit(cover, cm, 0.5, cover_samples, rng);
  j["cover_audit"] = {{"samples", audit.samples}, {"max_ellipsoid", audit.max_ellipsoid},
                      {"max_ball_ratio", audit.max_ball_ratio}};
  cx.check("cover audit ellipsoid", audit.max_ellipsoid, "<", 1.0);
  cx.check("cover audit balls", audit.max_ball_ratio, "<=", 1.0);

  double cart = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd m = conditioned_matrix(2 + t % (dmax - 1), std::log(1e6), rng);
    const Eigen::VectorXd o = extended ? oracle_cartan<long double>(m) : oracle_cartan<double>(m);
    cart = std::max(cart, (cartan_project(m) - o).cwiseAbs().maxCoeff());
  }
  const Representation f = fuchsian_genus2();
  int compared = 0;
  for (const Representation& rep : {sym_power(f, 2), sym_power(f, 3), so_p_pminus1_fuchsian(3)}) {
    for (int t = 0; t < 100; ++t) {
      Word w;
      const int n = 1 + t % cx.len;
      for (int i = 0; i < n; ++i) w.push_back(static_cast<Letter>(rng() % static_cast<std::uint64_t>(rep.spec().letters())));
      w = reduce(w, rep.spec());
      if (w.empty()) continue;
      const Eigen::VectorXd a = cartan_of_word(rep, w);
      // The SVD oracle resolves s_d only while s_1 / s_d stays far below 1/eps.
      if (a(0) - a(a.size() - 1) > kOracleSpread) continue;
      const Eigen::VectorXd o = extended ? oracle_cartan_word<long double>(rep, w) : oracle_cartan_word<double>(rep, w);
      cart = std::max(cart, (a - o).cwiseAbs().maxCoeff());
      ++compared;
    }
  }
  j["cartan_max_diff"] = cart;
  j["cartan_words_compared"] = compared;
  j["cartan_oracle"] = extended ? "extended" : "double";
  cx.check("compound vs SVD Cartan agreement", cart, "<", cx.tol.at("cartan"));

  const int ol = get_or(cx.params(), "oracle_len", 5);
  const auto surf = sphere_sizes(GroupSpec::surface(2), ol, &cx.budget);
  const auto bfs = bfs_sphere_sizes(fuchsian_genus2(), ol);
  j["surface_sphere_sizes"] = surf;
  for (int n = 0; n <= ol; ++n)
    cx.check("genus-2 sphere " + std::to_string(n) + " vs BFS", static_cast<double>(surf[static_cast<std::size_t>(n)]),
             "==", static_cast<double>(bfs[static_cast<std::size_t>(n)]));
  const int fl = get_or(cx.params(), "free_len", 8);
  const auto fr = sphere_sizes(GroupSpec::free(2), fl, &cx.budget);
  std::uint64_t expect = 4;
  for (int n = 1; n <= fl; ++n, expect *= 3)
    cx.check("F2 sphere " + std::to_string(n) + " vs 4*3^(n-1)", static_cast<double>(fr[static_cast<std::size_t>(n)]),
             "==", static_cast<double>(expect));

  KeyAudit keys(f);
  for (int n = 0; n <= std::min(ol, 5); ++n)
    for (const Word& w : sphere(f.spec(), n)) keys.add(w);
  j["dedup_keys"] = keys.size();

  // Thread-count independence of the sharded reduction.
  EntropyOptions o1 = cx.entropy_options(cx.len);
  EntropyOptions o3 = o1;
  o1.threads = 1;
  o3.threads = 3;
  const auto obs = std::vector<Observable>{Observable::linear(Functional::alpha(4, 1))};
  const Representation s3 = sym_power(f, 3);
  const auto h1 = collect_histograms(s3, obs, o1).front();
  const auto h3 = collect_histograms(s3, obs, o3).front();
  const bool same = h1.count == h3.count && h1.sum == h3.sum && h1.min_value == h3.min_value;
  j["thread_determinism"] = same;
  cx.check("histograms identical for 1 and 3 threads", same ? 1 : 0, "==", 1);
  cx.summary = j;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> commands() {
  std::vector<std::string> out;
  for (const auto& [k, v] : command_table()) out.push_back(k);
  return out;
}

json ExperimentConfig::to_json() const {
  return {{"command", command},
          {"representation", representation},
          {"max_len", max_len > 0 ? max_len : spec_of(command).default_len},
          {"threads", threads},
          {"seed", seed},
          {"precision", precision},
          {"out", out},
          {"budget_elements", budget_elements},
          {"budget_seconds", budget_seconds},
          {"tolerances", tolerances},
          {"params", params}};
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.command = get_or<std::string>(j, "command", "");
  if (c.command.empty()) throw ConfigError("config has no command");
  const CommandSpec& spec = spec_of(c.command);
  std::set<std::string> allowed = {"command", "representation", "max_len", "threads", "seed", "precision", "out",
                                   "budget_elements", "budget_seconds", "tolerances"};
  for (const auto& [k, v] : j.items()) {
    if (allowed.count(k)) continue;
    if (!spec.params.count(k)) throw ConfigError("unknown key '" + k + "' for command " + c.command);
    c.params[k] = v;
  }
  if (j.contains("representation")) c.representation = j.at("representation");
  c.max_len = get_or(j, "max_len", 0);
  c.threads = get_or(j, "threads", 1);
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.precision = get_or<std::string>(j, "precision", c.command == "verify" ? "extended" : "double");
  c.out = get_or<std::string>(j, "out", "");
  c.budget_elements = get_or<std::uint64_t>(j, "budget_elements", 0);
  c.budget_seconds = get_or(j, "budget_seconds", 0.0);
  if (j.contains("tolerances")) {
    c.tolerances = j.at("tolerances");
    if (!c.tolerances.is_object()) throw ConfigError("tolerances must be an object");
    for (const auto& [k, v] : c.tolerances.items()) {
      if (!spec.tolerances.count(k)) throw ConfigError("unknown tolerance '" + k + "' for command " + c.command);
      if (!v.is_number()) throw ConfigError("tolerance '" + k + "' must be a number");
    }
  }
  if (c.max_len < 0 || c.max_len > 40) throw ConfigError("max_len out of range");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.precision != "double" && c.precision != "extended") throw ConfigError("precision must be double or extended");
  if (c.precision == "extended" && c.command != "verify")
    throw ConfigError("extended precision only applies to verify");
  if (c.budget_seconds < 0) throw ConfigError("budget_seconds must be >= 0");
  return c;
}

Representation build_representation(const json& src) {
  if (!src.is_object()) throw ConfigError("representation must be an object");
  if (src.contains("import")) {
    reject_unknown(src, {"import"}, "representation");
    return load_representation(src.at("import").get<std::string>());
  }
  const std::string fam = get_or<std::string>(src, "family", "");
  if (fam == "fuchsian") {
    reject_unknown(src, {"family", "genus", "twist"}, "representation");
    const int g = get_or(src, "genus", 2);
    const double tau = get_or(src, "twist", 0.0);
    if (tau != 0) {
      if (g != 2) throw ConfigError("twist is only available in genus 2");
      return fuchsian_twisted(tau);
    }
    return fuchsian(g);
  }
  if (fam == "hitchin") {
    reject_unknown(src, {"family", "genus", "k"}, "representation");
    return sym_power(fuchsian(get_or(src, "genus", 2)), get_or(src, "k", 2));
  }
  if (fam == "barbot") {
    reject_unknown(src, {"family", "genus"}, "representation");
    const Representation f = fuchsian(get_or(src, "genus", 2));
    return direct_sum(f, trivial(f.spec(), 1)).renamed("barbot");
  }
  if (fam == "so_fuchsian") {
    reject_unknown(src, {"family", "p"}, "representation");
    return so_p_pminus1_fuchsian(get_or(src, "p", 3));
  }
  if (fam == "schottky") {
    reject_unknown(src, {"family", "rank", "lambda"}, "representation");
    const int k = get_or(src, "rank", 2);
    const double lambda = get_or(src, "lambda", 20.0);
    if (k < 1 || lambda <= 1) throw ConfigError("schottky needs rank >= 1 and lambda > 1");
    std::vector<Eigen::MatrixXd> gens;
    for (int i = 0; i < k; ++i) {
      const double th = M_PI * i / (2.0 * k);
      Eigen::Matrix2d r;
      r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      gens.push_back(r * Eigen::Vector2d(lambda, 1 / lambda).asDiagonal() * r.transpose());
    }
    return Representation::from_generators(GroupSpec::free(k), gens, "schottky");
  }
  throw ConfigError("unknown representation family '" + fam + "'");
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

json checks_json(const std::vector<Check>& checks, bool failures_only) {
  json a = json::array();
  for (const auto& c : checks)
    if (!failures_only || !c.pass)
      a.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation},
                   {"threshold", c.threshold}, {"pass", c.pass}});
  return a;
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<Context> cx;
  try {
    cx = std::make_unique<Context>(config);
    const std::string& c = config.command;
    if (c == "enumerate")
      cmd_enumerate(*cx);
    else if (c == "gap")
      cmd_gap(*cx);
    else if (c == "entropy")
      cmd_entropy(*cx);
    else if (c == "limitset")
      cmd_limitset(*cx);
    else if (c == "dichotomy")
      cmd_dichotomy(*cx);
    else if (c == "hx")
      cmd_hx(*cx);
    else if (c == "positivity")
      cmd_positivity(*cx);
    else
      cmd_verify(*cx);
  } catch (const BudgetError& e) {
    res.exit_code = kBudgetError;
    res.error = e.what();
  } catch (const ConfigError& e) {
    res.exit_code = kConfigError;
    res.error = e.what();
  } catch (const DimensionError& e) {
    res.exit_code = kConfigError;
    res.error = e.what();
  } catch (const json::exception& e) {
    res.exit_code = kConfigError;
    res.error = e.what();
  } catch (const Error& e) {
    res.exit_code = kAssertionFailure;
    res.error = e.what();
  }
  if (cx) {
    res.summary = cx->summary;
    res.checks = cx->checks;
  }
  bool all = true;
  for (const auto& c : res.checks) all = all && c.pass;
  if (res.exit_code == kOk && !all) res.exit_code = kAssertionFailure;
  res.summary["command"] = config.command;
  res.summary["checks"] = checks_json(res.checks, false);
  res.summary["status"] = res.exit_code == kOk ? "ok" : "fail";
  res.summary["exit_code"] = res.exit_code;
  if (!res.error.empty()) res.summary["error"] = res.error;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.out.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
      return res;
    }
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json manifest = {{"version", ANOSOV_VERSION},
                     {"config", config.command.empty() ? json() : config.to_json()},
                     {"started", stamp},
                     {"wall_seconds", wall},
                     {"elements", cx ? cx->budget.used() : 0},
                     {"artifacts", json::array({"summary.json"})}};
    if (cx)
      for (const auto& c : cx->csvs) {
        std::string text = c.header + "\n";
        for (const auto& r : c.rows) text += r + "\n";
        write_file(dir / c.name, text);
        manifest["artifacts"].push_back(c.name);
      }
    write_file(dir / "summary.json", res.summary.dump(2) + "\n");
    if (res.exit_code != kOk) {
      json f = {{"exit_code", res.exit_code}, {"error", res.error}, {"failed_checks", checks_json(res.checks, true)}};
      write_file(dir / "failures.json", f.dump(2) + "\n");
      manifest["artifacts"].push_back("failures.json");
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return res;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"anosov_lab: numerical experiments on Anosov representations"};
  std::string command, config_path, out, precision, family;
  int max_len = 0, threads = 0;
  std::uint64_t seed = 0, budget_elements = 0;
  double budget_seconds = -1;
  app.add_option("command", command, "enumerate | gap | entropy | limitset | dichotomy | hx | positivity | verify");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--max-len", max_len, "maximal word length");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--budget-elements", budget_elements, "element budget (0: none)");
  app.add_option("--budget-seconds", budget_seconds, "wall-time budget (0: none)");
  app.add_option("--precision", precision, "double | extended");
  app.add_option("--family", family, "representation family (default parameters)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  try {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config " + config_path);
      j = json::parse(f);
    }
    if (!command.empty()) {
      if (j.contains("command") && j["command"] != command)
        throw ConfigError("command '" + command + "' conflicts with the config");
      j["command"] = command;
    }
    if (max_len) j["max_len"] = max_len;
    if (threads) j["threads"] = threads;
    if (app.count("--seed")) j["seed"] = seed;
    if (!out.empty()) j["out"] = out;
    if (app.count("--budget-elements")) j["budget_elements"] = budget_elements;
    if (budget_seconds >= 0) j["budget_seconds"] = budget_seconds;
    if (!precision.empty()) j["precision"] = precision;
    if (!family.empty()) j["representation"] = {{"family", family}};
    const ExperimentConfig cfg = parse_config(j);
    const RunResult r = run(cfg);
    std::cout << r.summary.dump(2) << "\n";
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    for (const auto& c : r.checks)
      if (!c.pass) std::cerr << "FAILED " << c.name << ": " << c.value << " " << c.relation << " " << c.threshold << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace anosov::cli
