// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include "anosov/cli.hpp"
#include "anosov/limitset.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace anosov;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path g_out;

struct Timed {
  cli::RunResult result;
  double seconds = 0;
};

Timed run(const std::string& tag, json cfg) {
  if (!g_out.empty()) cfg["out"] = (g_out / tag).string();
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.result = cli::run(cli::parse_config(cfg));
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "[%s] exit %d in %.1f s%s%s\n", tag.c_str(), t.result.exit_code, t.seconds,
               t.result.error.empty() ? "" : ": ", t.result.error.c_str());
  for (const auto& c : t.result.checks)
    if (!c.pass)
      std::fprintf(stderr, "[%s]   failed: %s (%g %s %g)\n", tag.c_str(), c.name.c_str(), c.value,
                   c.relation.c_str(), c.threshold);
  return t;
}

// Collects the conditions of one criterion.
class Criterion {
 public:
  Criterion(int n, std::string title) : n_(n), title_(std::move(title)) {}

  void require(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    notes_.push_back((ok ? "" : "NOT ") + what);
  }
  void note(const std::string& what) { notes_.push_back("(" + what + ")"); }
  void within(const std::string& what, double value, double target, double tol) {
    std::ostringstream s;
    s << what << " = " << value << " in " << target << " +- " << tol;
    require(std::isfinite(value) && std::abs(value - target) <= tol, s.str());
  }
  void at_most(const std::string& what, double value, double bound) {
    std::ostringstream s;
    s << what << " = " << value << " <= " << bound;
    require(std::isfinite(value) && value <= bound, s.str());
  }
  void all_checks(const std::string& tag, const Timed& t) {
    int failed = 0;
    for (const auto& c : t.result.checks) failed += !c.pass;
    std::ostringstream s;
    s << tag << ": exit " << t.result.exit_code << ", " << t.result.checks.size() - failed << "/"
      << t.result.checks.size() << " checks";
    require(t.result.exit_code == cli::kOk && failed == 0, s.str());
  }

  bool report() const {
    std::printf("CRITERION %d %s: %s\n", n_, pass_ ? "PASS" : "FAIL", title_.c_str());
    for (const auto& s : notes_) std::printf("    %s\n", s.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  int n_;
  std::string title_;
  bool pass_ = true;
  std::vector<std::string> notes_;
};

double num(const json& j, const std::string& path) {
  const json* p = &j;
  std::stringstream ss(path);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (!p->is_object() || !p->contains(key)) return std::nan("");
    p = &p->at(key);
  }
  return p->is_number() ? p->get<double>() : std::nan("");
}

std::string str(const json& j, const std::string& path) {
  const json* p = &j;
  std::stringstream ss(path);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (!p->is_object() || !p->contains(key)) return "";
    p = &p->at(key);
  }
  return p->is_string() ? p->get<std::string>() : "";
}

const json* find_named(const json& arr, const std::string& name, const std::string& key = "name") {
  if (!arr.is_array()) return nullptr;
  for (const auto& e : arr)
    if (e.contains(key) && e.at(key) == name) return &e;
  return nullptr;
}

// Estimates of one exponent: both estimators in the window and agreeing.
void exponent_window(Criterion& c, const std::string& label, const json* e, double target, double tol) {
  c.require(e != nullptr, label + " reported");
  if (!e) return;
  c.within(label + " counting", num(*e, "counting.h"), target, tol);
  c.within(label + " shell-rate", num(*e, "series.h"), target, tol);
  c.require(e->value("agree", false), label + " estimators agree within combined uncertainty");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_out = argv[1];
    fs::create_directories(g_out);
  }
  bool ok = true;

  // 1. Identity suite.
  const Timed verify = run("verify", {{"command", "verify"}});
  {
    Criterion c(1, "identity suite at machine precision, runtime < 2 min");
    c.all_checks("verify", verify);
    const json& s = verify.result.summary;
    double jac = 0;
    int pairs = 0, short_runs = 0;
    for (const auto& e : s.value("jacobian", json::array())) {
      jac = std::max(jac, num(e, "max_residual"));
      ++pairs;
      short_runs += e.value("trials", 0) < 1000;
    }
    c.require(pairs == 15 && short_runs == 0, "Jacobian identity on all (d, p), d <= 6, 1000 trials each");
    c.at_most("max Jacobian residual", pairs ? jac : std::nan(""), 1e-8);
    c.require(num(s, "cover_audit.samples") >= 1e5, "cover audit on 1e5 points");
    c.at_most("max cocycle residual", num(s, "cocycle_max_residual"), 1e-8);
    c.require(num(s, "basin_min_slack") >= -1e-10, "basin slack >= -1e-10");
    c.at_most("compound vs extended SVD Cartan difference", num(s, "cartan_max_diff"), 1e-8);
    c.at_most("verify seconds", verify.seconds, 120);
    ok = c.report() && ok;
  }

  // 2. Entropy one on the Fuchsian anchor and the Hitchin locus.
  const Timed fuchsian = run("entropy_fuchsian", {{"command", "entropy"},
                                                  {"representation", {{"family", "fuchsian"}, {"genus", 2}}},
                                                  {"max_len", 9},
                                                  {"functionals", {"alpha1"}}});
  const Timed dichotomy = run("dichotomy", {{"command", "dichotomy"}, {"max_len", 9}});
  {
    Criterion c(2, "h(alpha1) = 1 +- 0.15 for the Fuchsian anchor and the Hitchin S^2 locus at max_len 9");
    c.all_checks("entropy fuchsian", fuchsian);
    exponent_window(c, "fuchsian h(alpha1)", find_named(fuchsian.result.summary.value("exponents", json::array()), "alpha1"),
                    oracle::kFuchsianAlpha, 0.15);
    const json& s = dichotomy.result.summary;
    exponent_window(c, "hitchin S^2 h(alpha1)", s.contains("hitchin") ? &s.at("hitchin") : nullptr,
                    oracle::kHitchinAlpha, 0.15);
    ok = c.report() && ok;
  }

  // 3. Dichotomy.
  {
    Criterion c(3, "Barbot h(alpha1) = 2 +- 0.3 vs Hitchin 1 +- 0.15, Lipschitz verdicts");
    c.all_checks("dichotomy", dichotomy);
    const json& s = dichotomy.result.summary;
    exponent_window(c, "barbot h(alpha1)", s.contains("barbot") ? &s.at("barbot") : nullptr, oracle::kBarbotAlpha,
                    0.3);
    exponent_window(c, "hitchin h(alpha1)", s.contains("hitchin") ? &s.at("hitchin") : nullptr,
                    oracle::kHitchinAlpha, 0.15);
    c.require(str(s, "hitchin.limit_set.lipschitz.verdict") == "bounded", "hitchin verdict bounded");
    c.require(str(s, "barbot.limit_set.lipschitz.verdict") == "n/a-line", "barbot verdict n/a-line");
    c.require(num(s, "barbot.limit_set.rank") == 2, "barbot weak irreducibility rank 2");
    ok = c.report() && ok;
  }

  // 4. Box dimension against the affinity exponent.
  const json ls = {{"command", "limitset"}, {"max_len", 9}, {"affinity", true}, {"expect_dimension", {1.0, 0.1}}};
  json ls_h = ls, ls_b = ls;
  ls_h["representation"] = {{"family", "hitchin"}, {"k", 2}};
  ls_b["representation"] = {{"family", "barbot"}};
  const Timed lim_h = run("limitset_hitchin", ls_h);
  const Timed lim_b = run("limitset_barbot", ls_b);
  {
    Criterion c(4, "box dimension <= h_Aff: Hitchin (1 +- 0.1, 1 +- 0.15), Barbot (1 +- 0.1, 2 +- 0.3), Cantor");
    c.all_checks("limitset hitchin", lim_h);
    c.all_checks("limitset barbot", lim_b);
    const json& h = lim_h.result.summary;
    const json& b = lim_b.result.summary;
    c.within("hitchin box dimension", num(h, "box_dimension.slope"), 1, 0.1);
    c.within("hitchin h_Aff", num(h, "affinity.h"), 1, 0.15);
    c.at_most("hitchin box - h_Aff", num(h, "box_dimension.slope") - num(h, "affinity.h"), 0.2);
    c.within("barbot box dimension", num(b, "box_dimension.slope"), 1, 0.1);
    c.within("barbot h_Aff", num(b, "affinity.h"), 2.0, 0.3);
    {
      std::ostringstream o;
      o << "closed form for the Barbot series: h_Aff = " << oracle::kBarbotAffinity;
      c.note(o.str());
    }
    c.at_most("barbot box - h_Aff", num(b, "box_dimension.slope") - num(b, "affinity.h"), 0.2);
    const BoxDimension cantor = box_dimension(cantor_points(14));
    c.within("Cantor box dimension", cantor.slope, oracle::kCantorDim, 0.05);
    ok = c.report() && ok;
  }

  // 5 and 6 share the S^4 run.
  const Timed hx_so = run("hx_so23", {{"command", "hx"},
                                      {"representation", {{"family", "so_fuchsian"}, {"p", 3}}},
                                      {"max_len", 9},
                                      {"functionals", {"eps1-eps2"}},
                                      {"norms",
                                       {{{"name", "so23_locus"},
                                         {"preset", "hyperbolic"},
                                         {"m", 3},
                                         {"bound",
                                          {{"basis", "so"},
                                           {"rank", 2},
                                           {"generators", {"eps1-eps2", "eps1"}},
                                           {"cone", "simple_roots"}}}},
                                        {{"name", "so_positive"},
                                         {"preset", "hyperbolic"},
                                         {"m", 5},
                                         {"bound", {{"problem", "so_positive"}, {"p", 3}}}}}}});
  {
    Criterion c(5, "SO(2,3) Fuchsian locus via S^4: h(eps1-eps2) = 1 +- 0.2 at max_len 9");
    exponent_window(c, "h(eps1-eps2)", find_named(hx_so.result.summary.value("exponents", json::array()), "eps1-eps2"),
                    1, 0.2);
    ok = c.report() && ok;
  }

  const Timed hx_f = run("hx_fuchsian", {{"command", "hx"},
                                         {"representation", {{"family", "fuchsian"}, {"genus", 2}}},
                                         {"max_len", 9},
                                         {"functionals", {"alpha1"}},
                                         {"norms",
                                          {{{"name", "hyperbolic"},
                                            {"preset", "hyperbolic"},
                                            {"m", 2},
                                            {"bound", {{"basis", "sl"}, {"generators", {"alpha1"}}}}}}}});
  {
    Criterion c(6, "h^X estimate <= upper bound + 0.1; closed form matches the solver to 1e-8");
    c.all_checks("hx fuchsian", hx_f);
    c.all_checks("hx so(2,3)", hx_so);
    const json ef = hx_f.result.summary.value("exponents", json::array());
    const json es = hx_so.result.summary.value("exponents", json::array());
    for (const auto& [label, arr, name] :
         {std::tuple{"fuchsian anchor", &ef, "hyperbolic"}, std::tuple{"SO(2,3) locus", &es, "so23_locus"},
          std::tuple{"SO(p,q) barycenter problem", &es, "so_positive"}}) {
      const json* e = find_named(*arr, name);
      c.require(e != nullptr, std::string(label) + " reported");
      if (!e) continue;
      c.at_most(std::string(label) + " h^X - bound", num(*e, "counting.h") - num(*e, "bound.value"), 0.1);
      c.require(e->at("bound").value("converged", false), std::string(label) + " solver converged");
    }
    if (const json* e = find_named(es, "so_positive"))
      c.at_most("|solver - closed form|", std::abs(num(*e, "bound.value") - num(*e, "bound.hull_min_norm")), 1e-8);
    ok = c.report() && ok;
  }

  // 7. Positivity.
  const Timed pos = run("positivity", {{"command", "positivity"}, {"triples", 1000}, {"hpq_triples", 300}});
  {
    Criterion c(7, "theta-positivity identities, directness on 1000 triples, (2,1) signatures");
    c.all_checks("positivity", pos);
    const json& s = pos.result.summary;
    for (const auto& g : s.value("groups", json::array())) {
      const std::string tag = "SO(" + std::to_string(g.value("p", 0)) + "," + std::to_string(g.value("q", 0)) + ")";
      c.require(g.value("triples", 0) >= 1000, tag + " 1000 triples");
      c.at_most(tag + " coefficient error", num(g, "max_coefficient_error"), 1e-10);
      c.at_most(tag + " Q residual", num(g, "max_form_residual"), 1e-12);
      if (g.contains("min_margin")) c.require(num(g, "min_margin") > 0, tag + " min margin > 0");
    }
    std::ostringstream h;
    h << "hpq (2,1) triples " << s.value("hpq", json::object()).value("two_one", 0) << " of "
      << s.value("hpq", json::object()).value("triples", 0) << ", degenerate "
      << s.value("hpq", json::object()).value("degenerate", 0);
    c.require(num(s, "hpq.fraction") == 1.0, h.str());
    ok = c.report() && ok;
  }

  // 8. Min and sum relations on the Barbot family.
  const json pairs = json::array({json::array({"alpha1", "alpha2"}), json::array({"alpha1", "eps1-eps3"})});
  const Timed rel = run("relations_barbot", {{"command", "entropy"},
                                             {"representation", {{"family", "barbot"}}},
                                             {"max_len", 9},
                                             {"functionals", {"alpha1", "alpha2", "eps1-eps3"}},
                                             {"min_checks", pairs},
                                             {"sum_checks", pairs}});
  {
    Criterion c(8, "h(min) = max h and h(phi + psi) <= h h' / (h + h') within tolerance (Barbot)");
    c.all_checks("entropy barbot", rel);
    const json& s = rel.result.summary;
    for (const auto& m : s.value("min_checks", json::array())) {
      std::ostringstream o;
      o << m.value("min", "") << ": |h_min - h_max| = " << std::abs(num(m, "h_min") - num(m, "h_max"))
        << " tol " << num(m, "tolerance");
      c.require(m.value("holds", false), o.str());
    }
    for (const auto& m : s.value("sum_checks", json::array())) {
      std::ostringstream o;
      o << m.value("sum", "") << ": h = " << num(m, "h_sum") << " bound " << num(m, "bound") << " tol "
        << num(m, "tolerance");
      c.require(m.value("holds", false), o.str());
    }
    c.require(s.value("min_checks", json::array()).size() == 2 && s.value("sum_checks", json::array()).size() == 2,
              "two min and two sum relations evaluated");
    ok = c.report() && ok;
  }

  // 9. Engineering.
  {
    Criterion c(9, "determinism across threads and runs, sphere oracles, verify < 5 min");
    const json e = {{"command", "entropy"},
                    {"representation", {{"family", "hitchin"}, {"k", 3}}},
                    {"max_len", 8},
                    {"functionals", {"alpha1", "alpha2"}},
                    {"estimator", {{"min_log_span", 4}}},
                    {"seed", 7}};
    json e4 = e;
    e4["threads"] = 4;
    const Timed a = run("determinism_t1", e);
    const Timed b = run("determinism_t4", e4);
    const Timed a2 = run("determinism_t1_again", e);
    c.require(a.result.exit_code == cli::kOk, "determinism run ok");
    c.require(a.result.summary.dump() == b.result.summary.dump(), "summary identical for 1 and 4 threads");
    c.require(a.result.summary.dump() == a2.result.summary.dump(), "summary identical on repetition");
    const Timed sf = run("spheres_free", {{"command", "enumerate"}, {"group", "free:2"}, {"max_len", 10}});
    const Timed ss = run("spheres_surface", {{"command", "enumerate"}, {"group", "surface:2"}, {"max_len", 8}});
    bool free_ok = sf.result.exit_code == cli::kOk, surf_ok = ss.result.exit_code == cli::kOk;
    const json fs_ = sf.result.summary.value("sphere_sizes", json::array());
    const json ss_ = ss.result.summary.value("sphere_sizes", json::array());
    free_ok = free_ok && fs_.size() == 11;
    for (std::size_t n = 0; n < fs_.size(); ++n)
      free_ok = free_ok && fs_[n].get<std::uint64_t>() == oracle::free_sphere(2, static_cast<int>(n));
    surf_ok = surf_ok && ss_.size() == oracle::kGenus2Spheres.size();
    for (std::size_t n = 0; n < ss_.size() && n < oracle::kGenus2Spheres.size(); ++n)
      surf_ok = surf_ok && ss_[n].get<std::uint64_t>() == oracle::kGenus2Spheres[n];
    c.require(free_ok, "F2 spheres 0..10 equal 4*3^(n-1)");
    c.require(surf_ok, "genus-2 spheres 0..8 equal the BFS table");
    c.at_most("verify seconds", verify.seconds, 300);
    ok = c.report() && ok;
  }

  return ok ? 0 : 1;
}
