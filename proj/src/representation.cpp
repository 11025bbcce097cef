#include "anosov/representation.hpp"

#include "anosov/linalg.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

namespace anosov {

std::vector<std::vector<int>> subsets(int d, int p) {
  std::vector<std::vector<int>> out;
  if (p < 0 || p > d) return out;
  std::vector<int> cur(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == d - p + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

Eigen::MatrixXd normalize_determinant(const Eigen::MatrixXd& m) {
  const double det = m.determinant();
  if (det == 0.0 || !std::isfinite(det)) throw ConstructionError("singular matrix");
  return m / std::pow(std::abs(det), 1.0 / static_cast<double>(m.rows()));
}

Eigen::MatrixXd projective_normalize(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = normalize_determinant(m);
  const double tol = 1e-12 * out.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      if (std::abs(out(i, j)) > tol) {
        if (out(i, j) < 0) out = -out;
        return out;
      }
  return out;
}

namespace {

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double pm_identity_distance(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return std::min((m - id).norm(), (m + id).norm());
}

}  // namespace

Representation Representation::from_generators(const GroupSpec& spec,
                                               const std::vector<Eigen::MatrixXd>& gens,
                                               std::string name,
                                               std::optional<Eigen::MatrixXd> form, int max_dim) {
  if (static_cast<int>(gens.size()) != spec.generators())
    throw ConfigError("expected " + std::to_string(spec.generators()) + " generator images, got " +
                      std::to_string(gens.size()));
  const int d = static_cast<int>(gens.front().rows());
  if (d < 1) throw ConfigError("empty generator image");
  if (d > max_dim)
    throw DimensionError("dimension " + std::to_string(d) + " exceeds cap " +
                         std::to_string(max_dim));
  Representation r;
  r.spec_ = spec;
  r.dim_ = d;
  r.name_ = std::move(name);
  r.images_.resize(static_cast<std::size_t>(spec.letters()));
  for (int i = 0; i < spec.generators(); ++i) {
    const auto& g = gens[static_cast<std::size_t>(i)];
    if (g.rows() != d || g.cols() != d) throw ConfigError("generator images differ in shape");
    Eigen::MatrixXd n = projective_normalize(g);
    r.images_[static_cast<std::size_t>(2 * i + 1)] = projective_normalize(n.inverse());
    r.images_[static_cast<std::size_t>(2 * i)] = std::move(n);
  }
  if (form) {
    if (form->rows() != d || form->cols() != d) throw ConfigError("form has wrong shape");
    r.form_ = form;
  }
  if (spec.kind == GroupKind::Surface) {
    const double res = r.relator_residual();
    if (!(res < r.relator_tolerance()))
      throw ConstructionError("relator image of " + r.name_ + " is not +-I (residual " + fmt_g(res) + ")");
  }
  if (form) {
    const double res = r.form_residual();
    if (!(res < r.form_tolerance()))
      throw ConstructionError("form not preserved (residual " + fmt_g(res) + ")");
  }
  return r;
}

Eigen::MatrixXd Representation::evaluate(const Word& w) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim_, dim_);
  for (Letter l : w) m = m * images_[l];
  return m;
}

double Representation::relator_residual() const {
  if (spec_.kind == GroupKind::Free) return 0.0;
  return pm_identity_distance(normalize_determinant(evaluate(spec_.relator)));
}

double Representation::form_tolerance() const {
  if (!form_) return 1e-9;
  double g2 = 0;
  for (const auto& g : images_) g2 = std::max(g2, g.operatorNorm() * g.operatorNorm());
  return std::max(1e-9, 8.0 * dim_ * std::numeric_limits<double>::epsilon() * g2 * form_->operatorNorm());
}

double Representation::relator_tolerance() const {
  if (spec_.kind == GroupKind::Free) return 1e-9;
  // Scaled first-order rounding bound: sum over positions of
  // ||prefix|| ||letter|| ||suffix||, times d eps.
  const Word& w = spec_.relator;
  std::vector<double> pre(w.size() + 1, 1.0), suf(w.size() + 1, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim_, dim_);
  for (std::size_t i = 0; i < w.size(); ++i) {
    pre[i] = m.operatorNorm();
    m = m * images_[w[i]];
  }
  m = Eigen::MatrixXd::Identity(dim_, dim_);
  for (std::size_t i = w.size(); i-- > 0;) {
    suf[i] = m.operatorNorm();
    m = images_[w[i]] * m;
  }
  double sens = 0;
  for (std::size_t i = 0; i < w.size(); ++i) sens += pre[i] * images_[w[i]].operatorNorm() * suf[i];
  return std::max(1e-9, 4 * std::numeric_limits<double>::epsilon() * sens * dim_);
}

double Representation::form_residual() const {
  if (!form_) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < spec_.generators(); ++i) {
    const auto& g = images_[static_cast<std::size_t>(2 * i)];
    worst = std::max(worst, (g.transpose() * *form_ * g - *form_).norm());
  }
  return worst;
}

Representation Representation::renamed(std::string name) const {
  Representation r = *this;
  r.name_ = std::move(name);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Eigen::MatrixXd> generator_images(const Representation& r) {
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < r.spec().generators(); ++i)
    out.push_back(r.image(static_cast<Letter>(2 * i)));
  return out;
}

void require_same_group(const Representation& a, const Representation& b) {
  if (!(a.spec() == b.spec())) throw ConfigError("representations of different groups");
}

}  // namespace

Representation fuchsian(int genus) {
  const GroupSpec spec = GroupSpec::surface(genus);
  const SurfaceTiling& t = surface_tiling(genus);
  std::vector<Eigen::MatrixXd> gens;
  for (int i = 0; i < spec.generators(); ++i) gens.emplace_back(t.generator(static_cast<Letter>(2 * i)));
  return Representation::from_generators(spec, gens, "fuchsian");
}

Representation fuchsian_genus2() { return fuchsian(2); }

Representation fuchsian_twisted(double tau) {
  const Representation base = fuchsian(2);
  const GroupSpec& spec = base.spec();
  const Word comm = parse_word("a2 b2 A2 B2", spec);
  const Eigen::MatrixXd c = base.evaluate(comm);
  Eigen::EigenSolver<Eigen::MatrixXd> es(c);
  const Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::VectorXcd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i).imag()) > 1e-9) throw ConstructionError("commutator is not hyperbolic");
    lam(i) = std::pow(std::abs(lam(i).real()), tau);
  }
  const Eigen::MatrixXd h = (v * lam.asDiagonal() * v.inverse()).real();
  const Eigen::MatrixXd hinv = h.inverse();
  auto gens = generator_images(base);
  gens[2] = h * gens[2] * hinv;
  gens[3] = h * gens[3] * hinv;
  return Representation::from_generators(spec, gens, "fuchsian_twisted");
}

Representation trivial(const GroupSpec& spec, int d) {
  std::vector<Eigen::MatrixXd> gens(static_cast<std::size_t>(spec.generators()),
                                    Eigen::MatrixXd::Identity(d, d));
  return Representation::from_generators(spec, gens, "trivial");
}

Eigen::MatrixXd sym_power_matrix(const Eigen::Matrix2d& g, int k) {
  const int n = k + 1;
  // Monomial basis x^{k-i} y^i; column j holds (g11 x + g21 y)^{k-j} (g12 x + g22 y)^j.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> poly{1.0};
    auto mul = [&](double cx, double cy) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * cx;
        next[i + 1] += poly[i] * cy;
      }
      poly.swap(next);
    };
    for (int t = 0; t < k - j; ++t) mul(g(0, 0), g(1, 0));
    for (int t = 0; t < j; ++t) mul(g(0, 1), g(1, 1));
    for (int i = 0; i < n; ++i) m(i, j) = poly[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = std::sqrt(static_cast<double>(binomial(k, i)));
  return c.cwiseInverse().asDiagonal() * m * c.asDiagonal();
}

Representation sym_power(const Representation& rep2, int k, int max_dim) {
  if (rep2.dim() != 2) throw ConfigError("sym_power needs a 2-dimensional representation");
  if (k < 1) throw ConfigError("sym_power degree must be >= 1");
  if (k + 1 > max_dim) throw DimensionError("sym_power dimension exceeds cap");
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : generator_images(rep2)) gens.push_back(sym_power_matrix(g, k));
  return Representation::from_generators(rep2.spec(), gens,
                                         "S^" + std::to_string(k) + "(" + rep2.name() + ")",
                                         std::nullopt, max_dim);
}

Representation direct_sum(const Representation& a, const Representation& b, int max_dim) {
  require_same_group(a, b);
  const int d = a.dim() + b.dim();
  if (d > max_dim) throw DimensionError("direct sum dimension exceeds cap");
  const auto ga = generator_images(a), gb = generator_images(b);
  std::vector<Eigen::MatrixXd> gens;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    m.topLeftCorner(a.dim(), a.dim()) = ga[i];
    m.bottomRightCorner(b.dim(), b.dim()) = gb[i];
    gens.push_back(m);
  }
  return Representation::from_generators(a.spec(), gens, a.name() + "+" + b.name(), std::nullopt,
                                         max_dim);
}

Representation tensor(const Representation& a, const Representation& b, int max_dim) {
  require_same_group(a, b);
  const int d = a.dim() * b.dim();
  if (d > max_dim) throw DimensionError("tensor dimension exceeds cap");
  const auto ga = generator_images(a), gb = generator_images(b);
  std::vector<Eigen::MatrixXd> gens;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    Eigen::MatrixXd m(d, d);
    for (int r = 0; r < a.dim(); ++r)
      for (int c = 0; c < a.dim(); ++c)
        m.block(r * b.dim(), c * b.dim(), b.dim(), b.dim()) = ga[i](r, c) * gb[i];
    gens.push_back(m);
  }
  return Representation::from_generators(a.spec(), gens, a.name() + "x" + b.name(), std::nullopt,
                                         max_dim);
}

Representation exterior_power(const Representation& a, int p, int max_dim) {
  if (p < 1 || p > a.dim()) throw ConfigError("exterior power degree out of range");
  const std::int64_t d = binomial(a.dim(), p);
  if (d > max_dim) throw DimensionError("exterior power dimension exceeds cap");
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : generator_images(a)) gens.push_back(compound_matrix(g, p));
  return Representation::from_generators(a.spec(), gens,
                                         "L^" + std::to_string(p) + "(" + a.name() + ")",
                                         std::nullopt, max_dim);
}

Representation dual(const Representation& a) {
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : generator_images(a)) gens.push_back(g.inverse().transpose());
  std::optional<Eigen::MatrixXd> form;
  if (a.form()) form = a.form()->inverse();
  return Representation::from_generators(a.spec(), gens, a.name() + "*", form, a.dim());
}

Eigen::MatrixXd sym_form(int p) {
  const int d = 2 * p - 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) q(j, d - 1 - j) = ((j + p - 1) % 2 == 0) ? 1.0 : -1.0;
  return q;
}

Representation so_p_pminus1_fuchsian(int p) {
  if (p < 2) throw ConfigError("so_p_pminus1_fuchsian needs p >= 2");
  const Representation base = fuchsian_genus2();
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : generator_images(base))
    gens.push_back(sym_power_matrix(Eigen::Matrix2d(g), 2 * p - 2));
  return Representation::from_generators(base.spec(), gens,
                                         "SO(" + std::to_string(p) + "," + std::to_string(p - 1) +
                                             ")-fuchsian",
                                         sym_form(p));
}

// ---------------------------------------------------------------------------

DedupKey dedup_key(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d n = m / std::sqrt(std::abs(m.determinant()));
  const double scale = std::max(1.0, n.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  const double entries[4] = {n(0, 0), n(0, 1), n(1, 0), n(1, 1)};
  double sign = 1.0;
  for (double x : entries)
    if (std::abs(x) > tol) {
      sign = x < 0 ? -1.0 : 1.0;
      break;
    }
  const double quantum = 1e-9 * scale;
  DedupKey key{};
  for (int i = 0; i < 4; ++i) {
    const double q = std::round(sign * entries[i] / quantum);
    if (!(std::abs(q) < 9.0e18)) throw OverflowError("dedup key out of range");
    key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(q);
  }
  return key;
}

DedupKey dedup_key(const Word& w, const Representation& anchor) {
  if (anchor.dim() != 2) throw DimensionError("dedup anchor must be 2-dimensional");
  return dedup_key(Eigen::Matrix2d(anchor.evaluate(w)));
}

void KeyAudit::add(const Word& canonical) {
  const DedupKey k = dedup_key(canonical, anchor_);
  auto [it, inserted] = seen_.emplace(k, canonical);
  if (!inserted && it->second != canonical)
    throw QuantizationCollision("words " + anchor_.spec().word_string(it->second) + " and " +
                                anchor_.spec().word_string(canonical) + " share a key");
}

}  // namespace anosov
