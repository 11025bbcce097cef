#include "anosov/positivity.hpp"

#include <cmath>
#include <string>

namespace anosov {

PositivityContext::PositivityContext(int p_, int q_) : p(p_), q(q_), d(p_ + q_) {
  if (p < 2 || p >= q) throw ConfigError("positivity needs 2 <= p < q");
  if (d > 64) throw DimensionError("SO(p,q) with p + q > 64");
  const int m = q - p + 2;
  K = Eigen::MatrixXd::Zero(p - 1, p - 1);
  for (int i = 0; i < p - 1; ++i) K(i, p - 2 - i) = i % 2 == 0 ? 1.0 : -1.0;
  J = Eigen::MatrixXd::Zero(m, m);
  const double corner = (p - 1) % 2 == 0 ? 1.0 : -1.0;
  J(0, m - 1) = J(m - 1, 0) = corner;
  for (int i = 1; i < m - 1; ++i) J(i, i) = -1;
  // The K blocks carry the factor (-1)^(p+1) so that the displayed exp(v)
  // blocks preserve Q for even p as well.
  const double kappa = (p + 1) % 2 == 0 ? 1.0 : -1.0;
  const double lower = p % 2 == 0 ? 1.0 : -1.0;
  Q = Eigen::MatrixXd::Zero(d, d);
  Q.block(0, d - (p - 1), p - 1, p - 1) = kappa * K;
  Q.block(p - 1, p - 1, m, m) = J;
  Q.block(d - (p - 1), 0, p - 1, p - 1) = kappa * lower * K;
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 0) throw AssertionFailure("form Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < d; ++i) (es.eigenvalues()(i) > 0 ? pos : neg)++;
  if (pos != p || neg != q)
    throw AssertionFailure("form Q has signature (" + std::to_string(pos) + "," + std::to_string(neg) + ")");
}

bool PositivityContext::in_cone(const Eigen::VectorXd& v) const {
  return v.size() == cone_dim() && v(0) > 0 && qj(v) > 0;
}

std::vector<int> PositivityContext::reduced_expression() const {
  std::vector<int> out;
  for (int rep = 0; rep < p - 1; ++rep)
    for (int i = 1; i <= p - 1; ++i) out.push_back(i);
  return out;
}

Eigen::MatrixXd positive_unipotent(const PositivityContext& ctx, int i, double t, bool check) {
  if (i < 1 || i > ctx.p - 2) throw ConfigError("scalar positive unipotents need 1 <= i <= p-2");
  if (check && !(t > 0)) throw ConeViolation("parameter " + std::to_string(t) + " is not in c_alpha" + std::to_string(i));
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(ctx.d, ctx.d);
  u(i - 1, i) = t;
  u(ctx.d - i - 1, ctx.d - i) = t;
  return u;
}

Eigen::MatrixXd positive_unipotent(const PositivityContext& ctx, const Eigen::VectorXd& v, bool check) {
  const int m = ctx.cone_dim();
  if (v.size() != m) throw ConfigError("cone vector must have q-p+2 entries");
  if (check && !ctx.in_cone(v)) throw ConeViolation("vector is outside the open cone of q_J");
  const int a = ctx.p - 2, b = ctx.p - 1 + m;
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(ctx.d, ctx.d);
  u.block(a, a + 1, 1, m) = v.transpose();
  u(a, b) = ctx.qj(v);
  u.block(a + 1, b, m, 1) = ctx.J * v;
  return u;
}

PositiveParameters unit_parameters(const PositivityContext& ctx) {
  PositiveParameters par;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ctx.cone_dim());
  v(0) = 1;
  v(ctx.cone_dim() - 1) = ctx.J(0, ctx.cone_dim() - 1);  // q_J(v) = 1
  for (int i : ctx.reduced_expression()) {
    if (i <= ctx.p - 2)
      par.scalars.push_back(1.0);
    else
      par.vectors.push_back(v);
  }
  return par;
}

PositiveParameters random_parameters(const PositivityContext& ctx, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  std::normal_distribution<double> nrm(0.0, 0.5);
  const int m = ctx.cone_dim();
  PositiveParameters par;
  for (int i : ctx.reduced_expression()) {
    if (i <= ctx.p - 2) {
      par.scalars.push_back(pos(rng));
      continue;
    }
    Eigen::VectorXd v(m);
    v(0) = pos(rng);
    double mid = 0;
    for (int k = 1; k < m - 1; ++k) {
      v(k) = nrm(rng);
      mid += v(k) * v(k);
    }
    // 2 c v_1 v_m - |mid|^2 = 2 q_J(v) > 0 with c the corner of J.
    const double target = mid + pos(rng);
    v(m - 1) = target / (2 * ctx.J(0, m - 1) * v(0));
    par.vectors.push_back(v);
  }
  return par;
}

PositiveParameters scale_parameters(const PositiveParameters& par, double c) {
  PositiveParameters out = par;
  for (double& s : out.scalars) s *= c;
  for (auto& v : out.vectors) v *= c;
  return out;
}

PositiveTriple positive_triple(const PositivityContext& ctx, const PositiveParameters& par) {
  const int d = ctx.d, p = ctx.p;
  const auto word = ctx.reduced_expression();
  PositiveTriple t;
  t.s = Eigen::MatrixXd::Identity(d, d);
  t.expected.assign(static_cast<std::size_t>(std::max(0, p - 2)), 0.0);
  std::size_t si = 0, vi = 0;
  for (int i : word) {
    if (i <= p - 2) {
      if (si >= par.scalars.size()) throw ConfigError("too few scalar parameters");
      const double v = par.scalars[si++];
      t.s = t.s * positive_unipotent(ctx, i, v);
      t.expected[static_cast<std::size_t>(i - 1)] += v;
    } else {
      if (vi >= par.vectors.size()) throw ConfigError("too few cone vectors");
      t.s = t.s * positive_unipotent(ctx, par.vectors[vi++]);
    }
  }
  if (si != par.scalars.size() || vi != par.vectors.size()) throw ConfigError("too many positivity parameters");
  // F3: e_1, e_2, ...; F1: e_d, e_{d-1}, ...; F2 = s F1.
  t.f3 = Eigen::MatrixXd::Identity(d, d);
  t.f1 = t.f3.rowwise().reverse();
  t.f2 = t.s * t.f1;
  for (int k = 1; k <= p - 2; ++k) {
    const Eigen::VectorXd se = t.s.col(d - k);  // s e_{d-k+1}
    t.coefficient.push_back(se(d - k - 1));     // alpha_{d-k}
    const Eigen::VectorXd u = se.normalized();
    Eigen::MatrixXd frame(d, d);
    for (int j = 0; j < k; ++j) frame.col(j) = Eigen::VectorXd::Unit(d, d - 1 - j);
    frame.col(k) = u;
    for (int j = 0; j < d - k - 1; ++j) frame.col(k + 1 + j) = Eigen::VectorXd::Unit(d, j);
    t.margins.push_back(std::abs(frame.determinant()));
    t.margins_det.push_back(std::abs(t.coefficient.back()) / se.norm());
  }
  return t;
}

double form_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q) {
  return (m.transpose() * q * m - q).cwiseAbs().maxCoeff();
}

double unipotency_residual(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd n = m - Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const double s = n.cwiseAbs().maxCoeff();
  if (s == 0) return 0;
  n /= s;
  Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) pw = pw * n;
  return pw.cwiseAbs().maxCoeff();
}

}  // namespace anosov
