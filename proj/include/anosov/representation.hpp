#pragma once

// Explicit linear representations of free and surface groups, the functorial
// constructions on them, and the anchor-matrix identity key.

#include "anosov/group.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anosov {

inline constexpr int kDefaultMaxDim = 64;

class Representation {
 public:
  /// Builds from one matrix per generator. Images are normalized to
  /// |det| = 1 and sign-canonicalized (first entry with |x| > 1e-12 positive);
  /// inverses are computed here. Surface relators are checked to +-I within
  /// relator_tolerance() and a supplied form is checked for g^T Q g = Q within form_tolerance().
  static Representation from_generators(const GroupSpec& spec,
                                        const std::vector<Eigen::MatrixXd>& gens,
                                        std::string name = "",
                                        std::optional<Eigen::MatrixXd> form = std::nullopt,
                                        int max_dim = kDefaultMaxDim);

  const GroupSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const Eigen::MatrixXd& image(Letter l) const { return images_[l]; }
  const std::vector<Eigen::MatrixXd>& images() const { return images_; }
  const std::optional<Eigen::MatrixXd>& form() const { return form_; }

  Eigen::MatrixXd evaluate(const Word& w) const;
  /// Frobenius distance of the relator image from +-I after normalization
  /// (0 for free groups).
  double relator_residual() const;
  /// Acceptance threshold for relator_residual: 1e-9, or the first-order
  /// rounding bound of the relator product when that is larger (high
  /// symmetric powers).
  double relator_tolerance() const;
  /// 1e-9, or 8 d eps max ||g||^2 ||Q|| when that is larger.
  double form_tolerance() const;
  /// max over generators of ||g^T Q g - Q||_F (0 without a form).
  double form_residual() const;

  Representation renamed(std::string name) const;

 private:
  GroupSpec spec_;
  int dim_ = 0;
  std::string name_;
  std::vector<Eigen::MatrixXd> images_;  // indexed by letter
  std::optional<Eigen::MatrixXd> form_;
};

/// Sign-normalized projective representative with |det| = 1.
Eigen::MatrixXd projective_normalize(const Eigen::MatrixXd& m);

/// Cocompact Fuchsian group of the regular 4g-gon with angles 2pi/(4g):
/// generators are the side pairings of SurfaceTiling.
Representation fuchsian(int genus = 2);
Representation fuchsian_genus2();
/// The genus-2 anchor with a2, b2 conjugated by C^tau, C = [a2, b2]
/// (a twist along the separating curve).
Representation fuchsian_twisted(double tau);
Representation trivial(const GroupSpec& spec, int d);

Representation sym_power(const Representation& rep2, int k, int max_dim = kDefaultMaxDim);
Representation direct_sum(const Representation& a, const Representation& b,
                          int max_dim = kDefaultMaxDim);
Representation tensor(const Representation& a, const Representation& b,
                      int max_dim = kDefaultMaxDim);
Representation exterior_power(const Representation& a, int p, int max_dim = kDefaultMaxDim);
Representation dual(const Representation& a);

/// k-th symmetric power of a single 2x2 matrix, in the orthonormal basis
/// sqrt(C(k,j)) x^{k-j} y^j.
Eigen::MatrixXd sym_power_matrix(const Eigen::Matrix2d& g, int k);
/// Antidiagonal form with entries (-1)^(j+p-1), signature (p, p-1),
/// preserved by sym_power_matrix(g, 2p-2).
Eigen::MatrixXd sym_form(int p);
/// S^{2p-2} of the genus-2 anchor, preserving sym_form(p).
Representation so_p_pminus1_fuchsian(int p);

/// Text format: "group surface <g>" | "group free <k>", "dim <d>", then
/// "gen <i>" followed by d rows per generator, then optionally "form" and
/// d rows. Numbers are written with 17 significant digits.
void write_representation(std::ostream& os, const Representation& rep);
Representation read_representation(std::istream& is, const std::string& name = "import");
void save_representation(const std::string& path, const Representation& rep);
Representation load_representation(const std::string& path);

/// Identity key of a group element: its image under a 2x2 anchor,
/// sign-normalized and quantized at relative tolerance 1e-9.
using DedupKey = std::array<std::int64_t, 4>;
DedupKey dedup_key(const Word& w, const Representation& anchor);
DedupKey dedup_key(const Eigen::Matrix2d& m);

/// Records key -> canonical word and throws QuantizationCollision when two
/// different canonical words share a key.
class KeyAudit {
 public:
  explicit KeyAudit(const Representation& anchor) : anchor_(anchor) {}
  void add(const Word& canonical);
  std::size_t size() const { return seen_.size(); }

 private:
  const Representation& anchor_;
  std::map<DedupKey, Word> seen_;
};

}  // namespace anosov
