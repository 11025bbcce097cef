#pragma once

// Free groups F_k and closed surface groups of genus g: canonical words,
// spheres in the word metric and random geodesic rays.

#include "anosov/errors.hpp"

#include <Eigen/Core>

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace anosov {

/// Letter 2i is generator i, letter 2i+1 its inverse.
using Letter = std::uint8_t;
using Word = std::vector<Letter>;

inline Letter inverse(Letter l) { return static_cast<Letter>(l ^ 1u); }

enum class GroupKind { Free, Surface };

struct GroupSpec {
  GroupKind kind = GroupKind::Free;
  int rank = 2;  // k for F_k, g for a genus-g surface group
  Word relator;  // a1 b1 A1 B1 ... ag bg Ag Bg (surface only)

  static GroupSpec free(int k);
  static GroupSpec surface(int g);

  int generators() const { return kind == GroupKind::Free ? rank : 2 * rank; }
  int letters() const { return 2 * generators(); }
  std::string letter_name(Letter l) const;
  std::string word_string(const Word& w) const;
  std::string describe() const;
  bool operator==(const GroupSpec& o) const { return kind == o.kind && rank == o.rank; }
};

/// Parses "a1 B2 b1" style words (surface) or "x1 X2" style words (free);
/// letters may also be separated by '.' or nothing.
Word parse_word(const std::string& text, const GroupSpec& spec);

Word free_reduce(const Word& w);

/// Dehn's algorithm: repeatedly replaces a subword of length >= 2g+1 of a
/// cyclic rotation of the relator (or its inverse) by the inverse of the
/// complementary piece, interleaved with free reduction.
Word dehn_reduce(const Word& w, const GroupSpec& spec);

/// Canonical geodesic word. Free groups: free reduction. Surface groups:
/// Dehn reduction followed by the wall-crossing normal form of
/// SurfaceTiling, re-evaluating the remaining word after each peeled letter.
Word reduce(const Word& w, const GroupSpec& spec);

/// The tiling of the hyperbolic plane by regular 4g-gons with 4g polygons at
/// each vertex. Sides extend to complete geodesics (walls), and the word
/// length of gamma is the number of walls separating the base tile from its
/// gamma-translate. Tiles are tracked through 2x2 matrices in SL(2,R)
/// acting on the upper half plane, base point i.
class SurfaceTiling {
 public:
  explicit SurfaceTiling(int genus);

  int genus() const { return genus_; }
  int letters() const { return 4 * genus_; }
  /// Side-pairing translation for a letter.
  const Eigen::Matrix2d& generator(Letter l) const { return gen_[l]; }
  /// Inradius of the base polygon.
  double inradius() const { return inradius_; }

  /// For gram = G^T G of an element gamma: is |gamma x| = |gamma| + 1?
  bool extends(const Eigen::Matrix2d& gram, Letter x) const {
    return (wall_[x].cwiseProduct(gram)).sum() < 0.0;
  }
  /// Is |gamma y^{-1}| = |gamma| - 1?
  bool descends(const Eigen::Matrix2d& gram, Letter y) const {
    return (wall_[inverse(y)].cwiseProduct(gram)).sum() > 0.0;
  }
  /// Smallest descending letter, or -1 for the identity.
  int min_descent(const Eigen::Matrix2d& gram) const {
    for (int y = 0; y < letters(); ++y)
      if (descends(gram, static_cast<Letter>(y))) return y;
    return -1;
  }
  Eigen::Matrix2d evaluate(const Word& w) const;
  /// Normal form of the element represented by m (reverse shortlex among
  /// geodesics: the last letter is the smallest descending letter).
  Word normal_form(Eigen::Matrix2d m) const;

 private:
  int genus_;
  double inradius_;
  std::vector<Eigen::Matrix2d> gen_;
  std::vector<Eigen::Matrix2d> wall_;
};

const SurfaceTiling& surface_tiling(int genus);

/// Element-count and wall-time limits shared by the shards of one run.
class Budget {
 public:
  Budget() = default;
  Budget(std::uint64_t max_elements, double max_seconds);

  /// Adds n elements; throws BudgetError once a limit is exceeded.
  void charge(std::uint64_t n);
  std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }

 private:
  std::uint64_t max_elements_ = 0;  // 0: unlimited
  double max_seconds_ = 0;          // 0: unlimited
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::atomic<std::uint64_t> used_{0};
  std::atomic<std::uint64_t> next_clock_check_{1u << 16};
};

/// Depth-first walk over the canonical words of length 1..max_len whose first
/// letter is `first`. visit(word) is called once per element, parents before
/// children; returning false prunes the subtree. The walk keeps O(max_len)
/// state, so visitors typically keep their own per-depth stacks indexed by
/// word.size().
template <class Visit>
void walk_shard(const GroupSpec& spec, Letter first, int max_len, Visit&& visit,
                Budget* budget = nullptr);

/// Same walk for every first letter in index order (identity excluded).
template <class Visit>
void walk_ball(const GroupSpec& spec, int max_len, Visit&& visit, Budget* budget = nullptr) {
  for (int l = 0; l < spec.letters(); ++l)
    walk_shard(spec, static_cast<Letter>(l), max_len, visit, budget);
}

/// All canonical words of length exactly n, in shard order.
std::vector<Word> sphere(const GroupSpec& spec, int n, Budget* budget = nullptr);
/// Sphere sizes |S(0)|, ..., |S(max_len)|.
std::vector<std::uint64_t> sphere_sizes(const GroupSpec& spec, int max_len,
                                        Budget* budget = nullptr);

/// Nested geodesic prefixes alpha_1, ..., alpha_T of a seeded random geodesic
/// ray. Each step picks uniformly among the letters that extend the current
/// word geodesically; the words are geodesic but not normal forms.
std::vector<Word> ray_prefixes(const GroupSpec& spec, std::uint64_t seed, int length);

// ---------------------------------------------------------------------------

namespace detail {

template <class Visit>
void walk_free(const GroupSpec& spec, Letter first, int max_len, Visit& visit, Budget* budget) {
  const int nl = spec.letters();
  Word w{first};
  std::vector<int> next(static_cast<std::size_t>(max_len) + 1, 0);
  std::uint64_t pending = 0;
  auto charge = [&](bool flush) {
    if (budget && (flush || ++pending == 4096)) {
      budget->charge(pending);
      pending = 0;
    }
  };
  charge(false);
  bool descend = visit(static_cast<const Word&>(w));
  if (!descend || max_len <= 1) {
    charge(true);
    return;
  }
  next[1] = 0;
  while (!w.empty()) {
    const std::size_t depth = w.size();
    int& cand = next[depth];
    const Letter back = inverse(w.back());
    while (cand < nl && static_cast<Letter>(cand) == back) ++cand;
    if (cand >= nl) {
      w.pop_back();
      continue;
    }
    w.push_back(static_cast<Letter>(cand++));
    charge(false);
    if (visit(static_cast<const Word&>(w)) && static_cast<int>(w.size()) < max_len) {
      next[w.size()] = 0;
    } else {
      w.pop_back();
    }
  }
  charge(true);
}

template <class Visit>
void walk_surface(const GroupSpec& spec, Letter first, int max_len, Visit& visit,
                  Budget* budget) {
  const SurfaceTiling& tiling = surface_tiling(spec.rank);
  const int nl = spec.letters();
  Word w{first};
  std::vector<Eigen::Matrix2d> mat(static_cast<std::size_t>(max_len) + 1);
  std::vector<Eigen::Matrix2d> gram(static_cast<std::size_t>(max_len) + 1);
  std::vector<int> next(static_cast<std::size_t>(max_len) + 1, 0);
  std::uint64_t pending = 0;
  auto charge = [&](bool flush) {
    if (budget && (flush || ++pending == 4096)) {
      budget->charge(pending);
      pending = 0;
    }
  };
  mat[1] = tiling.generator(first);
  gram[1] = mat[1].transpose() * mat[1];
  charge(false);
  if (!visit(static_cast<const Word&>(w)) || max_len <= 1) {
    charge(true);
    return;
  }
  next[1] = 0;
  while (!w.empty()) {
    const std::size_t depth = w.size();
    int& cand = next[depth];
    bool pushed = false;
    while (cand < nl) {
      const Letter x = static_cast<Letter>(cand++);
      if (!tiling.extends(gram[depth], x)) continue;
      Eigen::Matrix2d c = mat[depth] * tiling.generator(x);
      // Keep entries O(1) in norm; the wall tests are scale invariant.
      c /= c.cwiseAbs().maxCoeff();
      Eigen::Matrix2d cg = c.transpose() * c;
      if (tiling.min_descent(cg) != x) continue;
      mat[depth + 1] = c;
      gram[depth + 1] = cg;
      w.push_back(x);
      pushed = true;
      break;
    }
    if (!pushed) {
      w.pop_back();
      continue;
    }
    charge(false);
    if (visit(static_cast<const Word&>(w)) && static_cast<int>(w.size()) < max_len) {
      next[w.size()] = 0;
    } else {
      w.pop_back();
    }
  }
  charge(true);
}

}  // namespace detail

template <class Visit>
void walk_shard(const GroupSpec& spec, Letter first, int max_len, Visit&& visit, Budget* budget) {
  if (max_len < 1) return;
  if (first >= spec.letters()) throw ConfigError("walk_shard: letter out of range");
  if (spec.kind == GroupKind::Free)
    detail::walk_free(spec, first, max_len, visit, budget);
  else
    detail::walk_surface(spec, first, max_len, visit, budget);
}

}  // namespace anosov
