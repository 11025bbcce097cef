#include "anosov/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

namespace anosov {

GroupSpec GroupSpec::free(int k) {
  if (k < 1 || k > 64) throw ConfigError("free group rank must be in [1, 64]");
  GroupSpec s;
  s.kind = GroupKind::Free;
  s.rank = k;
  return s;
}

GroupSpec GroupSpec::surface(int g) {
  if (g < 2 || g > 32) throw ConfigError("surface genus must be in [2, 32]");
  GroupSpec s;
  s.kind = GroupKind::Surface;
  s.rank = g;
  for (int j = 0; j < g; ++j) {
    const Letter a = static_cast<Letter>(4 * j), b = static_cast<Letter>(4 * j + 2);
    s.relator.insert(s.relator.end(), {a, b, inverse(a), inverse(b)});
  }
  return s;
}

std::string GroupSpec::letter_name(Letter l) const {
  if (kind == GroupKind::Free) {
    return std::string(1, (l & 1) ? 'X' : 'x') + std::to_string(l / 2 + 1);
  }
  const int handle = l / 4 + 1;
  const bool is_b = (l & 2) != 0;
  const char c = is_b ? 'b' : 'a';
  return std::string(1, (l & 1) ? static_cast<char>(std::toupper(c)) : c) + std::to_string(handle);
}

std::string GroupSpec::word_string(const Word& w) const {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += letter_name(w[i]);
  }
  return out;
}

std::string GroupSpec::describe() const {
  if (kind == GroupKind::Free)
    return "free group F_" + std::to_string(rank) + ", generators x1..x" + std::to_string(rank) +
           " and inverses X1..X" + std::to_string(rank);
  return "surface group of genus " + std::to_string(rank) +
         ", generators a_j b_j (inverses A_j B_j), relator " + word_string(relator);
}

Word parse_word(const std::string& text, const GroupSpec& spec) {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == '*') {
      ++i;
      continue;
    }
    if (c == 'e' && spec.kind == GroupKind::Free) throw ConfigError("bad letter in word: " + text);
    if (c == 'e') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) throw ConfigError("missing generator index in word: " + text);
    const int idx = std::stoi(text.substr(i + 1, j - i - 1));
    const bool inv = std::isupper(static_cast<unsigned char>(c)) != 0;
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    int letter = -1;
    if (spec.kind == GroupKind::Free && lc == 'x' && idx >= 1 && idx <= spec.rank) {
      letter = 2 * (idx - 1);
    } else if (spec.kind == GroupKind::Surface && (lc == 'a' || lc == 'b') && idx >= 1 &&
               idx <= spec.rank) {
      letter = 4 * (idx - 1) + (lc == 'b' ? 2 : 0);
    }
    if (letter < 0) throw ConfigError("bad letter in word: " + text);
    w.push_back(static_cast<Letter>(letter + (inv ? 1 : 0)));
    i = j;
  }
  return w;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == inverse(l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

namespace {

// The 2n cyclic words: rotations of the relator and of its inverse.
std::vector<Word> relator_cycles(const GroupSpec& spec) {
  const Word& r = spec.relator;
  Word rinv(r.rbegin(), r.rend());
  const Word* bases[2] = {&r, &rinv};
  for (Letter& l : rinv) l = inverse(l);
  std::vector<Word> out;
  for (const Word* base : bases) {
    for (std::size_t k = 0; k < base->size(); ++k) {
      Word c(base->begin() + static_cast<long>(k), base->end());
      c.insert(c.end(), base->begin(), base->begin() + static_cast<long>(k));
      out.push_back(std::move(c));
    }
  }
  return out;
}

bool dehn_step(Word& w, const std::vector<Word>& cycles, std::size_t half) {
  for (std::size_t pos = 0; pos < w.size(); ++pos) {
    for (const Word& c : cycles) {
      std::size_t m = 0;
      while (m < c.size() && pos + m < w.size() && w[pos + m] == c[m]) ++m;
      if (m <= half) continue;
      Word repl;
      for (std::size_t k = c.size(); k > m; --k) repl.push_back(inverse(c[k - 1]));
      Word next(w.begin(), w.begin() + static_cast<long>(pos));
      next.insert(next.end(), repl.begin(), repl.end());
      next.insert(next.end(), w.begin() + static_cast<long>(pos + m), w.end());
      w = free_reduce(next);
      return true;
    }
  }
  return false;
}

}  // namespace

Word dehn_reduce(const Word& w, const GroupSpec& spec) {
  Word out = free_reduce(w);
  if (spec.kind == GroupKind::Free) return out;
  const auto cycles = relator_cycles(spec);
  const std::size_t half = spec.relator.size() / 2;
  while (dehn_step(out, cycles, half)) {
  }
  return out;
}

Word reduce(const Word& w, const GroupSpec& spec) {
  for (Letter l : w)
    if (l >= spec.letters()) throw ConfigError("letter out of range");
  Word d = dehn_reduce(w, spec);
  if (spec.kind == GroupKind::Free) return d;
  const SurfaceTiling& t = surface_tiling(spec.rank);
  // Peel the last normal-form letter and re-evaluate the Dehn-reduced rest,
  // so rounding errors never pile up across the peeled letters.
  Word rev;
  while (!d.empty()) {
    Eigen::Matrix2d m = t.evaluate(d);
    m /= m.cwiseAbs().maxCoeff();
    const int y = t.min_descent(m.transpose() * m);
    if (y < 0) break;
    rev.push_back(static_cast<Letter>(y));
    d.push_back(inverse(static_cast<Letter>(y)));
    d = dehn_reduce(d, spec);
    if (rev.size() > 4 * w.size() + 8) throw AssertionFailure("normal form did not terminate");
  }
  return Word(rev.rbegin(), rev.rend());
}

// ---------------------------------------------------------------------------

namespace {

Eigen::Matrix2d rotation(double phi) {
  Eigen::Matrix2d m;
  m << std::cos(phi / 2), std::sin(phi / 2), -std::sin(phi / 2), std::cos(phi / 2);
  return m;
}

Eigen::Matrix2d boost(double t) {
  Eigen::Matrix2d m;
  m << std::exp(t / 2), 0, 0, std::exp(-t / 2);
  return m;
}

}  // namespace

SurfaceTiling::SurfaceTiling(int genus) : genus_(genus) {
  const int n = 4 * genus;
  inradius_ = std::acosh(1.0 / std::tan(M_PI / n));
  // Side j of the base polygon carries the label a_j, B_j, A_j, b_j
  // (cyclically by handle); with this labelling the vertex cycle of the
  // side pairings is exactly a1 b1 A1 B1 ... ag bg Ag Bg.
  std::vector<int> side_of(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int handle = j / 4;
    static const int pattern[4] = {0, 3, 1, 2};
    side_of[static_cast<std::size_t>(4 * handle + pattern[j % 4])] = j;
  }
  gen_.resize(static_cast<std::size_t>(n));
  wall_.resize(static_cast<std::size_t>(n));
  const Eigen::Matrix2d wall0 = Eigen::Vector2d(-std::exp(2 * inradius_), 1.0).asDiagonal();
  for (int s = 0; s < n; ++s) {
    const double ti = 2 * M_PI * side_of[static_cast<std::size_t>(s)] / n;
    const double tk = 2 * M_PI * side_of[static_cast<std::size_t>(s ^ 1)] / n;
    if ((s & 1) == 0) {
      gen_[static_cast<std::size_t>(s)] =
          rotation(ti) * boost(2 * inradius_) * rotation(M_PI) * rotation(-tk);
      const Eigen::Matrix2d& g = gen_[static_cast<std::size_t>(s)];
      Eigen::Matrix2d ginv;
      ginv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
      gen_[static_cast<std::size_t>(s + 1)] = ginv;
    }
    const Eigen::Matrix2d rot = rotation(ti);
    wall_[static_cast<std::size_t>(s)] = rot * wall0 * rot.transpose();
  }
}

Eigen::Matrix2d SurfaceTiling::evaluate(const Word& w) const {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  for (Letter l : w) m = m * gen_[l];
  return m;
}

Word SurfaceTiling::normal_form(Eigen::Matrix2d m) const {
  Word rev;
  for (int guard = 0; guard < 4096; ++guard) {
    m /= m.cwiseAbs().maxCoeff();
    const int y = min_descent(m.transpose() * m);
    if (y < 0) return Word(rev.rbegin(), rev.rend());
    rev.push_back(static_cast<Letter>(y));
    m = m * gen_[inverse(static_cast<Letter>(y))];
  }
  throw AssertionFailure("normal form did not terminate");
}

const SurfaceTiling& surface_tiling(int genus) {
  static std::mutex mu;
  static std::vector<std::unique_ptr<SurfaceTiling>> cache(33);
  if (genus < 2 || genus > 32) throw ConfigError("surface genus must be in [2, 32]");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[static_cast<std::size_t>(genus)];
  if (!slot) slot = std::make_unique<SurfaceTiling>(genus);
  return *slot;
}

// ---------------------------------------------------------------------------

Budget::Budget(std::uint64_t max_elements, double max_seconds)
    : max_elements_(max_elements), max_seconds_(max_seconds) {}

void Budget::charge(std::uint64_t n) {
  const std::uint64_t total = used_.fetch_add(n, std::memory_order_relaxed) + n;
  if (max_elements_ && total > max_elements_)
    throw BudgetError("element budget of " + std::to_string(max_elements_) + " exceeded");
  if (max_seconds_ > 0 && total >= next_clock_check_.load(std::memory_order_relaxed)) {
    next_clock_check_.store(total + (1u << 16), std::memory_order_relaxed);
    const double el =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (el > max_seconds_)
      throw BudgetError("wall-time budget of " + std::to_string(max_seconds_) + " s exceeded");
  }
}

std::vector<Word> sphere(const GroupSpec& spec, int n, Budget* budget) {
  std::vector<Word> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  walk_ball(
      spec, n,
      [&](const Word& w) {
        if (static_cast<int>(w.size()) == n) {
          out.push_back(w);
          return false;
        }
        return true;
      },
      budget);
  return out;
}

std::vector<std::uint64_t> sphere_sizes(const GroupSpec& spec, int max_len, Budget* budget) {
  std::vector<std::uint64_t> sizes(static_cast<std::size_t>(std::max(max_len, 0)) + 1, 0);
  sizes[0] = 1;
  walk_ball(
      spec, max_len,
      [&](const Word& w) {
        ++sizes[w.size()];
        return true;
      },
      budget);
  return sizes;
}

std::vector<Word> ray_prefixes(const GroupSpec& spec, std::uint64_t seed, int length) {
  if (length < 1) throw ConfigError("ray length must be >= 1");
  std::mt19937_64 rng(seed);
  const int nl = spec.letters();
  std::vector<Word> out;
  Word w;
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  const SurfaceTiling* tiling = spec.kind == GroupKind::Surface ? &surface_tiling(spec.rank) : nullptr;
  std::vector<Letter> options;
  for (int step = 0; step < length; ++step) {
    options.clear();
    const Eigen::Matrix2d gram = m.transpose() * m;
    for (int x = 0; x < nl; ++x) {
      const Letter l = static_cast<Letter>(x);
      if (tiling ? tiling->extends(gram, l) : (w.empty() || l != inverse(w.back())))
        options.push_back(l);
    }
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const Letter l = options[pick(rng)];
    w.push_back(l);
    if (tiling) {
      m = m * tiling->generator(l);
      m /= m.cwiseAbs().maxCoeff();
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace anosov
