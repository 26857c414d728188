#include "circmap/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace circmap {

namespace {

int letter_key(int k) { return k > 0 ? 2 * (k - 1) : 2 * (-k - 1) + 1; }

int key_letter(int key) { return key % 2 == 0 ? key / 2 + 1 : -(key / 2 + 1); }

bool precedes(const GroupWord& a, const GroupWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return letter_key(a[i]) < letter_key(b[i]);
  }
  return false;
}

MobiusMap letter_map(const std::vector<MobiusMap>& gens, const std::vector<MobiusMap>& invs, int k) {
  return k > 0 ? gens[static_cast<std::size_t>(k - 1)] : invs[static_cast<std::size_t>(-k - 1)];
}

}  // namespace

std::vector<MobiusMap> generators(const CircularDomain& d) {
  std::vector<MobiusMap> gens;
  for (const auto& c : d.inner_circles()) {
    const Complex q = c.center;
    const double r2 = c.radius * c.radius;
    gens.push_back(MobiusMap{Complex{r2} - q * std::conj(q), q, -std::conj(q), Complex{1.0}});
  }
  return gens;
}

std::size_t word_count(int g, int L) {
  if (g <= 0 || L <= 0) return 1;
  std::size_t total = 1;
  std::size_t level = static_cast<std::size_t>(2 * g);
  for (int k = 1; k <= L; ++k) {
    total += level;
    level *= static_cast<std::size_t>(2 * g - 1);
  }
  return total;
}

std::size_t max_words() {
  if (const char* env = std::getenv("SCHOTTKY_MAX_WORDS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 200000;
}

bool is_reduced(const GroupWord& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == -w[i + 1]) return false;
  }
  return std::none_of(w.begin(), w.end(), [](int k) { return k == 0; });
}

GroupWord inverse_word(const GroupWord& w) {
  GroupWord inv(w.rbegin(), w.rend());
  for (int& k : inv) k = -k;
  return inv;
}

WordEnumeration enumerate_words(int g, int L, std::size_t cap) {
  if (g < 0 || L < 0) throw DomainError("enumerate_words: g and L must be nonnegative");
  const std::size_t count = g == 0 ? 1 : word_count(g, L);
  if (count > cap) {
    throw ResourceError("word enumeration for g=" + std::to_string(g) + ", L=" + std::to_string(L) + " needs " +
                        std::to_string(count) + " words, cap is " + std::to_string(cap));
  }
  WordEnumeration e;
  e.genus = g;
  e.max_length = L;
  e.words.reserve(count);
  e.words.push_back({});
  std::size_t level_begin = 0;
  for (int len = 1; len <= L && g > 0; ++len) {
    const std::size_t level_end = e.words.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int key = 0; key < 2 * g; ++key) {
        const int k = key_letter(key);
        const GroupWord& prefix = e.words[i];
        if (!prefix.empty() && prefix.back() == -k) continue;
        GroupWord w = prefix;
        w.push_back(k);
        e.words.push_back(std::move(w));
      }
    }
    level_begin = level_end;
  }
  e.half_set_mask.resize(e.words.size());
  for (std::size_t i = 0; i < e.words.size(); ++i) {
    const GroupWord& w = e.words[i];
    e.half_set_mask[i] = !w.empty() && precedes(w, inverse_word(w));
  }
  return e;
}

MobiusMap realize(const CircularDomain& d, const GroupWord& w) {
  if (!is_reduced(w)) throw DomainError("word is not reduced");
  const auto gens = generators(d);
  std::vector<MobiusMap> invs;
  for (const auto& m : gens) invs.push_back(mobius_invert(m));
  MobiusMap out = MobiusMap::identity();
  for (int k : w) {
    if (std::abs(k) > d.genus()) throw DomainError("word letter references a missing generator");
    out = mobius_compose(out, letter_map(gens, invs, k));
  }
  return out;
}

std::vector<MobiusMap> realize_all(const CircularDomain& d, const WordEnumeration& e) {
  if (e.genus != d.genus()) throw DomainError("enumeration genus does not match the domain");
  const auto gens = generators(d);
  std::vector<MobiusMap> invs;
  for (const auto& m : gens) invs.push_back(mobius_invert(m));
  std::vector<MobiusMap> maps(e.words.size());
  // Words are length-major with prefixes enumerated first, so the prefix of
  // word i has already been realized; locate it by a running level index.
  maps[0] = MobiusMap::identity();
  std::size_t parent = 0;
  std::size_t children = 0;
  std::size_t per_parent_first = static_cast<std::size_t>(2 * d.genus());
  for (std::size_t i = 1; i < e.words.size(); ++i) {
    const std::size_t limit = parent == 0 ? per_parent_first : per_parent_first - 1;
    if (children == limit) {
      ++parent;
      children = 0;
    }
    ++children;
    maps[i] = mobius_compose(maps[parent], letter_map(gens, invs, e.words[i].back()));
  }
  return maps;
}

double image_diameter(const MobiusMap& m, const Circle& c) {
  const double den = std::abs(std::norm(m.c * c.center + m.d) - std::norm(m.c) * c.radius * c.radius);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * c.radius * std::abs(m.determinant()) / den;
}

double image_diameter(const MobiusMap& m, const CircularDomain& d) {
  const ExtendedComplex pole = m.pole();
  if (pole.is_finite()) {
    const Complex p = pole.value;
    if (std::abs(p) <= 1.0 && d.nearest_boundary(p).first >= 0.0) return std::numeric_limits<double>::infinity();
  }
  double diam = 0.0;
  for (int l = 0; l <= d.genus(); ++l) diam = std::max(diam, image_diameter(m, d.boundary(l)));
  return diam;
}

double tail_estimate(const CircularDomain& d, int L) {
  if (d.genus() == 0 || L <= 0) return d.genus() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  const auto gens = generators(d);
  std::vector<MobiusMap> invs;
  for (const auto& m : gens) invs.push_back(mobius_invert(m));
  const int g = d.genus();
  double worst = 0.0;
  // Depth-first over words of length L; w and w^-1 realized side by side.
  struct Frame {
    MobiusMap w;
    MobiusMap winv;
    int last;
    int depth;
  };
  std::vector<Frame> stack{{MobiusMap::identity(), MobiusMap::identity(), 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == L) {
      worst = std::max(worst, std::min(image_diameter(f.w, d), image_diameter(f.winv, d)));
      continue;
    }
    for (int key = 0; key < 2 * g; ++key) {
      const int k = key_letter(key);
      if (f.last == -k) continue;
      stack.push_back({mobius_compose(f.w, letter_map(gens, invs, k)),
                       mobius_compose(letter_map(gens, invs, -k), f.winv), k, f.depth + 1});
    }
  }
  return worst;
}

WordLengthChoice choose_word_length(const CircularDomain& d, double tol, int max_length) {
  if (d.genus() == 0) return {0, 0.0, true};
  WordLengthChoice best{1, std::numeric_limits<double>::infinity(), false};
  for (int L = 1; L <= max_length; ++L) {
    if (word_count(d.genus(), L) > max_words()) break;
    const double t = tail_estimate(d, L);
    best = {L, t, t < tol};
    if (t < tol) return best;
  }
  return best;
}

}  // namespace circmap
