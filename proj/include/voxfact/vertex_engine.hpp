#pragma once

// Mode algebra on the PBW vacuum module of a preset: generator modes,
// composite modes a_(n) b, the translation operator and pole bounds.

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "voxfact/graded.hpp"
#include "voxfact/preset.hpp"

namespace voxfact {

/// Computes in the vacuum module of a preset. Results are memoized, so an
/// engine must not be shared between threads; create one per thread.
class VertexEngine {
 public:
  explicit VertexEngine(VAPreset preset) : preset_(std::move(preset)) {}

  const VAPreset& preset() const { return preset_; }

  /// The generator state g_{-w}|0>.
  GradedVector generator_state(int gen) const {
    return GradedVector(Monomial({PBWFactor{static_cast<std::uint8_t>(gen), preset_.weight(gen)}}));
  }

  /// Canonical PBW basis of one degree.
  std::vector<Monomial> basis(int degree) const {
    std::vector<Monomial> out;
    if (degree < 0) return out;
    std::vector<PBWFactor> current;
    // factors are emitted in canonical order: degree non-increasing, ties by generator
    std::function<void(int, PBWFactor)> rec = [&](int remaining, PBWFactor bound) {
      if (remaining == 0) {
        out.emplace_back(current);
        return;
      }
      for (int d = std::min(remaining, bound.degree); d >= 1; --d) {
        for (int g = 0; g < preset_.generator_count(); ++g) {
          if (d < preset_.weight(g)) continue;
          PBWFactor f{static_cast<std::uint8_t>(g), d};
          if (d == bound.degree && g < bound.gen) continue;
          current.push_back(f);
          rec(remaining - d, f);
          current.pop_back();
        }
      }
    };
    rec(degree, PBWFactor{0, degree});
    std::sort(out.begin(), out.end());
    return out;
  }

  /// All basis monomials with degree in [lo, hi].
  std::vector<Monomial> basis_up_to(int lo, int hi) const {
    std::vector<Monomial> out;
    for (int d = std::max(lo, 0); d <= hi; ++d) {
      auto b = basis(d);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }

  /// g_n acting on a monomial, normal-ordered to canonical PBW form. Here n
  /// is the Lie mode index (g_n lowers degree by n).
  const GradedVector& apply_mode(int gen, int n, const Monomial& m) {
    ModeKey key{gen, n, m};
    if (auto it = mode_cache_.find(key); it != mode_cache_.end()) return it->second;
    GradedVector result = compute_apply_mode(gen, n, m);
    return mode_cache_.emplace(std::move(key), std::move(result)).first->second;
  }

  GradedVector generator_mode_apply(int gen, int n, const GradedVector& b) {
    if (gen < 0 || gen >= preset_.generator_count()) throw std::invalid_argument("unknown generator index");
    GradedVector out;
    for (const auto& [m, c] : b.terms()) out.add_scaled(apply_mode(gen, n, m), c);
    return out;
  }

  GradedVector generator_mode_apply(const std::string& symbol, int n, const GradedVector& b) {
    auto g = preset_.find_generator(symbol);
    if (!g) throw std::invalid_argument("unknown generator symbol '" + symbol + "'");
    return generator_mode_apply(*g, n, b);
  }

  /// Field mode u_(j) of the generator state u, i.e. u_{j-w+1}.
  GradedVector field_mode_apply(int gen, int j, const GradedVector& b) {
    return generator_mode_apply(gen, j - preset_.weight(gen) + 1, b);
  }

  /// a_(n) b for monomials, via the iterate identity peeling the first PBW
  /// factor of a.
  const GradedVector& state_mode(const Monomial& a, int n, const Monomial& b) {
    StateKey key{a, n, b};
    if (auto it = state_cache_.find(key); it != state_cache_.end()) return it->second;
    GradedVector result = compute_state_mode(a, n, b);
    return state_cache_.emplace(std::move(key), std::move(result)).first->second;
  }

  GradedVector state_mode(const GradedVector& a, int n, const GradedVector& b) {
    GradedVector out;
    for (const auto& [ma, ca] : a.terms())
      for (const auto& [mb, cb] : b.terms()) out.add_scaled(state_mode(ma, n, mb), ca * cb);
    return out;
  }

  /// L_{-1} b.
  const GradedVector& translate(const Monomial& b) {
    if (auto it = translate_cache_.find(b); it != translate_cache_.end()) return it->second;
    GradedVector result = compute_translate(b);
    return translate_cache_.emplace(b, std::move(result)).first->second;
  }

  GradedVector translate(const GradedVector& b) {
    GradedVector out;
    for (const auto& [m, c] : b.terms()) out.add_scaled(translate(m), c);
    return out;
  }

  /// Translation by the derivation rule [T, g_n] = -(n+w-1) g_{n-1}; equals
  /// translate() for every preset.
  GradedVector translate_by_derivation(const Monomial& b) {
    if (b.is_vacuum()) return {};
    const auto& f = b.factors().front();
    Monomial rest = b.tail();
    int w = preset_.weight(f.gen);
    GradedVector out = apply_mode(f.gen, -f.degree - 1, rest) * GaussianRational(f.degree - w + 1);
    GradedVector inner = translate_by_derivation(rest);
    for (const auto& [m, c] : inner.terms()) out.add_scaled(apply_mode(f.gen, -f.degree, m), c);
    return out;
  }

  /// T^j b / j!.
  const GradedVector& divided_translate(const Monomial& b, int j) {
    DividedKey key{b, j};
    if (auto it = divided_cache_.find(key); it != divided_cache_.end()) return it->second;
    GradedVector result;
    if (j == 0) result = GradedVector(b);
    else {
      GradedVector prev = divided_translate(b, j - 1);
      result = translate(prev) * GaussianRational(Rational(1, j));
    }
    return divided_cache_.emplace(std::move(key), std::move(result)).first->second;
  }

  GradedVector divided_translate(const GradedVector& b, int j) {
    GradedVector out;
    for (const auto& [m, c] : b.terms()) out.add_scaled(divided_translate(m, j), c);
    return out;
  }

  /// Smallest N >= 0 with a_(n) b = 0 for all n >= N, for homogeneous a, b.
  int pole_bound(const GradedVector& a, const GradedVector& b) {
    if (a.is_zero() || b.is_zero()) return 0;
    if (!a.is_homogeneous() || !b.is_homogeneous()) throw std::invalid_argument("pole_bound needs homogeneous states");
    int upper = a.degree() + b.degree();  // a_(n) b has negative degree for n >= upper
    for (int n = upper - 1; n >= 0; --n)
      if (!state_mode(a, n, b).is_zero()) return n + 1;
    return 0;
  }

  std::string format(const Monomial& m) const {
    std::string s;
    for (const auto& f : m.factors()) {
      if (!s.empty()) s += ' ';
      s += preset_.symbol(f.gen) + "-" + std::to_string(f.degree);
    }
    return s.empty() ? "|0>" : s + " |0>";
  }

  std::string format(const GradedVector& v) const {
    if (v.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : v.terms()) {
      if (!s.empty()) s += " + ";
      s += "(" + c.str() + ") " + format(m);
    }
    return s;
  }

  /// Parses a token such as "a-1", "L-2" or "e-1" into a PBW factor.
  PBWFactor parse_token(const std::string& token) const {
    std::size_t split = 0;
    while (split < token.size() && std::isalpha(static_cast<unsigned char>(token[split]))) ++split;
    auto g = preset_.find_generator(token.substr(0, split));
    if (!g || split == token.size()) throw ParseError("bad mode token '" + token + "'");
    int idx = 0;
    try {
      idx = std::stoi(token.substr(split));
    } catch (const std::exception&) {
      throw ParseError("bad mode token '" + token + "'");
    }
    if (-idx < preset_.weight(*g)) throw ParseError("mode token '" + token + "' is not a creation mode");
    return PBWFactor{static_cast<std::uint8_t>(*g), -idx};
  }

  std::string token(const PBWFactor& f) const { return preset_.symbol(f.gen) + "-" + std::to_string(f.degree); }

 private:
  struct ModeKey {
    int gen;
    int n;
    Monomial m;
    bool operator==(const ModeKey&) const = default;
  };
  struct ModeKeyHash {
    std::size_t operator()(const ModeKey& k) const {
      return k.m.hash() * 1000003u ^ (static_cast<std::size_t>(k.gen) << 40) ^ static_cast<std::size_t>(k.n + (1 << 20));
    }
  };
  struct StateKey {
    Monomial a;
    int n;
    Monomial b;
    bool operator==(const StateKey&) const = default;
  };
  struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const {
      return (k.a.hash() * 1000003u) ^ (k.b.hash() * 7919u) ^ static_cast<std::size_t>(k.n + (1 << 20));
    }
  };
  struct DividedKey {
    Monomial b;
    int j;
    bool operator==(const DividedKey&) const = default;
  };
  struct DividedKeyHash {
    std::size_t operator()(const DividedKey& k) const { return k.b.hash() * 31u + static_cast<std::size_t>(k.j); }
  };

  GradedVector compute_apply_mode(int gen, int n, const Monomial& m) {
    if (m.degree() - n < 0) return {};
    const int w = preset_.weight(gen);
    if (m.is_vacuum()) {
      if (preset_.annihilates_vacuum(gen, n)) return {};
      return GradedVector(Monomial({PBWFactor{static_cast<std::uint8_t>(gen), -n}}));
    }
    const PBWFactor& first = m.factors().front();
    PBWFactor self{static_cast<std::uint8_t>(gen), -n};
    if (n <= -w && !canonical_before(first, self)) return GradedVector(m.prepend(self));

    // g_n f rest = f (g_n rest) + [g_n, f] rest
    Monomial rest = m.tail();
    GradedVector result;
    GradedVector moved = apply_mode(gen, n, rest);
    for (const auto& [mono, c] : moved.terms()) result.add_scaled(apply_mode(first.gen, -first.degree, mono), c);
    BracketResult br = preset_.bracket(gen, n, first.gen, -first.degree);
    for (const auto& t : br.terms) result.add_scaled(apply_mode(t.gen, n - first.degree, rest), t.coeff);
    if (!br.central.is_zero()) result.add_term(rest, br.central);
    return result;
  }

  static long sign_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

  GradedVector compute_state_mode(const Monomial& a, int n, const Monomial& b) {
    if (a.is_vacuum()) return n == -1 ? GradedVector(b) : GradedVector{};
    if (a.degree() + b.degree() - n - 1 < 0) return {};
    const PBWFactor& u = a.factors().front();
    const int w = preset_.weight(u.gen);
    if (a.size() == 1 && u.degree == w) {
      // generator state: u_(n) directly
      return apply_mode(u.gen, n - w + 1, b);
    }
    Monomial rest = a.tail();
    const long j = w - 1 - u.degree;  // u_{-d} = u_(j), j <= -1
    GradedVector result;
    GradedVector bvec(b);
    // sum_i (-1)^i C(j,i) u_(j-i) rest_(n+i) b
    const int first_max = rest.degree() + b.degree() - n - 1;
    for (int i = 0; i <= first_max; ++i) {
      const GradedVector& inner = state_mode(rest, n + i, b);
      if (inner.is_zero()) continue;
      GaussianRational coef(binomial(j, i) * sign_pow(i));
      for (const auto& [m, c] : inner.terms())
        result.add_scaled(apply_mode(u.gen, static_cast<int>(j) - i - w + 1, m), c * coef);
    }
    // - sum_i (-1)^{i+j} C(j,i) rest_(j+n-i) u_(i) b
    const int second_max = b.degree() + w - 1;
    for (int i = 0; i <= second_max; ++i) {
      const GradedVector& ub = apply_mode(u.gen, i - w + 1, b);
      if (ub.is_zero()) continue;
      GaussianRational coef(binomial(j, i) * (-sign_pow(i + j)));
      for (const auto& [m, c] : ub.terms())
        result.add_scaled(state_mode(rest, static_cast<int>(j) + n - i, m), c * coef);
    }
    return result;
  }

  GradedVector compute_translate(const Monomial& b) {
    if (b.is_vacuum()) return {};
    if (preset_.kind() == PresetKind::virasoro) return apply_mode(0, -1, b);
    return translate_by_derivation(b);
  }

  VAPreset preset_;
  std::unordered_map<ModeKey, GradedVector, ModeKeyHash> mode_cache_;
  std::unordered_map<StateKey, GradedVector, StateKeyHash> state_cache_;
  std::unordered_map<Monomial, GradedVector, MonomialHash> translate_cache_;
  std::unordered_map<DividedKey, GradedVector, DividedKeyHash> divided_cache_;
};

}  // namespace voxfact
