#pragma once

// Brute-force mode oracle used only by the tests.
//
// States are linear combinations of words of modes applied to the vacuum.
// Words are normal-ordered by adjacent swaps using brackets written out
// directly from the defining commutation relations, and composite modes are
// expanded through right-nested normal-ordered products of derivative
// fields. Nothing here calls into VertexEngine or VAPreset::bracket.

#include <map>
#include <utility>
#include <vector>

#include "voxfact/graded.hpp"
#include "voxfact/preset.hpp"

namespace voxfact::oracle {

struct Mode {
  int gen;
  int index;  // lowers degree by index
  bool operator<(const Mode& o) const { return gen != o.gen ? gen < o.gen : index < o.index; }
  bool operator==(const Mode&) const = default;
};

using Word = std::vector<Mode>;
using State = std::map<Word, GaussianRational>;

class ModeOracle {
 public:
  enum class Kind { boson, virasoro, sl2 };

  ModeOracle(Kind kind, GaussianRational param) : kind_(kind), param_(std::move(param)) {}

  static ModeOracle for_preset(const VAPreset& p) {
    switch (p.kind()) {
      case PresetKind::heisenberg: return {Kind::boson, 0};
      case PresetKind::virasoro: return {Kind::virasoro, p.parameter()};
      case PresetKind::affine_sl2: return {Kind::sl2, p.parameter()};
    }
    return {Kind::boson, 0};
  }

  int weight(int /*gen*/) const { return kind_ == Kind::virasoro ? 2 : 1; }

  /// Commutator of two modes written as (mode, coeff) terms plus a scalar.
  std::pair<std::vector<std::pair<Mode, GaussianRational>>, GaussianRational> commutator(Mode x, Mode y) const {
    std::vector<std::pair<Mode, GaussianRational>> out;
    GaussianRational central;
    const long m = x.index, n = y.index;
    if (kind_ == Kind::boson) {
      if (m + n == 0) central = GaussianRational(m);
    } else if (kind_ == Kind::virasoro) {
      if (m != n) out.push_back({Mode{0, static_cast<int>(m + n)}, GaussianRational(m - n)});
      if (m + n == 0) central = param_ * GaussianRational(Rational(m * m * m - m, 1)) * GaussianRational(Rational(1, 12));
    } else {
      // structure constants of sl2 in the basis e=0, h=1, f=2
      static const int table[3][3][2] = {
          // [x, y] -> (generator, coefficient), generator -1 for zero
          {{-1, 0}, {0, -2}, {1, 1}},
          {{0, 2}, {-1, 0}, {2, -2}},
          {{1, -1}, {2, 2}, {-1, 0}},
      };
      const auto& entry = table[x.gen][y.gen];
      if (entry[0] >= 0) out.push_back({Mode{entry[0], static_cast<int>(m + n)}, GaussianRational(entry[1])});
      if (m + n == 0) {
        long form = 0;
        if ((x.gen == 0 && y.gen == 2) || (x.gen == 2 && y.gen == 0)) form = 1;
        if (x.gen == 1 && y.gen == 1) form = 2;
        central = param_ * GaussianRational(form * m);
      }
    }
    return {out, central};
  }

  bool kills_vacuum(const Mode& x) const { return x.index > -weight(x.gen); }

  /// Creation modes must appear with larger degree first, ties by generator.
  static bool in_order(const Mode& left, const Mode& right) {
    if (left.index != right.index) return left.index < right.index;
    return left.gen <= right.gen;
  }

  /// Normal-orders a single word by repeated adjacent swaps.
  State normalize(const Word& w) {
    if (auto it = memo_.find(w); it != memo_.end()) return it->second;
    State result;
    std::size_t bad = w.size();
    // rightmost annihilator or out-of-order adjacent creation pair
    if (!w.empty() && kills_vacuum(w.back())) {
      memo_[w] = result;
      return result;
    }
    for (std::size_t i = w.size(); i-- > 1;) {
      const Mode& l = w[i - 1];
      const Mode& r = w[i];
      if (kills_vacuum(l) || !in_order(l, r)) {
        bad = i - 1;
        break;
      }
    }
    if (bad == w.size()) {
      result[w] = GaussianRational(1);
      memo_[w] = result;
      return result;
    }
    // w = ... l r ... -> ... r l ... + ... [l,r] ...
    Word swapped = w;
    std::swap(swapped[bad], swapped[bad + 1]);
    add(result, normalize(swapped), GaussianRational(1));
    auto [terms, central] = commutator(w[bad], w[bad + 1]);
    for (const auto& [mode, c] : terms) {
      Word nw(w.begin(), w.begin() + static_cast<long>(bad));
      nw.push_back(mode);
      nw.insert(nw.end(), w.begin() + static_cast<long>(bad) + 2, w.end());
      add(result, normalize(nw), c);
    }
    if (!central.is_zero()) {
      Word nw(w.begin(), w.begin() + static_cast<long>(bad));
      nw.insert(nw.end(), w.begin() + static_cast<long>(bad) + 2, w.end());
      add(result, normalize(nw), central);
    }
    memo_[w] = result;
    return result;
  }

  State apply_mode(const Mode& x, const State& s) {
    State out;
    for (const auto& [w, c] : s) {
      Word nw;
      nw.push_back(x);
      nw.insert(nw.end(), w.begin(), w.end());
      add(out, normalize(nw), c);
    }
    return out;
  }

  static int degree(const Word& w) {
    int d = 0;
    for (const auto& m : w) d -= m.index;
    return d;
  }

  static int max_degree(const State& s) {
    int d = -1;
    for (const auto& [w, c] : s) d = std::max(d, degree(w));
    return d;
  }

  /// A derivative field d^{(k)} u; its modes are (-1)^k C(j,k) u_(j-k).
  struct Field {
    int gen;
    int k;
  };

  /// (right-nested normal-ordered product of fields)_(n) applied to s.
  State apply_field(const std::vector<Field>& fields, std::size_t first, int n, const State& s) {
    if (s.empty()) return {};
    if (first == fields.size()) return n == -1 ? s : State{};
    const Field& a = fields[first];
    const int w = weight(a.gen);
    if (first + 1 == fields.size()) {
      // (d^{(k)} u)_(n) = (-1)^k C(n,k) u_(n-k), and u_(j) = u_{j-w+1}
      GaussianRational coeff(binomial(n, a.k) * ((a.k % 2 == 0) ? 1 : -1));
      if (coeff.is_zero()) return {};
      State out = apply_mode(Mode{a.gen, n - a.k - w + 1}, s);
      scale(out, coeff);
      return out;
    }
    int deg_a = w + a.k;
    int deg_b = 0;
    for (std::size_t i = first + 1; i < fields.size(); ++i) deg_b += weight(fields[i].gen) + fields[i].k;
    const int deg_s = max_degree(s);
    State out;
    // sum_{j<0} A_(j) B_(n-j-1) s
    for (int j = -1; n - j - 1 <= deg_b + deg_s; --j) {
      State inner = apply_field(fields, first + 1, n - j - 1, s);
      if (inner.empty()) continue;
      std::vector<Field> single{a};
      add(out, apply_field(single, 0, j, inner), GaussianRational(1));
    }
    // sum_{j>=0} B_(n-j-1) A_(j) s
    for (int j = 0; j <= deg_a + deg_s; ++j) {
      std::vector<Field> single{a};
      State inner = apply_field(single, 0, j, s);
      if (inner.empty()) continue;
      add(out, apply_field(fields, first + 1, n - j - 1, inner), GaussianRational(1));
    }
    return out;
  }

  /// Fields of a PBW monomial: the factor g_{-d} contributes d^{(d-w)} g.
  std::vector<Field> fields_of(const Monomial& a) const {
    std::vector<Field> f;
    for (const auto& p : a.factors()) f.push_back(Field{p.gen, p.degree - weight(p.gen)});
    return f;
  }

  State state_of(const Monomial& m) {
    Word w;
    for (const auto& p : m.factors()) w.push_back(Mode{p.gen, -p.degree});
    return normalize(w);
  }

  GradedVector to_graded(const State& s) const {
    GradedVector v;
    for (const auto& [w, c] : s) {
      std::vector<PBWFactor> f;
      for (const auto& m : w) f.push_back(PBWFactor{static_cast<std::uint8_t>(m.gen), -m.index});
      v.add_term(Monomial(f), c);
    }
    return v;
  }

  /// a_(n) b computed by brute-force word expansion.
  GradedVector mode(const Monomial& a, int n, const Monomial& b) {
    auto fields = fields_of(a);
    return to_graded(apply_field(fields, 0, n, state_of(b)));
  }

 private:
  static void add(State& into, const State& s, const GaussianRational& c) {
    for (const auto& [w, v] : s) {
      auto& slot = into[w];
      slot += v * c;
      if (slot.is_zero()) into.erase(w);
    }
  }
  static void scale(State& s, const GaussianRational& c) {
    for (auto& [w, v] : s) v *= c;
  }

  Kind kind_;
  GaussianRational param_;
  std::map<Word, State> memo_;
};

}  // namespace voxfact::oracle
