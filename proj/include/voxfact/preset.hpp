#pragma once

// The three built-in vertex-algebra presets: generator tables and the Lie
// brackets of their modes.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxfact/scalar.hpp"

namespace voxfact {

enum class PresetKind { heisenberg, virasoro, affine_sl2 };

struct GeneratorInfo {
  std::string symbol;
  int weight = 1;
};

/// One term coeff * g_{m+n} of a mode bracket.
struct BracketTerm {
  int gen = 0;
  GaussianRational coeff;
};

/// [g_m, h_n] = sum(terms) + central * delta_{m+n,0}; central elements act
/// by their fixed values on the vacuum module.
struct BracketResult {
  std::vector<BracketTerm> terms;
  GaussianRational central;
};

/// Universal vacuum vertex algebra of a small Lie algebra of modes.
///
/// Modes are indexed so that g_n lowers degree by n; the field of the
/// generator state g_{-w}|0> is sum_n g_n z^{-n-w}. Modes with n > -w
/// annihilate the vacuum.
class VAPreset {
 public:
  static VAPreset heisenberg() {
    VAPreset p(PresetKind::heisenberg);
    p.gens_ = {{"a", 1}};
    return p;
  }

  static VAPreset virasoro(GaussianRational c) {
    VAPreset p(PresetKind::virasoro);
    p.gens_ = {{"L", 2}};
    p.param_ = std::move(c);
    return p;
  }

  /// Affine sl_2 on the basis e, h, f with invariant form
  /// kappa(e,f) = level, kappa(h,h) = 2 level.
  static VAPreset affine_sl2(GaussianRational level) {
    VAPreset p(PresetKind::affine_sl2);
    p.gens_ = {{"e", 1}, {"h", 1}, {"f", 1}};
    p.param_ = std::move(level);
    return p;
  }

  /// From a preset name plus the central charge / level literals.
  static VAPreset from_name(const std::string& name, const std::string& c = "1/2", const std::string& level = "1") {
    if (name == "heisenberg" || name == "free_boson") return heisenberg();
    if (name == "virasoro") return virasoro(parse_gaussian(c));
    if (name == "affine_sl2" || name == "sl2") return affine_sl2(parse_gaussian(level));
    throw ParseError("unknown preset '" + name + "'");
  }

  PresetKind kind() const { return kind_; }
  std::string name() const {
    switch (kind_) {
      case PresetKind::heisenberg: return "heisenberg";
      case PresetKind::virasoro: return "virasoro";
      case PresetKind::affine_sl2: return "affine_sl2";
    }
    return "?";
  }
  /// Central charge (Virasoro) or level (affine); zero for Heisenberg.
  const GaussianRational& parameter() const { return param_; }

  const std::vector<GeneratorInfo>& generators() const { return gens_; }
  int generator_count() const { return static_cast<int>(gens_.size()); }
  int weight(int gen) const { return gens_.at(static_cast<std::size_t>(gen)).weight; }
  const std::string& symbol(int gen) const { return gens_.at(static_cast<std::size_t>(gen)).symbol; }

  std::optional<int> find_generator(const std::string& symbol) const {
    for (int g = 0; g < generator_count(); ++g)
      if (gens_[static_cast<std::size_t>(g)].symbol == symbol) return g;
    return std::nullopt;
  }

  bool annihilates_vacuum(int gen, int n) const { return n > -weight(gen); }

  BracketResult bracket(int g, int m, int h, int n) const {
    BracketResult r;
    switch (kind_) {
      case PresetKind::heisenberg:
        if (m + n == 0) r.central = GaussianRational(m);
        break;
      case PresetKind::virasoro:
        if (m != n) r.terms.push_back({0, GaussianRational(m - n)});
        if (m + n == 0) {
          long mm = m;
          Rational coeff(mm * mm * mm - mm, 12);
          coeff.canonicalize();
          r.central = param_ * GaussianRational(coeff);
        }
        break;
      case PresetKind::affine_sl2: {
        // e=0, h=1, f=2; [h,e]=2e, [h,f]=-2f, [e,f]=h
        constexpr int E = 0, H = 1, F = 2;
        if (g == H && h == E) r.terms.push_back({E, 2});
        else if (g == E && h == H) r.terms.push_back({E, -2});
        else if (g == H && h == F) r.terms.push_back({F, -2});
        else if (g == F && h == H) r.terms.push_back({F, 2});
        else if (g == E && h == F) r.terms.push_back({H, 1});
        else if (g == F && h == E) r.terms.push_back({H, -1});
        if (m + n == 0 && m != 0) {
          long form = 0;
          if ((g == E && h == F) || (g == F && h == E)) form = 1;
          else if (g == H && h == H) form = 2;
          if (form != 0) r.central = param_ * GaussianRational(form * m);
        }
        break;
      }
    }
    return r;
  }

 private:
  explicit VAPreset(PresetKind k) : kind_(k) {}

  PresetKind kind_;
  std::vector<GeneratorInfo> gens_;
  GaussianRational param_;
};

}  // namespace voxfact
