// voxfact: command-line front end for the vertex algebra and factorization checks.
//
//   voxfact define --preset virasoro --c 1/2 --window 0:6
//   voxfact mode --preset heisenberg --a "a-1" --n 1 --b "a-1"
//   voxfact npoint --states s.json --points "2+0i,1/2+0i,0" --window 0:6 --out out.json
//   voxfact check associativity --states a.json --points 2 --inner-states b.json --inner-points "1/2,0"
//   voxfact factor kernel --geometry geo.json --exprs e.json --window 0:4 --report r.json
//   voxfact counterexample --format csv
//   voxfact suite --config data/suite_boson.json
//
// Exit codes: 0 pass, 1 check failure, 2 usage or config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "voxfact/voxfact.hpp"

using namespace voxfact;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct Common {
  std::string config;
  std::optional<std::string> preset, c, level, window, out, format;
  std::optional<double> tol;
  std::optional<int> quad_n;
  std::optional<std::uint64_t> seed;
};

struct Settings {
  SuiteConfig cfg;
  std::string format = "json";
  bool tol_given = false;
};

void add_common(CLI::App* app, Common& o) {
  app->add_option("--config", o.config, "JSON config; flags override its fields");
  app->add_option("--preset", o.preset, "heisenberg | virasoro | affine_sl2");
  app->add_option("--c", o.c, "Virasoro central charge");
  app->add_option("--level", o.level, "affine sl2 level");
  app->add_option("--window", o.window, "degree window lo:hi");
  app->add_option("--tol", o.tol, "numeric tolerance");
  app->add_option("--quad-n", o.quad_n, "quadrature nodes (0 = default policy)");
  app->add_option("--seed", o.seed, "sampling seed");
  app->add_option("--out", o.out, "output file (default stdout)");
  app->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

Settings resolve(const Common& o) {
  Settings s;
  if (!o.config.empty()) s.cfg = load_suite_config(o.config);
  if (o.preset) s.cfg.preset = *o.preset;
  if (o.c) s.cfg.c = *o.c;
  if (o.level) s.cfg.level = *o.level;
  if (o.window) s.cfg.window = detail::wrap("--window", [&] { return parse_window(*o.window); });
  if (o.tol) {
    s.cfg.tol_numeric = *o.tol;
    s.tol_given = true;
  }
  if (o.quad_n) s.cfg.quad_n = *o.quad_n;
  if (o.seed) s.cfg.seed = *o.seed;
  if (o.out) s.cfg.out = *o.out;
  if (o.format) s.format = *o.format;
  detail::wrap("--c", [&] { return parse_gaussian(s.cfg.c); });
  detail::wrap("--level", [&] { return parse_gaussian(s.cfg.level); });
  if (s.cfg.window.lo < 0) throw ConfigError("--window: lower end must be >= 0");
  if (s.cfg.quad_n < 0) throw ConfigError("--quad-n: must be >= 0");
  return s;
}

VAPreset make_preset(const SuiteConfig& c) {
  return detail::wrap("--preset", [&] { return VAPreset::from_name(c.preset, c.c, c.level); });
}

json read_json(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + ": no file given");
  std::ifstream in(path);
  if (!in) throw ConfigError(what + ": cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<GaussianRational> parse_points(const std::string& text, const std::string& where) {
  std::vector<GaussianRational> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(detail::wrap(where, [&] { return parse_gaussian(tok); }));
  if (out.empty()) throw ConfigError(where + ": no points given");
  return out;
}

std::vector<GradedVector> load_states(const VertexEngine& e, const std::string& path) {
  json j = read_json(path, "--states");
  if (j.is_object() && j.contains("states")) j = j.at("states");
  return parse_states(e, j, path);
}

std::vector<Complex> to_complex(const std::vector<GaussianRational>& z) {
  std::vector<Complex> out;
  for (const auto& p : z) out.push_back(p.to_complex());
  return out;
}

int report_exit(const CheckReport& r) { return r.pass || r.skipped ? kPass : kFail; }

std::string check_csv(const std::vector<CheckReport>& rs) {
  std::ostringstream out;
  out << "label,axiom,pass,skipped,max_err,tol,cases\n";
  for (const auto& r : rs)
    out << csv_escape(r.label) << ',' << csv_escape(r.axiom) << ',' << r.pass << ',' << r.skipped << ',' << to_json(r).at("max_err").dump() << ','
        << r.tol << ',' << r.cases << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

int cmd_define(const Settings& s) {
  VertexEngine e(make_preset(s.cfg));
  const auto& p = e.preset();
  if (s.format == "csv") {
    std::ostringstream out;
    out << "degree,dimension\n";
    for (int d = s.cfg.window.lo; d <= s.cfg.window.hi; ++d) out << d << ',' << e.basis(d).size() << '\n';
    emit(s.cfg.out, out.str());
    return kPass;
  }
  json gens = json::array();
  for (int g = 0; g < p.generator_count(); ++g) gens.push_back({{"symbol", p.symbol(g)}, {"weight", p.weight(g)}});
  json dims = json::object(), basis = json::object();
  for (int d = s.cfg.window.lo; d <= s.cfg.window.hi; ++d) {
    auto b = e.basis(d);
    dims[std::to_string(d)] = b.size();
    json names = json::array();
    for (const auto& m : b) names.push_back(e.format(m));
    basis[std::to_string(d)] = names;
  }
  emit(s.cfg.out, dump({{"preset", p.name()}, {"parameter", p.parameter().str()}, {"generators", gens}, {"dimensions", dims}, {"basis", basis}}));
  return kPass;
}

int cmd_mode(const Settings& s, const std::string& a, std::optional<int> n, const std::string& b) {
  VertexEngine e(make_preset(s.cfg));
  if (a.empty() && b.empty()) {
    if (s.format == "csv") {
      emit(s.cfg.out, mode_table_csv(e, s.cfg.window.hi));
      return kPass;
    }
    json rows = json::array();
    auto basis = e.basis_up_to(0, s.cfg.window.hi);
    for (const auto& ma : basis)
      for (const auto& mb : basis) {
        if (ma.degree() + mb.degree() > s.cfg.window.hi) continue;
        for (int k = 0; k < ma.degree() + mb.degree(); ++k) {
          const GradedVector& v = e.state_mode(ma, k, mb);
          if (!v.is_zero()) rows.push_back({{"a", e.format(ma)}, {"n", k}, {"b", e.format(mb)}, {"value", vector_json(e, v)}});
        }
      }
    emit(s.cfg.out, dump({{"preset", e.preset().name()}, {"rows", rows}}));
    return kPass;
  }
  if (a.empty() || b.empty() || !n) throw ConfigError("mode: give --a, --n and --b, or none of them for a table");
  GradedVector va(parse_monomial(e, a, "--a")), vb(parse_monomial(e, b, "--b"));
  GradedVector v = e.state_mode(va, *n, vb);
  if (s.format == "csv")
    emit(s.cfg.out, "preset,a,n,b,value\n" + e.preset().name() + ',' + csv_escape(a) + ',' + std::to_string(*n) + ',' + csv_escape(b) + ',' +
                        csv_escape(e.format(v)) + '\n');
  else
    emit(s.cfg.out, dump({{"preset", e.preset().name()}, {"a", a}, {"n", *n}, {"b", b}, {"value", vector_json(e, v)}, {"text", e.format(v)}}));
  return kPass;
}

int cmd_npoint(const Settings& s, const std::string& states_path, const std::string& points) {
  VertexEngine e(make_preset(s.cfg));
  GeometricMu mu(e);
  auto states = load_states(e, states_path);
  auto z = parse_points(points, "--points");
  if (z.size() != states.size()) throw ConfigError("npoint: " + std::to_string(states.size()) + " states but " + std::to_string(z.size()) + " points");
  try {
    PointConfiguration(std::vector<Scalar>(z.begin(), z.end()));
  } catch (const std::exception& err) {
    throw ConfigError(std::string("--points: ") + err.what());
  }
  json j{{"preset", e.preset().name()}, {"states", states_json(e, states)}, {"points", points_json(z)},
         {"window", std::to_string(s.cfg.window.lo) + ":" + std::to_string(s.cfg.window.hi)}};
  if (states.size() <= 2) {
    j["exact"] = true;
    j["components"] = product_json(e, mu.mu_exact(states, z, s.cfg.window));
  } else {
    std::vector<NumericVector> ns;
    for (const auto& v : states) ns.push_back(to_numeric(v));
    MuOptions opt;
    if (s.tol_given) opt.tol = s.cfg.tol_numeric;
    auto r = mu.mu_numeric_auto(ns, to_complex(z), s.cfg.window, opt);
    j["exact"] = false;
    j["components"] = product_json(e, r.value);
    j["truncation"] = {{"d_max", r.diag.d_max}, {"caps", r.diag.caps}, {"tail", r.diag.tail}, {"attempts", r.diag.attempts}};
  }
  emit(s.cfg.out, dump(j));
  return kPass;
}

struct CheckArgs {
  std::string axiom, states, points, inner_states, inner_points, center = "0", q = "1/2", shift = "1/4+1/8i", perm;
  int k = 2;
  double radius = 0.75;
};

int cmd_check(const Settings& s, const CheckArgs& a) {
  VertexEngine e(make_preset(s.cfg));
  GeometricMu mu(e);
  const DegreeWindow w = s.cfg.window;
  const double tol = s.tol_given ? s.cfg.tol_numeric : 1e-9;
  auto states = [&] { return load_states(e, a.states); };
  auto points = [&] { return parse_points(a.points, "--points"); };
  std::vector<CheckReport> rs;
  try {
    if (a.axiom == "insertion") {
      rs.push_back(check_insertion_at_zero(mu, w));
    } else if (a.axiom == "meromorphicity") {
      rs.push_back(check_meromorphicity(mu, w));
    } else if (a.axiom == "equivariance") {
      auto z = points();
      Scalar q = detail::wrap("--q", [&] { return Scalar::parse(a.q); });
      rs.push_back(check_equivariance(mu, q, states(), std::vector<Scalar>(z.begin(), z.end()), w, s.tol_given ? s.cfg.tol_numeric : 1e-8));
    } else if (a.axiom == "permutation") {
      auto st = states();
      std::vector<std::size_t> perm;
      if (a.perm.empty())
        for (std::size_t i = st.size(); i-- > 0;) perm.push_back(i);
      else {
        std::stringstream ss(a.perm);
        for (std::string tok; std::getline(ss, tok, ',');) perm.push_back(static_cast<std::size_t>(std::stoul(tok)));
      }
      rs.push_back(check_permutation_invariance(mu, st, to_complex(points()), perm, w, tol));
    } else if (a.axiom == "skew-symmetry") {
      auto st = states();
      auto z = points();
      if (st.size() != 2 || z.size() != 1) throw ConfigError("skew-symmetry: two states and one point");
      rs.push_back(check_skew_symmetry(mu, st[0], st[1], z[0], w));
    } else if (a.axiom == "associativity") {
      json inner = read_json(a.inner_states, "--inner-states");
      AssociativityInput in{states(), points(), detail::wrap("--center", [&] { return parse_gaussian(a.center); }),
                            parse_states(e, inner.is_object() && inner.contains("states") ? inner.at("states") : inner, a.inner_states),
                            parse_points(a.inner_points, "--inner-points")};
      rs.push_back(check_associativity(mu, in, w, s.tol_given ? s.cfg.tol_numeric : 1e-8));
    } else if (a.axiom == "translation") {
      GaussianRational t = detail::wrap("--shift", [&] { return parse_gaussian(a.shift); });
      rs.push_back(check_translation(mu, states(), to_complex(points()), t.to_complex(), w, tol));
    } else if (a.axiom == "holomorphy") {
      auto st = states();
      if (st.size() != 2) throw ConfigError("holomorphy: two states");
      rs.push_back(check_holomorphy_fft(mu, st[0], st[1], a.k, a.radius, s.cfg.quad_n > 0 ? s.cfg.quad_n : 64, tol));
    } else {
      throw ConfigError("check: unknown axiom '" + a.axiom + "'");
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError(a.axiom + ": " + err.what());
  } catch (const DomainViolation& err) {
    throw ConfigError(a.axiom + ": " + err.what());
  }
  emit(s.cfg.out, s.format == "csv" ? check_csv(rs) : dump(to_json(rs.front())));
  return report_exit(rs.front());
}

struct FactorArgs {
  std::string op, geometry, exprs, report, into, target;
  std::vector<std::string> cover;
  int m = -1;
};

int cmd_counterexample(const Settings& s, int m) {
  VertexEngine e(make_preset(s.cfg));
  GeometricMu mu(e);
  FunctionalEvaluator fe(mu);
  ExpressionEvaluator ev(fe);
  auto [a, fallback] = counterexample_witness(e);
  CheckReport r = run_counterexample(ev, a, m >= 0 ? m : fallback);
  if (s.format == "csv") {
    std::ostringstream out;
    out << "set,value\n";
    if (r.witness.contains("table"))
      for (const auto& row : r.witness.at("table")) out << csv_escape(row.at("set").get<std::string>()) << ',' << csv_escape(row.at("value").get<std::string>()) << '\n';
    emit(s.cfg.out, out.str());
  } else {
    emit(s.cfg.out, dump(to_json(r)));
  }
  return report_exit(r);
}

int cmd_factor(const Settings& s, const FactorArgs& f) {
  if (f.op == "counterexample") {
    Settings t = s;
    if (!f.report.empty()) t.cfg.out = f.report;
    return cmd_counterexample(t, f.m);
  }
  VertexEngine e(make_preset(s.cfg));
  GeometricMu mu(e);
  FunctionalEvaluator fe(mu);
  ExpressionEvaluator ev(fe);
  const DegreeWindow w = s.cfg.window;
  const std::string out = f.report.empty() ? s.cfg.out : f.report;
  if (f.op == "roundtrip") {
    CheckReport r = roundtrip_check(ev, w);
    emit(out, dump(to_json(r)));
    return report_exit(r);
  }
  auto geometry = parse_geometry(read_json(f.geometry, "--geometry"));
  auto named = parse_expressions(e, read_json(f.exprs, "--exprs"), geometry);
  std::vector<Expression> xs;
  for (const auto& [name, x] : named) xs.push_back(x);
  auto find_set = [&](const std::string& name, const char* flag) {
    if (name.empty()) throw ConfigError(std::string(flag) + ": required for factor " + f.op);
    return resolve_open_set(json(name), geometry, flag);
  };

  if (!f.into.empty() && f.op != "multiply") {
    OpenSet into = find_set(f.into, "--into");
    try {
      for (auto& [name, x] : named) x = extend(x, into);
    } catch (const NotASubset& err) {
      throw ConfigError("--into: " + std::string(err.what()));
    }
    xs.clear();
    for (const auto& [name, x] : named) xs.push_back(x);
  }

  if (f.op == "multiply") {
    if (xs.size() != 2) throw ConfigError("factor multiply: needs exactly two expressions");
    OpenSet into = find_set(f.into, "--into");
    try {
      emit(out, dump({{"carrier", open_set_json(into)}, {"product", expression_json(e, multiply(xs[0], xs[1], into))}}));
    } catch (const NotDisjoint& err) {
      throw ConfigError(std::string("factor multiply: ") + err.what());
    } catch (const NotASubset& err) {
      throw ConfigError(std::string("factor multiply: ") + err.what());
    }
    return kPass;
  }
  if (f.op == "eval") {
    json vals = json::array();
    EvalOptions opt;
    if (s.cfg.quad_n > 0) opt.quad_n = s.cfg.quad_n;
    for (const auto& [name, x] : named) {
      ExpressionValue v = ev.evaluate(x, w, opt);
      vals.push_back({{"name", name}, {"exact", v.exact}, {"value", v.exact ? product_json(e, v.exact_value) : product_json(e, v.numeric_value)}});
    }
    emit(out, dump({{"window", std::to_string(w.lo) + ":" + std::to_string(w.hi)}, {"values", vals}}));
    return kPass;
  }
  if (f.op == "kernel") {
    auto ker = relation_kernel(ev, xs, w);
    json vecs = json::array();
    CheckReport r("relation-kernel", labels::kDiscRelations, 0.0);
    for (const auto& c : ker) {
      json v = json::array();
      for (const auto& x : c) v.push_back(x.str());
      vecs.push_back(v);
      Expression rel = combine(xs, c);
      r.record(ev.evaluate_exact(rel, w).is_zero() ? 0.0 : 1.0, v);
    }
    json names = json::array();
    for (const auto& [name, x] : named) names.push_back(name);
    json j{{"window", std::to_string(w.lo) + ":" + std::to_string(w.hi)},
           {"exprs", names},
           {"rank", matrix_rank(evaluation_matrix(ev, xs, w), xs.size())},
           {"kernel", vecs},
           {"check", to_json(r)}};
    emit(out, dump(j));
    return report_exit(r);
  }
  if (f.op == "weiss") {
    OpenSet x = find_set(f.target, "--target");
    std::vector<OpenSet> cover;
    for (const auto& c : f.cover) cover.push_back(find_set(c, "--cover"));
    if (cover.empty()) throw ConfigError("factor weiss: --cover lists at least one open set");
    CheckReport r = weiss_cover_check(ev, x, cover, xs, w);
    emit(out, dump(to_json(r)));
    return report_exit(r);
  }
  throw ConfigError("factor: unknown operation '" + f.op + "'");
}

int cmd_suite(Settings s, const std::string& tables) {
  if (!tables.empty()) s.cfg.tables = tables;
  SuiteResult r = run_suite(s.cfg);
  emit(s.cfg.out, s.format == "csv" ? report_table_csv(r.report) : dump(r.report));
  if (!s.cfg.tables.empty()) {
    std::filesystem::create_directories(s.cfg.tables);
    VertexEngine e(make_preset(s.cfg));
    const std::string dir = s.cfg.tables + "/";
    emit(dir + "modes_" + e.preset().name() + ".csv", mode_table_csv(e, std::min(s.cfg.window.hi, 4)));
    emit(dir + "pole_bounds_" + e.preset().name() + ".csv", pole_bound_table_csv(e, std::min(s.cfg.window.hi, 3)));
    emit(dir + "report_" + e.preset().name() + ".csv", report_table_csv(r.report));
  }
  return r.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxfact: geometric vertex algebras and prefactorization checks"};
  app.require_subcommand(1);

  Common common;
  auto* define = app.add_subcommand("define", "preset generators and basis dimensions");
  auto* mode = app.add_subcommand("mode", "a_(n)b, or the mode table over the window");
  auto* npoint = app.add_subcommand("npoint", "mu(a_1, z_1, ..., a_m, z_m) over the window");
  auto* check = app.add_subcommand("check", "run one axiom check");
  auto* factor = app.add_subcommand("factor", "expressions on open sets");
  auto* counter = app.add_subcommand("counterexample", "annulus/disc quotient example");
  auto* suite = app.add_subcommand("suite", "full check suite");
  for (auto* sc : {define, mode, npoint, check, factor, counter, suite}) add_common(sc, common);

  std::string mode_a, mode_b;
  std::optional<int> mode_n;
  mode->add_option("--a", mode_a, "PBW monomial, e.g. \"a-1 a-2\"");
  mode->add_option("--n", mode_n, "mode index");
  mode->add_option("--b", mode_b, "PBW monomial");

  std::string states_path, points;
  npoint->add_option("--states", states_path, "JSON list of states")->required();
  npoint->add_option("--points", points, "comma separated exact points, e.g. \"2+0i,1/2,0\"")->required();

  CheckArgs ca;
  check->add_option("axiom", ca.axiom, "insertion | equivariance | permutation | skew-symmetry | associativity | translation | meromorphicity | holomorphy")
      ->required();
  check->add_option("--states", ca.states, "JSON list of states");
  check->add_option("--points", ca.points, "comma separated exact points");
  check->add_option("--inner-states", ca.inner_states, "associativity: inner states");
  check->add_option("--inner-points", ca.inner_points, "associativity: inner points w_j");
  check->add_option("--center", ca.center, "associativity: z_{m+1}");
  check->add_option("--q", ca.q, "equivariance: scaling factor");
  check->add_option("--shift", ca.shift, "translation: shift t");
  check->add_option("--perm", ca.perm, "permutation: comma separated indices");
  check->add_option("--k", ca.k, "holomorphy: degree");
  check->add_option("--radius", ca.radius, "holomorphy: sampling radius");

  FactorArgs fa;
  factor->add_option("op", fa.op, "multiply | eval | kernel | counterexample | weiss | roundtrip")
      ->required()
      ->check(CLI::IsMember({"multiply", "eval", "kernel", "counterexample", "weiss", "roundtrip"}));
  factor->add_option("--geometry", fa.geometry, "named open sets");
  factor->add_option("--exprs", fa.exprs, "expressions");
  factor->add_option("--report", fa.report, "report file (default --out or stdout)");
  factor->add_option("--into", fa.into, "target open set; other operations first extend every expression to it");
  factor->add_option("--target", fa.target, "weiss: covered open set name");
  factor->add_option("--cover", fa.cover, "weiss: cover open set names");
  factor->add_option("--m", fa.m, "counterexample: mode index");

  int counter_m = -1;
  counter->add_option("--m", counter_m, "mode index (default: top pole of the first generator)");

  std::string tables;
  suite->add_option("--tables", tables, "directory for CSV tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    Settings s = resolve(common);
    if (*define) return cmd_define(s);
    if (*mode) return cmd_mode(s, mode_a, mode_n, mode_b);
    if (*npoint) return cmd_npoint(s, states_path, points);
    if (*check) return cmd_check(s, ca);
    if (*factor) return cmd_factor(s, fa);
    if (*counter) return cmd_counterexample(s, counter_m);
    if (*suite) return cmd_suite(s, tables);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
