#pragma once

// Outcome of one axiom or property check, with a JSON form.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace voxfact {

struct CheckReport {
  std::string axiom;
  std::string label;  // proposition the check exercises
  bool pass = true;
  bool skipped = false;
  double max_err = 0.0;
  double tol = 0.0;
  std::size_t cases = 0;
  nlohmann::json witness = nlohmann::json::object();
  nlohmann::json truncation = nlohmann::json::object();
  std::vector<std::string> notes;
  std::vector<std::pair<int, double>> curve;  // (term count, error)

  CheckReport() = default;
  CheckReport(std::string axiom_, std::string label_, double tol_) : axiom(std::move(axiom_)), label(std::move(label_)), tol(tol_) {}

  /// Records one comparison; the first failure becomes the witness.
  void record(double err, const nlohmann::json& input) {
    ++cases;
    bool ok = std::isfinite(err) && err <= tol;
    if (!std::isfinite(err) || err > max_err) max_err = err;
    if (!ok && pass) witness = input;
    pass = pass && ok;
  }

  void fail(const std::string& why, const nlohmann::json& input = nlohmann::json::object()) {
    ++cases;
    if (pass) witness = input;
    pass = false;
    notes.push_back(why);
  }

  void note(std::string s) { notes.push_back(std::move(s)); }

  void merge(const CheckReport& o) {
    if (!o.pass && pass) witness = o.witness;
    pass = pass && o.pass;
    if (!std::isfinite(o.max_err) || o.max_err > max_err) max_err = o.max_err;
    cases += o.cases;
    notes.insert(notes.end(), o.notes.begin(), o.notes.end());
  }
};

inline nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["axiom"] = r.axiom;
  j["label"] = r.label;
  j["pass"] = r.pass;
  j["skipped"] = r.skipped;
  j["max_err"] = std::isfinite(r.max_err) ? nlohmann::json(r.max_err) : nlohmann::json("inf");
  j["tol"] = r.tol;
  j["cases"] = r.cases;
  j["witness"] = r.witness;
  j["truncation"] = r.truncation;
  j["notes"] = r.notes;
  if (!r.curve.empty()) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& [n, e] : r.curve) c.push_back({{"terms", n}, {"error", e}});
    j["curve"] = c;
  }
  return j;
}

}  // namespace voxfact
