#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfv/gauge.hpp"
#include "bfv/numeric_flow.hpp"
#include "bfv/parse.hpp"
#include "bfv/witness.hpp"

namespace bfv {

using Json = nlohmann::json;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int steps = 1000;
  int nil_cap = kDefaultNilCap;
  double tol = 1e-6;
};

struct HomotopyDecl {
  std::string start_section;
  std::vector<std::string> segment_generators;
};

/// One scenario file: a problem context (VarTable + Poisson bivector), named
/// sections, generators and homotopies, and an ordered command list. The
/// whole file is validated before any computation runs.
class Scenario {
 public:
  std::string name;
  VarTablePtr table;
  std::optional<PoissonBivector> poisson;
  std::map<std::string, SectionMu> sections;
  std::map<std::string, GaugeGenerator> generators;
  std::map<std::string, HomotopyDecl> homotopies;
  std::vector<std::string> commands;

  const PoissonBivector& pi() const { return *poisson; }

  static Scenario from_json(const Json& j, const std::string& name) {
    if (!j.is_object()) throw SchemaError("scenario: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      static const std::set<std::string> known{"base_vars",  "fiber_rank", "poisson",
                                               "sections",   "generators", "homotopies",
                                               "commands"};
      if (!known.count(key)) throw SchemaError("scenario: unknown key '" + key + "'");
    }
    Scenario s;
    s.name = name;

    if (!j.contains("base_vars") || !j["base_vars"].is_array())
      throw SchemaError("scenario: 'base_vars' must be an array of strings");
    std::vector<std::string> base;
    for (const auto& v : j["base_vars"]) {
      if (!v.is_string()) throw SchemaError("scenario: 'base_vars' entries must be strings");
      base.push_back(v.get<std::string>());
    }
    if (!j.contains("fiber_rank") || !j["fiber_rank"].is_number_integer())
      throw SchemaError("scenario: 'fiber_rank' must be an integer");
    const int k = j["fiber_rank"].get<int>();
    if (k < 1 || k > static_cast<int>(kMaxFiberRank))
      throw SchemaError("scenario: 'fiber_rank' out of range");
    std::vector<std::string> fiber;
    for (int i = 1; i <= k; ++i) fiber.push_back("y" + std::to_string(i));
    for (const auto& b : base)
      for (const auto& f : fiber)
        if (b == f) throw SchemaError("scenario: base variable collides with fiber name " + f);
    try {
      s.table = std::make_shared<VarTable>(base, fiber, std::optional<std::string>{"t"});
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("scenario: ") + e.what());
    }

    s.poisson.emplace(s.table);
    if (!j.contains("poisson") || !j["poisson"].is_array())
      throw SchemaError("scenario: 'poisson' must be an array");
    std::set<std::pair<int, int>> seen_pairs;
    const int coords = static_cast<int>(s.poisson->coord_count());
    for (const auto& entry : j["poisson"]) {
      if (!entry.is_object() || !entry.contains("a") || !entry.contains("b") ||
          !entry.contains("poly") || !entry["a"].is_number_integer() ||
          !entry["b"].is_number_integer() || !entry["poly"].is_string())
        throw SchemaError("scenario: poisson entries must be {a:int, b:int, poly:string}");
      const int a = entry["a"].get<int>(), b = entry["b"].get<int>();
      if (a < 1 || a > coords || b < 1 || b > coords)
        throw SchemaError("scenario: poisson index out of range (1-based over base+fiber)");
      if (a == b) throw SchemaError("scenario: poisson diagonal entries are implicitly zero");
      if (!seen_pairs.insert({std::min(a, b), std::max(a, b)}).second)
        throw SchemaError("scenario: duplicate poisson entry for pair (" + std::to_string(a) +
                          "," + std::to_string(b) + ")");
      try {
        s.poisson->set_entry(a - 1, b - 1, poly_parse(entry["poly"].get<std::string>(), s.table));
      } catch (const std::exception& e) {
        throw SchemaError(std::string("scenario: bad poisson polynomial: ") + e.what());
      }
    }

    if (j.contains("sections")) {
      if (!j["sections"].is_object()) throw SchemaError("scenario: 'sections' must be an object");
      for (const auto& [sname, arr] : j["sections"].items()) {
        if (!arr.is_array() || static_cast<int>(arr.size()) != k)
          throw SchemaError("scenario: section '" + sname + "' needs exactly " +
                            std::to_string(k) + " polynomials");
        SectionMu mu;
        for (const auto& p : arr) {
          if (!p.is_string()) throw SchemaError("scenario: section entries must be strings");
          try {
            mu.push_back(poly_parse(p.get<std::string>(), s.table));
          } catch (const std::exception& e) {
            throw SchemaError("scenario: section '" + sname + "': " + e.what());
          }
        }
        try {
          validate_section(*s.table, mu);
        } catch (const std::exception& e) {
          throw SchemaError("scenario: section '" + sname + "': " + e.what());
        }
        s.sections.emplace(sname, std::move(mu));
      }
    }

    if (j.contains("generators")) {
      if (!j["generators"].is_object())
        throw SchemaError("scenario: 'generators' must be an object");
      for (const auto& [gname, text] : j["generators"].items()) {
        if (!text.is_string()) throw SchemaError("scenario: generator entries must be strings");
        try {
          s.generators.emplace(gname,
                               GaugeGenerator(element_parse(text.get<std::string>(), s.table)));
        } catch (const std::exception& e) {
          throw SchemaError("scenario: generator '" + gname + "': " + e.what());
        }
      }
    }

    if (j.contains("homotopies")) {
      if (!j["homotopies"].is_object())
        throw SchemaError("scenario: 'homotopies' must be an object");
      for (const auto& [hname, decl] : j["homotopies"].items()) {
        if (!decl.is_object() || !decl.contains("start") || !decl.contains("segments") ||
            !decl["start"].is_string() || !decl["segments"].is_array())
          throw SchemaError("scenario: homotopy '" + hname +
                            "' must be {start: section, segments: [generator names]}");
        HomotopyDecl h;
        h.start_section = decl["start"].get<std::string>();
        if (!s.sections.count(h.start_section))
          throw SchemaError("scenario: homotopy '" + hname + "': unknown start section '" +
                            h.start_section + "'");
        for (const auto& seg : decl["segments"]) {
          if (!seg.is_string() || !s.generators.count(seg.get<std::string>()))
            throw SchemaError("scenario: homotopy '" + hname + "': unknown generator segment");
          h.segment_generators.push_back(seg.get<std::string>());
        }
        s.homotopies.emplace(hname, std::move(h));
      }
    }

    if (!j.contains("commands") || !j["commands"].is_array())
      throw SchemaError("scenario: 'commands' must be an array of strings");
    std::set<std::string> homotopy_names;
    for (const auto& [hname, decl] : s.homotopies) homotopy_names.insert(hname);
    for (const auto& c : j["commands"]) {
      if (!c.is_string()) throw SchemaError("scenario: commands must be strings");
      std::string cmd = c.get<std::string>();
      auto tokens = tokenize(cmd);
      if (tokens.empty()) throw SchemaError("scenario: empty command");
      const std::string& op = tokens[0];
      auto need = [&](std::size_t n) {
        if (tokens.size() != n + 1)
          throw SchemaError("scenario: command '" + op + "' takes " + std::to_string(n) +
                            " argument(s): " + cmd);
      };
      if (op == "validate" || op == "charge") {
        need(0);
      } else if (op == "coisotropy" || op == "mc-lift") {
        need(1);
        if (!s.sections.count(tokens[1]))
          throw SchemaError("scenario: command references unknown section '" + tokens[1] + "'");
      } else if (op == "mc-check") {
        need(1);
        // Either a name bound by an earlier mc-lift/gauge, or an inline element.
        bool named = s.sections.count(tokens[1]) > 0;
        for (const auto& h : homotopy_names)
          if (tokens[1] == h + ".end") named = true;
        if (!named) {
          try {
            element_parse(tokens[1], s.table);
          } catch (const std::exception& e) {
            throw SchemaError("scenario: mc-check argument is neither a known name nor a "
                              "parsable element: " +
                              std::string(e.what()));
          }
        }
      } else if (op == "gauge" || op == "project") {
        need(1);
        if (!homotopy_names.count(tokens[1]))
          throw SchemaError("scenario: command references unknown homotopy '" + tokens[1] + "'");
      } else if (op == "compose") {
        need(2);
        for (int arg = 1; arg <= 2; ++arg)
          if (!homotopy_names.count(tokens[arg]))
            throw SchemaError("scenario: command references unknown homotopy '" + tokens[arg] +
                              "'");
        homotopy_names.insert(tokens[1] + "+" + tokens[2]);
      } else {
        throw SchemaError("scenario: unknown command '" + op + "'");
      }
      s.commands.push_back(cmd);
    }
    return s;
  }

  static Scenario load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open scenario file: " + path);
    Json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw SchemaError("scenario: invalid JSON: " + std::string(e.what()));
    }
    return from_json(j, stem_of(path));
  }

  static std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
  }

  static std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    return (dot == std::string::npos) ? base : base.substr(0, dot);
  }
};

namespace detail {

inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline Json witness_json(const JacobiWitness& w, const VarTable& table) {
  return Json{{"type", "jacobi"},
              {"triple", {w.a, w.b, w.c}},
              {"component", poly_to_string(w.component, table)},
              {"explanation", explain_failure(FailureWitness{w}, table)}};
}

inline Json witness_json(const CoisotropyWitness& w, const VarTable& table) {
  return Json{{"type", "coisotropy"},
              {"pair", {w.i, w.j}},
              {"restricted", poly_to_string(w.restricted, table)},
              {"explanation", explain_failure(FailureWitness{w}, table)}};
}

inline Json witness_json(const ObstructionWitness& w, const VarTable& table) {
  return Json{{"type", "obstruction"},
              {"iteration", w.iteration},
              {"element", element_to_string(w.obstruction)},
              {"pr_image", element_to_string(w.pr_image)},
              {"explanation", explain_failure(FailureWitness{w}, table)}};
}

inline Json trace_json(const std::vector<PerturbationStep>& trace) {
  Json arr = Json::array();
  for (const auto& step : trace)
    arr.push_back(Json{{"iteration", step.iteration},
                       {"resolution_degree", step.resolution_degree},
                       {"obstruction", element_to_string(step.obstruction)},
                       {"correction", element_to_string(step.correction)}});
  return arr;
}

inline Json section_json(const SectionMu& mu, const VarTable& table) {
  Json arr = Json::array();
  for (const auto& p : mu) arr.push_back(poly_to_string(p, table));
  return arr;
}

inline Json r_min_json(const GaugeGenerator& g) {
  if (g.element().is_zero()) return nullptr;  // the zero generator sits in every level
  return g.r_min();
}

inline Json endo_json(const EndomorphismField& A) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < A.rank(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < A.rank(); ++j)
      row.push_back(poly_to_string(A.at(i, j), *A.table()));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Executes the scenario's commands in order and assembles the
/// machine-readable report. Witnesses are recorded and execution continues;
/// hard module errors are recorded with the command index and stop the run.
class ScenarioRunner {
 public:
  ScenarioRunner(const Scenario& scenario, RunConfig config)
      : s_(scenario), config_(config) {}

  Json run() {
    Json report;
    report["scenario"] = s_.name;
    report["config"] = Json{{"steps", config_.steps},
                            {"nil_cap", config_.nil_cap},
                            {"tol", detail::fmt12(config_.tol)}};
    Json commands = Json::array();
    bool any_witness = false;
    bool any_error = false;
    for (std::size_t idx = 0; idx < s_.commands.size(); ++idx) {
      Json entry;
      entry["index"] = idx;
      entry["command"] = s_.commands[idx];
      try {
        entry.update(execute(Scenario::tokenize(s_.commands[idx])));
      } catch (const std::exception& e) {
        entry["status"] = "error";
        entry["message"] = e.what();
      }
      const std::string status = entry["status"].get<std::string>();
      any_witness = any_witness || status == "witness";
      any_error = any_error || status == "error";
      commands.push_back(std::move(entry));
      if (any_error) break;
    }
    report["commands"] = std::move(commands);
    report["status"] = any_error ? "error" : (any_witness ? "witness" : "ok");
    return report;
  }

  static int exit_code(const Json& report) {
    const std::string status = report.at("status").get<std::string>();
    return status == "ok" ? 0 : 1;
  }

 private:
  Json execute(const std::vector<std::string>& tokens) {
    const std::string& op = tokens[0];
    if (op == "validate") return cmd_validate();
    if (op == "coisotropy") return cmd_coisotropy(tokens[1]);
    if (op == "charge") return cmd_charge();
    if (op == "mc-lift") return cmd_mc_lift(tokens[1]);
    if (op == "mc-check") return cmd_mc_check(tokens[1]);
    if (op == "gauge") return cmd_gauge(tokens[1]);
    if (op == "project") return cmd_project(tokens[1]);
    if (op == "compose") return cmd_compose(tokens[1], tokens[2]);
    throw std::logic_error("unreachable: unknown command survived validation");
  }

  Json cmd_validate() {
    if (auto w = check_jacobi(s_.pi())) {
      Json j;
      j["status"] = "witness";
      j["witness"] = detail::witness_json(*w, *s_.table);
      return j;
    }
    return Json{{"status", "ok"}, {"jacobi", "ok"}};
  }

  Json cmd_coisotropy(const std::string& name) {
    if (auto w = check_coisotropic_section(s_.pi(), s_.sections.at(name))) {
      Json j;
      j["status"] = "witness";
      j["coisotropic"] = false;
      j["witness"] = detail::witness_json(*w, *s_.table);
      return j;
    }
    return Json{{"status", "ok"}, {"coisotropic", true}};
  }

  const ChargeResult& charge_result() {
    if (!charge_) charge_ = construct_charge(s_.pi());
    return *charge_;
  }

  const BFVElement& require_omega() {
    const ChargeResult& r = charge_result();
    if (!r.ok())
      throw std::runtime_error(
          "no BFV charge exists: the zero section is not coisotropic (run 'charge' for the "
          "witness)");
    return r.charge->omega;
  }

  Json cmd_charge() {
    const ChargeResult& r = charge_result();
    Json j;
    if (r.ok()) {
      j["status"] = "ok";
      j["omega"] = element_to_string(r.charge->omega);
      j["iterations"] = r.charge->iterations;
      j["trace"] = detail::trace_json(r.charge->trace);
    } else {
      j["status"] = "witness";
      j["witness"] = detail::witness_json(*r.obstruction, *s_.table);
      j["trace"] = detail::trace_json(r.trace);
    }
    return j;
  }

  Json cmd_mc_lift(const std::string& name) {
    const BFVElement& omega = require_omega();
    LiftResult lift = lift_normalized_mc(s_.pi(), omega, s_.sections.at(name));
    Json j;
    if (lift.ok()) {
      j["status"] = "ok";
      j["beta"] = element_to_string(lift.mc->beta);
      j["iterations"] = lift.iterations;
      j["trace"] = detail::trace_json(lift.trace);
      j["l_nor"] = detail::section_json(l_nor(*lift.mc), *s_.table);
      mc_store_.insert_or_assign(name, std::move(*lift.mc));
    } else if (lift.not_coisotropic) {
      j["status"] = "witness";
      j["witness"] = detail::witness_json(*lift.not_coisotropic, *s_.table);
    } else {
      j["status"] = "witness";
      j["witness"] = detail::witness_json(*lift.obstruction, *s_.table);
    }
    return j;
  }

  Json cmd_mc_check(const std::string& arg) {
    const BFVElement& omega = require_omega();
    BFVElement beta(s_.table);
    auto it = mc_store_.find(arg);
    if (it != mc_store_.end())
      beta = it->second.beta;
    else
      beta = element_parse(arg, s_.table);
    MCCheckResult r = mc_check(s_.pi(), omega, beta);
    Json j;
    if (r.ok) {
      j["status"] = "ok";
      j["maurer_cartan"] = true;
    } else {
      j["status"] = "witness";
      j["maurer_cartan"] = false;
      j["residual"] = element_to_string(r.residual);
      j["explanation"] = "Maurer-Cartan equation fails: [Omega+beta, Omega+beta] is nonzero";
    }
    return j;
  }

  const MCElement& require_mc(const std::string& section) {
    auto it = mc_store_.find(section);
    if (it != mc_store_.end()) return it->second;
    const BFVElement& omega = require_omega();
    LiftResult lift = lift_normalized_mc(s_.pi(), omega, s_.sections.at(section));
    if (!lift.ok())
      throw std::runtime_error("section '" + section +
                               "' does not lift to a Maurer-Cartan element");
    auto [pos, ok] = mc_store_.insert_or_assign(section, std::move(*lift.mc));
    return pos->second;
  }

  Json cmd_gauge(const std::string& name) {
    const GaugeHomotopy& h = require_homotopy(name);
    Json segments = Json::array();
    for (const auto& seg : h.segments)
      segments.push_back(Json{{"dyson_depth", seg.family.dyson_depth()},
                              {"r_min", detail::r_min_json(seg.generator)},
                              {"pure", seg.generator.r_min() >= 1}});
    Json j;
    j["status"] = "ok";
    j["start"] = element_to_string(h.start.beta);
    j["end"] = element_to_string(h.end.beta);
    j["pure"] = is_pure(h);
    j["segments"] = std::move(segments);
    if (h.end.witness) {
      j["l_geo"] = detail::section_json(l_geo(h.end), *s_.table);
      j["witness_A"] = detail::endo_json(h.end.witness->A);
    }
    MCElement end = h.end;
    mc_store_.insert_or_assign(name + ".end", std::move(end));
    return j;
  }

  const GaugeHomotopy& require_homotopy(const std::string& name) {
    auto it = homotopy_store_.find(name);
    if (it != homotopy_store_.end()) return it->second;
    const HomotopyDecl& decl = s_.homotopies.at(name);
    const BFVElement& omega = require_omega();
    const MCElement& start = require_mc(decl.start_section);
    std::vector<GaugeGenerator> gens;
    for (const auto& g : decl.segment_generators) gens.push_back(s_.generators.at(g));
    GaugeHomotopy h = make_gauge_homotopy(s_.pi(), omega, start, gens, config_.nil_cap);
    auto [pos, ok] = homotopy_store_.emplace(name, std::move(h));
    return pos->second;
  }

  Json cmd_project(const std::string& name) {
    const HomotopyDecl* decl = nullptr;
    std::vector<GaugeGenerator> gens;
    auto computed = homotopy_store_.find(name);
    if (computed != homotopy_store_.end()) {
      for (const auto& seg : computed->second.segments) gens.push_back(seg.generator);
    } else {
      decl = &s_.homotopies.at(name);
      for (const auto& g : decl->segment_generators) gens.push_back(s_.generators.at(g));
    }
    Json segments = Json::array();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      Json seg;
      Poly F = project_generator(gens[i]);
      seg["hamiltonian"] = poly_to_string(F, *s_.table);
      seg["r_min"] = detail::r_min_json(gens[i]);
      if (gens[i].r_min() == 0 && gens[i].element() ==
          BFVElement::from_poly(s_.table, F)) {
        seg["numeric_check"] = numeric_projection_check(gens[i]);
      }
      segments.push_back(std::move(seg));
    }
    return Json{{"status", "ok"}, {"segments", std::move(segments)}};
  }

  /// Cross-check of the projection contract: the symbolic coefficient action
  /// of the integrated flow agrees with the pull-back along the numeric
  /// Hamiltonian flow, sampled at a fixed grid of points and times.
  Json numeric_projection_check(const GaugeGenerator& gen) {
    Json j;
    MorphismFamily family = MorphismFamily::identity(s_.table);
    try {
      family = integrate_generator(s_.pi(), gen, config_.nil_cap);
    } catch (const NotLocallyNilpotent& e) {
      j["checked"] = false;
      j["reason"] = e.what();
      return j;
    }
    const Poly F = gen.project();
    const std::size_t coords = s_.pi().coord_count();
    const Rational values[5] = {Rational(0), Rational(1, 2), Rational(-1, 2), Rational(1),
                                Rational(-1)};
    double max_dev = 0.0;
    for (int p = 0; p < 10; ++p) {
      std::vector<Rational> q(coords);
      for (std::size_t i = 0; i < coords; ++i) q[i] = values[(i + 3 * p) % 5];
      for (int ti = 0; ti <= 4; ++ti) {
        const double tau = 0.25 * ti;
        std::vector<double> flowed(coords);
        if (tau == 0.0) {
          for (std::size_t i = 0; i < coords; ++i) flowed[i] = to_double(q[i]);
        } else {
          int steps = std::max(1, static_cast<int>(config_.steps * tau));
          Trajectory traj = numeric_flow_sample(s_.pi(), F, q, steps, tau);
          flowed = traj.points.back();
        }
        std::vector<double> full(s_.table->var_count(), 0.0);
        for (std::size_t i = 0; i < coords; ++i) full[i] = flowed[i];
        full[s_.table->time_index()] = tau;
        for (std::size_t a = 0; a < coords; ++a) {
          const Poly image = family.coordinate_image(a).coefficient(GhostWord{});
          const double dev = std::fabs(image.eval(full) - to_double(q[a]));
          max_dev = std::max(max_dev, dev);
        }
      }
    }
    j["checked"] = true;
    j["max_abs_deviation"] = detail::fmt12(max_dev);
    j["tol"] = detail::fmt12(config_.tol);
    j["within_tol"] = max_dev <= config_.tol;
    return j;
  }

  Json cmd_compose(const std::string& n1, const std::string& n2) {
    const GaugeHomotopy& h1 = require_homotopy(n1);
    const GaugeHomotopy& h2 = require_homotopy(n2);
    GaugeHomotopy combined = compose_homotopies(h1, h2);
    Json j;
    j["status"] = "ok";
    j["name"] = n1 + "+" + n2;
    j["segments"] = combined.segments.size();
    j["pure"] = is_pure(combined);
    j["start"] = element_to_string(combined.start.beta);
    j["end"] = element_to_string(combined.end.beta);
    MCElement end = combined.end;
    mc_store_.insert_or_assign(n1 + "+" + n2 + ".end", std::move(end));
    homotopy_store_.insert_or_assign(n1 + "+" + n2, std::move(combined));
    return j;
  }

  const Scenario& s_;
  RunConfig config_;
  std::optional<ChargeResult> charge_;
  std::map<std::string, MCElement> mc_store_;
  std::map<std::string, GaugeHomotopy> homotopy_store_;
};

struct ScenarioOutcome {
  Json report;
  int exit_code = 0;
};

/// Load, validate and execute one scenario file. The timing field is the one
/// nondeterministic report entry; byte-stable comparisons strip it.
inline ScenarioOutcome run_scenario(const std::string& path, const RunConfig& config = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario scenario = Scenario::load(path);
  ScenarioRunner runner(scenario, config);
  ScenarioOutcome out;
  out.report = runner.run();
  out.exit_code = ScenarioRunner::exit_code(out.report);
  const auto t1 = std::chrono::steady_clock::now();
  out.report["timing_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  return out;
}

}  // namespace bfv
