#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iptree/errors.hpp"
#include "iptree/gamble.hpp"
#include "iptree/inference.hpp"
#include "iptree/laws.hpp"
#include "iptree/markov.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Document values. Float mode accepts JSON numbers and "p/q" / decimal
// strings; exact mode accepts integers and strings only, because a parsed
// JSON double has already lost the author's decimal.
// ---------------------------------------------------------------------------

template <class T>
T parse_value(const Json& j);

template <>
inline double parse_value<double>(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return num<Rational>::to_double(rational_from_string(j.get<std::string>()));
  fail(Err::Parse, "expected a number or a numeric string, got " + j.dump());
}

template <>
inline Rational parse_value<Rational>(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number())
    fail(Err::Parse, "exact mode needs integers or strings like \"1/4\", got " + j.dump());
  fail(Err::Parse, "expected a number or a numeric string, got " + j.dump());
}

inline Json value_to_json(double v) { return Json(v); }
inline Json value_to_json(const Rational& v) { return Json(format_value(v)); }

template <class T>
std::vector<T> parse_value_array(const Json& j, const char* what) {
  if (!j.is_array()) fail(Err::Parse, std::string(what) + " must be an array");
  std::vector<T> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_value<T>(e));
  return out;
}

// ---------------------------------------------------------------------------
// Local models
// ---------------------------------------------------------------------------

template <class T>
LocalModel<T> parse_model(const Json& j, CarrierPtr carrier) {
  if (!j.is_object() || !j.contains("type"))
    fail(Err::Parse, "model must be an object with a \"type\"");
  std::string type = j.at("type").get<std::string>();
  if (type == "vacuous") return LocalModel<T>::vacuous(std::move(carrier));
  if (type == "precise")
    return LocalModel<T>::precise(std::move(carrier),
                                  parse_value_array<T>(j.at("mass"), "mass"));
  if (type == "linvac")
    return LocalModel<T>::linear_vacuous(std::move(carrier),
                                         parse_value_array<T>(j.at("mass"), "mass"),
                                         parse_value<T>(j.at("delta")));
  if (type == "credal") {
    if (!j.contains("vertices") || !j.at("vertices").is_array())
      fail(Err::Parse, "credal model needs a \"vertices\" array");
    std::vector<std::vector<T>> pts;
    for (const auto& row : j.at("vertices")) pts.push_back(parse_value_array<T>(row, "vertex"));
    return LocalModel<T>::credal(std::move(carrier), std::move(pts));
  }
  fail(Err::Parse, "unknown model type '" + type + "'");
}

template <class T>
Json model_to_json(const LocalModel<T>& model) {
  Json j;
  switch (model.kind()) {
    case ModelKind::Vacuous:
      j["type"] = "vacuous";
      break;
    case ModelKind::Precise: {
      j["type"] = "precise";
      Json mass = Json::array();
      for (const auto& v : model.mass()) mass.push_back(value_to_json(v));
      j["mass"] = std::move(mass);
      break;
    }
    case ModelKind::LinearVacuous: {
      j["type"] = "linvac";
      Json mass = Json::array();
      for (const auto& v : model.mass()) mass.push_back(value_to_json(v));
      j["mass"] = std::move(mass);
      j["delta"] = value_to_json(model.delta());
      break;
    }
    case ModelKind::Credal: {
      j["type"] = "credal";
      Json pts = Json::array();
      for (const auto& p : model.extreme_points()) {
        Json row = Json::array();
        for (const auto& v : p) row.push_back(value_to_json(v));
        pts.push_back(std::move(row));
      }
      j["vertices"] = std::move(pts);
      break;
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Trees: {"version":1,"kind":"tree","root":id,
//         "nodes":{id:{"children":[ids],"model":{...}}}}
// Terminal nodes may omit "children" or give []; they carry no model.
// ---------------------------------------------------------------------------

template <class T>
ImpreciseProbabilityTree<T> parse_tree_document(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "tree")
    fail(Err::Parse, "document kind must be \"tree\"");
  if (!j.contains("root") || !j.contains("nodes"))
    fail(Err::Parse, "tree document needs \"root\" and \"nodes\"");
  EventTree::Spec spec;
  spec.root = j.at("root").get<std::string>();
  const Json& nodes = j.at("nodes");
  if (!nodes.is_object()) fail(Err::Parse, "\"nodes\" must be an object");
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    const Json& node = it.value();
    if (node.contains("children") && !node.at("children").empty()) {
      std::vector<std::string> kids;
      for (const auto& c : node.at("children")) kids.push_back(c.get<std::string>());
      spec.edges.emplace_back(it.key(), std::move(kids));
    }
  }
  EventTree tree = EventTree::build(spec);

  std::vector<std::optional<LocalModel<T>>> locals(tree.node_count());
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    const Json& node = nodes.at(tree.label(s));
    if (tree.is_terminal(s)) {
      if (node.contains("model"))
        fail(Err::Parse, "terminal '" + tree.label(s) + "' cannot carry a model");
      continue;
    }
    if (!node.contains("model"))
      fail(Err::Parse, "non-terminal '" + tree.label(s) + "' needs a model");
    locals[s] = parse_model<T>(node.at("model"), make_carrier(tree.child_labels(s)));
  }
  return ImpreciseProbabilityTree<T>(std::move(tree), std::move(locals));
}

template <class T>
Json tree_to_json(const ImpreciseProbabilityTree<T>& ipt) {
  const EventTree& tree = ipt.tree();
  Json nodes = Json::object();
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    Json node = Json::object();
    if (!tree.is_terminal(s)) {
      node["children"] = tree.child_labels(s);
      node["model"] = model_to_json(ipt.local(s));
    }
    nodes[tree.label(s)] = std::move(node);
  }
  return Json{{"version", 1}, {"kind", "tree"}, {"root", tree.label(tree.root())},
              {"nodes", std::move(nodes)}};
}

// ---------------------------------------------------------------------------
// Gambles: {"kind":"gamble","on":"terminals"|situation-id|"states",
//           "values":{label:number}}
// "terminals" means the whole sample space; a situation id restricts the
// carrier to the paths through it; "states" is for chain documents.
// ---------------------------------------------------------------------------

template <class T>
Gamble<T> parse_gamble_values(const Json& values, CarrierPtr carrier) {
  if (!values.is_object()) fail(Err::Parse, "\"values\" must be an object");
  std::vector<T> v(carrier->size(), T(0));
  std::vector<bool> seen(carrier->size(), false);
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (!carrier->has(it.key()))
      fail(Err::Parse, "gamble value for unknown label '" + it.key() + "'");
    std::size_t i = carrier->index_of(it.key());
    seen[i] = true;
    v[i] = parse_value<T>(it.value());
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) fail(Err::Parse, "gamble misses a value for '" + carrier->label(i) + "'");
  return Gamble<T>(std::move(carrier), std::move(v));
}

template <class T>
Gamble<T> parse_terminal_gamble(const Json& j, const EventTree& tree) {
  if (!j.is_object() || j.value("kind", "") != "gamble")
    fail(Err::Parse, "document kind must be \"gamble\"");
  std::string on = j.value("on", "terminals");
  EventTree::Node base = on == "terminals" ? tree.root() : tree.index_of(on);
  return parse_gamble_values<T>(j.at("values"), terminal_carrier(tree, base));
}

template <class T>
Gamble<T> parse_state_gamble(const Json& j, const ImpreciseMarkovChain<T>& chain) {
  if (!j.is_object() || j.value("kind", "") != "gamble")
    fail(Err::Parse, "document kind must be \"gamble\"");
  return parse_gamble_values<T>(j.at("values"), chain.states());
}

template <class T>
Json gamble_to_json(const Gamble<T>& g, const std::string& on = "terminals") {
  Json values = Json::object();
  for (std::size_t i = 0; i < g.size(); ++i)
    values[g.carrier()->label(i)] = value_to_json(g[i]);
  return Json{{"kind", "gamble"}, {"on", on}, {"values", std::move(values)}};
}

// ---------------------------------------------------------------------------
// Chains: {"version":1,"kind":"chain","states":[...],
//          "initial":{model},"transitions":{state:{model}}}
// ---------------------------------------------------------------------------

template <class T>
ImpreciseMarkovChain<T> parse_chain_document(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "chain")
    fail(Err::Parse, "document kind must be \"chain\"");
  if (!j.contains("states") || !j.at("states").is_array())
    fail(Err::Parse, "chain document needs a \"states\" array");
  std::vector<std::string> labels;
  for (const auto& s : j.at("states")) labels.push_back(s.get<std::string>());
  CarrierPtr states = make_carrier(std::move(labels));
  auto initial = parse_model<T>(j.at("initial"), states);
  std::vector<LocalModel<T>> per_state;
  const Json& transitions = j.at("transitions");
  for (std::size_t x = 0; x < states->size(); ++x) {
    const std::string& label = states->label(x);
    if (!transitions.contains(label))
      fail(Err::Parse, "no transition model for state '" + label + "'");
    per_state.push_back(parse_model<T>(transitions.at(label), states));
  }
  return ImpreciseMarkovChain<T>(std::move(states), std::move(initial), std::move(per_state));
}

template <class T>
Json chain_to_json(const ImpreciseMarkovChain<T>& chain) {
  Json transitions = Json::object();
  for (std::size_t x = 0; x < chain.state_count(); ++x)
    transitions[chain.states()->label(x)] = model_to_json(chain.transition_from(x));
  return Json{{"version", 1},
              {"kind", "chain"},
              {"states", chain.states()->labels()},
              {"initial", model_to_json(chain.initial())},
              {"transitions", std::move(transitions)}};
}

// ---------------------------------------------------------------------------
// Plans: {"version":1,"kind":"plan","base":id,"horizon":[ids],"B":number?,
//         "commitments":{id:{"h":[...],"m":number}}}
// ---------------------------------------------------------------------------

inline CommitmentPlan parse_plan_document(const Json& j,
                                          const ImpreciseProbabilityTree<double>& ipt) {
  if (!j.is_object() || j.value("kind", "") != "plan")
    fail(Err::Parse, "document kind must be \"plan\"");
  const EventTree& tree = ipt.tree();
  EventTree::Node base = tree.index_of(j.at("base").get<std::string>());
  std::vector<EventTree::Node> members;
  for (const auto& m : j.at("horizon")) members.push_back(tree.index_of(m.get<std::string>()));
  Cut horizon = validate_cut(tree, base, std::move(members));
  std::map<EventTree::Node, Commitment> commitments;
  const Json& cs = j.at("commitments");
  if (!cs.is_object()) fail(Err::Parse, "\"commitments\" must be an object");
  for (auto it = cs.begin(); it != cs.end(); ++it) {
    Commitment c;
    c.h = parse_value_array<double>(it.value().at("h"), "h");
    c.m = parse_value<double>(it.value().at("m"));
    commitments.emplace(tree.index_of(it.key()), std::move(c));
  }
  std::optional<double> bound;
  if (j.contains("B") && !j.at("B").is_null()) bound = parse_value<double>(j.at("B"));
  return make_plan(ipt, base, std::move(horizon), std::move(commitments), bound);
}

inline Json plan_to_json(const EventTree& tree, const CommitmentPlan& plan) {
  Json commitments = Json::object();
  for (const auto& [s, c] : plan.commitments) {
    Json h = Json::array();
    for (double v : c.h) h.push_back(v);
    commitments[tree.label(s)] = Json{{"h", std::move(h)}, {"m", c.m}};
  }
  std::vector<std::string> horizon;
  for (auto u : plan.horizon.members) horizon.push_back(tree.label(u));
  return Json{{"version", 1},          {"kind", "plan"},
              {"base", tree.label(plan.base)}, {"horizon", horizon},
              {"B", plan.bound},       {"commitments", std::move(commitments)}};
}

template <class T>
Json selection_to_json(const EventTree& tree, const Selection<T>& sel) {
  Json choices = Json::object();
  for (const auto& [s, g] : sel.choices) {
    Json row = Json::array();
    for (const auto& v : g) row.push_back(value_to_json(v));
    choices[tree.label(s)] = std::move(row);
  }
  return Json{{"kind", "selection"}, {"base", tree.label(sel.base)},
              {"choices", std::move(choices)}};
}

// ---------------------------------------------------------------------------
// Files and canonical text
// ---------------------------------------------------------------------------

// Canonical form: two-space indent, sorted keys (nlohmann objects sort),
// trailing newline. serialize(parse(x)) == x for canonicalized fixtures.
inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Parse, "cannot open '" + path + "'");
  try {
    Json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::Parse, "'" + path + "': " + e.what());
  }
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::Parse, e.what());
  }
}

}  // namespace iptree
