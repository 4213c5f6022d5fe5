// Copyright 2026 The ProbPol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "probpol/emit.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "probpol/validator.hpp"

namespace probpol {
namespace {

// Thrown during decompilation; carries the JSON pointer of the bad element.
struct SchemaError {
  std::string message;
  std::string pointer;
};

[[noreturn]] void fail(std::string message, std::string pointer) {
  throw SchemaError{std::move(message), std::move(pointer)};
}

Json numberToJson(double value) {
  // Integral config numbers serialize as JSON integers for stable round-trips.
  if (std::floor(value) == value && std::abs(value) < 1e15) {
    return Json(static_cast<std::int64_t>(value));
  }
  return Json(value);
}

Json configValueToJson(const ConfigValue& value) {
  switch (value.kind) {
    case ConfigValue::Kind::String:
      return Json(value.str);
    case ConfigValue::Kind::Number:
      return numberToJson(value.num);
    case ConfigValue::Kind::List: {
      Json arr = Json::array();
      for (const auto& item : value.list) arr.push_back(configValueToJson(item));
      return arr;
    }
    case ConfigValue::Kind::Map: {
      Json obj = Json::object();
      for (const auto& [key, v] : value.map) obj[key] = configValueToJson(v);
      return obj;
    }
  }
  return Json();
}

Json actionToJson(const Action& action) {
  Json obj = Json::object();
  switch (action.kind) {
    case Action::Kind::Model:
      obj["model"] = action.model;
      break;
    case Action::Kind::Block:
      obj["block"] = true;
      break;
    case Action::Kind::Plugin: {
      Json plugin = Json::object();
      plugin["name"] = action.plugin_name;
      plugin["config"] = configMapToJson(action.plugin_config);
      obj["plugin"] = std::move(plugin);
      break;
    }
  }
  return obj;
}

Json algebraToJson(const AlgebraExpr& expr) {
  Json obj = Json::object();
  switch (expr.kind) {
    case AlgebraExpr::Kind::Leaf: {
      Json leaf = Json::object();
      leaf["when"] = conditionToJson(expr.condition);
      leaf["action"] = actionToJson(expr.action);
      obj["leaf"] = std::move(leaf);
      break;
    }
    case AlgebraExpr::Kind::Ref:
      obj["ref"] = expr.ref_name;
      break;
    case AlgebraExpr::Kind::ExclusiveUnion:
    case AlgebraExpr::Kind::Sequential:
      obj["op"] = expr.kind == AlgebraExpr::Kind::ExclusiveUnion ? "exclusive_union"
                                                                 : "sequential";
      obj["args"] = Json::array({algebraToJson(expr.children[0]),
                                 algebraToJson(expr.children[1])});
      break;
  }
  return obj;
}

// ---------------------------------------------------------------------------
// Decompilation helpers
// ---------------------------------------------------------------------------

const Json& expectObject(const Json& node, const std::string& pointer) {
  if (!node.is_object()) fail("expected an object", pointer);
  return node;
}

const Json& expectArray(const Json& node, const std::string& pointer) {
  if (!node.is_array()) fail("expected an array", pointer);
  return node;
}

std::string expectString(const Json& node, const std::string& pointer) {
  if (!node.is_string()) fail("expected a string", pointer);
  return node.get<std::string>();
}

double expectNumber(const Json& node, const std::string& pointer) {
  if (!node.is_number()) fail("expected a number", pointer);
  return node.get<double>();
}

int expectInt(const Json& node, const std::string& pointer) {
  if (!node.is_number_integer()) fail("expected an integer", pointer);
  return node.get<int>();
}

const Json& requireField(const Json& obj, const std::string& key,
                         const std::string& pointer) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing required field '" + key + "'", pointer + "/" + key);
  return *it;
}

ConfigValue jsonToConfigValue(const Json& node, const std::string& pointer) {
  if (node.is_string()) return ConfigValue::ofString(node.get<std::string>());
  if (node.is_number()) return ConfigValue::ofNumber(node.get<double>());
  if (node.is_array()) {
    std::vector<ConfigValue> items;
    for (std::size_t i = 0; i < node.size(); ++i) {
      items.push_back(jsonToConfigValue(node[i], pointer + "/" + std::to_string(i)));
    }
    return ConfigValue::ofList(std::move(items));
  }
  if (node.is_object()) {
    std::map<std::string, ConfigValue> map;
    for (auto it = node.begin(); it != node.end(); ++it) {
      map.emplace(it.key(), jsonToConfigValue(it.value(), pointer + "/" + it.key()));
    }
    return ConfigValue::ofMap(std::move(map));
  }
  fail("config values must be strings, numbers, arrays, or objects", pointer);
}

ConfigMap jsonToConfigMap(const Json& node, const std::string& pointer) {
  expectObject(node, pointer);
  ConfigMap config;
  for (auto it = node.begin(); it != node.end(); ++it) {
    config.emplace(it.key(), jsonToConfigValue(it.value(), pointer + "/" + it.key()));
  }
  return config;
}

Condition jsonToCondition(const Json& node, const std::string& pointer) {
  expectObject(node, pointer);
  if (node.contains("op")) {
    std::string op = expectString(node["op"], pointer + "/op");
    const Json& args = expectArray(requireField(node, "args", pointer), pointer + "/args");
    if (op == "not") {
      if (args.size() != 1) fail("'not' takes exactly one operand", pointer + "/args");
      return Condition::negate(jsonToCondition(args[0], pointer + "/args/0"));
    }
    if (op == "and" || op == "or") {
      if (args.size() != 2) fail("'" + op + "' takes exactly two operands", pointer + "/args");
      Condition lhs = jsonToCondition(args[0], pointer + "/args/0");
      Condition rhs = jsonToCondition(args[1], pointer + "/args/1");
      return op == "and" ? Condition::conj(std::move(lhs), std::move(rhs))
                         : Condition::disj(std::move(lhs), std::move(rhs));
    }
    fail("unknown condition operator '" + op + "'", pointer + "/op");
  }
  std::string type = expectString(requireField(node, "type", pointer), pointer + "/type");
  if (!signalTypeFromName(type)) fail("unknown signal type '" + type + "'", pointer + "/type");
  std::string name = expectString(requireField(node, "name", pointer), pointer + "/name");
  return Condition::atom(std::move(type), std::move(name));
}

Action jsonToAction(const Json& node, const std::string& pointer) {
  expectObject(node, pointer);
  if (node.contains("model")) {
    return Action::modelAction(expectString(node["model"], pointer + "/model"));
  }
  if (node.contains("block")) {
    if (!node["block"].is_boolean() || !node["block"].get<bool>()) {
      fail("'block' must be true", pointer + "/block");
    }
    return Action::blockAction();
  }
  if (node.contains("plugin")) {
    const Json& plugin = expectObject(node["plugin"], pointer + "/plugin");
    std::string name =
        expectString(requireField(plugin, "name", pointer + "/plugin"), pointer + "/plugin/name");
    ConfigMap config;
    if (plugin.contains("config")) {
      config = jsonToConfigMap(plugin["config"], pointer + "/plugin/config");
    }
    return Action::pluginAction(std::move(name), std::move(config));
  }
  fail("action must contain 'model', 'block', or 'plugin'", pointer);
}

AlgebraExpr jsonToAlgebra(const Json& node, const std::string& pointer) {
  expectObject(node, pointer);
  if (node.contains("leaf")) {
    const Json& leaf = expectObject(node["leaf"], pointer + "/leaf");
    Condition cond = jsonToCondition(requireField(leaf, "when", pointer + "/leaf"),
                                     pointer + "/leaf/when");
    Action action = jsonToAction(requireField(leaf, "action", pointer + "/leaf"),
                                 pointer + "/leaf/action");
    return AlgebraExpr::leaf(std::move(cond), std::move(action));
  }
  if (node.contains("ref")) {
    return AlgebraExpr::ref(expectString(node["ref"], pointer + "/ref"));
  }
  if (node.contains("op")) {
    std::string op = expectString(node["op"], pointer + "/op");
    const Json& args = expectArray(requireField(node, "args", pointer), pointer + "/args");
    if (args.size() != 2) fail("'" + op + "' takes exactly two operands", pointer + "/args");
    AlgebraExpr lhs = jsonToAlgebra(args[0], pointer + "/args/0");
    AlgebraExpr rhs = jsonToAlgebra(args[1], pointer + "/args/1");
    if (op == "exclusive_union") {
      return AlgebraExpr::exclusiveUnion(std::move(lhs), std::move(rhs));
    }
    if (op == "sequential") return AlgebraExpr::sequential(std::move(lhs), std::move(rhs));
    fail("unknown policy operator '" + op + "'", pointer + "/op");
  }
  fail("policy expression must contain 'leaf', 'ref', or 'op'", pointer);
}

}  // namespace

Json conditionToJson(const Condition& cond) {
  Json obj = Json::object();
  switch (cond.kind) {
    case Condition::Kind::Atom:
      obj["type"] = cond.signal_type;
      obj["name"] = cond.signal_name;
      break;
    case Condition::Kind::Not:
      obj["op"] = "not";
      obj["args"] = Json::array({conditionToJson(cond.children[0])});
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or:
      obj["op"] = cond.kind == Condition::Kind::And ? "and" : "or";
      obj["args"] = Json::array(
          {conditionToJson(cond.children[0]), conditionToJson(cond.children[1])});
      break;
  }
  return obj;
}

Json configMapToJson(const ConfigMap& config) {
  Json obj = Json::object();
  for (const auto& [key, value] : config) obj[key] = configValueToJson(value);
  return obj;
}

CompileResult compileConfig(const Program& program) {
  CompileResult result;
  result.diagnostics = validate(program);
  if (hasErrors(result.diagnostics)) return result;

  Json doc = Json::object();
  doc["version"] = 1;
  if (!program.global.empty()) doc["global"] = configMapToJson(program.global);

  Json signals = Json::array();
  for (const auto& signal : program.signals) {
    Json s = Json::object();
    s["name"] = signal.name;
    s["type"] = signalTypeName(signal.type);
    s["config"] = configMapToJson(signal.config);
    signals.push_back(std::move(s));
  }
  doc["signals"] = std::move(signals);

  Json groups = Json::array();
  for (const auto& group : program.groups) {
    Json g = Json::object();
    g["name"] = group.name;
    g["semantics"] = group.semantics;
    g["temperature"] = group.temperature;
    g["threshold"] = group.threshold;
    g["members"] = group.members;
    if (!group.default_member.empty()) g["default"] = group.default_member;
    groups.push_back(std::move(g));
  }
  doc["groups"] = std::move(groups);

  Json routes = Json::array();
  for (const auto& route : program.routes) {
    Json r = Json::object();
    r["name"] = route.name;
    r["priority"] = route.priority;
    if (route.tier) r["tier"] = *route.tier;
    r["when"] = conditionToJson(route.condition);
    r["action"] = actionToJson(route.action);
    routes.push_back(std::move(r));
  }
  doc["routes"] = std::move(routes);

  if (!program.trees.empty()) {
    Json trees = Json::array();
    for (const auto& tree : program.trees) {
      Json t = Json::object();
      t["name"] = tree.name;
      Json branches = Json::array();
      for (const auto& branch : tree.branches) {
        Json b = Json::object();
        b["when"] = conditionToJson(branch.condition);
        b["action"] = actionToJson(branch.action);
        branches.push_back(std::move(b));
      }
      t["branches"] = std::move(branches);
      if (tree.else_action) t["else"] = actionToJson(*tree.else_action);
      trees.push_back(std::move(t));
    }
    doc["trees"] = std::move(trees);
  }

  if (!program.policies.empty()) {
    Json policies = Json::array();
    for (const auto& policy : program.policies) {
      Json p = Json::object();
      p["name"] = policy.name;
      p["expr"] = algebraToJson(policy.expr);
      policies.push_back(std::move(p));
    }
    doc["policies"] = std::move(policies);
  }

  if (!program.tests.empty()) {
    Json tests = Json::array();
    for (const auto& test : program.tests) {
      Json t = Json::object();
      t["name"] = test.name;
      Json cases = Json::array();
      for (const auto& c : test.cases) {
        Json k = Json::object();
        k["query"] = c.query;
        k["expect"] = c.expected_route;
        cases.push_back(std::move(k));
      }
      t["cases"] = std::move(cases);
      tests.push_back(std::move(t));
    }
    doc["tests"] = std::move(tests);
  }

  if (!program.named_configs.empty()) {
    Json named = Json::array();
    for (const auto& decl : program.named_configs) {
      Json n = Json::object();
      n["keyword"] = decl.keyword;
      n["name"] = decl.name;
      n["config"] = configMapToJson(decl.config);
      named.push_back(std::move(n));
    }
    doc["named_configs"] = std::move(named);
  }

  result.doc = std::move(doc);
  result.ok = true;
  return result;
}

DecompileResult decompileConfig(const Json& doc) {
  DecompileResult result;
  try {
    expectObject(doc, "");
    int version = expectInt(requireField(doc, "version", ""), "/version");
    if (version != 1) fail("unsupported config version", "/version");

    Program program;
    if (doc.contains("global")) program.global = jsonToConfigMap(doc["global"], "/global");

    if (doc.contains("signals")) {
      const Json& signals = expectArray(doc["signals"], "/signals");
      for (std::size_t i = 0; i < signals.size(); ++i) {
        std::string p = "/signals/" + std::to_string(i);
        const Json& node = expectObject(signals[i], p);
        SignalDecl signal;
        signal.name = expectString(requireField(node, "name", p), p + "/name");
        std::string type = expectString(requireField(node, "type", p), p + "/type");
        auto parsed = signalTypeFromName(type);
        if (!parsed) fail("unknown signal type '" + type + "'", p + "/type");
        signal.type = *parsed;
        if (node.contains("config")) {
          signal.config = jsonToConfigMap(node["config"], p + "/config");
        }
        program.signals.push_back(std::move(signal));
      }
    }

    if (doc.contains("groups")) {
      const Json& groups = expectArray(doc["groups"], "/groups");
      for (std::size_t i = 0; i < groups.size(); ++i) {
        std::string p = "/groups/" + std::to_string(i);
        const Json& node = expectObject(groups[i], p);
        SignalGroupDecl group;
        group.name = expectString(requireField(node, "name", p), p + "/name");
        group.semantics =
            expectString(requireField(node, "semantics", p), p + "/semantics");
        if (node.contains("temperature")) {
          group.temperature = expectNumber(node["temperature"], p + "/temperature");
        }
        if (node.contains("threshold")) {
          group.threshold = expectNumber(node["threshold"], p + "/threshold");
        }
        const Json& members = expectArray(requireField(node, "members", p), p + "/members");
        for (std::size_t j = 0; j < members.size(); ++j) {
          group.members.push_back(
              expectString(members[j], p + "/members/" + std::to_string(j)));
        }
        if (node.contains("default")) {
          group.default_member = expectString(node["default"], p + "/default");
        }
        program.groups.push_back(std::move(group));
      }
    }

    if (doc.contains("routes")) {
      const Json& routes = expectArray(doc["routes"], "/routes");
      for (std::size_t i = 0; i < routes.size(); ++i) {
        std::string p = "/routes/" + std::to_string(i);
        const Json& node = expectObject(routes[i], p);
        RouteDecl route;
        route.name = expectString(requireField(node, "name", p), p + "/name");
        route.priority = expectInt(requireField(node, "priority", p), p + "/priority");
        if (node.contains("tier")) route.tier = expectInt(node["tier"], p + "/tier");
        route.condition = jsonToCondition(requireField(node, "when", p), p + "/when");
        route.action = jsonToAction(requireField(node, "action", p), p + "/action");
        program.routes.push_back(std::move(route));
      }
    }

    if (doc.contains("trees")) {
      const Json& trees = expectArray(doc["trees"], "/trees");
      for (std::size_t i = 0; i < trees.size(); ++i) {
        std::string p = "/trees/" + std::to_string(i);
        const Json& node = expectObject(trees[i], p);
        DecisionTreeDecl tree;
        tree.name = expectString(requireField(node, "name", p), p + "/name");
        const Json& branches =
            expectArray(requireField(node, "branches", p), p + "/branches");
        for (std::size_t j = 0; j < branches.size(); ++j) {
          std::string bp = p + "/branches/" + std::to_string(j);
          const Json& bnode = expectObject(branches[j], bp);
          TreeBranch branch;
          branch.condition =
              jsonToCondition(requireField(bnode, "when", bp), bp + "/when");
          branch.action = jsonToAction(requireField(bnode, "action", bp), bp + "/action");
          tree.branches.push_back(std::move(branch));
        }
        if (node.contains("else")) {
          tree.else_action = jsonToAction(node["else"], p + "/else");
        }
        program.trees.push_back(std::move(tree));
      }
    }

    if (doc.contains("policies")) {
      const Json& policies = expectArray(doc["policies"], "/policies");
      for (std::size_t i = 0; i < policies.size(); ++i) {
        std::string p = "/policies/" + std::to_string(i);
        const Json& node = expectObject(policies[i], p);
        PolicyDecl policy;
        policy.name = expectString(requireField(node, "name", p), p + "/name");
        policy.expr = jsonToAlgebra(requireField(node, "expr", p), p + "/expr");
        program.policies.push_back(std::move(policy));
      }
    }

    if (doc.contains("tests")) {
      const Json& tests = expectArray(doc["tests"], "/tests");
      for (std::size_t i = 0; i < tests.size(); ++i) {
        std::string p = "/tests/" + std::to_string(i);
        const Json& node = expectObject(tests[i], p);
        TestDecl test;
        test.name = expectString(requireField(node, "name", p), p + "/name");
        const Json& cases = expectArray(requireField(node, "cases", p), p + "/cases");
        for (std::size_t j = 0; j < cases.size(); ++j) {
          std::string cp = p + "/cases/" + std::to_string(j);
          const Json& cnode = expectObject(cases[j], cp);
          TestCase c;
          c.query = expectString(requireField(cnode, "query", cp), cp + "/query");
          c.expected_route =
              expectString(requireField(cnode, "expect", cp), cp + "/expect");
          test.cases.push_back(std::move(c));
        }
        program.tests.push_back(std::move(test));
      }
    }

    if (doc.contains("named_configs")) {
      const Json& named = expectArray(doc["named_configs"], "/named_configs");
      for (std::size_t i = 0; i < named.size(); ++i) {
        std::string p = "/named_configs/" + std::to_string(i);
        const Json& node = expectObject(named[i], p);
        NamedConfigDecl decl;
        decl.keyword = expectString(requireField(node, "keyword", p), p + "/keyword");
        if (decl.keyword != "PLUGIN" && decl.keyword != "BACKEND") {
          fail("keyword must be PLUGIN or BACKEND", p + "/keyword");
        }
        decl.name = expectString(requireField(node, "name", p), p + "/name");
        if (node.contains("config")) {
          decl.config = jsonToConfigMap(node["config"], p + "/config");
        }
        program.named_configs.push_back(std::move(decl));
      }
    }

    result.program = std::move(program);
    result.ok = true;
  } catch (const SchemaError& e) {
    result.error = e.message;
    result.pointer = e.pointer;
  }
  return result;
}

std::string canonicalDump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace probpol
