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

#ifndef PROBPOL_AST_HPP_
#define PROBPOL_AST_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "probpol/span.hpp"

namespace probpol {

// ---------------------------------------------------------------------------
// Config values: the untyped key/value payload inside SIGNAL, PLUGIN, BACKEND
// and GLOBAL blocks. Bare identifiers lex as strings.
// ---------------------------------------------------------------------------

struct ConfigValue {
  enum class Kind { String, Number, List, Map };
  Kind kind = Kind::String;
  std::string str;
  double num = 0.0;
  std::vector<ConfigValue> list;
  std::map<std::string, ConfigValue> map;

  static ConfigValue ofString(std::string s) {
    ConfigValue v;
    v.kind = Kind::String;
    v.str = std::move(s);
    return v;
  }
  static ConfigValue ofNumber(double n) {
    ConfigValue v;
    v.kind = Kind::Number;
    v.num = n;
    return v;
  }
  static ConfigValue ofList(std::vector<ConfigValue> items) {
    ConfigValue v;
    v.kind = Kind::List;
    v.list = std::move(items);
    return v;
  }
  static ConfigValue ofMap(std::map<std::string, ConfigValue> m) {
    ConfigValue v;
    v.kind = Kind::Map;
    v.map = std::move(m);
    return v;
  }

  bool operator==(const ConfigValue& other) const;
};

using ConfigMap = std::map<std::string, ConfigValue>;

// ---------------------------------------------------------------------------
// Signals
// ---------------------------------------------------------------------------

enum class SignalType {
  Keyword,
  Embedding,
  Domain,
  Complexity,
  Jailbreak,
  Pii,
  Authz,
  Context,
};

// Analysis kind per signal type: crisp predicates, embedding-similarity
// predicates, or opaque soft classifiers.
enum class SignalKind { Crisp, Geometric, Classifier };

SignalKind kindOf(SignalType type);
const char* signalTypeName(SignalType type);
std::optional<SignalType> signalTypeFromName(const std::string& name);

struct SignalDecl {
  std::string name;
  SignalType type = SignalType::Keyword;
  ConfigMap config;
  Span span;
};

// ---------------------------------------------------------------------------
// Conditions: Boolean expression trees over signal-reference atoms.
// ---------------------------------------------------------------------------

struct Condition {
  enum class Kind { Atom, Not, And, Or };
  Kind kind = Kind::Atom;
  // Atom payload: the signal type keyword and the quoted signal name.
  std::string signal_type;
  std::string signal_name;
  // Not has one child, And/Or have two.
  std::vector<Condition> children;
  Span span;

  static Condition atom(std::string type, std::string name, Span span = {});
  static Condition negate(Condition operand);
  static Condition conj(Condition lhs, Condition rhs);
  static Condition disj(Condition lhs, Condition rhs);
};

// ---------------------------------------------------------------------------
// Routes
// ---------------------------------------------------------------------------

struct Action {
  enum class Kind { Model, Plugin, Block };
  Kind kind = Kind::Model;
  std::string model;        // Model
  std::string plugin_name;  // Plugin
  ConfigMap plugin_config;  // Plugin

  static Action modelAction(std::string name) {
    Action a;
    a.kind = Kind::Model;
    a.model = std::move(name);
    return a;
  }
  static Action pluginAction(std::string name, ConfigMap config = {}) {
    Action a;
    a.kind = Kind::Plugin;
    a.plugin_name = std::move(name);
    a.plugin_config = std::move(config);
    return a;
  }
  static Action blockAction() {
    Action a;
    a.kind = Kind::Block;
    return a;
  }
};

struct RouteDecl {
  std::string name;
  int priority = 0;
  std::optional<int> tier;
  Condition condition;
  Action action;
  Span span;
};

// ---------------------------------------------------------------------------
// SIGNAL_GROUP
// ---------------------------------------------------------------------------

struct SignalGroupDecl {
  std::string name;
  // Only softmax_exclusive semantics exist today; kept as a string for
  // round-trip fidelity.
  std::string semantics = "softmax_exclusive";
  double temperature = 0.1;
  double threshold = 0.5;  // group firing threshold, theta
  std::vector<std::string> members;
  std::string default_member;
  Span span;
};

// ---------------------------------------------------------------------------
// TEST
// ---------------------------------------------------------------------------

struct TestCase {
  std::string query;
  std::string expected_route;
  Span span;
};

struct TestDecl {
  std::string name;
  std::vector<TestCase> cases;
  Span span;
};

// ---------------------------------------------------------------------------
// DECISION_TREE
// ---------------------------------------------------------------------------

struct TreeBranch {
  Condition condition;
  Action action;
  Span span;
};

struct DecisionTreeDecl {
  std::string name;
  std::vector<TreeBranch> branches;
  std::optional<Action> else_action;
  Span span;
};

// ---------------------------------------------------------------------------
// POLICY algebra
// ---------------------------------------------------------------------------

struct AlgebraExpr {
  enum class Kind { Leaf, ExclusiveUnion, Sequential, Ref };
  Kind kind = Kind::Leaf;
  // Leaf payload.
  Condition condition;
  Action action;
  // Ref payload: name of a previously declared POLICY.
  std::string ref_name;
  // Union/Sequential operands (exactly two).
  std::vector<AlgebraExpr> children;
  Span span;

  static AlgebraExpr leaf(Condition cond, Action act);
  static AlgebraExpr ref(std::string name);
  static AlgebraExpr exclusiveUnion(AlgebraExpr lhs, AlgebraExpr rhs);
  static AlgebraExpr sequential(AlgebraExpr lhs, AlgebraExpr rhs);
};

struct PolicyDecl {
  std::string name;
  AlgebraExpr expr;
  Span span;
};

// ---------------------------------------------------------------------------
// Opaque named blocks (PLUGIN / BACKEND declarations at top level)
// ---------------------------------------------------------------------------

struct NamedConfigDecl {
  std::string keyword;  // "PLUGIN" or "BACKEND"
  std::string name;
  ConfigMap config;
  Span span;
};

// ---------------------------------------------------------------------------
// Program
// ---------------------------------------------------------------------------

struct Program {
  std::vector<SignalDecl> signals;
  std::vector<RouteDecl> routes;
  std::vector<SignalGroupDecl> groups;
  std::vector<TestDecl> tests;
  std::vector<DecisionTreeDecl> trees;
  std::vector<PolicyDecl> policies;
  std::vector<NamedConfigDecl> named_configs;
  ConfigMap global;

  const SignalDecl* findSignal(const std::string& name) const;
  const RouteDecl* findRoute(const std::string& name) const;
  const SignalGroupDecl* findGroup(const std::string& name) const;
  const PolicyDecl* findPolicy(const std::string& name) const;

  // Embedding dimension: GLOBAL embedding_dim, else 64.
  int embeddingDim() const;
  // Centroid-separation warning threshold: GLOBAL warn_cosine, else 0.95.
  double warnCosine() const;

  bool empty() const {
    return signals.empty() && routes.empty() && groups.empty() && tests.empty() &&
           trees.empty() && policies.empty() && named_configs.empty() && global.empty();
  }
};

// Structural AST equality ignoring spans; config maps compare as maps.
bool equivalent(const Program& a, const Program& b);
bool equivalent(const Condition& a, const Condition& b);
bool equivalent(const Action& a, const Action& b);
bool equivalent(const AlgebraExpr& a, const AlgebraExpr& b);

}  // namespace probpol

#endif  // PROBPOL_AST_HPP_
