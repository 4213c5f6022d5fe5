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

#include "probpol/ast.hpp"

#include <algorithm>
#include <cmath>

namespace probpol {

bool ConfigValue::operator==(const ConfigValue& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::String:
      return str == other.str;
    case Kind::Number:
      return num == other.num;
    case Kind::List:
      return list == other.list;
    case Kind::Map:
      return map == other.map;
  }
  return false;
}

SignalKind kindOf(SignalType type) {
  switch (type) {
    case SignalType::Keyword:
    case SignalType::Authz:
    case SignalType::Context:
      return SignalKind::Crisp;
    case SignalType::Embedding:
      return SignalKind::Geometric;
    case SignalType::Domain:
    case SignalType::Complexity:
    case SignalType::Jailbreak:
    case SignalType::Pii:
      return SignalKind::Classifier;
  }
  return SignalKind::Crisp;
}

const char* signalTypeName(SignalType type) {
  switch (type) {
    case SignalType::Keyword:
      return "keyword";
    case SignalType::Embedding:
      return "embedding";
    case SignalType::Domain:
      return "domain";
    case SignalType::Complexity:
      return "complexity";
    case SignalType::Jailbreak:
      return "jailbreak";
    case SignalType::Pii:
      return "pii";
    case SignalType::Authz:
      return "authz";
    case SignalType::Context:
      return "context";
  }
  return "keyword";
}

std::optional<SignalType> signalTypeFromName(const std::string& name) {
  static const std::pair<const char*, SignalType> kTypes[] = {
      {"keyword", SignalType::Keyword},     {"embedding", SignalType::Embedding},
      {"domain", SignalType::Domain},       {"complexity", SignalType::Complexity},
      {"jailbreak", SignalType::Jailbreak}, {"pii", SignalType::Pii},
      {"authz", SignalType::Authz},         {"context", SignalType::Context},
  };
  for (const auto& [n, t] : kTypes) {
    if (name == n) return t;
  }
  return std::nullopt;
}

Condition Condition::atom(std::string type, std::string name, Span span) {
  Condition c;
  c.kind = Kind::Atom;
  c.signal_type = std::move(type);
  c.signal_name = std::move(name);
  c.span = std::move(span);
  return c;
}

Condition Condition::negate(Condition operand) {
  Condition c;
  c.kind = Kind::Not;
  c.span = operand.span;
  c.children.push_back(std::move(operand));
  return c;
}

Condition Condition::conj(Condition lhs, Condition rhs) {
  Condition c;
  c.kind = Kind::And;
  c.span = lhs.span;
  c.children.push_back(std::move(lhs));
  c.children.push_back(std::move(rhs));
  return c;
}

Condition Condition::disj(Condition lhs, Condition rhs) {
  Condition c;
  c.kind = Kind::Or;
  c.span = lhs.span;
  c.children.push_back(std::move(lhs));
  c.children.push_back(std::move(rhs));
  return c;
}

AlgebraExpr AlgebraExpr::leaf(Condition cond, Action act) {
  AlgebraExpr e;
  e.kind = Kind::Leaf;
  e.condition = std::move(cond);
  e.action = std::move(act);
  return e;
}

AlgebraExpr AlgebraExpr::ref(std::string name) {
  AlgebraExpr e;
  e.kind = Kind::Ref;
  e.ref_name = std::move(name);
  return e;
}

AlgebraExpr AlgebraExpr::exclusiveUnion(AlgebraExpr lhs, AlgebraExpr rhs) {
  AlgebraExpr e;
  e.kind = Kind::ExclusiveUnion;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

AlgebraExpr AlgebraExpr::sequential(AlgebraExpr lhs, AlgebraExpr rhs) {
  AlgebraExpr e;
  e.kind = Kind::Sequential;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

const SignalDecl* Program::findSignal(const std::string& name) const {
  for (const auto& s : signals) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const RouteDecl* Program::findRoute(const std::string& name) const {
  for (const auto& r : routes) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const SignalGroupDecl* Program::findGroup(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const PolicyDecl* Program::findPolicy(const std::string& name) const {
  for (const auto& p : policies) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

int Program::embeddingDim() const {
  auto it = global.find("embedding_dim");
  if (it != global.end() && it->second.kind == ConfigValue::Kind::Number) {
    int dim = static_cast<int>(std::lround(it->second.num));
    if (dim >= 2) return dim;
  }
  return 64;
}

double Program::warnCosine() const {
  auto it = global.find("warn_cosine");
  if (it != global.end() && it->second.kind == ConfigValue::Kind::Number) {
    return it->second.num;
  }
  return 0.95;
}

bool equivalent(const Condition& a, const Condition& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Condition::Kind::Atom) {
    return a.signal_type == b.signal_type && a.signal_name == b.signal_name;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!equivalent(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool equivalent(const Action& a, const Action& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Action::Kind::Model:
      return a.model == b.model;
    case Action::Kind::Plugin:
      return a.plugin_name == b.plugin_name && a.plugin_config == b.plugin_config;
    case Action::Kind::Block:
      return true;
  }
  return false;
}

bool equivalent(const AlgebraExpr& a, const AlgebraExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case AlgebraExpr::Kind::Leaf:
      return equivalent(a.condition, b.condition) && equivalent(a.action, b.action);
    case AlgebraExpr::Kind::Ref:
      return a.ref_name == b.ref_name;
    case AlgebraExpr::Kind::ExclusiveUnion:
    case AlgebraExpr::Kind::Sequential:
      if (a.children.size() != b.children.size()) return false;
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!equivalent(a.children[i], b.children[i])) return false;
      }
      return true;
  }
  return false;
}

namespace {

bool sameSignal(const SignalDecl& a, const SignalDecl& b) {
  return a.name == b.name && a.type == b.type && a.config == b.config;
}

bool sameRoute(const RouteDecl& a, const RouteDecl& b) {
  return a.name == b.name && a.priority == b.priority && a.tier == b.tier &&
         equivalent(a.condition, b.condition) && equivalent(a.action, b.action);
}

bool sameGroup(const SignalGroupDecl& a, const SignalGroupDecl& b) {
  return a.name == b.name && a.semantics == b.semantics && a.temperature == b.temperature &&
         a.threshold == b.threshold && a.members == b.members &&
         a.default_member == b.default_member;
}

bool sameTest(const TestDecl& a, const TestDecl& b) {
  if (a.name != b.name || a.cases.size() != b.cases.size()) return false;
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    if (a.cases[i].query != b.cases[i].query ||
        a.cases[i].expected_route != b.cases[i].expected_route) {
      return false;
    }
  }
  return true;
}

bool sameTree(const DecisionTreeDecl& a, const DecisionTreeDecl& b) {
  if (a.name != b.name || a.branches.size() != b.branches.size()) return false;
  if (a.else_action.has_value() != b.else_action.has_value()) return false;
  if (a.else_action && !equivalent(*a.else_action, *b.else_action)) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    if (!equivalent(a.branches[i].condition, b.branches[i].condition) ||
        !equivalent(a.branches[i].action, b.branches[i].action)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool equivalent(const Program& a, const Program& b) {
  if (a.signals.size() != b.signals.size() || a.routes.size() != b.routes.size() ||
      a.groups.size() != b.groups.size() || a.tests.size() != b.tests.size() ||
      a.trees.size() != b.trees.size() || a.policies.size() != b.policies.size() ||
      a.named_configs.size() != b.named_configs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.signals.size(); ++i) {
    if (!sameSignal(a.signals[i], b.signals[i])) return false;
  }
  for (std::size_t i = 0; i < a.routes.size(); ++i) {
    if (!sameRoute(a.routes[i], b.routes[i])) return false;
  }
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    if (!sameGroup(a.groups[i], b.groups[i])) return false;
  }
  for (std::size_t i = 0; i < a.tests.size(); ++i) {
    if (!sameTest(a.tests[i], b.tests[i])) return false;
  }
  for (std::size_t i = 0; i < a.trees.size(); ++i) {
    if (!sameTree(a.trees[i], b.trees[i])) return false;
  }
  for (std::size_t i = 0; i < a.policies.size(); ++i) {
    if (a.policies[i].name != b.policies[i].name ||
        !equivalent(a.policies[i].expr, b.policies[i].expr)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.named_configs.size(); ++i) {
    if (a.named_configs[i].keyword != b.named_configs[i].keyword ||
        a.named_configs[i].name != b.named_configs[i].name ||
        !(a.named_configs[i].config == b.named_configs[i].config)) {
      return false;
    }
  }
  return a.global == b.global;
}

}  // namespace probpol
