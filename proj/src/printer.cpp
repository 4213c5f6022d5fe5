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

#include "probpol/printer.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace probpol {
namespace {

bool isBareIdent(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string numberText(double n) {
  if (n == std::floor(n) && std::abs(n) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(n);
    return os.str();
  }
  std::ostringstream os;
  os.precision(12);
  os << n;
  return os.str();
}

// Precedence: NOT > AND > OR. Left-associative; a right-hand child at equal
// precedence keeps its parentheses so the tree shape survives reparsing.
int precedenceOf(Condition::Kind kind) {
  switch (kind) {
    case Condition::Kind::Or:
      return 1;
    case Condition::Kind::And:
      return 2;
    case Condition::Kind::Not:
      return 3;
    case Condition::Kind::Atom:
      return 4;
  }
  return 4;
}

void printCond(const Condition& c, int parent_prec, bool right_operand, std::string& out) {
  int prec = precedenceOf(c.kind);
  bool parens = prec < parent_prec || (prec == parent_prec && right_operand &&
                                       c.kind != Condition::Kind::Not &&
                                       c.kind != Condition::Kind::Atom);
  if (parens) out.push_back('(');
  switch (c.kind) {
    case Condition::Kind::Atom:
      out += c.signal_type;
      out.push_back('(');
      out += quote(c.signal_name);
      out.push_back(')');
      break;
    case Condition::Kind::Not:
      out += "NOT ";
      printCond(c.children[0], prec, false, out);
      break;
    case Condition::Kind::And:
      printCond(c.children[0], prec, false, out);
      out += " AND ";
      printCond(c.children[1], prec, true, out);
      break;
    case Condition::Kind::Or:
      printCond(c.children[0], prec, false, out);
      out += " OR ";
      printCond(c.children[1], prec, true, out);
      break;
  }
  if (parens) out.push_back(')');
}

void printValue(const ConfigValue& v, int indent, std::string& out);

void printMapBody(const ConfigMap& map, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [key, value] : map) {
    out += pad;
    out += key;
    out += ": ";
    printValue(value, indent, out);
    out.push_back('\n');
  }
}

void printValue(const ConfigValue& v, int indent, std::string& out) {
  switch (v.kind) {
    case ConfigValue::Kind::String:
      out += isBareIdent(v.str) ? v.str : quote(v.str);
      break;
    case ConfigValue::Kind::Number:
      out += numberText(v.num);
      break;
    case ConfigValue::Kind::List: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : v.list) {
        if (!first) out += ", ";
        first = false;
        printValue(item, indent, out);
      }
      out.push_back(']');
      break;
    }
    case ConfigValue::Kind::Map: {
      out += "{\n";
      printMapBody(v.map, indent + 2, out);
      out += std::string(static_cast<std::size_t>(indent), ' ');
      out.push_back('}');
      break;
    }
  }
}

void printAction(const Action& a, int indent, std::string& out) {
  switch (a.kind) {
    case Action::Kind::Model:
      out += "MODEL ";
      out += quote(a.model);
      break;
    case Action::Kind::Plugin:
      out += "PLUGIN ";
      out += a.plugin_name;
      if (!a.plugin_config.empty()) {
        out += " {\n";
        printMapBody(a.plugin_config, indent + 2, out);
        out += std::string(static_cast<std::size_t>(indent), ' ');
        out.push_back('}');
      }
      break;
    case Action::Kind::Block:
      out += "BLOCK";
      break;
  }
}

void printLeafAction(const Action& a, std::string& out) {
  switch (a.kind) {
    case Action::Kind::Model:
      out += quote(a.model);
      break;
    case Action::Kind::Plugin:
      out += "PLUGIN ";
      out += a.plugin_name;
      if (!a.plugin_config.empty()) {
        out += " {\n";
        printMapBody(a.plugin_config, 4, out);
        out += "  }";
      }
      break;
    case Action::Kind::Block:
      out += "BLOCK";
      break;
  }
}

void printAlgebra(const AlgebraExpr& e, int parent_prec, std::string& out) {
  // Sequential binds looser (prec 1) than ExclusiveUnion (prec 2).
  switch (e.kind) {
    case AlgebraExpr::Kind::Ref:
      out += e.ref_name;
      break;
    case AlgebraExpr::Kind::Leaf:
      out += printCondition(e.condition);
      out += " -> ";
      printLeafAction(e.action, out);
      break;
    case AlgebraExpr::Kind::ExclusiveUnion: {
      bool parens = parent_prec > 2;
      if (parens) out.push_back('(');
      printAlgebra(e.children[0], 2, out);
      out += "\n  (+) ";
      printAlgebra(e.children[1], 3, out);
      if (parens) out.push_back(')');
      break;
    }
    case AlgebraExpr::Kind::Sequential: {
      bool parens = parent_prec > 1;
      if (parens) out.push_back('(');
      printAlgebra(e.children[0], 1, out);
      out += "\n  >> ";
      printAlgebra(e.children[1], 2, out);
      if (parens) out.push_back(')');
      break;
    }
  }
}

}  // namespace

std::string printCondition(const Condition& cond) {
  std::string out;
  printCond(cond, 0, false, out);
  return out;
}

std::string printConfigValue(const ConfigValue& value) {
  std::string out;
  printValue(value, 0, out);
  return out;
}

std::string print(const Program& program) {
  std::string out;
  bool first = true;
  auto sep = [&] {
    if (!first) out.push_back('\n');
    first = false;
  };

  if (!program.global.empty()) {
    sep();
    out += "GLOBAL {\n";
    printMapBody(program.global, 2, out);
    out += "}\n";
  }
  for (const auto& s : program.signals) {
    sep();
    out += "SIGNAL ";
    out += signalTypeName(s.type);
    out.push_back(' ');
    out += s.name;
    out += " {\n";
    printMapBody(s.config, 2, out);
    out += "}\n";
  }
  for (const auto& nc : program.named_configs) {
    sep();
    out += nc.keyword;
    out.push_back(' ');
    out += nc.name;
    out += " {\n";
    printMapBody(nc.config, 2, out);
    out += "}\n";
  }
  for (const auto& g : program.groups) {
    sep();
    out += "SIGNAL_GROUP ";
    out += g.name;
    out += " {\n";
    out += "  semantics: " + g.semantics + "\n";
    out += "  temperature: " + numberText(g.temperature) + "\n";
    out += "  threshold: " + numberText(g.threshold) + "\n";
    out += "  members: [";
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      if (i) out += ", ";
      out += isBareIdent(g.members[i]) ? g.members[i] : quote(g.members[i]);
    }
    out += "]\n";
    if (!g.default_member.empty()) {
      out += "  default: " + g.default_member + "\n";
    }
    out += "}\n";
  }
  for (const auto& r : program.routes) {
    sep();
    out += "ROUTE ";
    out += r.name;
    out += " {\n";
    out += "  PRIORITY " + numberText(r.priority) + "\n";
    if (r.tier) out += "  TIER " + numberText(*r.tier) + "\n";
    out += "  WHEN ";
    out += printCondition(r.condition);
    out.push_back('\n');
    out += "  ";
    printAction(r.action, 2, out);
    out.push_back('\n');
    out += "}\n";
  }
  for (const auto& tree : program.trees) {
    sep();
    out += "DECISION_TREE ";
    out += tree.name;
    out += " {\n";
    for (std::size_t i = 0; i < tree.branches.size(); ++i) {
      out += i == 0 ? "  IF " : "  ELSE IF ";
      out += printCondition(tree.branches[i].condition);
      out += " {\n    ";
      printAction(tree.branches[i].action, 4, out);
      out += "\n  }\n";
    }
    if (tree.else_action) {
      out += "  ELSE {\n    ";
      printAction(*tree.else_action, 4, out);
      out += "\n  }\n";
    }
    out += "}\n";
  }
  for (const auto& p : program.policies) {
    sep();
    out += "POLICY ";
    out += p.name;
    out += " {\n  ";
    printAlgebra(p.expr, 0, out);
    out += "\n}\n";
  }
  for (const auto& t : program.tests) {
    sep();
    out += "TEST ";
    out += t.name;
    out += " {\n";
    for (const auto& c : t.cases) {
      out += "  " + quote(c.query) + " -> " + c.expected_route + "\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace probpol
