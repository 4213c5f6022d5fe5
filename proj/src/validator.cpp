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

#include "probpol/validator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "probpol/constructs.hpp"
#include "probpol/geometry.hpp"

namespace probpol {
namespace {

void sortBySource(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return a.span.offset < b.span.offset;
  });
}

std::vector<std::string> stringList(const ConfigMap& config, const std::string& key) {
  std::vector<std::string> out;
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::List) return out;
  for (const auto& v : it->second.list) {
    if (v.kind == ConfigValue::Kind::String) out.push_back(v.str);
  }
  return out;
}

std::optional<double> numberField(const ConfigMap& config, const std::string& key) {
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::Number) return std::nullopt;
  return it->second.num;
}

// Collects atom occurrences with polarity (atom under an even number of NOTs
// is a positive occurrence).
void collectAtoms(const Condition& cond, bool positive,
                  std::vector<std::pair<AtomKey, bool>>& out) {
  switch (cond.kind) {
    case Condition::Kind::Atom:
      out.emplace_back(AtomKey{cond.signal_type, cond.signal_name}, positive);
      break;
    case Condition::Kind::Not:
      collectAtoms(cond.children[0], !positive, out);
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or:
      collectAtoms(cond.children[0], positive, out);
      collectAtoms(cond.children[1], positive, out);
      break;
  }
}

std::set<AtomKey> positiveAtoms(const Condition& cond) {
  std::vector<std::pair<AtomKey, bool>> occurrences;
  collectAtoms(cond, true, occurrences);
  std::set<AtomKey> out;
  for (const auto& [atom, positive] : occurrences) {
    if (positive) out.insert(atom);
  }
  return out;
}

std::set<AtomKey> negatedAtoms(const Condition& cond) {
  std::vector<std::pair<AtomKey, bool>> occurrences;
  collectAtoms(cond, true, occurrences);
  std::set<AtomKey> out;
  for (const auto& [atom, positive] : occurrences) {
    if (!positive) out.insert(atom);
  }
  return out;
}

bool sharedSoftmaxGroup(const Program& program, const std::string& signal_a,
                        const std::string& signal_b) {
  for (const auto& group : program.groups) {
    if (group.semantics != "softmax_exclusive") continue;
    bool has_a = std::find(group.members.begin(), group.members.end(), signal_a) !=
                 group.members.end();
    bool has_b = std::find(group.members.begin(), group.members.end(), signal_b) !=
                 group.members.end();
    if (has_a && has_b) return true;
  }
  return false;
}

void checkConditionRefs(const Condition& cond, const Program& program,
                        std::vector<Diagnostic>& out) {
  if (cond.kind == Condition::Kind::Atom) {
    const SignalDecl* signal = program.findSignal(cond.signal_name);
    if (!signal) {
      out.push_back(makeDiag(Severity::Error, "PP101", cond.span,
                             "unresolved signal '" + cond.signal_name + "'"));
    } else if (signalTypeName(signal->type) != cond.signal_type) {
      out.push_back(makeDiag(Severity::Error, "PP101", cond.span,
                             "signal '" + cond.signal_name + "' is declared as " +
                                 signalTypeName(signal->type) + ", referenced as " +
                                 cond.signal_type));
    }
    return;
  }
  for (const auto& child : cond.children) checkConditionRefs(child, program, out);
}

void checkExprRefs(const AlgebraExpr& expr, const Program& program,
                   std::vector<Diagnostic>& out) {
  switch (expr.kind) {
    case AlgebraExpr::Kind::Leaf:
      checkConditionRefs(expr.condition, program, out);
      break;
    case AlgebraExpr::Kind::Ref:
      if (!program.findPolicy(expr.ref_name)) {
        out.push_back(makeDiag(Severity::Error, "PP101", expr.span,
                               "unresolved policy '" + expr.ref_name + "'"));
      }
      break;
    default:
      for (const auto& child : expr.children) checkExprRefs(child, program, out);
  }
}

// Names routable from TEST blocks: declared routes plus routes synthesized
// from DECISION_TREE and POLICY blocks.
std::set<std::string> routableNames(const Program& program) {
  std::set<std::string> names;
  for (const auto& r : program.routes) names.insert(r.name);
  for (const auto& tree : program.trees) {
    for (std::size_t i = 0; i < tree.branches.size(); ++i) {
      names.insert(treeBranchRouteName(tree.name, i));
    }
    names.insert(treeElseRouteName(tree.name));
  }
  for (const auto& policy : program.policies) {
    // Leaf count bounded by a walk over the expression.
    std::size_t leaves = 0;
    std::vector<const AlgebraExpr*> stack{&policy.expr};
    while (!stack.empty()) {
      const AlgebraExpr* e = stack.back();
      stack.pop_back();
      if (e->kind == AlgebraExpr::Kind::Leaf) {
        names.insert(policyLeafRouteName(policy.name, leaves++));
      } else if (e->kind != AlgebraExpr::Kind::Ref) {
        for (const auto& child : e->children) stack.push_back(&child);
      }
    }
  }
  return names;
}

}  // namespace

std::vector<Diagnostic> checkReferences(const Program& program) {
  std::vector<Diagnostic> out;

  auto checkDuplicates = [&out](const auto& decls, const char* what) {
    std::set<std::string> seen;
    for (const auto& d : decls) {
      if (!seen.insert(d.name).second) {
        out.push_back(makeDiag(Severity::Error, "PP104", d.span,
                               std::string("duplicate ") + what + " name '" + d.name + "'"));
      }
    }
  };
  checkDuplicates(program.signals, "signal");
  checkDuplicates(program.routes, "route");
  checkDuplicates(program.groups, "group");
  checkDuplicates(program.tests, "test");
  checkDuplicates(program.trees, "decision tree");
  checkDuplicates(program.policies, "policy");

  for (const auto& signal : program.signals) {
    if (signal.type == SignalType::Embedding) {
      if (stringList(signal.config, "candidates").empty()) {
        out.push_back(makeDiag(Severity::Error, "PP103", signal.span,
                               "embedding signal '" + signal.name +
                                   "' requires a non-empty 'candidates' list"));
      }
      auto threshold = numberField(signal.config, "threshold");
      if (!threshold || *threshold <= 0.0 || *threshold >= 1.0) {
        out.push_back(makeDiag(Severity::Error, "PP103", signal.span,
                               "embedding signal '" + signal.name +
                                   "' requires 'threshold' in (0,1)"));
      }
    }
    if (signal.type == SignalType::Domain &&
        stringList(signal.config, "mmlu_categories").empty()) {
      out.push_back(makeDiag(Severity::Error, "PP103", signal.span,
                             "domain signal '" + signal.name +
                                 "' requires a non-empty 'mmlu_categories' list"));
    }
  }

  for (const auto& route : program.routes) {
    checkConditionRefs(route.condition, program, out);
  }
  for (const auto& tree : program.trees) {
    for (const auto& branch : tree.branches) checkConditionRefs(branch.condition, program, out);
  }
  for (const auto& policy : program.policies) checkExprRefs(policy.expr, program, out);

  sortBySource(out);
  return out;
}

std::vector<Diagnostic> checkCategoryOverlap(const Program& program) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::string> owner;  // category -> first-declared signal
  for (const auto& signal : program.signals) {
    if (signal.type != SignalType::Domain) continue;
    std::set<std::string> seen_here;
    for (const auto& category : stringList(signal.config, "mmlu_categories")) {
      if (!seen_here.insert(category).second) {
        out.push_back(makeDiag(Severity::Info, "PP202", signal.span,
                               "signal '" + signal.name + "' lists category '" + category +
                                   "' more than once"));
        continue;
      }
      auto it = owner.find(category);
      if (it == owner.end()) {
        owner.emplace(category, signal.name);
      } else if (it->second != signal.name) {
        out.push_back(makeDiag(Severity::Warning, "PP201", signal.span,
                               "category '" + category + "' appears in both '" + it->second +
                                   "' and '" + signal.name + "'"));
      }
    }
  }
  sortBySource(out);
  return out;
}

std::vector<Diagnostic> checkGuards(const Program& program) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < program.routes.size(); ++i) {
    for (std::size_t j = 0; j < program.routes.size(); ++j) {
      if (i == j) continue;
      const RouteDecl& hi = program.routes[i];
      const RouteDecl& lo = program.routes[j];
      if (hi.priority <= lo.priority) continue;

      auto hi_pos = positiveAtoms(hi.condition);
      auto lo_pos = positiveAtoms(lo.condition);
      auto lo_neg = negatedAtoms(lo.condition);

      bool unguarded = false;
      for (const auto& a : hi_pos) {
        for (const auto& b : lo_pos) {
          if (a.type != b.type || a.name == b.name) continue;
          if (lo_neg.count(a)) continue;  // guard already present
          if (sharedSoftmaxGroup(program, a.name, b.name)) continue;
          unguarded = true;
        }
      }
      if (!unguarded) continue;

      std::string guard_text;
      for (const auto& a : hi_pos) {
        if (lo_neg.count(a)) continue;
        guard_text += " AND NOT " + a.type + "(\"" + a.name + "\")";
      }
      Diagnostic d = makeDiag(Severity::Warning, "PP301", lo.span,
                              "route '" + lo.name + "' overlaps higher-priority route '" +
                                  hi.name + "' on signal type without a NOT guard");
      Fix fix;
      fix.span = lo.condition.span;
      fix.span.offset += lo.condition.span.length;
      fix.span.length = 0;
      fix.span.column += static_cast<int>(lo.condition.span.length);
      fix.replacement = guard_text;
      d.fix = fix;
      out.push_back(std::move(d));
    }
  }
  sortBySource(out);
  return out;
}

std::vector<Diagnostic> checkGroups(const Program& program) {
  std::vector<Diagnostic> out;
  const int dim = program.embeddingDim();
  const double warn_cosine = program.warnCosine();

  for (const auto& group : program.groups) {
    for (const auto& member : group.members) {
      if (!program.findSignal(member)) {
        out.push_back(makeDiag(Severity::Error, "PP401", group.span,
                               "group '" + group.name + "' names undeclared signal '" +
                                   member + "'"));
      }
    }

    std::map<std::string, std::string> category_owner;
    for (const auto& member : group.members) {
      const SignalDecl* signal = program.findSignal(member);
      if (!signal || signal->type != SignalType::Domain) continue;
      for (const auto& category : stringList(signal->config, "mmlu_categories")) {
        auto it = category_owner.find(category);
        if (it == category_owner.end()) {
          category_owner.emplace(category, member);
        } else if (it->second != member) {
          out.push_back(makeDiag(Severity::Error, "PP402", group.span,
                                 "group '" + group.name + "' members '" + it->second +
                                     "' and '" + member + "' share category '" + category +
                                     "'"));
        }
      }
    }

    if (group.default_member.empty()) {
      out.push_back(makeDiag(Severity::Error, "PP403", group.span,
                             "group '" + group.name + "' is missing a 'default' signal"));
    } else if (!program.findSignal(group.default_member)) {
      out.push_back(makeDiag(Severity::Error, "PP403", group.span,
                             "group '" + group.name + "' default '" + group.default_member +
                                 "' is not a declared signal"));
    }

    if (group.temperature <= 0.0) {
      out.push_back(makeDiag(Severity::Error, "PP404", group.span,
                             "group '" + group.name + "' temperature must be positive"));
    }

    const double k = static_cast<double>(group.members.size());
    if (k >= 1.0 && group.threshold <= 1.0 / k) {
      std::ostringstream msg;
      msg << "group '" << group.name << "' threshold " << group.threshold
          << " does not exceed 1/k = " << (1.0 / k) << "; at-most-one firing is not guaranteed";
      out.push_back(makeDiag(Severity::Warning, "PP405", group.span, msg.str()));
    }

    // Centroid separation among members with embedding-backed prototypes.
    std::vector<Vec> centroids;
    std::vector<std::string> centroid_names;
    for (const auto& member : group.members) {
      const SignalDecl* signal = program.findSignal(member);
      if (!signal) continue;
      std::vector<std::string> candidates = stringList(signal->config, "candidates");
      if (candidates.empty()) candidates = stringList(signal->config, "mmlu_categories");
      if (candidates.empty()) candidates = stringList(signal->config, "categories");
      if (candidates.empty()) continue;
      if (auto c = centroid(candidates, dim)) {
        centroids.push_back(std::move(*c));
        centroid_names.push_back(member);
      }
    }
    for (const auto& pair : centroidSeparationReport(centroids, warn_cosine)) {
      std::ostringstream msg;
      msg << "group '" << group.name << "' members '" << centroid_names[pair.i] << "' and '"
          << centroid_names[pair.j] << "' have nearly parallel centroids (cosine "
          << pair.cosine << ")";
      out.push_back(makeDiag(Severity::Warning, "PP406", group.span, msg.str()));
    }
  }
  sortBySource(out);
  return out;
}

std::vector<Diagnostic> checkTests(const Program& program) {
  std::vector<Diagnostic> out;
  std::set<std::string> routable = routableNames(program);
  for (const auto& test : program.tests) {
    for (const auto& c : test.cases) {
      if (!routable.count(c.expected_route)) {
        out.push_back(makeDiag(Severity::Error, "PP501", c.span,
                               "test '" + test.name + "' expects unknown route '" +
                                   c.expected_route + "'"));
      }
      if (c.query.empty()) {
        out.push_back(makeDiag(Severity::Error, "PP502", c.span,
                               "test '" + test.name + "' has an empty query"));
      }
    }
  }
  sortBySource(out);
  return out;
}

std::vector<Diagnostic> checkTiers(const Program& program) {
  std::vector<Diagnostic> out;
  if (program.routes.empty()) return out;
  std::size_t tiered = 0;
  for (const auto& route : program.routes) {
    if (route.tier) ++tiered;
  }
  if (tiered == 0) return out;
  if (tiered < program.routes.size()) {
    for (const auto& route : program.routes) {
      if (!route.tier) {
        out.push_back(makeDiag(Severity::Error, "PP601", route.span,
                               "route '" + route.name +
                                   "' has no TIER while other routes are tiered"));
      }
    }
    sortBySource(out);
    return out;
  }
  std::map<int, std::vector<std::string>> by_tier;
  for (const auto& route : program.routes) by_tier[*route.tier].push_back(route.name);
  std::ostringstream msg;
  msg << "tier structure:";
  for (const auto& [tier, names] : by_tier) {
    msg << " tier " << tier << " (";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) msg << ", ";
      msg << names[i];
    }
    msg << ")";
  }
  out.push_back(makeDiag(Severity::Info, "PP602", program.routes.front().span, msg.str()));
  return out;
}

std::vector<Diagnostic> validate(const Program& program) {
  std::vector<Diagnostic> out = checkReferences(program);
  bool unresolved = std::any_of(out.begin(), out.end(),
                                [](const Diagnostic& d) { return d.code == "PP101"; });

  auto append = [&out](std::vector<Diagnostic> diags) {
    for (auto& d : diags) out.push_back(std::move(d));
  };

  append(checkCategoryOverlap(program));
  if (unresolved) {
    Span span = program.routes.empty() ? Span{} : program.routes.front().span;
    out.push_back(makeDiag(Severity::Info, "PP102", span,
                           "guard and group checks skipped: unresolved signal references"));
  } else {
    append(checkGuards(program));
    append(checkGroups(program));
  }
  append(checkTests(program));
  append(checkTiers(program));
  return out;
}

}  // namespace probpol
