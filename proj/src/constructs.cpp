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

#include "probpol/constructs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "probpol/geometry.hpp"
#include "probpol/printer.hpp"

namespace probpol {
namespace {

std::vector<std::string> configStringList(const ConfigMap& config, const std::string& key) {
  std::vector<std::string> out;
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::List) return out;
  for (const auto& v : it->second.list) {
    if (v.kind == ConfigValue::Kind::String) out.push_back(v.str);
  }
  return out;
}

void collectPositiveAtoms(const Condition& cond, bool positive,
                          std::vector<const Condition*>& out) {
  switch (cond.kind) {
    case Condition::Kind::Atom:
      if (positive) out.push_back(&cond);
      break;
    case Condition::Kind::Not:
      collectPositiveAtoms(cond.children[0], !positive, out);
      break;
    default:
      for (const auto& child : cond.children) collectPositiveAtoms(child, positive, out);
  }
}

SignalKind atomKind(const Condition& atom) {
  auto type = signalTypeFromName(atom.signal_type);
  return type ? kindOf(*type) : SignalKind::Crisp;
}

bool conditionHasKind(const Condition& cond, SignalKind kind) {
  if (cond.kind == Condition::Kind::Atom) return atomKind(cond) == kind;
  for (const auto& child : cond.children) {
    if (conditionHasKind(child, kind)) return true;
  }
  return false;
}

bool inOneSoftmaxGroup(const Program& program, const std::string& a, const std::string& b) {
  for (const auto& group : program.groups) {
    if (group.semantics != "softmax_exclusive") continue;
    bool has_a = std::find(group.members.begin(), group.members.end(), a) != group.members.end();
    bool has_b = std::find(group.members.begin(), group.members.end(), b) != group.members.end();
    if (has_a && has_b) return true;
  }
  return false;
}

std::optional<SphericalCap> capOf(const Program& program, const Condition& atom) {
  const SignalDecl* signal = program.findSignal(atom.signal_name);
  if (!signal || signal->type != SignalType::Embedding) return std::nullopt;
  auto candidates = configStringList(signal->config, "candidates");
  auto c = centroid(candidates, program.embeddingDim());
  if (!c) return std::nullopt;
  double threshold = 0.5;
  if (auto it = signal->config.find("threshold");
      it != signal->config.end() && it->second.kind == ConfigValue::Kind::Number) {
    threshold = it->second.num;
  }
  return SphericalCap{std::move(*c), threshold};
}

void flattenLeaves(const AlgebraExpr& expr, std::vector<const AlgebraExpr*>& out) {
  if (expr.kind == AlgebraExpr::Kind::Leaf) {
    out.push_back(&expr);
    return;
  }
  for (const auto& child : expr.children) flattenLeaves(child, out);
}

// Replaces policy references with the referenced expression.
bool resolveRefs(const AlgebraExpr& expr, const Program& program,
                 std::set<std::string>& visiting, AlgebraExpr& out, Diagnostic& error) {
  switch (expr.kind) {
    case AlgebraExpr::Kind::Leaf:
      out = expr;
      return true;
    case AlgebraExpr::Kind::Ref: {
      const PolicyDecl* target = program.findPolicy(expr.ref_name);
      if (!target) {
        error = makeDiag(Severity::Error, "PP101", expr.span,
                         "unresolved policy '" + expr.ref_name + "'");
        return false;
      }
      if (!visiting.insert(expr.ref_name).second) {
        error = makeDiag(Severity::Error, "PP001", expr.span,
                         "cyclic policy reference through '" + expr.ref_name + "'");
        return false;
      }
      bool ok = resolveRefs(target->expr, program, visiting, out, error);
      visiting.erase(expr.ref_name);
      return ok;
    }
    default: {
      out = AlgebraExpr{};
      out.kind = expr.kind;
      out.span = expr.span;
      for (const auto& child : expr.children) {
        AlgebraExpr resolved;
        if (!resolveRefs(child, program, visiting, resolved, error)) return false;
        out.children.push_back(std::move(resolved));
      }
      return true;
    }
  }
}

}  // namespace

std::string treeBranchRouteName(const std::string& tree_name, std::size_t index) {
  return tree_name + "_branch" + std::to_string(index + 1);
}

std::string treeElseRouteName(const std::string& tree_name) { return tree_name + "_else"; }

std::string policyLeafRouteName(const std::string& policy_name, std::size_t index) {
  return policy_name + "_leaf" + std::to_string(index + 1);
}

const char* certificateMethodName(DisjointnessCertificate::Method m) {
  switch (m) {
    case DisjointnessCertificate::Method::SatUnsat:
      return "sat_unsat";
    case DisjointnessCertificate::Method::CapsDisjoint:
      return "caps_disjoint";
    case DisjointnessCertificate::Method::GroupExclusive:
      return "group_exclusive";
  }
  return "sat_unsat";
}

std::vector<Diagnostic> checkTree(const DecisionTreeDecl& tree, const AtomUniverse& universe) {
  std::vector<Diagnostic> out;
  if (!tree.else_action) {
    out.push_back(makeDiag(Severity::Error, "PP701", tree.span,
                           "decision tree '" + tree.name + "' is missing an ELSE branch"));
  }
  for (std::size_t i = 0; i < tree.branches.size(); ++i) {
    Condition reach = tree.branches[i].condition;
    for (std::size_t j = 0; j < i; ++j) {
      reach = Condition::conj(std::move(reach),
                              Condition::negate(tree.branches[j].condition));
    }
    auto sat = satisfiable(reach, universe);
    if (!sat) {
      out.push_back(makeDiag(Severity::Warning, "PP901", tree.span,
                             "decision tree '" + tree.name +
                                 "' reachability analysis incomplete: too many atoms"));
      break;
    }
    if (!*sat) {
      out.push_back(makeDiag(Severity::Error, "PP702", tree.branches[i].span,
                             "decision tree '" + tree.name + "' branch " +
                                 std::to_string(i + 1) + " is unreachable"));
    }
  }
  return out;
}

std::vector<RouteDecl> compileTree(const DecisionTreeDecl& tree) {
  std::vector<RouteDecl> routes;
  const int count = static_cast<int>(tree.branches.size());
  for (std::size_t i = 0; i < tree.branches.size(); ++i) {
    RouteDecl route;
    route.name = treeBranchRouteName(tree.name, i);
    route.priority = (count - static_cast<int>(i)) * 10;
    route.condition = tree.branches[i].condition;
    for (std::size_t j = 0; j < i; ++j) {
      route.condition = Condition::conj(std::move(route.condition),
                                        Condition::negate(tree.branches[j].condition));
    }
    route.action = tree.branches[i].action;
    route.span = tree.branches[i].span;
    routes.push_back(std::move(route));
  }
  if (tree.else_action) {
    RouteDecl route;
    route.name = treeElseRouteName(tree.name);
    route.priority = 0;
    Condition cond = Condition::negate(tree.branches[0].condition);
    for (std::size_t j = 1; j < tree.branches.size(); ++j) {
      cond = Condition::conj(std::move(cond),
                             Condition::negate(tree.branches[j].condition));
    }
    route.condition = std::move(cond);
    route.action = *tree.else_action;
    route.span = tree.span;
    routes.push_back(std::move(route));
  }
  return routes;
}

CertifyResult certifyDisjoint(const AlgebraExpr& x, const AlgebraExpr& y,
                              const Program& program) {
  std::vector<const AlgebraExpr*> x_leaves, y_leaves;
  flattenLeaves(x, x_leaves);
  flattenLeaves(y, y_leaves);

  auto best = DisjointnessCertificate::Method::SatUnsat;
  std::ostringstream details;

  for (const AlgebraExpr* lx : x_leaves) {
    for (const AlgebraExpr* ly : y_leaves) {
      const Condition& cx = lx->condition;
      const Condition& cy = ly->condition;
      Condition both = Condition::conj(cx, cy);

      // Structural route: UNSAT with all atoms free is sound regardless of
      // atom kind.
      AtomUniverse free_universe;
      free_universe.collect(both);
      auto sat = satisfiable(both, free_universe);
      if (sat && !*sat) {
        details << "pair (" << printCondition(cx) << " | " << printCondition(cy)
                << "): unsat; ";
        continue;
      }

      bool has_classifier =
          conditionHasKind(cx, SignalKind::Classifier) ||
          conditionHasKind(cy, SignalKind::Classifier);

      if (!has_classifier && conditionHasKind(cx, SignalKind::Geometric) &&
          conditionHasKind(cy, SignalKind::Geometric)) {
        std::vector<const Condition*> ax, ay;
        collectPositiveAtoms(cx, true, ax);
        collectPositiveAtoms(cy, true, ay);
        bool all_disjoint = true;
        bool any_pair = false;
        for (const Condition* a : ax) {
          for (const Condition* b : ay) {
            if (atomKind(*a) != SignalKind::Geometric ||
                atomKind(*b) != SignalKind::Geometric) {
              continue;
            }
            auto cap_a = capOf(program, *a);
            auto cap_b = capOf(program, *b);
            if (!cap_a || !cap_b) {
              all_disjoint = false;
              continue;
            }
            any_pair = true;
            if (capsIntersect(*cap_a, *cap_b).intersect) all_disjoint = false;
          }
        }
        if (any_pair && all_disjoint) {
          best = std::max(best, DisjointnessCertificate::Method::CapsDisjoint);
          details << "pair (" << printCondition(cx) << " | " << printCondition(cy)
                  << "): caps disjoint; ";
          continue;
        }
      }

      // Grouped route: a shared softmax_exclusive group over a cross pair of
      // positive atoms makes the conjunction unsatisfiable under the
      // at-most-one constraint.
      std::vector<const Condition*> ax, ay;
      collectPositiveAtoms(cx, true, ax);
      collectPositiveAtoms(cy, true, ay);
      bool grouped = false;
      for (const Condition* a : ax) {
        for (const Condition* b : ay) {
          if (a->signal_name != b->signal_name &&
              inOneSoftmaxGroup(program, a->signal_name, b->signal_name)) {
            grouped = true;
          }
        }
      }
      if (grouped) {
        best = std::max(best, DisjointnessCertificate::Method::GroupExclusive);
        details << "pair (" << printCondition(cx) << " | " << printCondition(cy)
                << "): group exclusive; ";
        continue;
      }

      return makeDiag(Severity::Error, "PP801", lx->span,
                      "cannot certify disjointness of '" + printCondition(cx) + "' and '" +
                          printCondition(cy) + "'");
    }
  }

  DisjointnessCertificate cert;
  cert.method = best;
  cert.details = details.str();
  return cert;
}

namespace {

bool certifyUnions(const AlgebraExpr& expr, const Program& program,
                   std::vector<DisjointnessCertificate>& certs,
                   std::vector<Diagnostic>& diags) {
  bool ok = true;
  if (expr.kind == AlgebraExpr::Kind::ExclusiveUnion) {
    CertifyResult result = certifyDisjoint(expr.children[0], expr.children[1], program);
    if (auto* cert = std::get_if<DisjointnessCertificate>(&result)) {
      certs.push_back(std::move(*cert));
    } else {
      diags.push_back(std::get<Diagnostic>(std::move(result)));
      ok = false;
    }
  }
  for (const auto& child : expr.children) {
    ok = certifyUnions(child, program, certs, diags) && ok;
  }
  return ok;
}

}  // namespace

AlgebraCompileResult compileAlgebra(const PolicyDecl& policy, const Program& program) {
  AlgebraCompileResult result;

  AlgebraExpr resolved;
  std::set<std::string> visiting{policy.name};
  Diagnostic error;
  if (!resolveRefs(policy.expr, program, visiting, resolved, error)) {
    result.diagnostics.push_back(std::move(error));
    return result;
  }

  if (!certifyUnions(resolved, program, result.certificates, result.diagnostics)) {
    return result;
  }

  std::vector<const AlgebraExpr*> leaves;
  flattenLeaves(resolved, leaves);
  const int count = static_cast<int>(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    RouteDecl route;
    route.name = policyLeafRouteName(policy.name, i);
    route.priority = (count - static_cast<int>(i)) * 10;
    route.condition = leaves[i]->condition;
    route.action = leaves[i]->action;
    route.span = leaves[i]->span;
    result.routes.push_back(std::move(route));
  }
  return result;
}

}  // namespace probpol
