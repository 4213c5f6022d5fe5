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

#ifndef PROBPOL_CONSTRUCTS_HPP_
#define PROBPOL_CONSTRUCTS_HPP_

#include <string>
#include <variant>
#include <vector>

#include "probpol/ast.hpp"
#include "probpol/boolean.hpp"
#include "probpol/diagnostics.hpp"

namespace probpol {

// Synthesized route names for compiled constructs (index is 0-based).
std::string treeBranchRouteName(const std::string& tree_name, std::size_t index);
std::string treeElseRouteName(const std::string& tree_name);
std::string policyLeafRouteName(const std::string& policy_name, std::size_t index);

// DECISION_TREE exhaustiveness and reachability: PP701 missing ELSE, PP702
// unreachable branch (under group exclusivity constraints).
std::vector<Diagnostic> checkTree(const DecisionTreeDecl& tree, const AtomUniverse& universe);

// Branch i compiles to condition cond_i AND NOT cond_0 ... AND NOT cond_{i-1}
// at priority (branch count - i) * 10; ELSE is the all-negated catch-all at
// priority 0. Resulting routes are pairwise disjoint by construction.
std::vector<RouteDecl> compileTree(const DecisionTreeDecl& tree);

struct DisjointnessCertificate {
  enum class Method { SatUnsat, CapsDisjoint, GroupExclusive };
  Method method = Method::SatUnsat;
  std::string details;
};

const char* certificateMethodName(DisjointnessCertificate::Method m);

// Certificate or a PP801 diagnostic when disjointness cannot be certified
// (ungrouped classifier atoms, intersecting caps, satisfiable conjunction).
using CertifyResult = std::variant<DisjointnessCertificate, Diagnostic>;

CertifyResult certifyDisjoint(const AlgebraExpr& x, const AlgebraExpr& y,
                              const Program& program);

struct AlgebraCompileResult {
  std::vector<RouteDecl> routes;
  std::vector<DisjointnessCertificate> certificates;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !hasErrors(diagnostics); }
};

// Compiles a POLICY declaration (resolving references to earlier policies)
// into routes. Sequential puts every left-operand route strictly above every
// right-operand route; every ExclusiveUnion must certify.
AlgebraCompileResult compileAlgebra(const PolicyDecl& policy, const Program& program);

}  // namespace probpol

#endif  // PROBPOL_CONSTRUCTS_HPP_
