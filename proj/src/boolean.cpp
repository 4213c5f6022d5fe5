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

#include "probpol/boolean.hpp"

#include <bit>

namespace probpol {

int AtomUniverse::intern(const AtomKey& atom) {
  int idx = indexOf(atom);
  if (idx >= 0) return idx;
  if (size() >= kMaxAtoms) {
    overflowed_ = true;
    return -1;
  }
  atoms_.push_back(atom);
  return size() - 1;
}

int AtomUniverse::indexOf(const AtomKey& atom) const {
  for (int i = 0; i < size(); ++i) {
    if (atoms_[i] == atom) return i;
  }
  return -1;
}

void AtomUniverse::addExclusivity(std::vector<int> indices) {
  if (indices.size() < 2) return;
  exclusivity_.push_back(std::move(indices));
}

void AtomUniverse::collect(const Condition& cond) {
  if (cond.kind == Condition::Kind::Atom) {
    intern({cond.signal_type, cond.signal_name});
    return;
  }
  for (const auto& child : cond.children) collect(child);
}

namespace {

void collectExpr(const AlgebraExpr& expr, AtomUniverse& universe) {
  if (expr.kind == AlgebraExpr::Kind::Leaf) {
    universe.collect(expr.condition);
    return;
  }
  for (const auto& child : expr.children) collectExpr(child, universe);
}

}  // namespace

AtomUniverse AtomUniverse::fromProgram(const Program& program) {
  AtomUniverse universe;
  for (const auto& route : program.routes) universe.collect(route.condition);
  for (const auto& tree : program.trees) {
    for (const auto& branch : tree.branches) universe.collect(branch.condition);
  }
  for (const auto& policy : program.policies) collectExpr(policy.expr, universe);

  for (const auto& group : program.groups) {
    if (group.semantics != "softmax_exclusive") continue;
    std::vector<int> members;
    for (const auto& member : group.members) {
      const SignalDecl* signal = program.findSignal(member);
      if (!signal) continue;
      int idx = universe.indexOf({signalTypeName(signal->type), member});
      if (idx >= 0) members.push_back(idx);
    }
    universe.addExclusivity(std::move(members));
  }
  return universe;
}

bool AtomUniverse::assignmentFeasible(std::uint32_t bits) const {
  for (const auto& set : exclusivity_) {
    int on = 0;
    for (int idx : set) {
      if (bits & (1u << idx)) ++on;
    }
    if (on > 1) return false;
  }
  return true;
}

bool evalCondition(const Condition& cond, const AtomUniverse& universe, std::uint32_t bits) {
  switch (cond.kind) {
    case Condition::Kind::Atom: {
      int idx = universe.indexOf({cond.signal_type, cond.signal_name});
      return idx >= 0 && (bits & (1u << idx));
    }
    case Condition::Kind::Not:
      return !evalCondition(cond.children[0], universe, bits);
    case Condition::Kind::And:
      return evalCondition(cond.children[0], universe, bits) &&
             evalCondition(cond.children[1], universe, bits);
    case Condition::Kind::Or:
      return evalCondition(cond.children[0], universe, bits) ||
             evalCondition(cond.children[1], universe, bits);
  }
  return false;
}

std::optional<bool> satisfiable(const Condition& cond, const AtomUniverse& universe) {
  if (universe.overflowed() || universe.size() > AtomUniverse::kMaxAtoms) {
    return std::nullopt;
  }
  const std::uint64_t total = 1ull << universe.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    auto b = static_cast<std::uint32_t>(bits);
    if (!universe.assignmentFeasible(b)) continue;
    if (evalCondition(cond, universe, b)) return true;
  }
  return false;
}

std::optional<bool> implies(const Condition& lo, const Condition& hi,
                            const AtomUniverse& universe) {
  Condition counterexample = Condition::conj(lo, Condition::negate(hi));
  auto sat = satisfiable(counterexample, universe);
  if (!sat) return std::nullopt;
  return !*sat;
}

std::optional<bool> equivalentCond(const Condition& x, const Condition& y,
                                   const AtomUniverse& universe) {
  auto fwd = implies(x, y, universe);
  if (!fwd) return std::nullopt;
  if (!*fwd) return false;
  return implies(y, x, universe);
}

}  // namespace probpol
