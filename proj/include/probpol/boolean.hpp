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

#ifndef PROBPOL_BOOLEAN_HPP_
#define PROBPOL_BOOLEAN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probpol/ast.hpp"

namespace probpol {

// Propositional engine over crisp/grouped atoms. Decision procedure is
// exhaustive enumeration over 2^n assignments, bounded at kMaxAtoms.

struct AtomKey {
  std::string type;
  std::string name;

  bool operator==(const AtomKey& other) const {
    return type == other.type && name == other.name;
  }
  bool operator<(const AtomKey& other) const {
    return std::tie(type, name) < std::tie(other.type, other.name);
  }
};

class AtomUniverse {
 public:
  static constexpr int kMaxAtoms = 24;

  // Registers the atom if unseen; returns its index, or -1 past the bound.
  int intern(const AtomKey& atom);
  int indexOf(const AtomKey& atom) const;  // -1 if absent

  // Adds an at-most-one-true constraint over the given atom indices.
  // Sets with fewer than two members are ignored.
  void addExclusivity(std::vector<int> indices);

  // Collects every atom of `cond` into the universe.
  void collect(const Condition& cond);

  // Builds a universe from all route/tree/policy conditions of a program,
  // with exclusivity sets contributed by softmax_exclusive groups.
  static AtomUniverse fromProgram(const Program& program);

  int size() const { return static_cast<int>(atoms_.size()); }
  bool overflowed() const { return overflowed_; }
  const std::vector<AtomKey>& atoms() const { return atoms_; }
  const std::vector<std::vector<int>>& exclusivity() const { return exclusivity_; }

  bool assignmentFeasible(std::uint32_t bits) const;

 private:
  std::vector<AtomKey> atoms_;
  std::vector<std::vector<int>> exclusivity_;
  bool overflowed_ = false;
};

// All three return nullopt when the universe overflowed (analysis must be
// reported as incomplete, never as a silent pass).
std::optional<bool> satisfiable(const Condition& cond, const AtomUniverse& universe);
std::optional<bool> implies(const Condition& lo, const Condition& hi,
                            const AtomUniverse& universe);
std::optional<bool> equivalentCond(const Condition& x, const Condition& y,
                                   const AtomUniverse& universe);

// Evaluates a condition under a bit assignment (index via universe).
bool evalCondition(const Condition& cond, const AtomUniverse& universe, std::uint32_t bits);

}  // namespace probpol

#endif  // PROBPOL_BOOLEAN_HPP_
