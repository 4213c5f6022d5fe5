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

#ifndef PROBPOL_VALIDATOR_HPP_
#define PROBPOL_VALIDATOR_HPP_

#include <vector>

#include "probpol/ast.hpp"
#include "probpol/diagnostics.hpp"

namespace probpol {

// Runs all passes in order: reference resolution, category overlap, guard
// warnings, group checks, test checks, tier checks. When references are
// unresolvable the dependent passes are skipped with an info PP102.
std::vector<Diagnostic> validate(const Program& program);

// Individual passes, exposed for targeted testing.
std::vector<Diagnostic> checkReferences(const Program& program);
std::vector<Diagnostic> checkCategoryOverlap(const Program& program);
std::vector<Diagnostic> checkGuards(const Program& program);
std::vector<Diagnostic> checkGroups(const Program& program);
std::vector<Diagnostic> checkTests(const Program& program);
std::vector<Diagnostic> checkTiers(const Program& program);

}  // namespace probpol

#endif  // PROBPOL_VALIDATOR_HPP_
