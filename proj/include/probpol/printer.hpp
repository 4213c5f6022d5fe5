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

#ifndef PROBPOL_PRINTER_HPP_
#define PROBPOL_PRINTER_HPP_

#include <string>

#include "probpol/ast.hpp"

namespace probpol {

// Pretty-prints a Program back to canonical DSL source: blocks in declaration
// order, 2-space indent, one field per line. print(parse(x)) reparses to an
// AST equivalent to parse(x).
std::string print(const Program& program);

std::string printCondition(const Condition& cond);
std::string printConfigValue(const ConfigValue& value);

}  // namespace probpol

#endif  // PROBPOL_PRINTER_HPP_
