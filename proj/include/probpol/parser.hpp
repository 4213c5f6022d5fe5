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

#ifndef PROBPOL_PARSER_HPP_
#define PROBPOL_PARSER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "probpol/ast.hpp"
#include "probpol/diagnostics.hpp"

namespace probpol {

struct ParseResult {
  Program program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !hasErrors(diagnostics); }
};

// Parses DSL source text into a Program. On syntax errors the result carries
// one or more PP001 diagnostics and an empty program.
ParseResult parse(std::string_view source, const std::string& file = "<input>");

// Parses a WHEN-clause expression in isolation (used by tests and fixes).
ParseResult parseConditionOnly(std::string_view source, Condition* out);

}  // namespace probpol

#endif  // PROBPOL_PARSER_HPP_
