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

#ifndef PROBPOL_EMIT_HPP_
#define PROBPOL_EMIT_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probpol/ast.hpp"
#include "probpol/diagnostics.hpp"

namespace probpol {

using Json = nlohmann::ordered_json;

struct CompileResult {
  Json doc;
  std::vector<Diagnostic> diagnostics;
  bool ok = false;
};

// Program -> flat config document (schema/config.v1.json). Refused when
// validation reports errors; warnings pass through.
CompileResult compileConfig(const Program& program);

struct DecompileResult {
  Program program;
  bool ok = false;
  std::string error;
  std::string pointer;  // JSON pointer to the offending element
};

// Config document -> Program; schema violations carry a JSON pointer.
DecompileResult decompileConfig(const Json& doc);

// Canonical serialization: fixed key order, 2-space indent, trailing newline.
std::string canonicalDump(const Json& doc);

Json conditionToJson(const Condition& cond);
Json configMapToJson(const ConfigMap& config);

}  // namespace probpol

#endif  // PROBPOL_EMIT_HPP_
