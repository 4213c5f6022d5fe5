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

#ifndef PROBPOL_DIAGNOSTICS_HPP_
#define PROBPOL_DIAGNOSTICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "probpol/span.hpp"

namespace probpol {

// Diagnostic code catalog (stable strings; see docs/diagnostics.md):
//   PP001  syntax error
//   PP101  unresolved signal reference
//   PP102  analysis skipped (unresolved references upstream)
//   PP103  malformed signal configuration
//   PP104  duplicate declaration name
//   PP201  category owned by two domain signals
//   PP202  duplicate category entry within one signal
//   PP301  overlapping same-type signals without NOT guard (has fix)
//   PP401  group member not declared
//   PP402  group members share an MMLU category
//   PP403  group default missing or unknown
//   PP404  group temperature not positive
//   PP405  group threshold <= 1/k (exclusivity not guaranteed)
//   PP406  group member centroids nearly parallel
//   PP501  test expects unknown route
//   PP502  empty test query
//   PP601  mixed tiered and untiered routes
//   PP602  tier structure summary (info)
//   PP701  decision tree missing ELSE
//   PP702  unreachable decision tree branch
//   PP801  exclusive union cannot certify disjointness
//   PP901  analysis incomplete (atom universe overflow)

enum class Severity { Error, Warning, Info };

const char* severityName(Severity s);

// A textual edit: replace `span` (possibly zero-length, i.e. an insertion
// point) with `replacement`.
struct Fix {
  Span span;
  std::string replacement;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  Span span;
  std::string message;
  std::optional<Fix> fix;
};

inline Diagnostic makeDiag(Severity sev, std::string code, Span span, std::string message) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.span = std::move(span);
  d.message = std::move(message);
  return d;
}

bool hasErrors(const std::vector<Diagnostic>& diags);

// `file:line:col: severity[code]: message` rendering used by the CLI.
std::string formatDiagnostic(const Diagnostic& d);

// Applies fixes to source text. Edits are applied from highest offset down
// so earlier spans stay valid.
std::string applyFixes(const std::string& source, const std::vector<Diagnostic>& diags);

}  // namespace probpol

#endif  // PROBPOL_DIAGNOSTICS_HPP_
