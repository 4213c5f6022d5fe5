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

#include "probpol/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace probpol {

const char* severityName(Severity s) {
  switch (s) {
    case Severity::Error:
      return "error";
    case Severity::Warning:
      return "warning";
    case Severity::Info:
      return "info";
  }
  return "error";
}

bool hasErrors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string formatDiagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ':' << d.span.line << ':' << d.span.column << ": "
     << severityName(d.severity) << '[' << d.code << "]: " << d.message;
  return os.str();
}

std::string applyFixes(const std::string& source, const std::vector<Diagnostic>& diags) {
  std::vector<const Fix*> fixes;
  for (const auto& d : diags) {
    if (d.fix) fixes.push_back(&*d.fix);
  }
  std::sort(fixes.begin(), fixes.end(),
            [](const Fix* a, const Fix* b) { return a->span.offset > b->span.offset; });
  std::string out = source;
  for (const Fix* f : fixes) {
    if (f->span.offset > out.size()) continue;
    std::size_t len = std::min(f->span.length, out.size() - f->span.offset);
    out.replace(f->span.offset, len, f->replacement);
  }
  return out;
}

}  // namespace probpol
