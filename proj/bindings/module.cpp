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
//
// Python bindings. The module works on DSL source strings and plain Python
// containers (dicts/lists) rather than exposing the AST wholesale; JSON
// configs cross the boundary as strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "probpol/conflict.hpp"
#include "probpol/emit.hpp"
#include "probpol/engine.hpp"
#include "probpol/parser.hpp"
#include "probpol/printer.hpp"
#include "probpol/validator.hpp"

namespace py = pybind11;
using namespace probpol;

namespace {

Program parseOrThrow(const std::string& source) {
  ParseResult r = parse(source);
  if (!r.ok()) {
    std::string msg = "parse failed";
    if (!r.diagnostics.empty()) msg = formatDiagnostic(r.diagnostics[0]);
    throw std::invalid_argument(msg);
  }
  return r.program;
}

py::dict diagnosticToDict(const Diagnostic& d) {
  py::dict out;
  out["severity"] = severityName(d.severity);
  out["code"] = d.code;
  out["line"] = d.span.line;
  out["column"] = d.span.column;
  out["message"] = d.message;
  out["has_fix"] = bool(d.fix);
  return out;
}

py::list checkSource(const std::string& source) {
  ParseResult parsed = parse(source);
  std::vector<Diagnostic> diags = parsed.diagnostics;
  if (parsed.ok()) {
    auto more = validate(parsed.program);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  py::list out;
  for (const auto& d : diags) out.append(diagnosticToDict(d));
  return out;
}

std::string fixSource(const std::string& source) {
  ParseResult parsed = parse(source);
  if (!parsed.ok()) return source;
  return applyFixes(source, validate(parsed.program));
}

std::string compileToJson(const std::string& source) {
  CompileResult r = compileConfig(parseOrThrow(source));
  if (!r.ok) {
    std::string msg = "compile refused";
    if (!r.diagnostics.empty()) msg = formatDiagnostic(r.diagnostics[0]);
    throw std::invalid_argument(msg);
  }
  return canonicalDump(r.doc);
}

std::string decompileFromJson(const std::string& config_json) {
  Json doc = Json::parse(config_json, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("not valid JSON");
  DecompileResult r = decompileConfig(doc);
  if (!r.ok) throw std::invalid_argument(r.error + " (at " + r.pointer + ")");
  return print(r.program);
}

std::string formatSource(const std::string& source) { return print(parseOrThrow(source)); }

py::list analyzeConflicts(const std::string& source,
                          const std::optional<std::vector<std::string>>& corpus) {
  Program program = parseOrThrow(source);
  ConflictAnalysis analysis =
      analyzeAll(program, corpus ? &*corpus : nullptr, SoftShadowConfig{});
  py::list out;
  for (const auto& r : analysis.reports) {
    py::dict item;
    item["kind"] = conflictKindName(r.kind);
    item["tier"] = tierName(r.tier);
    item["route"] = r.hi_route;
    item["shadowed_route"] = r.lo_route;
    if (!r.note.empty()) item["note"] = r.note;
    out.append(item);
  }
  return out;
}

class PyEngine {
 public:
  explicit PyEngine(const std::string& source) : engine_(parseOrThrow(source)) {}

  void setAttributes(const std::map<std::string, double>& attrs) {
    engine_.setAttributes(attrs);
  }

  py::dict route(const std::string& query) {
    RoutingDecision d = engine_.route(query);
    py::dict out;
    out["chosen"] = d.chosen ? py::cast(*d.chosen) : py::none();
    py::list trace;
    for (const auto& t : d.trace) {
      py::dict entry;
      entry["route"] = t.route;
      entry["confidence"] = t.condition_value;
      entry["holds"] = t.condition_holds;
      entry["reason"] = t.reason;
      trace.append(entry);
    }
    out["trace"] = trace;
    return out;
  }

  py::dict scores(const std::string& query, const std::string& mode) {
    SignalScores s = engine_.scoreSignals(query, simMode(mode));
    py::dict out;
    out["raw"] = s.raw;
    out["normalized"] = s.normalized;
    out["fired"] = s.fired;
    return out;
  }

  py::list runTests() {
    py::list out;
    for (const auto& t : engine_.runTests()) {
      py::dict item;
      item["query"] = t.query;
      item["expected"] = t.expected_route;
      item["actual"] = t.actual_route ? py::cast(*t.actual_route) : py::none();
      item["passed"] = t.passed;
      out.append(item);
    }
    return out;
  }

  py::dict simulate(const std::vector<std::string>& trace, const std::string& mode) {
    SimulationSummary s = engine_.simulate(trace, simMode(mode));
    py::dict out;
    out["query_count"] = s.query_count;
    out["route_histogram"] = s.route_histogram;
    py::dict co_fire;
    for (const auto& [pair, rate] : s.signal_co_fire_rate) {
      co_fire[py::make_tuple(pair.first, pair.second)] = rate;
    }
    out["signal_co_fire_rate"] = co_fire;
    return out;
  }

 private:
  static SimMode simMode(const std::string& mode) {
    if (mode == "independent") return SimMode::Independent;
    if (mode == "voronoi") return SimMode::Voronoi;
    throw std::invalid_argument("mode must be 'independent' or 'voronoi'");
  }

  Engine engine_;
};

}  // namespace

PYBIND11_MODULE(_probpol, m) {
  m.doc() = "policy routing compiler and analyzer";

  m.def("check", &checkSource, py::arg("source"),
        "Parse and validate DSL source; returns a list of diagnostic dicts.");
  m.def("fix", &fixSource, py::arg("source"),
        "Apply all suggested fixes and return the rewritten source.");
  m.def("compile", &compileToJson, py::arg("source"),
        "Compile DSL source to the canonical JSON config string.");
  m.def("decompile", &decompileFromJson, py::arg("config_json"),
        "Reconstruct DSL source from a JSON config string.");
  m.def("format", &formatSource, py::arg("source"),
        "Parse and pretty-print DSL source.");
  m.def("conflicts", &analyzeConflicts, py::arg("source"),
        py::arg("corpus") = std::nullopt,
        "Run all conflict analyses; corpus enables the statistical pass.");

  py::class_<PyEngine>(m, "Engine")
      .def(py::init<const std::string&>(), py::arg("source"))
      .def("set_attributes", &PyEngine::setAttributes, py::arg("attrs"))
      .def("route", &PyEngine::route, py::arg("query"))
      .def("scores", &PyEngine::scores, py::arg("query"), py::arg("mode") = "voronoi")
      .def("run_tests", &PyEngine::runTests)
      .def("simulate", &PyEngine::simulate, py::arg("trace"), py::arg("mode") = "voronoi");
}
