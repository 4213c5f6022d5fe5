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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probpol/conflict.hpp"
#include "probpol/emit.hpp"
#include "probpol/engine.hpp"
#include "probpol/parser.hpp"
#include "probpol/printer.hpp"
#include "probpol/validator.hpp"

namespace {

using probpol::Diagnostic;
using probpol::Json;
using probpol::Program;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return bool(out);
}

int embeddingDimOverride() {
  const char* env = std::getenv("PROBPOL_DIM");
  if (!env) return 0;
  int dim = std::atoi(env);
  return dim > 0 ? dim : 0;
}

Json diagnosticToJson(const Diagnostic& d) {
  Json obj = Json::object();
  obj["severity"] = probpol::severityName(d.severity);
  obj["code"] = d.code;
  obj["file"] = d.span.file;
  obj["line"] = d.span.line;
  obj["column"] = d.span.column;
  obj["message"] = d.message;
  if (d.fix) {
    Json fix = Json::object();
    fix["line"] = d.fix->span.line;
    fix["column"] = d.fix->span.column;
    fix["length"] = d.fix->span.length;
    fix["replacement"] = d.fix->replacement;
    obj["fix"] = std::move(fix);
  }
  return obj;
}

void emitDiagnostics(const std::vector<Diagnostic>& diags, const std::string& format,
                     Json* json_sink) {
  if (format == "json") {
    for (const auto& d : diags) json_sink->push_back(diagnosticToJson(d));
  } else {
    for (const auto& d : diags) std::cout << probpol::formatDiagnostic(d) << "\n";
  }
}

bool hasWarnings(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == probpol::Severity::Warning) return true;
  }
  return false;
}

// Parses and, when syntactically valid, validates a source file. Returns all
// diagnostics; the program is meaningful only when no errors were reported.
std::vector<Diagnostic> checkSource(const std::string& source, const std::string& path,
                                    Program* out) {
  probpol::ParseResult parsed = probpol::parse(source, path);
  std::vector<Diagnostic> diags = parsed.diagnostics;
  if (parsed.ok()) {
    auto more = probpol::validate(parsed.program);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  if (out) *out = std::move(parsed.program);
  return diags;
}

int cmdCheck(const std::vector<std::string>& files, const std::string& format, bool strict,
             bool fix) {
  int status = kExitOk;
  Json json_out = Json::array();
  for (const auto& path : files) {
    auto source = readFile(path);
    if (!source) {
      std::cerr << "error: cannot read '" << path << "'\n";
      return kExitUsage;
    }
    std::vector<Diagnostic> diags = checkSource(*source, path, nullptr);
    if (fix) {
      std::string fixed = probpol::applyFixes(*source, diags);
      if (fixed != *source) {
        if (!writeFile(path, fixed)) {
          std::cerr << "error: cannot write '" << path << "'\n";
          return kExitUsage;
        }
      }
      diags = checkSource(fixed, path, nullptr);
    }
    emitDiagnostics(diags, format, &json_out);
    if (probpol::hasErrors(diags) || (strict && hasWarnings(diags))) status = kExitFindings;
  }
  if (format == "json") std::cout << probpol::canonicalDump(json_out);
  return status;
}

// Loads a program or exits with a usage/diagnostic status via `status`.
std::optional<Program> loadProgram(const std::string& path, int* status) {
  auto source = readFile(path);
  if (!source) {
    std::cerr << "error: cannot read '" << path << "'\n";
    *status = kExitUsage;
    return std::nullopt;
  }
  Program program;
  std::vector<Diagnostic> diags = checkSource(*source, path, &program);
  if (probpol::hasErrors(diags)) {
    for (const auto& d : diags) std::cerr << probpol::formatDiagnostic(d) << "\n";
    *status = kExitFindings;
    return std::nullopt;
  }
  return program;
}

int cmdCompile(const std::string& path, const std::string& out_path) {
  int status = kExitOk;
  auto program = loadProgram(path, &status);
  if (!program) return status;
  probpol::CompileResult result = probpol::compileConfig(*program);
  for (const auto& d : result.diagnostics) {
    std::cerr << probpol::formatDiagnostic(d) << "\n";
  }
  if (!result.ok) return kExitFindings;
  std::string text = probpol::canonicalDump(result.doc);
  if (out_path.empty()) {
    std::cout << text;
  } else if (!writeFile(out_path, text)) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmdDecompile(const std::string& path, const std::string& out_path) {
  auto source = readFile(path);
  if (!source) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return kExitUsage;
  }
  Json doc = Json::parse(*source, nullptr, false);
  if (doc.is_discarded()) {
    std::cerr << "error: '" << path << "' is not valid JSON\n";
    return kExitFindings;
  }
  probpol::DecompileResult result = probpol::decompileConfig(doc);
  if (!result.ok) {
    std::cerr << "error: " << result.error << " (at " << result.pointer << ")\n";
    return kExitFindings;
  }
  std::string text = probpol::print(result.program);
  if (out_path.empty()) {
    std::cout << text;
  } else if (!writeFile(out_path, text)) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmdTest(const std::vector<std::string>& files) {
  struct Line {
    bool ok;
    std::string text;
  };
  std::vector<Line> lines;
  bool any_tests = false;
  for (const auto& path : files) {
    int status = kExitOk;
    auto program = loadProgram(path, &status);
    if (!program) return status;
    bool file_has_tests = false;
    for (const auto& t : program->tests) {
      if (!t.cases.empty()) file_has_tests = true;
    }
    if (!file_has_tests) continue;
    any_tests = true;
    probpol::Engine engine(*program, embeddingDimOverride());
    for (const auto& outcome : engine.runTests()) {
      Line line;
      line.ok = outcome.passed;
      line.text = outcome.query + " -> " + outcome.expected_route;
      if (!outcome.passed) {
        line.text += " (got " + outcome.actual_route.value_or("<none>") + ")";
      }
      lines.push_back(std::move(line));
    }
  }
  if (!any_tests) {
    std::cerr << "error: no TEST blocks found\n";
    return kExitUsage;
  }
  std::cout << "1.." << lines.size() << "\n";
  bool failed = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].ok) failed = true;
    std::cout << (lines[i].ok ? "ok " : "not ok ") << (i + 1) << " - " << lines[i].text
              << "\n";
  }
  return failed ? kExitFindings : kExitOk;
}

Json conflictToJson(const probpol::ConflictReport& r) {
  Json obj = Json::object();
  obj["kind"] = probpol::conflictKindName(r.kind);
  obj["tier"] = probpol::tierName(r.tier);
  if (!r.hi_route.empty()) obj["route"] = r.hi_route;
  if (!r.lo_route.empty()) obj["shadowed_route"] = r.lo_route;
  if (!r.note.empty()) obj["note"] = r.note;
  if (auto* e = std::get_if<probpol::UnsatEvidence>(&r.evidence)) {
    obj["evidence"] = Json{{"unsat", e->summary}};
  } else if (auto* e2 = std::get_if<probpol::ImplicationEvidence>(&r.evidence)) {
    obj["evidence"] = Json{{"implication", e2->direction}};
  } else if (auto* e3 = std::get_if<probpol::CapPairEvidence>(&r.evidence)) {
    obj["evidence"] = Json{{"signal_a", e3->signal_a},
                           {"signal_b", e3->signal_b},
                           {"margin_radians", e3->margin_radians}};
  } else if (auto* e4 = std::get_if<probpol::CorpusEvidence>(&r.evidence)) {
    obj["evidence"] = Json{{"co_fires", e4->co_fire_count},
                           {"samples", e4->sample_count},
                           {"co_fire_rate", e4->co_fire_rate},
                           {"inversion_rate", e4->inversion_rate}};
  } else if (auto* e5 = std::get_if<probpol::BoundaryPairEvidence>(&r.evidence)) {
    obj["evidence"] =
        Json{{"signal_a", e5->signal_a}, {"signal_b", e5->signal_b}, {"hint", e5->hint}};
  }
  return obj;
}

std::string conflictToText(const probpol::ConflictReport& r) {
  std::ostringstream out;
  out << probpol::conflictKindName(r.kind) << " [" << probpol::tierName(r.tier) << "]";
  if (!r.hi_route.empty()) out << " route=" << r.hi_route;
  if (!r.lo_route.empty()) out << " shadowed=" << r.lo_route;
  if (auto* e = std::get_if<probpol::CorpusEvidence>(&r.evidence)) {
    out << " co_fires=" << e->co_fire_count << "/" << e->sample_count
        << " inversion_rate=" << e->inversion_rate;
  } else if (auto* e2 = std::get_if<probpol::CapPairEvidence>(&r.evidence)) {
    out << " caps=(" << e2->signal_a << ", " << e2->signal_b << ")"
        << " margin_radians=" << e2->margin_radians;
  } else if (auto* e3 = std::get_if<probpol::BoundaryPairEvidence>(&r.evidence)) {
    out << " signals=(" << e3->signal_a << ", " << e3->signal_b << ")";
  }
  if (!r.note.empty()) out << " (" << r.note << ")";
  return out.str();
}

int cmdConflicts(const std::vector<std::string>& files, const std::string& corpus_path,
                 const std::string& format) {
  std::optional<std::vector<std::string>> corpus;
  if (!corpus_path.empty()) {
    auto text = readFile(corpus_path);
    if (!text) {
      std::cerr << "error: cannot read corpus '" << corpus_path << "'\n";
      return kExitUsage;
    }
    corpus.emplace();
    std::istringstream in(*text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) corpus->push_back(line);
    }
  }

  int status = kExitOk;
  Json json_out = Json::array();
  for (const auto& path : files) {
    int load_status = kExitOk;
    auto program = loadProgram(path, &load_status);
    if (!program) return load_status;
    probpol::ConflictAnalysis analysis =
        probpol::analyzeAll(*program, corpus ? &*corpus : nullptr, {});

    // Reports arrive in taxonomy order already; anything other than the
    // info-only calibration kind is a finding.
    for (const auto& r : analysis.reports) {
      if (r.kind != probpol::ConflictKind::CalibrationSuspect) status = kExitFindings;
      if (format == "json") {
        json_out.push_back(conflictToJson(r));
      } else {
        std::cout << path << ": " << conflictToText(r) << "\n";
      }
    }
    if (!corpus && format != "json") {
      std::cout << path << ": note: soft-shadowing skipped (no --corpus given)\n";
    }
    for (const auto& note : analysis.incomplete) {
      if (format != "json") std::cout << path << ": note: " << note << "\n";
    }
  }
  if (format == "json") std::cout << probpol::canonicalDump(json_out);
  return status;
}

int cmdSimulate(const std::string& path, const std::string& trace_path,
                const std::string& mode, const std::string& out_path) {
  int status = kExitOk;
  auto program = loadProgram(path, &status);
  if (!program) return status;
  auto trace_text = readFile(trace_path);
  if (!trace_text) {
    std::cerr << "error: cannot read trace '" << trace_path << "'\n";
    return kExitUsage;
  }
  std::vector<std::string> trace;
  std::istringstream in(*trace_text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) trace.push_back(line);
  }
  if (trace.empty()) {
    std::cerr << "error: trace '" << trace_path << "' contains no queries\n";
    return kExitUsage;
  }

  probpol::Engine engine(*program, embeddingDimOverride());
  probpol::SimMode sim_mode =
      mode == "voronoi" ? probpol::SimMode::Voronoi : probpol::SimMode::Independent;
  probpol::SimulationSummary summary = engine.simulate(trace, sim_mode);

  Json doc = Json::object();
  doc["mode"] = mode;
  doc["query_count"] = summary.query_count;
  doc["route_histogram"] = Json::object();
  for (const auto& [route, count] : summary.route_histogram) {
    doc["route_histogram"][route] = count;
  }
  Json co_fire = Json::array();
  for (const auto& [pair, rate] : summary.signal_co_fire_rate) {
    co_fire.push_back(Json{{"signal_a", pair.first}, {"signal_b", pair.second}, {"rate", rate}});
  }
  doc["signal_co_fire"] = std::move(co_fire);
  Json pairs = Json::array();
  for (const auto& [pair, stat] : summary.route_pairs) {
    pairs.push_back(Json{{"route_hi", pair.first},
                         {"route_lo", pair.second},
                         {"co_fires", stat.co_fires},
                         {"co_fire_rate", stat.co_fire_rate},
                         {"inversions", stat.inversions},
                         {"inversion_rate", stat.inversion_rate}});
  }
  doc["route_pairs"] = std::move(pairs);

  std::string text = probpol::canonicalDump(doc);
  if (out_path.empty()) {
    std::cout << text;
  } else if (!writeFile(out_path, text)) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmdExplain(const std::string& path, const std::string& query,
               const std::string& attrs_json) {
  int status = kExitOk;
  auto program = loadProgram(path, &status);
  if (!program) return status;

  std::map<std::string, double> attrs;
  if (!attrs_json.empty()) {
    Json doc = Json::parse(attrs_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      std::cerr << "error: --attrs must be a JSON object of numbers\n";
      return kExitUsage;
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!it.value().is_number()) {
        std::cerr << "error: --attrs values must be numbers\n";
        return kExitUsage;
      }
      attrs[it.key()] = it.value().get<double>();
    }
  }

  probpol::Engine engine(*program, embeddingDimOverride());
  engine.setAttributes(attrs);
  probpol::SignalScores scores = engine.scoreSignals(query, probpol::SimMode::Voronoi);
  probpol::RoutingDecision decision = engine.routeWithScores(scores);

  std::map<std::string, std::string> group_of;
  for (const auto& group : program->groups) {
    for (const auto& member : group.members) group_of.emplace(member, group.name);
  }

  std::cout << "query: " << query << "\n\nsignals:\n";
  char buf[160];
  for (const auto& signal : program->signals) {
    auto git = group_of.find(signal.name);
    std::snprintf(buf, sizeof(buf), "  %-20s %-10s raw=%.4f norm=%.4f %s%s\n",
                  signal.name.c_str(), probpol::signalTypeName(signal.type),
                  scores.raw.at(signal.name), scores.normalized.at(signal.name),
                  scores.hasFired(signal.name) ? "FIRED " : "      ",
                  git != group_of.end() ? ("group=" + git->second).c_str() : "");
    std::cout << buf;
  }

  std::cout << "\nroutes:\n";
  for (const auto& entry : decision.trace) {
    std::snprintf(buf, sizeof(buf), "  %-24s confidence=%.4f %s\n", entry.route.c_str(),
                  entry.condition_value, entry.reason.c_str());
    std::cout << buf;
  }
  std::cout << "\ndecision: " << decision.chosen.value_or("<none>") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"policy routing compiler and analyzer"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string format = "text";
  bool strict = false;
  bool fix = false;
  auto* check = app.add_subcommand("check", "parse and validate policy files");
  check->add_option("files", files)->required();
  check->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--strict", strict, "warnings fail the run");
  check->add_flag("--fix", fix, "apply suggested fixes in place");

  std::string in_path;
  std::string out_path;
  auto* compile = app.add_subcommand("compile", "emit the JSON config for a policy file");
  compile->add_option("file", in_path)->required();
  compile->add_option("--out", out_path);

  auto* decompile = app.add_subcommand("decompile", "reconstruct DSL source from a config");
  decompile->add_option("file", in_path)->required();
  decompile->add_option("--out", out_path);

  auto* test = app.add_subcommand("test", "run embedded TEST blocks (TAP output)");
  test->add_option("files", files)->required();

  std::string corpus_path;
  auto* conflicts = app.add_subcommand("conflicts", "run the conflict analyses");
  conflicts->add_option("files", files)->required();
  conflicts->add_option("--corpus", corpus_path, "query trace for soft-shadowing");
  conflicts->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  std::string trace_path;
  std::string mode = "voronoi";
  auto* simulate = app.add_subcommand("simulate", "replay a query trace");
  simulate->add_option("file", in_path)->required();
  simulate->add_option("trace", trace_path)->required();
  simulate->add_option("--mode", mode)->check(CLI::IsMember({"independent", "voronoi"}));
  simulate->add_option("--out", out_path);

  std::string query;
  std::string attrs_json;
  auto* explain = app.add_subcommand("explain", "score one query and show the trace");
  explain->add_option("file", in_path)->required();
  explain->add_option("query", query)->required();
  explain->add_option("--attrs", attrs_json, "JSON object of authz/context attributes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (check->parsed()) return cmdCheck(files, format, strict, fix);
  if (compile->parsed()) return cmdCompile(in_path, out_path);
  if (decompile->parsed()) return cmdDecompile(in_path, out_path);
  if (test->parsed()) return cmdTest(files);
  if (conflicts->parsed()) return cmdConflicts(files, corpus_path, format);
  if (simulate->parsed()) return cmdSimulate(in_path, trace_path, mode, out_path);
  if (explain->parsed()) return cmdExplain(in_path, query, attrs_json);
  return kExitUsage;
}
