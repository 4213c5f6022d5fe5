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

#include "probpol/conflict.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "probpol/boolean.hpp"
#include "probpol/engine.hpp"
#include "probpol/geometry.hpp"

namespace probpol {
namespace {

const char* kClassifierNote = "classifier atoms treated as opaque Booleans";

std::vector<std::string> configStringList(const ConfigMap& config, const std::string& key) {
  std::vector<std::string> out;
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::List) return out;
  for (const auto& v : it->second.list) {
    if (v.kind == ConfigValue::Kind::String) out.push_back(v.str);
  }
  return out;
}

bool hasClassifierAtom(const Condition& cond) {
  if (cond.kind == Condition::Kind::Atom) {
    auto type = signalTypeFromName(cond.signal_type);
    return type && kindOf(*type) == SignalKind::Classifier;
  }
  for (const auto& child : cond.children) {
    if (hasClassifierAtom(child)) return true;
  }
  return false;
}

void collectPositiveAtoms(const Condition& cond, bool positive,
                          std::vector<const Condition*>& out) {
  switch (cond.kind) {
    case Condition::Kind::Atom:
      if (positive) out.push_back(&cond);
      break;
    case Condition::Kind::Not:
      collectPositiveAtoms(cond.children[0], !positive, out);
      break;
    default:
      for (const auto& child : cond.children) collectPositiveAtoms(child, positive, out);
  }
}

bool inOneSoftmaxGroup(const Program& program, const std::string& a, const std::string& b) {
  for (const auto& group : program.groups) {
    if (group.semantics != "softmax_exclusive") continue;
    bool has_a = std::find(group.members.begin(), group.members.end(), a) != group.members.end();
    bool has_b = std::find(group.members.begin(), group.members.end(), b) != group.members.end();
    if (has_a && has_b) return true;
  }
  return false;
}

bool differentActions(const RouteDecl& a, const RouteDecl& b) {
  return !equivalent(a.action, b.action);
}

}  // namespace

const char* conflictKindName(ConflictKind kind) {
  switch (kind) {
    case ConflictKind::Contradiction:
      return "contradiction";
    case ConflictKind::Shadowing:
      return "shadowing";
    case ConflictKind::Redundancy:
      return "redundancy";
    case ConflictKind::ProbableConflict:
      return "probable_conflict";
    case ConflictKind::SoftShadowing:
      return "soft_shadowing";
    case ConflictKind::CalibrationSuspect:
      return "calibration_suspect";
  }
  return "contradiction";
}

const char* tierName(DecidabilityTier tier) {
  switch (tier) {
    case DecidabilityTier::Crisp:
      return "crisp";
    case DecidabilityTier::Geometric:
      return "geometric";
    case DecidabilityTier::Distributional:
      return "distributional";
  }
  return "crisp";
}

ConflictAnalysis analyzeStructural(const Program& program) {
  ConflictAnalysis analysis;
  AtomUniverse universe = AtomUniverse::fromProgram(program);
  if (universe.overflowed()) {
    analysis.incomplete.push_back("structural analysis skipped: more than " +
                                  std::to_string(AtomUniverse::kMaxAtoms) + " atoms");
    return analysis;
  }

  std::vector<bool> route_sat(program.routes.size(), true);
  for (std::size_t i = 0; i < program.routes.size(); ++i) {
    const RouteDecl& route = program.routes[i];
    auto sat = satisfiable(route.condition, universe);
    if (!sat) {
      analysis.incomplete.push_back("satisfiability of '" + route.name + "' not decided");
      continue;
    }
    route_sat[i] = *sat;
    if (!*sat) {
      ConflictReport report;
      report.kind = ConflictKind::Contradiction;
      report.hi_route = route.name;
      report.tier = DecidabilityTier::Crisp;
      report.evidence = UnsatEvidence{"no feasible assignment over " +
                                      std::to_string(universe.size()) + " atoms"};
      if (hasClassifierAtom(route.condition)) report.note = kClassifierNote;
      analysis.reports.push_back(std::move(report));
    }
  }

  for (std::size_t i = 0; i < program.routes.size(); ++i) {
    for (std::size_t j = 0; j < program.routes.size(); ++j) {
      const RouteDecl& hi = program.routes[i];
      const RouteDecl& lo = program.routes[j];
      if (hi.priority <= lo.priority) continue;
      if (!differentActions(hi, lo)) continue;
      if (!route_sat[i] || !route_sat[j]) continue;  // already a Contradiction

      auto equiv = equivalentCond(hi.condition, lo.condition, universe);
      if (!equiv) {
        analysis.incomplete.push_back("pair (" + hi.name + ", " + lo.name + ") not decided");
        continue;
      }
      ConflictReport report;
      report.hi_route = hi.name;
      report.lo_route = lo.name;
      report.tier = DecidabilityTier::Crisp;
      if (hasClassifierAtom(hi.condition) || hasClassifierAtom(lo.condition)) {
        report.note = kClassifierNote;
      }
      if (*equiv) {
        report.kind = ConflictKind::Redundancy;
        report.evidence = ImplicationEvidence{"conditions equivalent"};
        analysis.reports.push_back(std::move(report));
        continue;
      }
      auto shadowed = implies(lo.condition, hi.condition, universe);
      if (shadowed && *shadowed) {
        report.kind = ConflictKind::Shadowing;
        report.evidence = ImplicationEvidence{"lower-priority condition implies higher"};
        analysis.reports.push_back(std::move(report));
      }
    }
  }
  return analysis;
}

ConflictAnalysis analyzeGeometric(const Program& program) {
  ConflictAnalysis analysis;
  const int dim = program.embeddingDim();

  auto capFor = [&](const Condition& atom) -> std::optional<SphericalCap> {
    const SignalDecl* signal = program.findSignal(atom.signal_name);
    if (!signal || signal->type != SignalType::Embedding) return std::nullopt;
    auto c = centroid(configStringList(signal->config, "candidates"), dim);
    if (!c) {
      analysis.incomplete.push_back("degenerate centroid for signal '" + atom.signal_name +
                                    "'");
      return std::nullopt;
    }
    double threshold = 0.5;
    if (auto it = signal->config.find("threshold");
        it != signal->config.end() && it->second.kind == ConfigValue::Kind::Number) {
      threshold = it->second.num;
    }
    return SphericalCap{std::move(*c), threshold};
  };

  for (std::size_t i = 0; i < program.routes.size(); ++i) {
    for (std::size_t j = 0; j < program.routes.size(); ++j) {
      const RouteDecl& hi = program.routes[i];
      const RouteDecl& lo = program.routes[j];
      if (hi.priority <= lo.priority) continue;
      if (!differentActions(hi, lo)) continue;

      std::vector<const Condition*> hi_atoms, lo_atoms;
      collectPositiveAtoms(hi.condition, true, hi_atoms);
      collectPositiveAtoms(lo.condition, true, lo_atoms);
      for (const Condition* a : hi_atoms) {
        if (a->signal_type != "embedding") continue;
        for (const Condition* b : lo_atoms) {
          if (b->signal_type != "embedding") continue;
          if (a->signal_name == b->signal_name) continue;
          if (inOneSoftmaxGroup(program, a->signal_name, b->signal_name)) continue;
          auto cap_a = capFor(*a);
          auto cap_b = capFor(*b);
          if (!cap_a || !cap_b) continue;
          CapRelation rel = capsIntersect(*cap_a, *cap_b);
          if (!rel.intersect) continue;
          ConflictReport report;
          report.kind = ConflictKind::ProbableConflict;
          report.hi_route = hi.name;
          report.lo_route = lo.name;
          report.tier = DecidabilityTier::Geometric;
          report.evidence =
              CapPairEvidence{a->signal_name, b->signal_name, rel.margin_radians};
          analysis.reports.push_back(std::move(report));
        }
      }
    }
  }
  return analysis;
}

ConflictAnalysis analyzeSoftShadowing(const Program& program,
                                      const std::vector<std::string>& corpus,
                                      const SoftShadowConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("soft-shadowing corpus must be non-empty");

  ConflictAnalysis analysis;
  Engine engine(program);

  // Score every query once under independent thresholding.
  std::vector<SignalScores> scored;
  scored.reserve(corpus.size());
  for (const auto& query : corpus) {
    scored.push_back(engine.scoreSignals(query, SimMode::Independent));
  }

  for (std::size_t i = 0; i < program.routes.size(); ++i) {
    for (std::size_t j = 0; j < program.routes.size(); ++j) {
      const RouteDecl& hi = program.routes[i];
      const RouteDecl& lo = program.routes[j];
      if (hi.priority <= lo.priority) continue;
      if (!differentActions(hi, lo)) continue;

      int co_fires = 0;
      int inversions = 0;
      for (const auto& scores : scored) {
        if (!engine.conditionHolds(hi.condition, scores) ||
            !engine.conditionHolds(lo.condition, scores)) {
          continue;
        }
        ++co_fires;
        if (engine.conditionConfidence(lo.condition, scores) >
            engine.conditionConfidence(hi.condition, scores)) {
          ++inversions;
        }
      }
      if (co_fires < config.min_co_fires) continue;
      double inversion_rate = static_cast<double>(inversions) / co_fires;
      if (inversion_rate < config.min_inversion_rate) continue;

      ConflictReport report;
      report.kind = ConflictKind::SoftShadowing;
      report.hi_route = hi.name;
      report.lo_route = lo.name;
      report.tier = DecidabilityTier::Distributional;
      CorpusEvidence ev;
      ev.co_fire_count = co_fires;
      ev.sample_count = static_cast<int>(corpus.size());
      ev.co_fire_rate = static_cast<double>(co_fires) / static_cast<double>(corpus.size());
      ev.inversion_rate = inversion_rate;
      report.evidence = ev;
      analysis.reports.push_back(std::move(report));
    }
  }
  return analysis;
}

ConflictAnalysis analyzeCalibration(const Program& program) {
  ConflictAnalysis analysis;
  for (std::size_t i = 0; i < program.signals.size(); ++i) {
    for (std::size_t j = i + 1; j < program.signals.size(); ++j) {
      const SignalDecl& a = program.signals[i];
      const SignalDecl& b = program.signals[j];
      if (kindOf(a.type) != SignalKind::Classifier || a.type != b.type) continue;
      if (inOneSoftmaxGroup(program, a.name, b.name)) continue;
      ConflictReport report;
      report.kind = ConflictKind::CalibrationSuspect;
      report.tier = DecidabilityTier::Distributional;
      report.evidence = BoundaryPairEvidence{
          a.name, b.name,
          "co-activation near semantic boundaries is statically undecidable; cover this "
          "pair with TEST cases or a SIGNAL_GROUP"};
      analysis.reports.push_back(std::move(report));
    }
  }
  return analysis;
}

ConflictAnalysis analyzeAll(const Program& program, const std::vector<std::string>* corpus,
                            const SoftShadowConfig& config) {
  ConflictAnalysis all = analyzeStructural(program);
  auto merge = [&all](ConflictAnalysis part) {
    for (auto& r : part.reports) all.reports.push_back(std::move(r));
    for (auto& n : part.incomplete) all.incomplete.push_back(std::move(n));
  };
  merge(analyzeGeometric(program));
  if (corpus) merge(analyzeSoftShadowing(program, *corpus, config));
  merge(analyzeCalibration(program));
  return all;
}

}  // namespace probpol
