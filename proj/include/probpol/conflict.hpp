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

#ifndef PROBPOL_CONFLICT_HPP_
#define PROBPOL_CONFLICT_HPP_

#include <string>
#include <variant>
#include <vector>

#include "probpol/ast.hpp"

namespace probpol {

enum class ConflictKind {
  Contradiction,       // type 1: unsatisfiable condition
  Shadowing,           // type 2: lower-priority condition implies higher
  Redundancy,          // type 3: equivalent conditions
  ProbableConflict,    // type 4: intersecting spherical caps
  SoftShadowing,       // type 5: priority overrides confidence on a corpus
  CalibrationSuspect,  // type 6: undecidable; flagged for TEST coverage
};

enum class DecidabilityTier { Crisp, Geometric, Distributional };

const char* conflictKindName(ConflictKind kind);
const char* tierName(DecidabilityTier tier);

struct UnsatEvidence {
  std::string summary;  // e.g. "no feasible assignment over 2 atoms"
};

struct ImplicationEvidence {
  std::string direction;  // "lower implies higher" / "equivalent"
};

struct CapPairEvidence {
  std::string signal_a;
  std::string signal_b;
  double margin_radians = 0.0;
};

struct CorpusEvidence {
  double co_fire_rate = 0.0;
  double inversion_rate = 0.0;
  int co_fire_count = 0;
  int sample_count = 0;
};

struct BoundaryPairEvidence {
  std::string signal_a;
  std::string signal_b;
  std::string hint;
};

using Evidence = std::variant<UnsatEvidence, ImplicationEvidence, CapPairEvidence,
                              CorpusEvidence, BoundaryPairEvidence>;

struct ConflictReport {
  ConflictKind kind = ConflictKind::Contradiction;
  std::string hi_route;  // higher-priority route; for Contradiction the route itself
  std::string lo_route;  // empty for single-rule reports
  DecidabilityTier tier = DecidabilityTier::Crisp;
  Evidence evidence;
  std::string note;  // e.g. classifier atoms treated as opaque Booleans
};

struct ConflictAnalysis {
  std::vector<ConflictReport> reports;
  std::vector<std::string> incomplete;  // analyses skipped (e.g. atom overflow)
  bool complete() const { return incomplete.empty(); }
};

struct SoftShadowConfig {
  int min_co_fires = 5;
  double min_inversion_rate = 0.2;
};

// Types 1-3 over the propositional abstraction (exclusivity sets from
// softmax groups included). Pairwise kinds skip equal-priority pairs and
// require different actions.
ConflictAnalysis analyzeStructural(const Program& program);

// Type 4: cap intersection between positive embedding atoms of route pairs
// with different actions; pairs covered by one softmax group are skipped.
ConflictAnalysis analyzeGeometric(const Program& program);

// Type 5: corpus-estimated inversion of confidence vs priority. Throws
// std::invalid_argument on an empty corpus.
ConflictAnalysis analyzeSoftShadowing(const Program& program,
                                      const std::vector<std::string>& corpus,
                                      const SoftShadowConfig& config = {});

// Type 6: no decision attempted; lists ungrouped same-type classifier pairs.
ConflictAnalysis analyzeCalibration(const Program& program);

// All four in taxonomy order (soft shadowing only when a corpus is given).
ConflictAnalysis analyzeAll(const Program& program,
                            const std::vector<std::string>* corpus = nullptr,
                            const SoftShadowConfig& config = {});

}  // namespace probpol

#endif  // PROBPOL_CONFLICT_HPP_
