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

#ifndef PROBPOL_ENGINE_HPP_
#define PROBPOL_ENGINE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probpol/ast.hpp"
#include "probpol/geometry.hpp"

namespace probpol {

// Scoring source for classifier signals (domain/complexity/jailbreak/pii).
// Returns a similarity in cosine space, in [-1, 1].
class ClassifierProvider {
 public:
  virtual ~ClassifierProvider() = default;
  virtual double similarity(const SignalDecl& signal, const std::string& query,
                            const EmbeddingProvider& embeddings) const = 0;
};

// Default provider: max cosine between the query embedding and the
// embeddings of the signal's category names.
class PrototypeClassifierProvider : public ClassifierProvider {
 public:
  double similarity(const SignalDecl& signal, const std::string& query,
                    const EmbeddingProvider& embeddings) const override;
};

// Fixed (query, signal) -> similarity table; used to pin scores in tests.
// Falls back to `fallback` for unlisted pairs.
class TableClassifierProvider : public ClassifierProvider {
 public:
  explicit TableClassifierProvider(double fallback = -1.0) : fallback_(fallback) {}
  void set(const std::string& query, const std::string& signal, double sim);
  double similarity(const SignalDecl& signal, const std::string& query,
                    const EmbeddingProvider& embeddings) const override;

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
  double fallback_;
};

enum class SimMode { Independent, Voronoi };

struct SignalScores {
  // Raw score in [0,1]: crisp signals exactly 0/1, similarity-backed signals
  // mapped via (cos+1)/2.
  std::map<std::string, double> raw;
  // Post-group-softmax score for group members; equals raw otherwise.
  std::map<std::string, double> normalized;
  // Cosine-space similarity for embedding/classifier signals (group softmax
  // and cap logic operate on this).
  std::map<std::string, double> similarity;
  std::vector<std::string> fired;

  bool hasFired(const std::string& name) const;
};

struct TraceEntry {
  std::string route;
  double condition_value = 0.0;  // fuzzy confidence
  bool condition_holds = false;
  std::string reason;  // "selected" / "skipped: ..." machine-readable
};

struct RoutingDecision {
  std::optional<std::string> chosen;
  std::vector<TraceEntry> trace;
  SignalScores scores;
};

struct TestOutcome {
  std::string test_name;
  std::string query;
  std::string expected_route;
  std::optional<std::string> actual_route;
  bool passed = false;
  SignalScores scores;
};

struct RoutePairStat {
  int co_fires = 0;
  int inversions = 0;
  double co_fire_rate = 0.0;
  double inversion_rate = 0.0;
};

struct SimulationSummary {
  int query_count = 0;
  std::map<std::string, int> route_histogram;  // "<none>" for no match
  // Signal-pair co-fire rates, keyed (name_a < name_b).
  std::map<std::pair<std::string, std::string>, double> signal_co_fire_rate;
  // Route-pair stats keyed (higher-priority, lower-priority), different actions.
  std::map<std::pair<std::string, std::string>, RoutePairStat> route_pairs;
};

// Desk-scale evaluation pipeline over a validated Program. DECISION_TREE and
// POLICY blocks are compiled to ordinary routes at construction.
class Engine {
 public:
  explicit Engine(Program program, int dim_override = 0);

  void setAttributes(std::map<std::string, double> attrs) { attrs_ = std::move(attrs); }
  void setClassifierProvider(std::shared_ptr<const ClassifierProvider> provider);
  EmbeddingProvider& embeddings() { return embeddings_; }
  const EmbeddingProvider& embeddings() const { return embeddings_; }
  const Program& program() const { return program_; }
  const std::vector<RouteDecl>& effectiveRoutes() const { return routes_; }

  SignalScores scoreSignals(const std::string& query, SimMode mode = SimMode::Voronoi) const;
  RoutingDecision route(const std::string& query) const;
  RoutingDecision routeWithScores(const SignalScores& scores) const;
  std::vector<TestOutcome> runTests() const;
  // Throws std::invalid_argument on an empty trace.
  SimulationSummary simulate(const std::vector<std::string>& trace, SimMode mode) const;

  // Fuzzy condition confidence: atom = score, AND = min, OR = max, NOT = 1-s.
  double conditionConfidence(const Condition& cond, const SignalScores& scores) const;
  bool conditionHolds(const Condition& cond, const SignalScores& scores) const;

  // Cosine-space similarity of one signal on a query (crisp signals report
  // their 0/1 activation).
  double signalSimilarity(const SignalDecl& signal, const std::string& query) const;

 private:
  Program program_;
  std::vector<RouteDecl> routes_;  // declared + compiled tree/policy routes
  EmbeddingProvider embeddings_;
  std::map<std::string, double> attrs_;
  std::shared_ptr<const ClassifierProvider> classifier_;
};

}  // namespace probpol

#endif  // PROBPOL_ENGINE_HPP_
