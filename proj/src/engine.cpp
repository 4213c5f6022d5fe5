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

#include "probpol/engine.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "probpol/constructs.hpp"

namespace probpol {
namespace {

std::vector<std::string> configStringList(const ConfigMap& config, const std::string& key) {
  std::vector<std::string> out;
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::List) return out;
  for (const auto& v : it->second.list) {
    if (v.kind == ConfigValue::Kind::String) out.push_back(v.str);
  }
  return out;
}

double configNumber(const ConfigMap& config, const std::string& key, double fallback) {
  auto it = config.find(key);
  if (it == config.end() || it->second.kind != ConfigValue::Kind::Number) return fallback;
  return it->second.num;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Case-insensitive token-sequence containment: the term's tokens appear as a
// contiguous run in the query's tokens.
bool keywordMatches(const std::string& term, const std::vector<std::string>& query_tokens) {
  std::vector<std::string> term_tokens = tokenize(term);
  if (term_tokens.empty() || term_tokens.size() > query_tokens.size()) return false;
  for (std::size_t start = 0; start + term_tokens.size() <= query_tokens.size(); ++start) {
    bool match = true;
    for (std::size_t k = 0; k < term_tokens.size(); ++k) {
      if (query_tokens[start + k] != term_tokens[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

double PrototypeClassifierProvider::similarity(const SignalDecl& signal,
                                               const std::string& query,
                                               const EmbeddingProvider& embeddings) const {
  std::vector<std::string> categories = configStringList(signal.config, "mmlu_categories");
  if (categories.empty()) categories = configStringList(signal.config, "categories");
  if (categories.empty()) categories = configStringList(signal.config, "candidates");
  if (categories.empty()) categories.push_back(signal.name);

  Vec q = embeddings.embed(query);
  double best = -1.0;
  for (const auto& category : categories) {
    best = std::max(best, cosine(q, embeddings.embed(category)));
  }
  return best;
}

void TableClassifierProvider::set(const std::string& query, const std::string& signal,
                                  double sim) {
  table_[{query, signal}] = sim;
}

double TableClassifierProvider::similarity(const SignalDecl& signal, const std::string& query,
                                           const EmbeddingProvider&) const {
  auto it = table_.find({query, signal.name});
  return it != table_.end() ? it->second : fallback_;
}

bool SignalScores::hasFired(const std::string& name) const {
  return std::find(fired.begin(), fired.end(), name) != fired.end();
}

Engine::Engine(Program program, int dim_override)
    : program_(std::move(program)),
      embeddings_(dim_override > 0 ? dim_override : program_.embeddingDim()),
      classifier_(std::make_shared<PrototypeClassifierProvider>()) {
  routes_ = program_.routes;
  for (const auto& tree : program_.trees) {
    for (auto& route : compileTree(tree)) routes_.push_back(std::move(route));
  }
  for (const auto& policy : program_.policies) {
    AlgebraCompileResult compiled = compileAlgebra(policy, program_);
    if (compiled.ok()) {
      for (auto& route : compiled.routes) routes_.push_back(std::move(route));
    }
  }
}

void Engine::setClassifierProvider(std::shared_ptr<const ClassifierProvider> provider) {
  classifier_ = std::move(provider);
}

double Engine::signalSimilarity(const SignalDecl& signal, const std::string& query) const {
  switch (kindOf(signal.type)) {
    case SignalKind::Crisp: {
      if (signal.type == SignalType::Keyword) {
        std::vector<std::string> query_tokens = tokenize(query);
        for (const auto& term : configStringList(signal.config, "terms")) {
          if (keywordMatches(term, query_tokens)) return 1.0;
        }
        for (const auto& term : configStringList(signal.config, "keywords")) {
          if (keywordMatches(term, query_tokens)) return 1.0;
        }
        return 0.0;
      }
      // authz / context: caller-supplied attribute map; absence means 0.
      std::string attribute = signal.name;
      if (auto it = signal.config.find("attribute");
          it != signal.config.end() && it->second.kind == ConfigValue::Kind::String) {
        attribute = it->second.str;
      }
      auto it = attrs_.find(attribute);
      return (it != attrs_.end() && it->second != 0.0) ? 1.0 : 0.0;
    }
    case SignalKind::Geometric: {
      auto c = centroid(configStringList(signal.config, "candidates"), embeddings_.dim());
      if (!c) throw std::runtime_error("degenerate centroid for signal '" + signal.name + "'");
      return cosine(embeddings_.embed(query), *c);
    }
    case SignalKind::Classifier: {
      if (!classifier_) {
        throw std::runtime_error("no classifier provider for signal '" + signal.name + "'");
      }
      return classifier_->similarity(signal, query, embeddings_);
    }
  }
  return 0.0;
}

SignalScores Engine::scoreSignals(const std::string& query, SimMode mode) const {
  SignalScores scores;

  for (const auto& signal : program_.signals) {
    double sim = signalSimilarity(signal, query);
    scores.similarity[signal.name] = sim;
    double raw = kindOf(signal.type) == SignalKind::Crisp ? sim : (sim + 1.0) / 2.0;
    scores.raw[signal.name] = raw;
    scores.normalized[signal.name] = raw;
  }

  // Which signals belong to a softmax group (first group wins).
  std::map<std::string, const SignalGroupDecl*> group_of;
  if (mode == SimMode::Voronoi) {
    for (const auto& group : program_.groups) {
      if (group.semantics != "softmax_exclusive") continue;
      for (const auto& member : group.members) {
        group_of.emplace(member, &group);
      }
    }
  }

  // Group members: softmax over raw similarities, fire above the group
  // threshold.
  if (mode == SimMode::Voronoi) {
    for (const auto& group : program_.groups) {
      if (group.semantics != "softmax_exclusive") continue;
      std::vector<std::string> present;
      std::vector<double> sims;
      for (const auto& member : group.members) {
        auto it = scores.similarity.find(member);
        if (it == scores.similarity.end()) continue;
        if (group_of[member] != &group) continue;
        present.push_back(member);
        sims.push_back(it->second);
      }
      if (present.empty()) continue;
      std::vector<double> normalized = voronoiScores(sims, group.temperature);
      for (std::size_t i = 0; i < present.size(); ++i) {
        scores.normalized[present[i]] = normalized[i];
      }
      for (int idx : groupFire(normalized, group.threshold)) {
        scores.fired.push_back(present[static_cast<std::size_t>(idx)]);
      }
    }
  }

  // Ungrouped signals fire at their own thresholds.
  for (const auto& signal : program_.signals) {
    if (group_of.count(signal.name)) continue;
    double sim = scores.similarity[signal.name];
    bool fires = false;
    switch (kindOf(signal.type)) {
      case SignalKind::Crisp:
        fires = sim >= 1.0;
        break;
      case SignalKind::Geometric:
        // Cap semantics: fire at cosine >= threshold.
        fires = sim >= configNumber(signal.config, "threshold", 0.5);
        break;
      case SignalKind::Classifier:
        fires = scores.raw[signal.name] >= configNumber(signal.config, "threshold", 0.5);
        break;
    }
    if (fires) scores.fired.push_back(signal.name);
  }

  std::sort(scores.fired.begin(), scores.fired.end());
  return scores;
}

bool Engine::conditionHolds(const Condition& cond, const SignalScores& scores) const {
  switch (cond.kind) {
    case Condition::Kind::Atom:
      return scores.hasFired(cond.signal_name);
    case Condition::Kind::Not:
      return !conditionHolds(cond.children[0], scores);
    case Condition::Kind::And:
      return conditionHolds(cond.children[0], scores) &&
             conditionHolds(cond.children[1], scores);
    case Condition::Kind::Or:
      return conditionHolds(cond.children[0], scores) ||
             conditionHolds(cond.children[1], scores);
  }
  return false;
}

double Engine::conditionConfidence(const Condition& cond, const SignalScores& scores) const {
  switch (cond.kind) {
    case Condition::Kind::Atom: {
      auto it = scores.normalized.find(cond.signal_name);
      return it != scores.normalized.end() ? it->second : 0.0;
    }
    case Condition::Kind::Not:
      return 1.0 - conditionConfidence(cond.children[0], scores);
    case Condition::Kind::And:
      return std::min(conditionConfidence(cond.children[0], scores),
                      conditionConfidence(cond.children[1], scores));
    case Condition::Kind::Or:
      return std::max(conditionConfidence(cond.children[0], scores),
                      conditionConfidence(cond.children[1], scores));
  }
  return 0.0;
}

RoutingDecision Engine::routeWithScores(const SignalScores& scores) const {
  RoutingDecision decision;
  decision.scores = scores;

  bool tiered = !routes_.empty() &&
                std::all_of(routes_.begin(), routes_.end(),
                            [](const RouteDecl& r) { return r.tier.has_value(); });

  std::vector<std::size_t> order(routes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  if (!tiered) {
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      return routes_[a].priority > routes_[b].priority;
    });
    bool selected = false;
    for (std::size_t idx : order) {
      const RouteDecl& route = routes_[idx];
      TraceEntry entry;
      entry.route = route.name;
      entry.condition_holds = conditionHolds(route.condition, scores);
      entry.condition_value = conditionConfidence(route.condition, scores);
      if (selected) {
        entry.reason = "lower_priority_than_selected";
      } else if (entry.condition_holds) {
        entry.reason = "selected";
        decision.chosen = route.name;
        selected = true;
      } else {
        entry.reason = "condition_not_met";
      }
      decision.trace.push_back(std::move(entry));
    }
    return decision;
  }

  // Tiered: tiers ascending; within a tier pick the maximal fuzzy confidence
  // among matching routes, ties by priority then declaration order.
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    if (*routes_[a].tier != *routes_[b].tier) return *routes_[a].tier < *routes_[b].tier;
    return routes_[a].priority > routes_[b].priority;
  });

  std::optional<int> selected_tier;
  std::optional<std::size_t> best;
  double best_confidence = -1.0;
  for (std::size_t idx : order) {
    const RouteDecl& route = routes_[idx];
    if (selected_tier && *route.tier > *selected_tier) break;
    if (!conditionHolds(route.condition, scores)) continue;
    double confidence = conditionConfidence(route.condition, scores);
    if (!selected_tier) selected_tier = *route.tier;
    if (confidence > best_confidence) {
      best_confidence = confidence;
      best = idx;
    }
  }
  if (best) decision.chosen = routes_[*best].name;

  for (std::size_t idx : order) {
    const RouteDecl& route = routes_[idx];
    TraceEntry entry;
    entry.route = route.name;
    entry.condition_holds = conditionHolds(route.condition, scores);
    entry.condition_value = conditionConfidence(route.condition, scores);
    if (best && idx == *best) {
      entry.reason = "selected";
    } else if (selected_tier && *route.tier > *selected_tier) {
      entry.reason = "later_tier_not_reached";
    } else if (entry.condition_holds) {
      entry.reason = "lower_confidence_in_tier";
    } else {
      entry.reason = "condition_not_met";
    }
    decision.trace.push_back(std::move(entry));
  }
  return decision;
}

RoutingDecision Engine::route(const std::string& query) const {
  return routeWithScores(scoreSignals(query, SimMode::Voronoi));
}

std::vector<TestOutcome> Engine::runTests() const {
  std::vector<TestOutcome> outcomes;
  for (const auto& test : program_.tests) {
    for (const auto& c : test.cases) {
      RoutingDecision decision = route(c.query);
      TestOutcome outcome;
      outcome.test_name = test.name;
      outcome.query = c.query;
      outcome.expected_route = c.expected_route;
      outcome.actual_route = decision.chosen;
      outcome.passed = decision.chosen && *decision.chosen == c.expected_route;
      outcome.scores = std::move(decision.scores);
      outcomes.push_back(std::move(outcome));
    }
  }
  return outcomes;
}

SimulationSummary Engine::simulate(const std::vector<std::string>& trace, SimMode mode) const {
  if (trace.empty()) throw std::invalid_argument("simulation trace must be non-empty");

  SimulationSummary summary;
  summary.query_count = static_cast<int>(trace.size());

  std::map<std::pair<std::string, std::string>, int> co_fire_counts;

  for (const auto& query : trace) {
    SignalScores scores = scoreSignals(query, mode);
    RoutingDecision decision = routeWithScores(scores);
    summary.route_histogram[decision.chosen.value_or("<none>")] += 1;

    for (std::size_t i = 0; i < scores.fired.size(); ++i) {
      for (std::size_t j = i + 1; j < scores.fired.size(); ++j) {
        co_fire_counts[{scores.fired[i], scores.fired[j]}] += 1;
      }
    }

    for (const auto& hi : routes_) {
      for (const auto& lo : routes_) {
        if (hi.priority <= lo.priority) continue;
        if (equivalent(hi.action, lo.action)) continue;
        auto key = std::make_pair(hi.name, lo.name);
        RoutePairStat& stat = summary.route_pairs[key];
        if (conditionHolds(hi.condition, scores) && conditionHolds(lo.condition, scores)) {
          stat.co_fires += 1;
          if (conditionConfidence(lo.condition, scores) >
              conditionConfidence(hi.condition, scores)) {
            stat.inversions += 1;
          }
        }
      }
    }
  }

  const double n = static_cast<double>(trace.size());
  // All declared signal pairs appear in the summary, co-fired or not.
  for (std::size_t i = 0; i < program_.signals.size(); ++i) {
    for (std::size_t j = i + 1; j < program_.signals.size(); ++j) {
      std::string a = program_.signals[i].name;
      std::string b = program_.signals[j].name;
      if (a > b) std::swap(a, b);
      int count = 0;
      if (auto it = co_fire_counts.find({a, b}); it != co_fire_counts.end()) {
        count = it->second;
      }
      summary.signal_co_fire_rate[{a, b}] = count / n;
    }
  }
  for (auto& [key, stat] : summary.route_pairs) {
    stat.co_fire_rate = stat.co_fires / n;
    stat.inversion_rate = stat.co_fires > 0
                              ? static_cast<double>(stat.inversions) / stat.co_fires
                              : 0.0;
  }
  return summary;
}

}  // namespace probpol
