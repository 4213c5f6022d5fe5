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
// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line;
// the process exits nonzero if any check fails. argv[1] is the sample-config
// directory (defaults to ./corpus).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "probpol/boolean.hpp"
#include "probpol/conflict.hpp"
#include "probpol/constructs.hpp"
#include "probpol/emit.hpp"
#include "probpol/engine.hpp"
#include "probpol/geometry.hpp"
#include "probpol/parser.hpp"
#include "probpol/printer.hpp"
#include "probpol/validator.hpp"

using namespace probpol;

namespace {

int g_failures = 0;
int g_index = 0;

void report(const std::string& label, bool ok, const std::string& detail = "") {
  ++g_index;
  std::printf("%s %2d  %s%s%s\n", ok ? "PASS" : "FAIL", g_index, label.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++g_failures;
}

Program mustParse(const std::string& src) {
  ParseResult r = parse(src);
  if (!r.ok()) {
    std::fprintf(stderr, "internal: fixture failed to parse: %s\n",
                 r.diagnostics.empty() ? "?" : r.diagnostics[0].message.c_str());
    std::exit(2);
  }
  return r.program;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// 1. Softmax-group exclusivity under randomized inputs.
// ---------------------------------------------------------------------------
void checkGroupExclusivityRandomized() {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> sim(-1.0, 1.0);
  std::uniform_real_distribution<double> temp(0.01, 1.0);
  std::uniform_int_distribution<int> kd(2, 6);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    int k = kd(rng);
    std::vector<double> sims(k);
    for (double& v : sims) v = sim(rng);
    auto fired = groupFire(voronoiScores(sims, temp(rng)), 1.0 / k + 0.01);
    if (fired.size() > 1) ++violations;
  }
  report("softmax group fires at most one member across 10000 randomized draws",
         violations == 0, violations ? std::to_string(violations) + " violations" : "");
}

// ---------------------------------------------------------------------------
// 2. Worked softmax example with pinned similarities.
// ---------------------------------------------------------------------------
void checkWorkedSoftmaxExample() {
  std::vector<double> scores = voronoiScores(std::vector<double>{0.52, 0.89, 0.31}, 0.1);
  std::vector<int> fired = groupFire(scores, 0.5);
  bool ok = fired == std::vector<int>{1} &&
            std::abs(scores[0] - 0.0241) <= 1e-3 &&
            std::abs(scores[1] - 0.9730) <= 1e-3 &&
            std::abs(scores[2] - 0.0029) <= 1e-3;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "normalized = [%.4f, %.4f, %.4f]", scores[0],
                scores[1], scores[2]);
  report("sims [0.52, 0.89, 0.31] at temperature 0.1: only index 1 clears 0.5", ok, detail);
}

// ---------------------------------------------------------------------------
// 3. Independent thresholds route by priority; a softmax group flips the
//    decision to the exclusive winner.
// ---------------------------------------------------------------------------
void checkPriorityVsGroupRouting() {
  static const char* kBase = R"(
SIGNAL domain math { mmlu_categories: ["college_mathematics"] }
SIGNAL domain science { mmlu_categories: ["college_physics"] }
ROUTE math_route { PRIORITY 200 WHEN domain("math") MODEL "qwen2.5-math" }
ROUTE science_route { PRIORITY 100 WHEN domain("science") MODEL "qwen2.5-science" }
)";
  static const char* kGroup = R"(
SIGNAL_GROUP taxonomy {
  semantics: softmax_exclusive
  temperature: 0.1
  threshold: 0.5
  members: [math, science]
  default: science
}
)";
  auto table = std::make_shared<TableClassifierProvider>(-1.0);
  table->set("is light a wave or a particle", "math", 0.52);
  table->set("is light a wave or a particle", "science", 0.89);

  Engine flat(mustParse(kBase));
  flat.setClassifierProvider(table);
  auto flat_choice = flat.route("is light a wave or a particle").chosen;

  Engine grouped(mustParse(std::string(kBase) + kGroup));
  grouped.setClassifierProvider(table);
  auto grouped_choice = grouped.route("is light a wave or a particle").chosen;

  bool ok = flat_choice == std::optional<std::string>("math_route") &&
            grouped_choice == std::optional<std::string>("science_route");
  report(
      "scores math 0.52 / science 0.89: flat config routes to math_route, "
      "grouped config to science_route",
      ok,
      "flat=" + flat_choice.value_or("<none>") +
          " grouped=" + grouped_choice.value_or("<none>"));
}

// ---------------------------------------------------------------------------
// 4. Analytic cap intersection vs Monte-Carlo membership sampling.
// ---------------------------------------------------------------------------
void checkCapIntersectionOracle() {
  const int dim = 8;
  const int pair_count = 500;
  const int sample_count = 100000;
  std::mt19937 rng(20260826);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Wide caps give the sampler dense overlap regions; tight caps exercise the
  // disjoint verdict, which the sampler can only confirm, never refute.
  std::uniform_real_distribution<double> wide(0.05, 0.40);
  std::uniform_real_distribution<double> tight(0.90, 0.98);

  auto random_unit = [&] {
    Vec v(dim);
    for (double& x : v) x = gauss(rng);
    normalize(v);
    return v;
  };

  // Membership sampling restricted to the smaller cap: a hit refutes an
  // analytic "disjoint" exactly, and any intersection lens occupies enough of
  // the smaller cap to be found once the margin clears the noise band.
  auto sample_in_cap = [&](const SphericalCap& cap) {
    double radius = std::acos(cap.threshold);
    std::uniform_real_distribution<double> angle(0.0, radius);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double ceiling = std::pow(std::sin(std::min(radius, M_PI / 2.0)), dim - 2);
    double t;
    do {
      t = angle(rng);
    } while (unit(rng) * ceiling > std::pow(std::sin(t), dim - 2));
    Vec ortho = random_unit();
    double along = dot(ortho, cap.centroid);
    for (int i = 0; i < dim; ++i) ortho[i] -= along * cap.centroid[i];
    normalize(ortho);
    Vec p(dim);
    for (int i = 0; i < dim; ++i) {
      p[i] = std::cos(t) * cap.centroid[i] + std::sin(t) * ortho[i];
    }
    return p;
  };

  int disagreements = 0;
  int decisive = 0;
  const double two_degrees = 2.0 * M_PI / 180.0;
  for (int i = 0; i < pair_count; ++i) {
    auto& thr = i % 2 == 0 ? wide : tight;
    SphericalCap a{random_unit(), thr(rng)};
    SphericalCap b{random_unit(), thr(rng)};
    CapRelation rel = capsIntersect(a, b);
    if (rel.margin_radians <= two_degrees) continue;
    ++decisive;
    const SphericalCap& smaller = a.threshold >= b.threshold ? a : b;
    const SphericalCap& other = a.threshold >= b.threshold ? b : a;
    bool sampled = false;
    for (int s = 0; s < sample_count && !sampled; ++s) {
      sampled = dot(sample_in_cap(smaller), other.centroid) >= other.threshold;
    }
    if (sampled != rel.intersect) ++disagreements;
  }
  report("cap intersection verdicts match 100k-point sampling on 500 random pairs",
         disagreements == 0 && decisive > 300,
         std::to_string(decisive) + " decisive pairs, " + std::to_string(disagreements) +
             " disagreements");
}

// ---------------------------------------------------------------------------
// 5. Structural conflict reports vs an independent truth-table enumerator.
// ---------------------------------------------------------------------------
namespace oracle {

// Independent re-implementation: conditions evaluated directly against a
// bitmask over signal names s0..s5, groups enforced by filtering assignments.
bool eval(const Condition& c, unsigned mask) {
  switch (c.kind) {
    case Condition::Kind::Atom:
      return mask >> (c.signal_name.back() - '0') & 1u;
    case Condition::Kind::Not:
      return !eval(c.children[0], mask);
    case Condition::Kind::And:
      return eval(c.children[0], mask) && eval(c.children[1], mask);
    case Condition::Kind::Or:
      return eval(c.children[0], mask) || eval(c.children[1], mask);
  }
  return false;
}

std::vector<unsigned> feasibleMasks(const Program& p, int atom_count) {
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << atom_count); ++mask) {
    bool ok = true;
    for (const auto& g : p.groups) {
      int on = 0;
      for (const auto& m : g.members) on += mask >> (m.back() - '0') & 1u;
      if (on > 1) ok = false;
    }
    if (ok) out.push_back(mask);
  }
  return out;
}

// (kind, hi, lo) triples in a canonical order.
std::set<std::string> reports(const Program& p) {
  std::set<std::string> out;
  std::vector<unsigned> masks = feasibleMasks(p, 6);
  auto models = [&](const Condition& c) {
    std::vector<bool> v;
    v.reserve(masks.size());
    for (unsigned m : masks) v.push_back(eval(c, m));
    return v;
  };
  std::vector<std::vector<bool>> table;
  for (const auto& r : p.routes) table.push_back(models(r.condition));
  auto any = [](const std::vector<bool>& v) {
    return std::any_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  for (std::size_t i = 0; i < p.routes.size(); ++i) {
    if (!any(table[i])) out.insert("contradiction:" + p.routes[i].name);
  }
  for (std::size_t i = 0; i < p.routes.size(); ++i) {
    for (std::size_t j = 0; j < p.routes.size(); ++j) {
      const RouteDecl& hi = p.routes[i];
      const RouteDecl& lo = p.routes[j];
      if (hi.priority <= lo.priority || equivalent(hi.action, lo.action)) continue;
      if (!any(table[i]) || !any(table[j])) continue;
      if (table[i] == table[j]) {
        out.insert("redundancy:" + hi.name + ":" + lo.name);
        continue;
      }
      bool shadowed = true;
      for (std::size_t m = 0; m < masks.size(); ++m) {
        if (table[j][m] && !table[i][m]) shadowed = false;
      }
      if (shadowed) out.insert("shadowing:" + hi.name + ":" + lo.name);
    }
  }
  return out;
}

}  // namespace oracle

Condition randomCond(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> atom_pick(0, 5);
  std::uniform_int_distribution<int> op(0, 3);
  if (depth == 0 || op(rng) == 0) {
    return Condition::atom("keyword", "s" + std::to_string(atom_pick(rng)));
  }
  switch (op(rng)) {
    case 1:
      return Condition::negate(randomCond(rng, depth - 1));
    case 2:
      return Condition::conj(randomCond(rng, depth - 1), randomCond(rng, depth - 1));
    default:
      return Condition::disj(randomCond(rng, depth - 1), randomCond(rng, depth - 1));
  }
}

void checkStructuralConflictOracle() {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> route_count(2, 5);
  std::uniform_int_distribution<int> coin(0, 1);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    Program p;
    for (int s = 0; s < 6; ++s) {
      SignalDecl sig;
      sig.name = "s" + std::to_string(s);
      sig.type = SignalType::Keyword;
      sig.config["terms"] = ConfigValue::ofList({ConfigValue::ofString("t")});
      p.signals.push_back(sig);
    }
    if (coin(rng)) {
      SignalGroupDecl g;
      g.name = "g";
      g.members = {"s0", "s1", "s2"};
      g.default_member = "s0";
      p.groups.push_back(g);
    }
    int n = route_count(rng);
    for (int r = 0; r < n; ++r) {
      RouteDecl route;
      route.name = "r" + std::to_string(r);
      route.priority = (n - r) * 10;
      route.condition = randomCond(rng, 3);
      route.action = Action::modelAction("m" + std::to_string(r));
      p.routes.push_back(route);
    }

    std::set<std::string> expected = oracle::reports(p);
    std::set<std::string> got;
    ConflictAnalysis an = analyzeStructural(p);
    for (const auto& rep : an.reports) {
      switch (rep.kind) {
        case ConflictKind::Contradiction:
          got.insert("contradiction:" + rep.hi_route);
          break;
        case ConflictKind::Shadowing:
          got.insert("shadowing:" + rep.hi_route + ":" + rep.lo_route);
          break;
        case ConflictKind::Redundancy:
          got.insert("redundancy:" + rep.hi_route + ":" + rep.lo_route);
          break;
        default:
          break;
      }
    }
    if (got != expected || !an.complete()) ++mismatches;
  }
  report("structural conflict reports equal truth-table enumeration on 200 random programs",
         mismatches == 0, std::to_string(mismatches) + " mismatching programs");
}

// ---------------------------------------------------------------------------
// 6. Category-overlap warning.
// ---------------------------------------------------------------------------
void checkCategoryOverlapWarning(const std::filesystem::path& corpus) {
  Program overlapping = mustParse(R"(
SIGNAL domain physics { mmlu_categories: ["college_physics"] }
SIGNAL domain chemistry { mmlu_categories: ["college_physics", "college_chemistry"] }
)");
  auto diags = checkCategoryOverlap(overlapping);
  int pp201 = 0;
  bool names_both = false;
  for (const auto& d : diags) {
    if (d.code == "PP201") {
      ++pp201;
      names_both = d.message.find("physics") != std::string::npos &&
                   d.message.find("chemistry") != std::string::npos;
    }
  }

  Program clean = mustParse(slurp(corpus / "listing1.srdsl"));
  int clean_pp201 = 0;
  for (const auto& d : checkCategoryOverlap(clean)) {
    if (d.code == "PP201") ++clean_pp201;
  }
  report("a shared category yields exactly one overlap warning naming both signals",
         pp201 == 1 && names_both && clean_pp201 == 0);
}

// ---------------------------------------------------------------------------
// 7. Guard fix application and idempotence.
// ---------------------------------------------------------------------------
void checkGuardFix() {
  std::string source = R"(
SIGNAL domain math { mmlu_categories: ["college_mathematics"] }
SIGNAL domain science { mmlu_categories: ["college_physics"] }
ROUTE math_route {
  PRIORITY 200
  WHEN domain("math")
  MODEL "qwen2.5-math"
}
ROUTE science_route {
  PRIORITY 100
  WHEN domain("science")
  MODEL "qwen2.5-science"
}
)";
  auto diags = validate(mustParse(source));
  int pp301 = 0;
  for (const auto& d : diags) pp301 += d.code == "PP301";

  std::string fixed = applyFixes(source, diags);
  ParseResult reparsed = parse(fixed);
  bool has_guard = fixed.find(R"(AND NOT domain("math"))") != std::string::npos;

  auto after = validate(reparsed.program);
  int pp301_after = 0;
  for (const auto& d : after) pp301_after += d.code == "PP301";
  bool idempotent = applyFixes(fixed, after) == fixed;

  report("guard warning's fix inserts the NOT guard and re-validates clean",
         pp301 == 1 && reparsed.ok() && has_guard && pp301_after == 0 && idempotent);
}

// ---------------------------------------------------------------------------
// 8. Decision tree checks and disjoint compilation.
// ---------------------------------------------------------------------------
void checkDecisionTree(const std::filesystem::path& corpus) {
  Program p = mustParse(slurp(corpus / "decision_tree.srdsl"));
  AtomUniverse u = AtomUniverse::fromProgram(p);
  const DecisionTreeDecl& tree = p.trees[0];
  bool clean = tree.branches.size() == 4 && checkTree(tree, u).empty();

  DecisionTreeDecl no_else = tree;
  no_else.else_action.reset();
  bool missing_else = false;
  for (const auto& d : checkTree(no_else, u)) missing_else |= d.code == "PP701";

  DecisionTreeDecl shadowed = tree;
  TreeBranch dead;
  dead.condition = Condition::conj(Condition::atom("domain", "math"),
                                   Condition::atom("domain", "science"));
  dead.action = Action::modelAction("unreachable");
  shadowed.branches.push_back(dead);  // implied by branch 2
  bool unreachable = false;
  for (const auto& d : checkTree(shadowed, u)) unreachable |= d.code == "PP702";

  std::vector<RouteDecl> routes = compileTree(tree);
  bool disjoint = true;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    for (std::size_t j = i + 1; j < routes.size(); ++j) {
      Condition both = Condition::conj(routes[i].condition, routes[j].condition);
      if (satisfiable(both, u) != std::optional<bool>(false)) disjoint = false;
    }
  }
  report(
      "decision tree: clean five-way tree passes, missing ELSE and implied "
      "branches are flagged, compiled routes are pairwise unsatisfiable",
      clean && missing_else && unreachable && disjoint);
}

// ---------------------------------------------------------------------------
// 9. Exclusive-union certification in the policy algebra.
// ---------------------------------------------------------------------------
void checkPolicyAlgebraCertification() {
  static const char* kSignals = R"(
SIGNAL jailbreak det { model: "x" }
SIGNAL pii filter { entities: ["EMAIL"] }
SIGNAL domain math { mmlu_categories: ["m"] }
SIGNAL domain science { mmlu_categories: ["s"] }
SIGNAL_GROUP domains { semantics: softmax_exclusive, members: [math, science], default: math }
)";
  static const char* kPolicies = R"(
POLICY sec {
  jailbreak("det") -> "fast-reject"
  (+) pii("filter") -> "pii-handler"
}
POLICY dom {
  domain("math") -> "qwen-math"
  (+) domain("science") -> "qwen-science"
}
POLICY full { sec >> dom }
)";
  // Ungrouped classifier pair: refused.
  Program ungrouped = mustParse(std::string(kSignals) + kPolicies);
  AlgebraCompileResult refused = compileAlgebra(ungrouped.policies[0], ungrouped);
  bool pp801 = false;
  for (const auto& d : refused.diagnostics) pp801 |= d.code == "PP801";

  // Same pair inside a softmax group: certifies and compiles.
  Program grouped = mustParse(std::string(kSignals) + R"(
SIGNAL_GROUP screens { semantics: softmax_exclusive, members: [det, filter], default: det }
)" + kPolicies);
  AlgebraCompileResult sec = compileAlgebra(grouped.policies[0], grouped);
  bool group_certified =
      sec.ok() && !sec.certificates.empty() &&
      sec.certificates[0].method == DisjointnessCertificate::Method::GroupExclusive;

  AlgebraCompileResult full = compileAlgebra(grouped.policies[2], grouped);
  bool ordered = full.ok() && full.routes.size() == 4;
  if (ordered) {
    int min_security = std::min(full.routes[0].priority, full.routes[1].priority);
    int max_domain = std::max(full.routes[2].priority, full.routes[3].priority);
    ordered = full.routes[0].action.model == "fast-reject" && min_security > max_domain;
  }
  report(
      "exclusive union refuses ungrouped classifier leaves, certifies grouped "
      "ones, and sequences security routes above domain routes",
      !refused.ok() && pp801 && group_certified && ordered);
}

// ---------------------------------------------------------------------------
// 10. Corpus round-trips.
// ---------------------------------------------------------------------------
void checkCorpusRoundTrips(const std::filesystem::path& corpus) {
  int files = 0;
  int failures = 0;
  std::string first_failure;
  for (const auto& entry : std::filesystem::directory_iterator(corpus)) {
    if (entry.path().extension() != ".srdsl") continue;
    ++files;
    std::string src = slurp(entry.path());
    ParseResult parsed = parse(src, entry.path().filename().string());
    bool ok = parsed.ok();
    if (ok) {
      CompileResult compiled = compileConfig(parsed.program);
      ok = compiled.ok;
      if (ok) {
        DecompileResult back = decompileConfig(compiled.doc);
        ok = back.ok && equivalent(back.program, parsed.program);
      }
      if (ok) {
        ParseResult reprinted = parse(print(parsed.program));
        ok = reprinted.ok() && equivalent(reprinted.program, parsed.program);
      }
    }
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = entry.path().filename().string();
    }
  }
  report("every sample config round-trips through JSON and pretty-printing",
         files >= 12 && failures == 0,
         std::to_string(files) + " files" +
             (first_failure.empty() ? "" : ", first failure: " + first_failure));
}

// ---------------------------------------------------------------------------
// 11. Simulation: grouped normalization eliminates within-group co-fires.
// ---------------------------------------------------------------------------
void checkSimulationExclusivity() {
  Program p = mustParse(R"(
SIGNAL embedding billing_intent { candidates: ["charge invoice payment"], threshold: 0.3 }
SIGNAL embedding refund_intent { candidates: ["charge refund return"], threshold: 0.3 }
SIGNAL_GROUP intents {
  semantics: softmax_exclusive
  temperature: 0.1
  threshold: 0.55
  members: [billing_intent, refund_intent]
  default: billing_intent
}
ROUTE billing { PRIORITY 2 WHEN embedding("billing_intent") MODEL "m1" }
ROUTE refunds { PRIORITY 1 WHEN embedding("refund_intent") MODEL "m2" }
)");
  std::vector<std::string> trace;
  trace.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    // Every query shares the "charge" token with both intent centroids.
    trace.push_back("charge item" + std::to_string(i % 40));
  }
  Engine engine(p);
  SimulationSummary voronoi = engine.simulate(trace, SimMode::Voronoi);
  SimulationSummary independent = engine.simulate(trace, SimMode::Independent);
  double grouped_rate = voronoi.signal_co_fire_rate.at({"billing_intent", "refund_intent"});
  double flat_rate = independent.signal_co_fire_rate.at({"billing_intent", "refund_intent"});
  char detail[96];
  std::snprintf(detail, sizeof(detail), "voronoi=%.4f independent=%.4f", grouped_rate,
                flat_rate);
  report("1000-query simulation: grouped co-fire rate is exactly 0, independent is positive",
         grouped_rate == 0.0 && flat_rate > 0.0, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path corpus = argc > 1 ? argv[1] : "corpus";
  if (!std::filesystem::is_directory(corpus)) {
    std::fprintf(stderr, "usage: %s <corpus-dir>\n", argv[0]);
    return 2;
  }
  checkGroupExclusivityRandomized();
  checkWorkedSoftmaxExample();
  checkPriorityVsGroupRouting();
  checkCapIntersectionOracle();
  checkStructuralConflictOracle();
  checkCategoryOverlapWarning(corpus);
  checkGuardFix();
  checkDecisionTree(corpus);
  checkPolicyAlgebraCertification();
  checkCorpusRoundTrips(corpus);
  checkSimulationExclusivity();
  return g_failures == 0 ? 0 : 1;
}
