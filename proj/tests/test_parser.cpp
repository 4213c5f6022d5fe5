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

#include <doctest.h>

#include "probpol/parser.hpp"
#include "probpol/printer.hpp"

using namespace probpol;

namespace {

Program mustParse(const std::string& src) {
  ParseResult r = parse(src);
  REQUIRE(r.ok());
  return r.program;
}

const char* kTwoRoutes = R"(
SIGNAL domain math {
  mmlu_categories: ["college_mathematics", "abstract_algebra"]
}
SIGNAL domain science {
  mmlu_categories: ["college_physics"]
}
ROUTE math_route {
  PRIORITY 200
  WHEN domain("math")
  MODEL "qwen2.5-math"
}
ROUTE science_route {
  PRIORITY 100
  WHEN domain("science") AND NOT domain("math")
  MODEL "qwen2.5-science"
}
)";

}  // namespace

TEST_CASE("two-route program parses into the expected shape") {
  Program p = mustParse(kTwoRoutes);
  REQUIRE(p.signals.size() == 2);
  CHECK(p.signals[0].name == "math");
  CHECK(p.signals[0].type == SignalType::Domain);
  auto cats = p.signals[0].config.at("mmlu_categories");
  REQUIRE(cats.kind == ConfigValue::Kind::List);
  CHECK(cats.list.size() == 2);
  CHECK(cats.list[0].str == "college_mathematics");

  REQUIRE(p.routes.size() == 2);
  CHECK(p.routes[0].priority == 200);
  CHECK(p.routes[0].condition.kind == Condition::Kind::Atom);
  CHECK(p.routes[0].action.kind == Action::Kind::Model);
  CHECK(p.routes[0].action.model == "qwen2.5-math");
  CHECK_FALSE(p.routes[0].tier.has_value());

  const Condition& guard = p.routes[1].condition;
  REQUIRE(guard.kind == Condition::Kind::And);
  CHECK(guard.children[0].signal_name == "science");
  CHECK(guard.children[1].kind == Condition::Kind::Not);
}

TEST_CASE("condition precedence: NOT > AND > OR, left associative") {
  Condition c;
  REQUIRE(parseConditionOnly(
              R"(domain("a") AND domain("b") OR NOT domain("c") AND domain("d"))", &c)
              .ok());
  // ((a AND b) OR ((NOT c) AND d))
  REQUIRE(c.kind == Condition::Kind::Or);
  CHECK(c.children[0].kind == Condition::Kind::And);
  CHECK(c.children[0].children[0].signal_name == "a");
  REQUIRE(c.children[1].kind == Condition::Kind::And);
  CHECK(c.children[1].children[0].kind == Condition::Kind::Not);
  CHECK(c.children[1].children[1].signal_name == "d");
}

TEST_CASE("parenthesized conditions override precedence") {
  Condition c;
  REQUIRE(parseConditionOnly(R"(domain("a") AND (domain("b") OR domain("c")))", &c).ok());
  REQUIRE(c.kind == Condition::Kind::And);
  CHECK(c.children[1].kind == Condition::Kind::Or);
}

TEST_CASE("string escapes: quote and backslash only") {
  Program p = mustParse(R"(
SIGNAL keyword quoted { terms: ["say \"hi\"", "back\\slash"] }
)");
  const auto& terms = p.signals[0].config.at("terms").list;
  CHECK(terms[0].str == "say \"hi\"");
  CHECK(terms[1].str == "back\\slash");

  ParseResult bad = parse(R"(SIGNAL keyword k { terms: ["\n"] })");
  CHECK_FALSE(bad.ok());
  CHECK(bad.diagnostics[0].code == "PP001");
}

TEST_CASE("comments and commas are interchangeable trivia") {
  Program p = mustParse(R"(
# leading comment
SIGNAL keyword k {
  terms: ["a", "b"],   # trailing comment
  weight: 2
}
)");
  CHECK(p.signals[0].config.at("weight").num == 2.0);
}

TEST_CASE("syntax errors surface as PP001 with a position") {
  for (const char* src : {
           "FROUTE x { }",
           "ROUTE x { WHEN domain(\"a\") MODEL \"m\" }",          // no PRIORITY
           "ROUTE x { PRIORITY 1 MODEL \"m\" }",                  // no WHEN
           "ROUTE x { PRIORITY 1 WHEN domain(\"a\") }",           // no action
           "ROUTE x { PRIORITY -2 WHEN domain(\"a\") BLOCK }",    // negative
           "SIGNAL telepathy t { }",                              // unknown type
           "SIGNAL_GROUP g { members: [a, b] }",                  // no semantics
           "SIGNAL_GROUP g { semantics: max_pool, members: [a] }",
           "TEST t { }",
           "DECISION_TREE d { }",
       }) {
    ParseResult r = parse(src);
    CAPTURE(src);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].code == "PP001");
    CHECK(r.diagnostics[0].span.line >= 1);
  }
}

TEST_CASE("signal group fields parse into typed fields") {
  Program p = mustParse(R"(
SIGNAL_GROUP taxonomy {
  semantics:   softmax_exclusive
  temperature: 0.25
  threshold:   0.4
  members:     [math, science]
  default:     science
}
)");
  REQUIRE(p.groups.size() == 1);
  const auto& g = p.groups[0];
  CHECK(g.temperature == doctest::Approx(0.25));
  CHECK(g.threshold == doctest::Approx(0.4));
  CHECK(g.members == std::vector<std::string>{"math", "science"});
  CHECK(g.default_member == "science");
}

TEST_CASE("decision tree and policy blocks parse") {
  Program p = mustParse(R"(
DECISION_TREE t {
  IF domain("math") { MODEL "m1" }
  ELSE IF domain("science") { BLOCK }
  ELSE { PLUGIN fallback { retries: 3 } }
}
POLICY sec {
  jailbreak("det") -> "fast-reject"
  (+) pii("filter") -> BLOCK
}
POLICY full {
  sec >> domain("math") -> "qwen-math"
}
)");
  REQUIRE(p.trees.size() == 1);
  CHECK(p.trees[0].branches.size() == 2);
  REQUIRE(p.trees[0].else_action.has_value());
  CHECK(p.trees[0].else_action->kind == Action::Kind::Plugin);

  REQUIRE(p.policies.size() == 2);
  CHECK(p.policies[0].expr.kind == AlgebraExpr::Kind::ExclusiveUnion);
  const auto& full = p.policies[1].expr;
  REQUIRE(full.kind == AlgebraExpr::Kind::Sequential);
  CHECK(full.children[0].kind == AlgebraExpr::Kind::Ref);
  CHECK(full.children[0].ref_name == "sec");
  CHECK(full.children[1].kind == AlgebraExpr::Kind::Leaf);
}

TEST_CASE("global, plugin, backend blocks parse and merge") {
  Program p = mustParse(R"(
GLOBAL { embedding_dim: 32 }
GLOBAL { warn_cosine: 0.9 }
PLUGIN rag { backend: "store", top_k: 5 }
BACKEND store { url: "http://localhost:1234" }
)");
  CHECK(p.embeddingDim() == 32);
  CHECK(p.warnCosine() == doctest::Approx(0.9));
  REQUIRE(p.named_configs.size() == 2);
  CHECK(p.named_configs[0].keyword == "PLUGIN");
  CHECK(p.named_configs[1].keyword == "BACKEND");
}

TEST_CASE("print -> parse is AST-stable") {
  for (const char* src : {
           kTwoRoutes,
           R"(SIGNAL keyword k { terms: ["x y", "z"] }
ROUTE r { PRIORITY 3 TIER 1 WHEN NOT keyword("k") BLOCK }
TEST t { "hello" -> r })",
           R"(SIGNAL embedding e { candidates: ["a"], threshold: 0.7 }
DECISION_TREE d {
  IF embedding("e") { MODEL "m" }
  ELSE { BLOCK }
})",
           R"(POLICY p { domain("a") -> "m1" (+) domain("b") -> "m2" >> domain("c") -> "m3" })",
       }) {
    CAPTURE(src);
    Program first = mustParse(src);
    std::string printed = print(first);
    CAPTURE(printed);
    Program second = mustParse(printed);
    CHECK(equivalent(first, second));
    // Printing is a fixed point after one round.
    CHECK(print(second) == printed);
  }
}

TEST_CASE("nested config maps survive a print round-trip") {
  Program p = mustParse(R"(
SIGNAL authz staff {
  subjects: [{ kind: "Group", name: "staff" }]
  role: "employee"
}
)");
  Program again = mustParse(print(p));
  CHECK(equivalent(p, again));
}
