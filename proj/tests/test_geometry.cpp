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

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <random>

#include "probpol/geometry.hpp"

using namespace probpol;

TEST_CASE("pseudoEmbed is deterministic, unit-norm, and token-based") {
  Vec a = pseudoEmbed("Hello, World!", 64);
  Vec b = pseudoEmbed("hello world", 64);
  CHECK(norm(a) == doctest::Approx(1.0));
  CHECK(a == b);  // case and punctuation are normalized away
  CHECK(pseudoEmbed("hello world", 64) != pseudoEmbed("world hello order", 64));

  // No tokens: first basis vector.
  Vec empty = pseudoEmbed("  ,.! ", 16);
  CHECK(empty[0] == doctest::Approx(1.0));
  CHECK(norm(empty) == doctest::Approx(1.0));
}

TEST_CASE("distinct tokens give near-orthogonal directions in high dim") {
  Vec a = pseudoEmbed("alpha", 256);
  Vec b = pseudoEmbed("omega", 256);
  CHECK(std::abs(cosine(a, b)) < 0.3);
}

TEST_CASE("centroid averages and normalizes; degenerate mean is nullopt") {
  auto c = centroid({"alpha", "beta"}, 64);
  REQUIRE(c.has_value());
  CHECK(norm(*c) == doctest::Approx(1.0));
  // Closer to its members than to an unrelated token.
  CHECK(cosine(*c, pseudoEmbed("alpha", 64)) > cosine(*c, pseudoEmbed("gamma", 64)));
  CHECK_FALSE(centroid({}, 64).has_value());
}

TEST_CASE("voronoiScores is a softmax over sims/temperature") {
  std::vector<double> sims{0.52, 0.89, 0.31};
  std::vector<double> s = voronoiScores(sims, 0.1);
  REQUIRE(s.size() == 3);
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0));
  CHECK(s[1] > s[0]);
  CHECK(s[0] > s[2]);
  // Direct arithmetic: softmax([5.2, 8.9, 3.1]).
  CHECK(s[0] == doctest::Approx(0.0241).epsilon(0.05));
  CHECK(s[1] == doctest::Approx(0.9730).epsilon(0.01));
  CHECK(s[2] == doctest::Approx(0.0029).epsilon(0.10));

  // High temperature flattens toward uniform.
  std::vector<double> flat = voronoiScores(sims, 1000.0);
  for (double v : flat) CHECK(v == doctest::Approx(1.0 / 3).epsilon(0.01));

  // Near-zero temperature clamps instead of dividing by zero.
  std::vector<double> sharp = voronoiScores(sims, 0.0);
  CHECK(sharp[1] == doctest::Approx(1.0));
}

TEST_CASE("groupFire with threshold > 1/k fires at most one member") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> sim(-1.0, 1.0);
  std::uniform_real_distribution<double> temp(0.01, 1.0);
  std::uniform_int_distribution<int> kd(2, 6);
  for (int i = 0; i < 2000; ++i) {
    int k = kd(rng);
    std::vector<double> sims(k);
    for (double& v : sims) v = sim(rng);
    auto fired = groupFire(voronoiScores(sims, temp(rng)), 1.0 / k + 0.01);
    CHECK(fired.size() <= 1);
  }
}

TEST_CASE("groupFire threshold is strict") {
  // Uniform scores at exactly 1/k never clear a threshold of 1/k.
  std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  CHECK(groupFire(uniform, 0.25).empty());
  CHECK(groupFire(uniform, 0.2499).size() == 4);
}

TEST_CASE("capsIntersect matches the angular tangency rule") {
  Vec e1{1, 0, 0}, e2{0, 1, 0};
  // 90-degree separation; thresholds cos(60) so reach is 60+60 > 90.
  CHECK(capsIntersect({e1, 0.5}, {e2, 0.5}).intersect);
  // Reach 30+30 < 90: disjoint.
  double c30 = std::cos(M_PI / 6);
  CHECK_FALSE(capsIntersect({e1, c30}, {e2, c30}).intersect);
  // Tangency 45+45 == 90: touches, margin ~0.
  double c45 = std::cos(M_PI / 4);
  CapRelation tangent = capsIntersect({e1, c45}, {e2, c45});
  CHECK(tangent.intersect);
  CHECK(tangent.margin_radians == doctest::Approx(0.0).epsilon(1e-9));
  // Same centroid always intersects.
  CHECK(capsIntersect({e1, 0.99}, {e1, 0.99}).intersect);
}

TEST_CASE("capsIntersect agrees with Monte-Carlo membership sampling") {
  // Smaller replica of the acceptance-scale experiment.
  std::mt19937 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> thr(0.1, 0.9);
  const int dim = 8;
  auto random_unit = [&] {
    Vec v(dim);
    for (double& x : v) x = gauss(rng);
    normalize(v);
    return v;
  };
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    SphericalCap a{random_unit(), thr(rng)};
    SphericalCap b{random_unit(), thr(rng)};
    CapRelation rel = capsIntersect(a, b);
    if (rel.margin_radians < 2.0 * M_PI / 180.0) continue;  // near-tangent: skip
    bool sampled = false;
    for (int s = 0; s < 20000 && !sampled; ++s) {
      Vec p = random_unit();
      sampled = dot(p, a.centroid) >= a.threshold && dot(p, b.centroid) >= b.threshold;
    }
    if (!rel.intersect) {
      CHECK_FALSE(sampled);
      ++checked;
    }
    // Positive verdicts may describe tiny lenses the sampler misses, so only
    // clear margins are asserted both ways.
    if (rel.intersect && rel.margin_radians > 0.5) {
      CHECK(sampled);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("centroidSeparationReport lists near-parallel pairs, descending") {
  Vec a{1, 0, 0};
  Vec b{0.999, 0.0447, 0};
  normalize(b);
  Vec c{0, 1, 0};
  auto report = centroidSeparationReport({a, b, c}, 0.95);
  REQUIRE(report.size() == 1);
  CHECK(report[0].i == 0);
  CHECK(report[0].j == 1);
  CHECK(report[0].cosine > 0.99);
}

TEST_CASE("EmbeddingProvider overrides and vector tables") {
  EmbeddingProvider provider(3);
  Vec fallback = provider.embed("token");
  CHECK(fallback == pseudoEmbed("token", 3));

  provider.loadVectorTable(R"({"token": [3.0, 0.0, 4.0]})");
  Vec loaded = provider.embed("token");
  CHECK(loaded[0] == doctest::Approx(0.6));  // normalized on load
  CHECK(loaded[2] == doctest::Approx(0.8));

  CHECK_THROWS_AS(provider.loadVectorTable("not json"), std::runtime_error);
  CHECK_THROWS_AS(provider.loadVectorTable(R"({"x": [1.0]})"), std::runtime_error);
}
