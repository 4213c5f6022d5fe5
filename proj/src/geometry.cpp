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

#include "probpol/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace probpol {
namespace {

constexpr double kMinTemperature = 1e-6;
constexpr double kZeroNorm = 1e-12;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Maps a u64 draw to [-1, 1).
double toUnitInterval(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

std::vector<std::string> tokenize(std::string_view text) {
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

Vec basisVector(int dim) {
  Vec e(static_cast<std::size_t>(dim), 0.0);
  e[0] = 1.0;
  return e;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool normalize(Vec& v) {
  double n = norm(v);
  if (n < kZeroNorm) return false;
  for (double& x : v) x /= n;
  return true;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = norm(a), nb = norm(b);
  if (na < kZeroNorm || nb < kZeroNorm) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Vec pseudoEmbed(std::string_view text, int dim) {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) return basisVector(dim);

  Vec sum(static_cast<std::size_t>(dim), 0.0);
  for (const auto& token : tokens) {
    SplitMix64 rng{fnv1a64(token)};
    for (int i = 0; i < dim; ++i) sum[static_cast<std::size_t>(i)] += toUnitInterval(rng.next());
  }
  if (!normalize(sum)) return basisVector(dim);
  return sum;
}

std::optional<Vec> centroid(const std::vector<std::string>& candidates, int dim) {
  if (candidates.empty()) return std::nullopt;
  Vec mean(static_cast<std::size_t>(dim), 0.0);
  for (const auto& candidate : candidates) {
    Vec e = pseudoEmbed(candidate, dim);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += e[i];
  }
  if (!normalize(mean)) return std::nullopt;
  return mean;
}

CapRelation capsIntersect(const SphericalCap& a, const SphericalCap& b) {
  double separation = std::acos(cosine(a.centroid, b.centroid));
  double reach = std::acos(std::clamp(a.threshold, -1.0, 1.0)) +
                 std::acos(std::clamp(b.threshold, -1.0, 1.0));
  CapRelation rel;
  rel.margin_radians = std::abs(separation - reach);
  rel.intersect = separation <= reach;  // tangency counts as intersect
  return rel;
}

std::vector<double> voronoiScores(std::span<const double> sims, double temperature) {
  double tau = std::max(temperature, kMinTemperature);
  double peak = *std::max_element(sims.begin(), sims.end());
  std::vector<double> out(sims.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    out[i] = std::exp((sims[i] - peak) / tau);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

std::vector<int> groupFire(std::span<const double> scores, double group_threshold) {
  std::vector<int> fired;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > group_threshold) fired.push_back(static_cast<int>(i));
  }
  // The exclusivity guarantee is only promised for thresholds above 1/k; in
  // that regime the winner is unique, so resolve near-boundary ties to the
  // argmax rather than letting two scores straddle the threshold.
  if (fired.size() > 1 && group_threshold > 1.0 / static_cast<double>(scores.size())) {
    int best = fired[0];
    for (int idx : fired) {
      if (scores[idx] > scores[best]) best = idx;
    }
    fired.assign(1, best);
  }
  return fired;
}

std::vector<CentroidPair> centroidSeparationReport(const std::vector<Vec>& centroids,
                                                   double warn_cosine) {
  std::vector<CentroidPair> pairs;
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    for (std::size_t j = i + 1; j < centroids.size(); ++j) {
      double c = cosine(centroids[i], centroids[j]);
      if (c >= warn_cosine) {
        pairs.push_back({static_cast<int>(i), static_cast<int>(j), c});
      }
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const CentroidPair& a, const CentroidPair& b) {
                     return a.cosine > b.cosine;
                   });
  return pairs;
}

Vec EmbeddingProvider::embed(std::string_view text) const {
  auto it = overrides_.find(text);
  if (it != overrides_.end()) return it->second;
  return pseudoEmbed(text, dim_);
}

void EmbeddingProvider::addOverride(const std::string& text, Vec v) {
  if (static_cast<int>(v.size()) != dim_) {
    throw std::runtime_error("vector table entry for \"" + text + "\" has dimension " +
                             std::to_string(v.size()) + ", expected " + std::to_string(dim_));
  }
  if (!normalize(v)) {
    throw std::runtime_error("vector table entry for \"" + text + "\" has zero norm");
  }
  overrides_[text] = std::move(v);
}

void EmbeddingProvider::loadVectorTable(const std::string& json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error("vector table must be a JSON object of string -> number array");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_array()) {
      throw std::runtime_error("vector table entry for \"" + key + "\" is not an array");
    }
    Vec v;
    v.reserve(value.size());
    for (const auto& x : value) {
      if (!x.is_number()) {
        throw std::runtime_error("vector table entry for \"" + key +
                                 "\" contains a non-numeric component");
      }
      v.push_back(x.get<double>());
    }
    addOverride(key, std::move(v));
  }
}

}  // namespace probpol
