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

#ifndef PROBPOL_GEOMETRY_HPP_
#define PROBPOL_GEOMETRY_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace probpol {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
// Returns false when the vector has (near-)zero norm.
bool normalize(Vec& v);
double cosine(std::span<const double> a, std::span<const double> b);

// Deterministic pseudo-embedding: lowercase, split on non-alphanumeric runs,
// seed splitmix64 with the FNV-1a 64-bit hash of each token, draw `dim`
// values in [-1,1), sum token vectors, L2-normalize. No tokens => e_1.
Vec pseudoEmbed(std::string_view text, int dim);

// L2-normalized mean of pseudoEmbed over candidates. nullopt when the mean
// degenerates to (near-)zero norm.
std::optional<Vec> centroid(const std::vector<std::string>& candidates, int dim);

struct SphericalCap {
  Vec centroid;      // unit vector
  double threshold;  // cosine threshold in (-1, 1); activation is cos >= threshold
};

struct CapRelation {
  bool intersect = false;
  double margin_radians = 0.0;  // |angular separation - threshold-angle sum|
};

// Caps intersect iff angle(centroids) < arccos(tau_a) + arccos(tau_b).
// Tangency reports intersect with margin 0.
CapRelation capsIntersect(const SphericalCap& a, const SphericalCap& b);

// softmax(sims / temperature) with max-subtraction. Temperatures below 1e-6
// clamp to 1e-6.
std::vector<double> voronoiScores(std::span<const double> sims, double temperature);

// Indices with score strictly above the group threshold. With
// threshold > 1/k at most one index results (scores sum to 1).
std::vector<int> groupFire(std::span<const double> scores, double group_threshold);

struct CentroidPair {
  int i = 0;
  int j = 0;
  double cosine = 0.0;
};

// All pairs with cosine >= warn_cosine, descending by cosine.
std::vector<CentroidPair> centroidSeparationReport(const std::vector<Vec>& centroids,
                                                   double warn_cosine);

// Embedding source: pseudoEmbed with optional exact-match overrides loaded
// from a JSON vector table {"text": [d reals], ...}. Overrides are
// L2-normalized on load.
class EmbeddingProvider {
 public:
  explicit EmbeddingProvider(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  Vec embed(std::string_view text) const;

  // Throws std::runtime_error on malformed JSON or wrong dimensions.
  void loadVectorTable(const std::string& json_text);
  void addOverride(const std::string& text, Vec v);

 private:
  int dim_;
  std::map<std::string, Vec, std::less<>> overrides_;
};

}  // namespace probpol

#endif  // PROBPOL_GEOMETRY_HPP_
