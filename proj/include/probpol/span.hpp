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

#ifndef PROBPOL_SPAN_HPP_
#define PROBPOL_SPAN_HPP_

#include <cstddef>
#include <string>

namespace probpol {

// Source position carrier for diagnostics. Line and column are 1-based.
struct Span {
  std::string file;
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool contains(const Span& other) const {
    return other.offset >= offset && other.offset + other.length <= offset + length;
  }
};

}  // namespace probpol

#endif  // PROBPOL_SPAN_HPP_
