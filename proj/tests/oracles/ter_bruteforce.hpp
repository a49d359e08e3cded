// tests/oracles/ter_bruteforce.hpp

// Copyright 2026  The distill-nmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exhaustive TER oracle: min over every sequence of at most `depth`
// unconstrained block moves of (Levenshtein distance + number of moves).

#ifndef DISTILL_TESTS_TER_BRUTEFORCE_HPP_
#define DISTILL_TESTS_TER_BRUTEFORCE_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "distill/textcore.hpp"

namespace distill::testing {

// Plain O(nm) DP, kept separate from the library's implementation.
inline std::int64_t levenshtein(const Sentence& a, const Sentence& b) {
  std::vector<std::int64_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Every sequence reachable by moving one contiguous span elsewhere.
inline std::vector<Sentence> all_block_moves(const Sentence& s) {
  std::vector<Sentence> out;
  const std::size_t n = s.size();
  for (std::size_t start = 0; start < n; ++start)
    for (std::size_t len = 1; start + len <= n; ++len) {
      Sentence rest(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(start));
      rest.insert(rest.end(), s.begin() + static_cast<std::ptrdiff_t>(start + len), s.end());
      for (std::size_t dest = 0; dest <= rest.size(); ++dest) {
        if (dest == start) continue;
        Sentence moved(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(dest));
        moved.insert(moved.end(), s.begin() + static_cast<std::ptrdiff_t>(start),
                     s.begin() + static_cast<std::ptrdiff_t>(start + len));
        moved.insert(moved.end(), rest.begin() + static_cast<std::ptrdiff_t>(dest), rest.end());
        out.push_back(std::move(moved));
      }
    }
  return out;
}

inline std::int64_t min_ter_edits(const Sentence& hyp, const Sentence& ref, int depth) {
  std::int64_t best = levenshtein(hyp, ref);
  if (depth == 0) return best;
  for (const Sentence& next : all_block_moves(hyp))
    best = std::min(best, 1 + min_ter_edits(next, ref, depth - 1));
  return best;
}

// All sequences over ids {first, first+1, ..., first+alphabet-1} of length <= max_len.
inline std::vector<Sentence> all_sentences(int alphabet, int max_len, TokenId first) {
  std::vector<Sentence> out{{}};
  std::vector<Sentence> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Sentence> next;
    for (const auto& s : frontier)
      for (int a = 0; a < alphabet; ++a) {
        Sentence t = s;
        t.push_back(first + a);
        next.push_back(t);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace distill::testing

#endif  // DISTILL_TESTS_TER_BRUTEFORCE_HPP_
