// include/distill/metrics.hpp

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

#ifndef DISTILL_METRICS_HPP_
#define DISTILL_METRICS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "distill/textcore.hpp"

namespace distill {

inline constexpr int kBleuOrder = 4;

using Ngram = std::vector<TokenId>;
using NgramCounts = std::map<Ngram, std::int64_t>;

/// All contiguous n-grams of order n (n >= 1).
NgramCounts ngram_counts(const Sentence& sentence, int n);

struct SentenceBleuBreakdown {
  std::array<std::int64_t, kBleuOrder> matched{};  // clipped
  std::array<std::int64_t, kBleuOrder> total{};    // hypothesis n-grams
  double bp = 0.0;
  double score = 0.0;
};

/// Add-one smoothed sentence BLEU-4: every order contributes
/// (m+1)/(t+1), so orders longer than the hypothesis contribute 1.
/// An empty hypothesis scores 0. Throws DataError for an empty reference.
SentenceBleuBreakdown sentence_bleu(const Sentence& hyp, const Sentence& ref);

struct CorpusBleuStats {
  std::array<std::int64_t, kBleuOrder> matched{};
  std::array<std::int64_t, kBleuOrder> total{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  double bp = 0.0;
  double score = 0.0;

  /// Adds one segment's counts; call finalize() afterwards.
  void add(const Sentence& hyp, const Sentence& ref);
  void finalize();
};

/// Unsmoothed micro-averaged BLEU-4.
CorpusBleuStats corpus_bleu(const std::vector<Sentence>& hyps,
                            const std::vector<Sentence>& refs);

/// Word-level Levenshtein distance with unit costs.
std::int64_t edit_distance(const Sentence& a, const Sentence& b);

struct TerShift {
  std::int64_t start = 0;        // span start in the hypothesis before the move
  std::int64_t length = 0;
  std::int64_t destination = 0;  // insertion index after removing the span
  bool operator==(const TerShift&) const = default;
};

struct TerResult {
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t substitutions = 0;
  std::int64_t shifts = 0;
  std::int64_t ref_length = 0;
  double score = 0.0;
  std::vector<TerShift> shift_trace;
  Sentence shifted_hyp;  // hypothesis after all shifts were applied

  std::int64_t edits() const { return insertions + deletions + substitutions + shifts; }
};

struct TerOptions {
  int max_shift_length = 10;
};

/// Greedy TER: apply the block shift that lowers the edit distance the
/// most until none does, then count the remaining edits.
/// Throws DataError for an empty reference.
TerResult ter(const Sentence& hyp, const Sentence& ref, const TerOptions& options = {});

/// Moves hyp[start, start+length) so that it begins at `destination` in the
/// shortened sequence.
Sentence apply_shift(const Sentence& hyp, const TerShift& shift);

/// Corpus-level TER: total edits over total reference length.
struct CorpusTerStats {
  std::int64_t edits = 0;
  std::int64_t ref_length = 0;
  double score() const {
    return ref_length == 0 ? 0.0 : static_cast<double>(edits) / static_cast<double>(ref_length);
  }
};
CorpusTerStats corpus_ter(const std::vector<Sentence>& hyps,
                          const std::vector<Sentence>& refs);

}  // namespace distill

#endif  // DISTILL_METRICS_HPP_
