// src/metrics.cpp

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

#include "distill/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "distill/errors.hpp"

namespace distill {

NgramCounts ngram_counts(const Sentence& sentence, int n) {
  NgramCounts counts;
  if (n < 1) return counts;
  const auto len = static_cast<std::ptrdiff_t>(sentence.size());
  for (std::ptrdiff_t i = 0; i + n <= len; ++i)
    ++counts[Ngram(sentence.begin() + i, sentence.begin() + i + n)];
  return counts;
}

namespace {

std::int64_t clipped_matches(const NgramCounts& hyp, const NgramCounts& ref) {
  std::int64_t m = 0;
  for (const auto& [gram, c] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) m += std::min(c, it->second);
  }
  return m;
}

double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

}  // namespace

SentenceBleuBreakdown sentence_bleu(const Sentence& hyp, const Sentence& ref) {
  if (ref.empty()) throw DataError("sentence_bleu: empty reference");
  SentenceBleuBreakdown b;
  for (int n = 1; n <= kBleuOrder; ++n) {
    const auto h = ngram_counts(hyp, n);
    b.matched[n - 1] = clipped_matches(h, ngram_counts(ref, n));
    b.total[n - 1] = std::max<std::int64_t>(static_cast<std::int64_t>(hyp.size()) - n + 1, 0);
  }
  if (hyp.empty()) {
    b.bp = 0.0;
    b.score = 0.0;
    return b;
  }
  b.bp = brevity_penalty(static_cast<std::int64_t>(hyp.size()),
                         static_cast<std::int64_t>(ref.size()));
  double log_prec = 0.0;
  for (int n = 0; n < kBleuOrder; ++n)
    log_prec += std::log(static_cast<double>(b.matched[n] + 1) /
                         static_cast<double>(b.total[n] + 1));
  b.score = b.bp * std::exp(log_prec / kBleuOrder);
  return b;
}

void CorpusBleuStats::add(const Sentence& hyp, const Sentence& ref) {
  for (int n = 1; n <= kBleuOrder; ++n) {
    matched[n - 1] += clipped_matches(ngram_counts(hyp, n), ngram_counts(ref, n));
    total[n - 1] += std::max<std::int64_t>(static_cast<std::int64_t>(hyp.size()) - n + 1, 0);
  }
  hyp_len += static_cast<std::int64_t>(hyp.size());
  ref_len += static_cast<std::int64_t>(ref.size());
}

void CorpusBleuStats::finalize() {
  score = 0.0;
  bp = hyp_len == 0 ? 0.0 : brevity_penalty(hyp_len, ref_len);
  if (hyp_len == 0) return;
  double log_prec = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (matched[n] == 0) return;
    log_prec += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  score = bp * std::exp(log_prec / kBleuOrder);
}

CorpusBleuStats corpus_bleu(const std::vector<Sentence>& hyps,
                            const std::vector<Sentence>& refs) {
  if (hyps.size() != refs.size())
    throw DataError("corpus_bleu: " + std::to_string(hyps.size()) + " hypotheses vs " +
                    std::to_string(refs.size()) + " references");
  CorpusBleuStats stats;
  for (std::size_t i = 0; i < hyps.size(); ++i) stats.add(hyps[i], refs[i]);
  if (stats.ref_len == 0) throw DataError("corpus_bleu: all references are empty");
  stats.finalize();
  return stats;
}

std::int64_t edit_distance(const Sentence& a, const Sentence& b) {
  std::vector<std::int64_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::int64_t diag = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct Alignment {
  std::int64_t cost = 0;
  std::vector<EditOp> ops;  // in hypothesis order
};

// Delete removes a hypothesis word, insert adds a reference word.
Alignment align(const Sentence& hyp, const Sentence& ref) {
  const std::size_t n = hyp.size(), m = ref.size();
  std::vector<std::int64_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::int64_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});
  Alignment a;
  a.cost = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1)) {
      a.ops.push_back(hyp[i - 1] == ref[j - 1] ? EditOp::kMatch : EditOp::kSubstitute);
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      a.ops.push_back(EditOp::kDelete);
      --i;
    } else {
      a.ops.push_back(EditOp::kInsert);
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

bool occurs_in(const Sentence& ref, Sentence::const_iterator first,
               Sentence::const_iterator last) {
  return std::search(ref.begin(), ref.end(), first, last) != ref.end();
}

}  // namespace

Sentence apply_shift(const Sentence& hyp, const TerShift& s) {
  Sentence rest;
  rest.reserve(hyp.size());
  rest.insert(rest.end(), hyp.begin(), hyp.begin() + s.start);
  rest.insert(rest.end(), hyp.begin() + s.start + s.length, hyp.end());
  Sentence out(rest.begin(), rest.begin() + s.destination);
  out.insert(out.end(), hyp.begin() + s.start, hyp.begin() + s.start + s.length);
  out.insert(out.end(), rest.begin() + s.destination, rest.end());
  return out;
}

TerResult ter(const Sentence& hyp, const Sentence& ref, const TerOptions& options) {
  if (ref.empty()) throw DataError("ter: empty reference");
  TerResult result;
  result.ref_length = static_cast<std::int64_t>(ref.size());
  Sentence cur = hyp;

  for (;;) {
    const Alignment al = align(cur, ref);
    if (al.cost == 0) break;
    const auto n = static_cast<std::int64_t>(cur.size());

    // matched[i]: hypothesis word i is a match in the current alignment.
    // near_error[g]: gap g (before word g) touches an edit.
    std::vector<bool> matched(static_cast<std::size_t>(n), false);
    std::vector<bool> near_error(static_cast<std::size_t>(n + 1), false);
    std::int64_t hpos = 0;
    for (EditOp op : al.ops) {
      if (op == EditOp::kInsert) {
        near_error[static_cast<std::size_t>(hpos)] = true;
        continue;
      }
      if (op == EditOp::kMatch) {
        matched[static_cast<std::size_t>(hpos)] = true;
      } else {
        near_error[static_cast<std::size_t>(hpos)] = true;
        near_error[static_cast<std::size_t>(hpos + 1)] = true;
      }
      ++hpos;
    }

    std::int64_t best_gain = 0;
    TerShift best;
    for (std::int64_t start = 0; start < n; ++start) {
      const std::int64_t max_len = std::min<std::int64_t>(options.max_shift_length, n - start);
      for (std::int64_t len = 1; len <= max_len; ++len) {
        const auto first = cur.begin() + start;
        if (!occurs_in(ref, first, first + len)) break;  // longer spans cannot occur either
        bool misaligned = false;
        for (std::int64_t k = start; k < start + len; ++k)
          misaligned = misaligned || !matched[static_cast<std::size_t>(k)];
        if (!misaligned) continue;
        for (std::int64_t dest = 0; dest <= n - len; ++dest) {
          if (dest == start) continue;
          const std::int64_t gap = dest < start ? dest : dest + len;
          if (!near_error[static_cast<std::size_t>(gap)]) continue;
          const TerShift cand{start, len, dest};
          const std::int64_t gain = al.cost - edit_distance(apply_shift(cur, cand), ref);
          if (gain > best_gain) {
            best_gain = gain;
            best = cand;
          }
        }
      }
    }
    if (best_gain <= 0) break;
    cur = apply_shift(cur, best);
    result.shift_trace.push_back(best);
  }

  const Alignment al = align(cur, ref);
  for (EditOp op : al.ops) {
    switch (op) {
      case EditOp::kSubstitute: ++result.substitutions; break;
      case EditOp::kDelete: ++result.deletions; break;
      case EditOp::kInsert: ++result.insertions; break;
      case EditOp::kMatch: break;
    }
  }
  result.shifts = static_cast<std::int64_t>(result.shift_trace.size());
  result.shifted_hyp = std::move(cur);
  result.score = static_cast<double>(result.edits()) / static_cast<double>(result.ref_length);
  return result;
}

CorpusTerStats corpus_ter(const std::vector<Sentence>& hyps,
                          const std::vector<Sentence>& refs) {
  if (hyps.size() != refs.size())
    throw DataError("corpus_ter: " + std::to_string(hyps.size()) + " hypotheses vs " +
                    std::to_string(refs.size()) + " references");
  CorpusTerStats stats;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const TerResult r = ter(hyps[i], refs[i]);
    stats.edits += r.edits();
    stats.ref_length += r.ref_length;
  }
  return stats;
}

}  // namespace distill
