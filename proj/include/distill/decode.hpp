// include/distill/decode.hpp

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

#ifndef DISTILL_DECODE_HPP_
#define DISTILL_DECODE_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "distill/model.hpp"
#include "distill/textcore.hpp"

namespace distill {

struct Hypothesis {
  Sentence tokens;  // without <s> and </s>
  double logprob = 0.0;
  bool finished = false;

  bool operator==(const Hypothesis&) const = default;
};

enum class SelectionKind { kMaxLogProb, kOracleBleu };

struct Selection {
  SelectionKind kind = SelectionKind::kMaxLogProb;
  Sentence reference;  // used by kOracleBleu
  bool length_normalize = false;  // kMaxLogProb only

  static Selection max_logprob() { return {}; }
  static Selection oracle_bleu(Sentence reference) {
    return {SelectionKind::kOracleBleu, std::move(reference), false};
  }
};

struct DecodeConfig {
  int beam_size = 5;
  /// Output length cap; 0 means max_len_factor * |source| + max_len_offset.
  int max_len = 0;
  double max_len_factor = 2.0;
  int max_len_offset = 5;
  Selection selection;

  int resolved_max_len(std::size_t source_len) const;
  void validate() const;
};

/// One model or an ensemble whose next-token distributions are averaged in
/// probability space. Members must have identical dims.
class Scorer {
 public:
  using ParamsPtr = std::shared_ptr<const ModelParams>;

  static Scorer single(ParamsPtr params);
  /// Throws ConfigError for an empty list or differing dims.
  static Scorer ensemble(std::vector<ParamsPtr> members);

  std::size_t num_members() const { return members_.size(); }
  const ModelDims& dims() const { return members_.front()->dims; }

  struct Context {
    std::vector<EncodedSource> encoded;
  };
  struct State {
    std::vector<Vector> member_states;
  };

  Context encode(const Sentence& source) const;
  State initial_state(const Context& ctx) const;
  /// Consumes prev_token; writes the successor state and the averaged
  /// next-token probabilities.
  void step(const Context& ctx, const State& state, TokenId prev_token, State& next,
            Vector& probs) const;

 private:
  explicit Scorer(std::vector<ParamsPtr> members) : members_(std::move(members)) {}
  std::vector<ParamsPtr> members_;
};

/// Distribution after consuming <s> + prefix.
Vector next_token_distribution(const Scorer& scorer, const Sentence& source,
                               const Sentence& prefix);

/// Left-to-right beam search. Returns up to beam_size finished candidates,
/// best log-probability first. Hypotheses never emit <pad> or <s>.
std::vector<Hypothesis> beam_search(const Scorer& scorer, const Sentence& source,
                                    const DecodeConfig& config);

/// Throws DataError for an empty candidate list or an oracle selection
/// without a reference.
Hypothesis select_final(const std::vector<Hypothesis>& candidates, const Selection& selection);

/// beam_search + select_final per sentence, in input order. With
/// kOracleBleu selection `refs` must align with `sources`; the reference in
/// config.selection is ignored in that case.
std::vector<Hypothesis> translate_corpus(const Scorer& scorer,
                                         const std::vector<Sentence>& sources,
                                         const DecodeConfig& config,
                                         const std::vector<Sentence>* refs = nullptr,
                                         int workers = 1);

/// Beam search only (no selection), in input order.
std::vector<std::vector<Hypothesis>> beam_search_corpus(const Scorer& scorer,
                                                        const std::vector<Sentence>& sources,
                                                        const DecodeConfig& config,
                                                        int workers = 1);

}  // namespace distill

#endif  // DISTILL_DECODE_HPP_
