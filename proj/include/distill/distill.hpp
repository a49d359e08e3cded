// include/distill/distill.hpp

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


#ifndef DISTILL_DISTILL_HPP_
#define DISTILL_DISTILL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "distill/checkpoint.hpp"
#include "distill/decode.hpp"
#include "distill/metrics.hpp"
#include "distill/model.hpp"
#include "distill/textcore.hpp"
#include "distill/train.hpp"

namespace distill {

// ---- teachers and forward translation ----

enum class TeacherKind { kSingle, kEnsemble, kOracleBleu };

/// kOracleBleu decodes with the member ensemble and picks, from the final
/// candidates, the one closest to the training reference.
struct TeacherSpec {
  TeacherKind kind = TeacherKind::kSingle;
  std::vector<std::shared_ptr<const ModelParams>> members;

  Scorer scorer() const;
  void validate() const;
};

struct ForwardTranslation {
  ParallelCorpus synthetic;           // same pair ids and sources as the input
  std::map<std::int64_t, double> ter;  // teacher output vs reference, by pair id
  std::vector<Hypothesis> picks;       // aligned with synthetic.pairs
};

/// Translates every source with the teacher (beam search + selection) and
/// scores each output against its reference with TER. An empty output is
/// kept as an empty target.
ForwardTranslation forward_translate_training_data(const TeacherSpec& teacher,
                                                   const ParallelCorpus& corpus,
                                                   const DecodeConfig& decode, int workers = 1);

// ---- recipes and filtering ----

enum class DataRecipe { kForwardOnly, kForwardPlusOriginal, kReferenceOnly };

/// "forward", "forward+original", "reference".
std::string recipe_name(DataRecipe recipe);
DataRecipe parse_recipe(const std::string& name);

struct FilterSpec {
  bool enabled = false;
  double ter_threshold = 0.8;  // keep TER <= threshold
  void validate() const;
};

struct FilterStats {
  std::int64_t total = 0;    // pair ids considered
  std::int64_t kept = 0;
  std::int64_t dropped = 0;
  double dropped_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(total);
  }
};

struct TrainingSet {
  ParallelCorpus corpus;
  FilterStats stats;
  std::vector<std::int64_t> kept_ids;  // original pair ids that survived
};

/// Filters by pair id, then assembles the recipe. ForwardPlusOriginal emits
/// original and synthetic copies of each kept pair back to back, renumbered
/// 0..n-1. `synthetic` may be empty for kReferenceOnly; `ter` may be empty
/// when filtering is off. Throws DataError on a missing TER score or
/// misaligned corpora.
TrainingSet build_training_set(const ParallelCorpus& original, const ParallelCorpus& synthetic,
                               DataRecipe recipe, const FilterSpec& filter,
                               const std::map<std::int64_t, double>& ter);

// ---- evaluation and plans ----

struct EvalScores {
  double bleu = 0.0;  // corpus BLEU in [0, 1]
  double ter = 0.0;   // corpus TER
};

/// Corpus BLEU and TER of beam decodes against the targets. With
/// `subword_vocab` set, hypotheses and references are mapped back to
/// strings and their "@@" splits undone before scoring.
EvalScores evaluate(const Scorer& scorer, const ParallelCorpus& eval_set, int beam_size,
                    int workers = 1, const Vocab* subword_vocab = nullptr);

/// Interns whitespace tokens into ids so text can be scored with the id-level
/// metrics. Ids are dense in first-seen order, starting after the reserved ids.
class TokenInterner {
 public:
  Sentence operator()(const TokenStrings& tokens);

 private:
  std::map<std::string, TokenId> ids_;
};

enum class InitMode { kScratch, kContinueFromBaseline };

struct DistillPlan {
  std::string name;
  std::optional<TeacherSpec> teacher;  // required unless recipe is kReferenceOnly without filter
  DataRecipe recipe = DataRecipe::kForwardPlusOriginal;
  FilterSpec filter;
  ModelDims student_dims;
  InitMode init = InitMode::kScratch;
  std::shared_ptr<const ModelParams> baseline;  // for kContinueFromBaseline
  TrainConfig train;
  int beam_size = 5;
  int workers = 1;
  std::shared_ptr<const Vocab> subword_vocab;  // score on words when set

  void validate() const;
};

/// One line of a results table; scores are in points (100 x score).
struct ReportRow {
  std::string plan;
  std::string teacher;
  std::string recipe;
  std::string filter;
  std::string init;
  std::string dims;  // "hlayer,wemb"
  std::int64_t train_size = 0;
  int epochs_run = 0;
  double val_bleu = 0.0;
  double val_ter = 0.0;
  double test_bleu = 0.0;
  double test_ter = 0.0;
  bool operator==(const ReportRow&) const = default;
};

struct PlanResult {
  ReportRow row;
  TrainingSet training_set;
  TrainResult training;
};

/// forward translation (if the recipe or the filter needs one) ->
/// build_training_set -> train -> evaluate. `forward`, when given, is used
/// instead of translating again.
PlanResult run_plan(const DistillPlan& plan, const ParallelCorpus& train_set,
                    const ParallelCorpus& validation, const ParallelCorpus& test,
                    const ForwardTranslation* forward = nullptr);

/// Points with two decimals, e.g. 0.31234 -> 31.23.
double to_points(double score);

std::string teacher_label(const std::optional<TeacherSpec>& teacher);

/// TSV with a header line; one line per row.
std::string render_report_tsv(const std::vector<ReportRow>& rows);
/// Space-aligned rendering of the same table.
std::string render_report_text(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_tsv(const std::string& tsv);

// ---- toy data ----

struct ToyCorpus {
  TextCorpus corpus;
  std::vector<bool> noisy;  // aligned with corpus
};

inline constexpr int kToyAlphabet = 10;

/// Source: 2..8 symbols "s0".."s9". Target: each symbol mapped to its
/// "t" counterpart, then adjacent pairs at even positions swapped. With
/// probability noise_rate the target is replaced by an independent random
/// target (labeled noisy). Pair ids are 0..size-1.
ToyCorpus gen_toy_corpus(std::uint64_t seed, std::size_t size, double noise_rate);

/// The clean target for a toy source sentence.
TokenStrings toy_reference(const TokenStrings& source);

}  // namespace distill

#endif  // DISTILL_DISTILL_HPP_
