// src/distill.cpp

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


#include "distill/distill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "distill/bpe.hpp"
#include "distill/errors.hpp"
#include "distill/rng.hpp"

namespace distill {

Scorer TeacherSpec::scorer() const {
  validate();
  return members.size() == 1 ? Scorer::single(members.front()) : Scorer::ensemble(members);
}

void TeacherSpec::validate() const {
  if (members.empty()) throw ConfigError("teacher: no member models");
  for (const auto& m : members)
    if (!m) throw ConfigError("teacher: null member model");
  if (kind == TeacherKind::kSingle && members.size() != 1)
    throw ConfigError("teacher: a single teacher takes exactly one model, got " +
                      std::to_string(members.size()));
}

ForwardTranslation forward_translate_training_data(const TeacherSpec& teacher,
                                                   const ParallelCorpus& corpus,
                                                   const DecodeConfig& decode, int workers) {
  if (corpus.empty()) throw DataError("forward translation: empty corpus");
  check_unique_pair_ids(corpus);
  const Scorer scorer = teacher.scorer();
  std::vector<Sentence> sources, refs;
  sources.reserve(corpus.size());
  refs.reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    sources.push_back(p.source);
    refs.push_back(p.target);
  }
  DecodeConfig dc = decode;
  dc.selection = teacher.kind == TeacherKind::kOracleBleu ? Selection::oracle_bleu({})
                                                           : Selection::max_logprob();
  ForwardTranslation out;
  out.picks = translate_corpus(scorer, sources, dc, &refs, workers);
  out.synthetic.pairs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.pairs[i];
    out.synthetic.pairs.push_back({p.pair_id, p.source, out.picks[i].tokens});
    out.ter[p.pair_id] = ter(out.picks[i].tokens, p.target).score;
  }
  return out;
}

std::string recipe_name(DataRecipe recipe) {
  switch (recipe) {
    case DataRecipe::kForwardOnly: return "forward";
    case DataRecipe::kForwardPlusOriginal: return "forward+original";
    case DataRecipe::kReferenceOnly: return "reference";
  }
  return "?";
}

DataRecipe parse_recipe(const std::string& name) {
  if (name == "forward") return DataRecipe::kForwardOnly;
  if (name == "forward+original") return DataRecipe::kForwardPlusOriginal;
  if (name == "reference") return DataRecipe::kReferenceOnly;
  throw ConfigError("unknown recipe '" + name + "' (forward, forward+original, reference)");
}

void FilterSpec::validate() const {
  if (!(ter_threshold >= 0.0)) throw ConfigError("TER threshold must be >= 0");
}

TrainingSet build_training_set(const ParallelCorpus& original, const ParallelCorpus& synthetic,
                               DataRecipe recipe, const FilterSpec& filter,
                               const std::map<std::int64_t, double>& ter) {
  filter.validate();
  check_unique_pair_ids(original);
  const bool needs_synthetic = recipe != DataRecipe::kReferenceOnly;
  if (needs_synthetic && synthetic.size() != original.size())
    throw DataError("build_training_set: " + std::to_string(original.size()) + " original vs " +
                    std::to_string(synthetic.size()) + " synthetic pairs");

  TrainingSet out;
  out.stats.total = static_cast<std::int64_t>(original.size());
  std::int64_t next_id = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const SentencePair& orig = original.pairs[i];
    if (needs_synthetic && synthetic.pairs[i].pair_id != orig.pair_id)
      throw DataError("build_training_set: pair " + std::to_string(i) +
                      " has different ids in the original and synthetic corpora");
    if (filter.enabled) {
      const auto it = ter.find(orig.pair_id);
      if (it == ter.end())
        throw DataError("build_training_set: no TER score for pair id " + std::to_string(orig.pair_id));
      if (!(it->second <= filter.ter_threshold)) {
        ++out.stats.dropped;
        continue;
      }
    }
    ++out.stats.kept;
    out.kept_ids.push_back(orig.pair_id);
    if (recipe != DataRecipe::kForwardOnly)
      out.corpus.pairs.push_back({next_id++, orig.source, orig.target});
    if (needs_synthetic) {
      const SentencePair& syn = synthetic.pairs[i];
      out.corpus.pairs.push_back({next_id++, syn.source, syn.target});
    }
  }
  // Recipe ids are fresh only where copies were added.
  if (recipe == DataRecipe::kReferenceOnly || recipe == DataRecipe::kForwardOnly)
    for (std::size_t k = 0; k < out.corpus.size(); ++k)
      out.corpus.pairs[k].pair_id = out.kept_ids[k];
  return out;
}

Sentence TokenInterner::operator()(const TokenStrings& tokens) {
  Sentence out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto [it, inserted] =
        ids_.emplace(t, static_cast<TokenId>(kNumReserved + ids_.size()));
    out.push_back(it->second);
  }
  return out;
}

EvalScores evaluate(const Scorer& scorer, const ParallelCorpus& eval_set, int beam_size,
                    int workers, const Vocab* subword_vocab) {
  std::vector<Sentence> sources, refs, hyps;
  for (const auto& p : eval_set.pairs) {
    sources.push_back(p.source);
    refs.push_back(p.target);
  }
  DecodeConfig dc;
  dc.beam_size = beam_size;
  for (auto& h : translate_corpus(scorer, sources, dc, nullptr, workers))
    hyps.push_back(std::move(h.tokens));
  if (subword_vocab != nullptr) {
    TokenInterner intern;
    for (auto* side : {&hyps, &refs})
      for (auto& s : *side) s = intern(undo_bpe(decode(s, *subword_vocab)));
  }
  EvalScores s;
  s.bleu = corpus_bleu(hyps, refs).score;
  s.ter = corpus_ter(hyps, refs).score();
  return s;
}

void DistillPlan::validate() const {
  student_dims.validate();
  train.validate();
  filter.validate();
  if (beam_size < 1) throw ConfigError("plan '" + name + "': beam must be >= 1");
  const bool needs_teacher = recipe != DataRecipe::kReferenceOnly || filter.enabled;
  if (needs_teacher && !teacher)
    throw ConfigError("plan '" + name + "': recipe '" + recipe_name(recipe) +
                      (filter.enabled ? "' with filtering" : "'") + " needs a teacher");
  if (teacher) teacher->validate();
  if (init == InitMode::kContinueFromBaseline) {
    if (!baseline) throw ConfigError("plan '" + name + "': continue training needs a baseline model");
    if (!(baseline->dims == student_dims))
      throw ConfigError("plan '" + name + "': baseline dims do not match the student dims");
  }
}

double to_points(double score) { return std::round(score * 10000.0) / 100.0; }

std::string teacher_label(const std::optional<TeacherSpec>& teacher) {
  if (!teacher) return "none";
  const std::string n = std::to_string(teacher->members.size());
  switch (teacher->kind) {
    case TeacherKind::kSingle: return "single";
    case TeacherKind::kEnsemble: return "ensemble(" + n + ")";
    case TeacherKind::kOracleBleu: return "oracle(" + n + ")";
  }
  return "?";
}

PlanResult run_plan(const DistillPlan& plan, const ParallelCorpus& train_set,
                    const ParallelCorpus& validation, const ParallelCorpus& test,
                    const ForwardTranslation* forward) {
  plan.validate();
  const bool needs_forward = plan.recipe != DataRecipe::kReferenceOnly || plan.filter.enabled;
  ForwardTranslation local;
  if (needs_forward && forward == nullptr) {
    DecodeConfig dc;
    dc.beam_size = plan.beam_size;
    local = forward_translate_training_data(*plan.teacher, train_set, dc, plan.workers);
    forward = &local;
  }
  static const ParallelCorpus kNone;
  static const std::map<std::int64_t, double> kNoTer;
  PlanResult r;
  r.training_set = build_training_set(train_set, forward ? forward->synthetic : kNone, plan.recipe,
                                      plan.filter, forward ? forward->ter : kNoTer);
  if (r.training_set.corpus.empty())
    throw DataError("plan '" + plan.name + "': filtering left no training pairs");

  TrainConfig tc = plan.train;
  tc.beam_size = plan.beam_size;
  tc.workers = plan.workers;
  if (plan.init == InitMode::kContinueFromBaseline)
    tc.init = ContinueFrom{"baseline", plan.baseline};
  else
    tc.init.reset();
  r.training = train(tc, r.training_set.corpus, validation, plan.student_dims);

  const auto student = std::make_shared<const ModelParams>(r.training.best.params);
  const Scorer sc = Scorer::single(student);
  const Vocab* words = plan.subword_vocab.get();
  const EvalScores v = evaluate(sc, validation, plan.beam_size, plan.workers, words);
  const EvalScores t = evaluate(sc, test, plan.beam_size, plan.workers, words);

  ReportRow& row = r.row;
  row.plan = plan.name;
  row.teacher = teacher_label(plan.teacher);
  row.recipe = recipe_name(plan.recipe);
  char buf[64];
  if (plan.filter.enabled) {
    std::snprintf(buf, sizeof buf, "ter<=%g", plan.filter.ter_threshold);
    row.filter = buf;
  } else {
    row.filter = "none";
  }
  row.init = plan.init == InitMode::kScratch ? "scratch" : "continue";
  row.dims = std::to_string(plan.student_dims.hidden_dim) + "," +
             std::to_string(plan.student_dims.embed_dim);
  row.train_size = static_cast<std::int64_t>(r.training_set.corpus.size());
  row.epochs_run = r.training.epochs_run;
  row.val_bleu = to_points(v.bleu);
  row.val_ter = to_points(v.ter);
  row.test_bleu = to_points(t.bleu);
  row.test_ter = to_points(t.ter);
  return r;
}

namespace {

const char* const kColumns[] = {"plan", "teacher", "recipe", "filter", "init", "dims",
                                "train_size", "epochs", "val_bleu", "val_ter",
                                "test_bleu", "test_ter"};

std::vector<std::string> row_cells(const ReportRow& r) {
  char b[4][32];
  std::snprintf(b[0], sizeof b[0], "%.2f", r.val_bleu);
  std::snprintf(b[1], sizeof b[1], "%.2f", r.val_ter);
  std::snprintf(b[2], sizeof b[2], "%.2f", r.test_bleu);
  std::snprintf(b[3], sizeof b[3], "%.2f", r.test_ter);
  return {r.plan, r.teacher, r.recipe, r.filter, r.init, r.dims,
          std::to_string(r.train_size), std::to_string(r.epochs_run),
          b[0], b[1], b[2], b[3]};
}

}  // namespace

std::string render_report_tsv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out += (c ? "\t" : "") + std::string(kColumns[c]);
  out += '\n';
  for (const auto& r : rows) {
    const auto cells = row_cells(r);
    for (std::size_t c = 0; c < cells.size(); ++c) out += (c ? "\t" : "") + cells[c];
    out += '\n';
  }
  return out;
}

std::string render_report_text(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(std::begin(kColumns), std::end(kColumns));
  for (const auto& r : rows) table.push_back(row_cells(r));
  std::vector<std::size_t> width(std::size(kColumns), 0);
  for (const auto& line : table)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::string out;
  for (const auto& line : table) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      // Text columns left-aligned, numbers right-aligned.
      const std::string pad(width[c] - line[c].size(), ' ');
      if (c) text += "  ";
      text += c < 6 ? line[c] + pad : pad + line[c];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_tsv(const std::string& tsv) {
  std::istringstream in(tsv);
  std::string line;
  std::vector<ReportRow> rows;
  if (!std::getline(in, line)) throw DataError("report: missing header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != std::size(kColumns))
      throw DataError("report line " + std::to_string(lineno) + ": expected " +
                      std::to_string(std::size(kColumns)) + " fields, got " + std::to_string(f.size()));
    try {
      rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], std::stoll(f[6]), std::stoi(f[7]),
                      std::stod(f[8]), std::stod(f[9]), std::stod(f[10]), std::stod(f[11])});
    } catch (const std::logic_error&) {
      throw DataError("report line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

TokenStrings toy_reference(const TokenStrings& source) {
  TokenStrings out;
  out.reserve(source.size());
  for (const auto& s : source) {
    if (s.size() != 2 || s[0] != 's' || s[1] < '0' || s[1] > '9')
      throw DataError("toy_reference: '" + s + "' is not a toy source symbol");
    const int k = s[1] - '0';
    out.push_back("t" + std::to_string((3 * k + 1) % kToyAlphabet));
  }
  for (std::size_t i = 0; i + 1 < out.size(); i += 2) std::swap(out[i], out[i + 1]);
  return out;
}

ToyCorpus gen_toy_corpus(std::uint64_t seed, std::size_t size, double noise_rate) {
  if (size < 1) throw ConfigError("gen_toy_corpus: size must be >= 1");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0))
    throw ConfigError("gen_toy_corpus: noise rate must lie in [0, 1]");
  CounterRng rng(seed, 0x746F79);
  auto draw = [&](char prefix) {
    TokenStrings s(2 + uniform_below(rng, 7));
    for (auto& t : s) t = std::string(1, prefix) + std::to_string(uniform_below(rng, kToyAlphabet));
    return s;
  };
  ToyCorpus out;
  out.corpus.reserve(size);
  out.noisy.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    TextPair p;
    p.pair_id = static_cast<std::int64_t>(i);
    p.source = draw('s');
    // Draw the coin unconditionally so noise_rate does not shift the stream.
    const bool noisy = uniform_open01(rng) < noise_rate;
    TokenStrings replacement = draw('t');
    p.target = noisy ? std::move(replacement) : toy_reference(p.source);
    out.corpus.push_back(std::move(p));
    out.noisy.push_back(noisy);
  }
  return out;
}

}  // namespace distill
