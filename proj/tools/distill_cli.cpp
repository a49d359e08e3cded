// tools/distill_cli.cpp

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


// distill: command-line front end. Data goes to files or stdout, diagnostics
// to stderr. Exit status 0 on success, 1 on usage or configuration errors,
// 2 on data, corruption or numeric errors.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "distill/bpe.hpp"
#include "distill/checkpoint.hpp"
#include "distill/decode.hpp"
#include "distill/distill.hpp"
#include "distill/errors.hpp"
#include "distill/metrics.hpp"
#include "distill/plan.hpp"
#include "distill/textcore.hpp"
#include "distill/train.hpp"

namespace fs = std::filesystem;
using namespace distill;

namespace {

void log(const std::string& msg) { std::cerr << "distill: " << msg << '\n'; }

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- subcommands ----

struct BpeLearnArgs {
  std::string src, tgt, out;
  std::size_t merges = 1000;
};

void run_bpe_learn(const BpeLearnArgs& a) {
  auto corpus = read_lines(a.src);
  if (!a.tgt.empty()) {
    const auto more = read_lines(a.tgt);
    corpus.insert(corpus.end(), more.begin(), more.end());
  }
  const MergeTable table = learn_bpe(corpus, a.merges);
  save_merges(table, a.out);
  log("learned " + std::to_string(table.size()) + " merges" + (a.tgt.empty() ? "" : " (joint)"));
}

struct BpeApplyArgs {
  std::string merges, input, out;
  bool undo = false;
};

void run_bpe_apply(const BpeApplyArgs& a) {
  auto lines = read_lines(a.input);
  if (a.undo) {
    for (auto& l : lines) l = undo_bpe(l);
  } else {
    if (a.merges.empty()) throw ConfigError("bpe-apply: --merges is required unless --undo is given");
    const MergeTable table = load_merges(a.merges);
    for (auto& l : lines) l = apply_bpe(l, table);
  }
  write_lines(lines, a.out);
}

struct BuildVocabArgs {
  std::string input, out;
  std::size_t max_size = 1000;
};

void run_build_vocab(const BuildVocabArgs& a) {
  const Vocab v = build_vocab(read_lines(a.input), a.max_size);
  save_vocab(v, a.out);
  log("vocabulary of " + std::to_string(v.size()) + " entries");
}

struct TrainArgs {
  std::string src, tgt, valid_src, valid_tgt, src_vocab, tgt_vocab, init = "scratch", out_dir = ".";
  std::string metric = "bleu";
  std::size_t vocab_size = 1000;
  std::int64_t hlayer = 64, wemb = 32;
  std::uint64_t seed = 1;
  int batch = 64, halve_start = 4, patience = 3, max_epochs = 20, beam = 5, workers = 1;
  double lr = 1.0, clip = 0.0;
};

void run_train(const TrainArgs& a) {
  const TextCorpus train_text = read_parallel(a.src, a.tgt);
  const TextCorpus valid_text = read_parallel(a.valid_src, a.valid_tgt);
  TrainConfig c;
  c.batch_size = a.batch;
  c.initial_lr = a.lr;
  c.lr_halve_start_epoch = a.halve_start;
  c.patience = a.patience;
  c.max_epochs = a.max_epochs;
  c.clip_norm = a.clip;
  c.seed = a.seed;
  c.beam_size = a.beam;
  c.workers = a.workers;
  if (a.metric == "bleu") {
    c.metric = ValidationMetric::kBleu;
  } else if (a.metric == "perplexity") {
    c.metric = ValidationMetric::kPerplexity;
  } else {
    throw ConfigError("--metric must be bleu or perplexity");
  }

  Vocab sv, tv;
  if (a.init.rfind("continue:", 0) == 0) {
    const fs::path path = a.init.substr(9);
    Checkpoint base = load_checkpoint(path);
    std::tie(sv, tv) = checkpoint_vocabs(base.meta);
    c.init = ContinueFrom{path, std::make_shared<const ModelParams>(std::move(base.params))};
  } else if (a.init != "scratch") {
    throw ConfigError("--init must be scratch or continue:PATH");
  } else {
    std::vector<TokenStrings> s, t;
    for (const auto& p : train_text) {
      s.push_back(p.source);
      t.push_back(p.target);
    }
    sv = a.src_vocab.empty() ? build_vocab(s, a.vocab_size) : load_vocab(a.src_vocab);
    tv = a.tgt_vocab.empty() ? build_vocab(t, a.vocab_size) : load_vocab(a.tgt_vocab);
  }
  const ModelDims dims{static_cast<std::int64_t>(sv.size()), static_cast<std::int64_t>(tv.size()),
                       a.wemb, a.hlayer};
  auto result = train(c, encode_corpus(train_text, sv, tv), encode_corpus(valid_text, sv, tv), dims,
                      [](const EpochRecord& e) {
                        char buf[160];
                        std::snprintf(buf, sizeof buf, "epoch %d lr %.4g loss %.4f valid %.4f%s",
                                      e.epoch, e.learning_rate, e.train_loss, e.validation_score,
                                      e.improved ? " *" : "");
                        log(buf);
                      });
  attach_vocabs(result.best.meta, sv, tv);
  fs::create_directories(a.out_dir);
  save_checkpoint(result.best, fs::path(a.out_dir) / "model.ckpt");
  save_history(result.history, fs::path(a.out_dir) / "history.tsv");
  log("best epoch " + std::to_string(result.best.meta.epoch) + " of " +
      std::to_string(result.epochs_run));
}

struct TranslateArgs {
  std::vector<std::string> models;
  std::string src, out, oracle_ref, ref, tsv;
  int beam = 5, workers = 1, max_len = 0;
  double max_len_factor = 2.0;
};

void run_translate(const TranslateArgs& a) {
  std::vector<std::shared_ptr<const ModelParams>> members;
  Vocab sv, tv;
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    Checkpoint ck = load_checkpoint(a.models[i]);
    auto [s, t] = checkpoint_vocabs(ck.meta);
    if (i == 0) {
      sv = std::move(s);
      tv = std::move(t);
    } else if (!(s == sv) || !(t == tv)) {
      throw ConfigError("model " + a.models[i] + " uses different vocabularies than " + a.models[0]);
    }
    members.push_back(std::make_shared<const ModelParams>(std::move(ck.params)));
  }
  const Scorer scorer = members.size() == 1 ? Scorer::single(members[0]) : Scorer::ensemble(members);
  if (members.size() > 1) log("ensemble decoding with " + std::to_string(members.size()) + " members");

  std::vector<Sentence> sources;
  for (const auto& l : read_lines(a.src)) sources.push_back(encode(l, sv));
  DecodeConfig dc;
  dc.beam_size = a.beam;
  dc.max_len = a.max_len;
  dc.max_len_factor = a.max_len_factor;
  std::vector<Sentence> refs;
  const std::string ref_path = a.oracle_ref.empty() ? a.ref : a.oracle_ref;
  if (!ref_path.empty()) {
    for (const auto& l : read_lines(ref_path)) refs.push_back(encode(l, tv));
    if (refs.size() != sources.size())
      throw DataError("translate: " + std::to_string(sources.size()) + " source lines vs " +
                      std::to_string(refs.size()) + " reference lines");
  }
  if (!a.oracle_ref.empty()) {
    dc.selection = Selection::oracle_bleu({});
    log("oracle BLEU selection against " + a.oracle_ref);
  }
  const auto hyps = translate_corpus(scorer, sources, dc, refs.empty() ? nullptr : &refs, a.workers);
  std::vector<TokenStrings> lines;
  std::string tsv = "line\tlogprob\tsbleu\n";
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    lines.push_back(decode(hyps[i].tokens, tv));
    tsv += std::to_string(i) + "\t" + fmt("%.6f", hyps[i].logprob) + "\t";
    if (!refs.empty() && !refs[i].empty()) {
      tsv += fmt("%.6f", sentence_bleu(hyps[i].tokens, refs[i]).score);
    } else {
      tsv += "-";
    }
    tsv += "\n";
  }
  write_lines(lines, a.out);
  if (!a.tsv.empty()) write_file(a.tsv, tsv);
}

struct ScoreArgs {
  std::string hyp, ref, metric = "all", out;
};

void run_score(const ScoreArgs& a) {
  const bool bleu = a.metric == "bleu" || a.metric == "all";
  const bool term = a.metric == "ter" || a.metric == "all";
  if (!bleu && !term) throw ConfigError("--metric must be bleu, ter or all");
  const auto hyp_lines = read_lines(a.hyp);
  const auto ref_lines = read_lines(a.ref);
  if (hyp_lines.size() != ref_lines.size())
    throw DataError("score: " + std::to_string(hyp_lines.size()) + " hypothesis lines vs " +
                    std::to_string(ref_lines.size()) + " reference lines");
  TokenInterner intern;
  std::vector<Sentence> hyps, refs;
  for (std::size_t i = 0; i < hyp_lines.size(); ++i) {
    hyps.push_back(intern(hyp_lines[i]));
    refs.push_back(intern(ref_lines[i]));
  }
  std::string out = "pair_id";
  if (bleu) out += "\tsbleu";
  if (term) out += "\tter\tins\tdel\tsub\tshifts\tref_len";
  out += "\n";
  CorpusTerStats ts;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs[i].empty()) throw DataError("score: empty reference on line " + std::to_string(i + 1));
    out += std::to_string(i);
    if (bleu) out += "\t" + fmt("%.6f", sentence_bleu(hyps[i], refs[i]).score);
    if (term) {
      const TerResult r = ter(hyps[i], refs[i]);
      ts.edits += r.edits();
      ts.ref_length += r.ref_length;
      out += "\t" + fmt("%.6f", r.score) + "\t" + std::to_string(r.insertions) + "\t" +
             std::to_string(r.deletions) + "\t" + std::to_string(r.substitutions) + "\t" +
             std::to_string(r.shifts) + "\t" + std::to_string(r.ref_length);
    }
    out += "\n";
  }
  out += "#";
  if (bleu) out += " corpus_bleu=" + fmt("%.6f", corpus_bleu(hyps, refs).score);
  if (term) out += " corpus_ter=" + fmt("%.6f", ts.score());
  out += "\n";
  emit(a.out, out);
}

struct FilterArgs {
  std::string src, tgt, hyp, recipe = "forward+original", out_dir = ".", threshold = "0.8";
};

void run_filter(const FilterArgs& a) {
  const TextCorpus original = read_parallel(a.src, a.tgt);
  const auto hyp_lines = read_lines(a.hyp);
  if (hyp_lines.size() != original.size())
    throw DataError("filter: " + std::to_string(original.size()) + " pairs vs " +
                    std::to_string(hyp_lines.size()) + " teacher translations");
  FilterSpec f;
  if (a.threshold == "inf" || a.threshold == "none") {
    f.enabled = false;
  } else {
    try {
      f.ter_threshold = std::stod(a.threshold);
    } catch (const std::logic_error&) {
      throw ConfigError("--ter-threshold must be a number or 'inf'");
    }
    f.enabled = true;
  }
  TextCorpus synthetic_text = original;
  for (std::size_t i = 0; i < original.size(); ++i) synthetic_text[i].target = hyp_lines[i];

  // Shared interned ids are enough here: filtering only compares tokens.
  TokenInterner intern;
  ParallelCorpus orig, syn;
  std::map<std::int64_t, double> ter_scores;
  std::string ter_tsv = "pair_id\tter\n";
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& p = original[i];
    orig.pairs.push_back({p.pair_id, intern(p.source), intern(p.target)});
    syn.pairs.push_back({p.pair_id, orig.pairs.back().source, intern(hyp_lines[i])});
    if (orig.pairs.back().target.empty())
      throw DataError("filter: empty reference on line " + std::to_string(i + 1));
    ter_scores[p.pair_id] = ter(syn.pairs.back().target, orig.pairs.back().target).score;
    ter_tsv += std::to_string(p.pair_id) + "\t" + fmt("%.6f", ter_scores[p.pair_id]) + "\n";
  }
  const TrainingSet ts = build_training_set(orig, syn, parse_recipe(a.recipe), f, ter_scores);

  // Map back to text by position: every output pair is a copy of a kept pair.
  TextCorpus out;
  const DataRecipe recipe = parse_recipe(a.recipe);
  for (std::size_t k = 0; k < ts.kept_ids.size(); ++k) {
    const auto idx = static_cast<std::size_t>(ts.kept_ids[k]);
    if (recipe != DataRecipe::kForwardOnly) out.push_back(original[idx]);
    if (recipe != DataRecipe::kReferenceOnly) out.push_back(synthetic_text[idx]);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].pair_id = ts.corpus.pairs[k].pair_id;
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  write_parallel(out, dir / "train.src", dir / "train.tgt");
  write_file(dir / "ter.tsv", ter_tsv);
  write_file(dir / "filter_stats.tsv",
             "total\tkept\tdropped\tdropped_fraction\n" + std::to_string(ts.stats.total) + "\t" +
                 std::to_string(ts.stats.kept) + "\t" + std::to_string(ts.stats.dropped) + "\t" +
                 fmt("%.6f", ts.stats.dropped_fraction()) + "\n");
  log("kept " + std::to_string(ts.stats.kept) + " of " + std::to_string(ts.stats.total) +
      " pairs, " + std::to_string(out.size()) + " training pairs");
}

struct GenToyArgs {
  std::uint64_t seed = 1;
  std::size_t size = 1000;
  double noise = 0.0;
  std::string out_dir = ".", prefix = "toy";
};

void run_gen_toy(const GenToyArgs& a) {
  const ToyCorpus t = gen_toy_corpus(a.seed, a.size, a.noise);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  write_parallel(t.corpus, dir / (a.prefix + ".src"), dir / (a.prefix + ".tgt"));
  std::string labels;
  for (bool n : t.noisy) labels += n ? "1\n" : "0\n";
  write_file(dir / (a.prefix + ".noise"), labels);
}

struct DistillRunArgs {
  std::string plan, out_dir = ".";
  int workers = 0;  // 0: take the plan's value
};

void run_distill(const DistillRunArgs& a) {
  const PlanFile plan = parse_plan(a.plan);
  const auto run = execute_plan(plan, a.out_dir,
                                a.workers > 0 ? std::optional<int>(a.workers) : std::nullopt, log);
  log("wrote " + (run.dir / "report.tsv").string());
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out, format = "text";
};

void run_report(const ReportArgs& a) {
  std::vector<ReportRow> rows;
  for (const auto& in : a.inputs) {
    const auto more = parse_report_tsv(read_file(in));
    rows.insert(rows.end(), more.begin(), more.end());
  }
  if (a.format == "text") {
    emit(a.out, render_report_text(rows));
  } else if (a.format == "tsv") {
    emit(a.out, render_report_tsv(rows));
  } else {
    throw ConfigError("--format must be text or tsv");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence-level distillation toolkit for neural machine translation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  BpeLearnArgs bl;
  auto* c_bl = app.add_subcommand("bpe-learn", "Learn BPE merges from a corpus");
  c_bl->add_option("--src", bl.src, "Corpus file")->required();
  c_bl->add_option("--tgt", bl.tgt, "Second corpus; learns one joint table over both");
  c_bl->add_option("--merges", bl.merges, "Number of merges")->capture_default_str();
  c_bl->add_option("--out", bl.out, "Merge table file")->required();

  BpeApplyArgs ba;
  auto* c_ba = app.add_subcommand("bpe-apply", "Segment a corpus with a merge table");
  c_ba->add_option("--merges", ba.merges, "Merge table file");
  c_ba->add_option("--input", ba.input, "Corpus file")->required();
  c_ba->add_option("--out", ba.out, "Output file")->required();
  c_ba->add_flag("--undo", ba.undo, "Remove segmentation instead");

  BuildVocabArgs bv;
  auto* c_bv = app.add_subcommand("build-vocab", "Build a frequency-ranked vocabulary");
  c_bv->add_option("--input", bv.input, "Corpus file")->required();
  c_bv->add_option("--max-size", bv.max_size, "Size including reserved tokens")->capture_default_str();
  c_bv->add_option("--out", bv.out, "Vocabulary file")->required();

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train an attention encoder-decoder");
  c_tr->add_option("--src", tr.src, "Training source file")->required();
  c_tr->add_option("--tgt", tr.tgt, "Training target file")->required();
  c_tr->add_option("--valid-src", tr.valid_src, "Validation source file")->required();
  c_tr->add_option("--valid-tgt", tr.valid_tgt, "Validation target file")->required();
  c_tr->add_option("--src-vocab", tr.src_vocab, "Source vocabulary (default: built from --src)");
  c_tr->add_option("--tgt-vocab", tr.tgt_vocab, "Target vocabulary (default: built from --tgt)");
  c_tr->add_option("--vocab-size", tr.vocab_size, "Cap for built vocabularies")->capture_default_str();
  c_tr->add_option("--hlayer", tr.hlayer, "Hidden size")->capture_default_str();
  c_tr->add_option("--wemb", tr.wemb, "Embedding size")->capture_default_str();
  c_tr->add_option("--seed", tr.seed, "Initialization and shuffling seed")->capture_default_str();
  c_tr->add_option("--init", tr.init, "scratch or continue:PATH")->capture_default_str();
  c_tr->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  c_tr->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
  c_tr->add_option("--halve-start", tr.halve_start, "First epoch with a halved rate")->capture_default_str();
  c_tr->add_option("--patience", tr.patience, "Epochs without improvement before stopping")
      ->capture_default_str();
  c_tr->add_option("--max-epochs", tr.max_epochs, "Epoch limit")->capture_default_str();
  c_tr->add_option("--clip", tr.clip, "Gradient norm clip (0: off)")->capture_default_str();
  c_tr->add_option("--metric", tr.metric, "Validation metric: bleu or perplexity")->capture_default_str();
  c_tr->add_option("--beam", tr.beam, "Beam size for validation decoding")->capture_default_str();
  c_tr->add_option("--workers", tr.workers, "Decoding threads")->capture_default_str();
  c_tr->add_option("--out-dir", tr.out_dir, "Writes model.ckpt and history.tsv")->capture_default_str();

  TranslateArgs tl;
  auto* c_tl = app.add_subcommand("translate", "Beam-search translation; repeat --model for an ensemble");
  c_tl->add_option("--model", tl.models, "Checkpoint (repeatable)")->required();
  c_tl->add_option("--src", tl.src, "Source file")->required();
  c_tl->add_option("--out", tl.out, "Output file")->required();
  c_tl->add_option("--beam", tl.beam, "Beam size")->capture_default_str();
  c_tl->add_option("--max-len", tl.max_len, "Output length cap (0: factor * source length + 5)")
      ->capture_default_str();
  c_tl->add_option("--max-len-factor", tl.max_len_factor, "Length cap factor")->capture_default_str();
  c_tl->add_option("--oracle-ref", tl.oracle_ref, "Pick the candidate with the best sentence BLEU");
  c_tl->add_option("--ref", tl.ref, "References for the sBLEU column of --tsv");
  c_tl->add_option("--tsv", tl.tsv, "Per-line log-probability and sentence BLEU");
  c_tl->add_option("--workers", tl.workers, "Decoding threads")->capture_default_str();

  ScoreArgs sc;
  auto* c_sc = app.add_subcommand("score", "Sentence BLEU and TER per line plus corpus scores");
  c_sc->add_option("--hyp", sc.hyp, "Hypothesis file")->required();
  c_sc->add_option("--ref", sc.ref, "Reference file")->required();
  c_sc->add_option("--metric", sc.metric, "bleu, ter or all")->capture_default_str();
  c_sc->add_option("--out", sc.out, "Output TSV (default: stdout)");

  FilterArgs fl;
  auto* c_fl = app.add_subcommand("filter", "Build a training set from teacher translations");
  c_fl->add_option("--src", fl.src, "Source file")->required();
  c_fl->add_option("--tgt", fl.tgt, "Reference file")->required();
  c_fl->add_option("--hyp", fl.hyp, "Teacher translations")->required();
  c_fl->add_option("--ter-threshold", fl.threshold, "Keep pairs with TER <= this; 'inf' disables")
      ->capture_default_str();
  c_fl->add_option("--recipe", fl.recipe, "forward, forward+original or reference")->capture_default_str();
  c_fl->add_option("--out-dir", fl.out_dir, "Output directory")->capture_default_str();

  GenToyArgs gt;
  auto* c_gt = app.add_subcommand("gen-toy", "Generate the synthetic toy translation task");
  c_gt->add_option("--seed", gt.seed, "Generator seed")->capture_default_str();
  c_gt->add_option("--size", gt.size, "Number of pairs")->capture_default_str();
  c_gt->add_option("--noise", gt.noise, "Probability of a replaced target")->capture_default_str();
  c_gt->add_option("--prefix", gt.prefix, "Output file stem")->capture_default_str();
  c_gt->add_option("--out-dir", gt.out_dir, "Output directory")->capture_default_str();

  DistillRunArgs dr;
  auto* c_dr = app.add_subcommand("distill-run", "Run a plan file end to end");
  c_dr->add_option("--plan", dr.plan, "Plan file")->required();
  c_dr->add_option("--out-dir", dr.out_dir, "Artifacts go to OUT_DIR/<plan name>")->capture_default_str();
  c_dr->add_option("--workers", dr.workers, "Decoding threads (default: from the plan)");

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "Merge report rows into one table");
  c_rp->add_option("--input", rp.inputs, "report.tsv (repeatable)")->required();
  c_rp->add_option("--format", rp.format, "text or tsv")->capture_default_str();
  c_rp->add_option("--out", rp.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  try {
    if (*c_bl) run_bpe_learn(bl);
    else if (*c_ba) run_bpe_apply(ba);
    else if (*c_bv) run_build_vocab(bv);
    else if (*c_tr) run_train(tr);
    else if (*c_tl) run_translate(tl);
    else if (*c_sc) run_score(sc);
    else if (*c_fl) run_filter(fl);
    else if (*c_gt) run_gen_toy(gt);
    else if (*c_dr) run_distill(dr);
    else if (*c_rp) run_report(rp);
  } catch (const ConfigError& e) {
    log(std::string("error: ") + e.what());
    return 1;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return 2;
  }
  return 0;
}
