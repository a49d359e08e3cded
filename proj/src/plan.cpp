// src/plan.cpp

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


#include "distill/plan.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "distill/bpe.hpp"
#include "distill/errors.hpp"

namespace distill {

namespace fs = std::filesystem;

namespace {

using Items = std::map<std::string, std::vector<std::string>>;

class Reader {
 public:
  explicit Reader(Items items) : items_(std::move(items)) {}

  bool has(const std::string& key) const { return items_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    const auto it = items_.find(key);
    if (it == items_.end()) return fallback;
    used_.push_back(key);
    if (it->second.size() != 1) throw ConfigError("plan: '" + key + "' takes one value");
    return it->second.front();
  }

  std::vector<std::string> list(const std::string& key) {
    const auto it = items_.find(key);
    if (it == items_.end()) return {};
    used_.push_back(key);
    return it->second;
  }

  template <typename T>
  T num(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key, "");
    std::istringstream in(v);
    T out{};
    if (!(in >> out) || !in.eof())
      throw ConfigError("plan: '" + key + "' has a malformed value '" + v + "'");
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key, "");
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError("plan: '" + key + "' must be true or false, got '" + v + "'");
  }

  void reject_unused() const {
    for (const auto& [key, _] : items_)
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        throw ConfigError("plan: unknown key '" + key + "'");
  }

 private:
  Items items_;
  std::vector<std::string> used_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void PlanFile::validate() const {
  if (name.empty()) throw ConfigError("plan: missing 'name'");
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
    throw ConfigError("plan: name '" + name + "' must be a plain directory name");
  if (uses_toy_data()) {
    if (toy_valid == 0 || toy_test == 0)
      throw ConfigError("plan: toy data needs toy_valid and toy_test");
  } else if (train_src.empty() || train_tgt.empty() || valid_src.empty() || valid_tgt.empty() ||
             test_src.empty() || test_tgt.empty()) {
    throw ConfigError("plan: give toy_train or all of train_src/train_tgt/valid_src/valid_tgt/"
                      "test_src/test_tgt");
  }
  if (vocab_size < 5) throw ConfigError("plan: vocab_size must be >= 5");
  if (teacher_kind != "none" && teacher_kind != "single" && teacher_kind != "ensemble" &&
      teacher_kind != "oracle")
    throw ConfigError("plan: teacher kind must be none, single, ensemble or oracle");
  if (teacher_kind != "none") {
    if (teacher_members > 0 && !teacher_models.empty())
      throw ConfigError("plan: give either teacher members or teacher models, not both");
    const std::size_t n = teacher_models.empty() ? static_cast<std::size_t>(teacher_members)
                                                 : teacher_models.size();
    if (n == 0) throw ConfigError("plan: teacher needs members or models");
    if (teacher_kind == "single" && n != 1)
      throw ConfigError("plan: a single teacher takes exactly one model");
  }
  const bool needs_teacher = recipe != DataRecipe::kReferenceOnly || filter.enabled;
  if (needs_teacher && teacher_kind == "none")
    throw ConfigError("plan: recipe '" + recipe_name(recipe) +
                      (filter.enabled ? "' with filtering" : "'") + " needs a teacher");
  ModelDims{5, 5, student_embed, student_hidden}.validate();
  ModelDims{5, 5, baseline_embed, baseline_hidden}.validate();
  filter.validate();
  train.validate();
  if (beam < 1) throw ConfigError("plan: beam must be >= 1");
  if (workers < 1) throw ConfigError("plan: workers must be >= 1");
}

PlanFile parse_plan_text(const std::string& text, const fs::path& base_dir) {
  std::istringstream in(text);
  Items items;
  for (auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    if (items.count(key)) throw ConfigError("plan: duplicate key '" + key + "'");
    items[key] = std::move(item.inputs);
  }
  Reader r(std::move(items));
  PlanFile p;
  p.base_dir = base_dir;
  p.name = r.str("name", "");
  p.seed = r.num<std::uint64_t>("seed", 1);
  p.workers = r.num<int>("workers", 1);

  p.toy_seed = r.num<std::uint64_t>("data.toy_seed", p.seed);
  p.toy_train = r.num<std::size_t>("data.toy_train", 0);
  p.toy_valid = r.num<std::size_t>("data.toy_valid", 0);
  p.toy_test = r.num<std::size_t>("data.toy_test", 0);
  p.noise_rate = r.num<double>("data.noise_rate", 0.0);
  p.train_src = resolve(base_dir, r.str("data.train_src", ""));
  p.train_tgt = resolve(base_dir, r.str("data.train_tgt", ""));
  p.valid_src = resolve(base_dir, r.str("data.valid_src", ""));
  p.valid_tgt = resolve(base_dir, r.str("data.valid_tgt", ""));
  p.test_src = resolve(base_dir, r.str("data.test_src", ""));
  p.test_tgt = resolve(base_dir, r.str("data.test_tgt", ""));
  p.vocab_size = r.num<std::size_t>("data.vocab_size", p.vocab_size);
  p.bpe_merges = r.num<std::size_t>("data.bpe_merges", 0);
  p.joint_bpe = r.flag("data.joint_bpe", false);

  p.baseline_hidden = r.num<std::int64_t>("baseline.hlayer", p.baseline_hidden);
  p.baseline_embed = r.num<std::int64_t>("baseline.wemb", p.baseline_embed);

  p.teacher_kind = r.str("teacher.kind", "none");
  p.teacher_members = r.num<int>("teacher.members", 0);
  for (const auto& m : r.list("teacher.models")) p.teacher_models.push_back(resolve(base_dir, m));

  p.recipe = parse_recipe(r.str("student.recipe", recipe_name(p.recipe)));
  p.filter.enabled = r.flag("student.filter", false);
  p.filter.ter_threshold = r.num<double>("student.ter_threshold", p.filter.ter_threshold);
  const std::string init = r.str("student.init", "scratch");
  if (init == "scratch") {
    p.init = InitMode::kScratch;
  } else if (init == "continue") {
    p.init = InitMode::kContinueFromBaseline;
  } else {
    throw ConfigError("plan: student init must be scratch or continue, got '" + init + "'");
  }
  p.student_hidden = r.num<std::int64_t>("student.hlayer", p.baseline_hidden);
  p.student_embed = r.num<std::int64_t>("student.wemb", p.baseline_embed);

  p.train.batch_size = r.num<int>("train.batch_size", p.train.batch_size);
  p.train.initial_lr = r.num<double>("train.initial_lr", p.train.initial_lr);
  p.train.lr_halve_start_epoch = r.num<int>("train.halve_start", p.train.lr_halve_start_epoch);
  p.train.patience = r.num<int>("train.patience", p.train.patience);
  p.train.max_epochs = r.num<int>("train.max_epochs", p.train.max_epochs);
  p.train.clip_norm = r.num<double>("train.clip_norm", p.train.clip_norm);
  const std::string metric = r.str("train.metric", "bleu");
  if (metric == "bleu") {
    p.train.metric = ValidationMetric::kBleu;
  } else if (metric == "perplexity") {
    p.train.metric = ValidationMetric::kPerplexity;
  } else {
    throw ConfigError("plan: train metric must be bleu or perplexity, got '" + metric + "'");
  }
  p.beam = r.num<int>("decode.beam", p.beam);
  p.train.seed = p.seed;
  p.train.beam_size = p.beam;
  r.reject_unused();
  p.validate();
  return p;
}

PlanFile parse_plan(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open plan file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan_text(text.str(), path.parent_path());
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + path.string());
}

std::vector<TokenStrings> side(const TextCorpus& c, bool source) {
  std::vector<TokenStrings> out;
  out.reserve(c.size());
  for (const auto& p : c) out.push_back(source ? p.source : p.target);
  return out;
}

void segment(TextCorpus& c, const MergeTable& src, const MergeTable& tgt) {
  for (auto& p : c) {
    p.source = apply_bpe(p.source, src);
    p.target = apply_bpe(p.target, tgt);
  }
}

struct Data {
  TextCorpus train, valid, test;
  std::vector<bool> noisy;
  Vocab src_vocab, tgt_vocab;
  ParallelCorpus train_ids, valid_ids, test_ids;
};

Data prepare_data(const PlanFile& plan, const fs::path& dir, const LogFn& log) {
  Data d;
  if (plan.uses_toy_data()) {
    auto train = gen_toy_corpus(plan.toy_seed, plan.toy_train, plan.noise_rate);
    d.train = std::move(train.corpus);
    d.noisy = std::move(train.noisy);
    d.valid = gen_toy_corpus(plan.toy_seed + 1, plan.toy_valid, 0.0).corpus;
    d.test = gen_toy_corpus(plan.toy_seed + 2, plan.toy_test, 0.0).corpus;
    std::string labels;
    for (bool n : d.noisy) labels += n ? "1\n" : "0\n";
    write_text(dir / "train.noise", labels);
  } else {
    d.train = read_parallel(plan.train_src, plan.train_tgt);
    d.valid = read_parallel(plan.valid_src, plan.valid_tgt);
    d.test = read_parallel(plan.test_src, plan.test_tgt);
  }
  if (d.train.empty() || d.valid.empty() || d.test.empty())
    throw DataError("plan: train, valid and test sets must be non-empty");
  write_parallel(d.train, dir / "train.src", dir / "train.tgt");
  write_parallel(d.valid, dir / "valid.src", dir / "valid.tgt");
  write_parallel(d.test, dir / "test.src", dir / "test.tgt");

  if (plan.bpe_merges > 0) {
    MergeTable src_table, tgt_table;
    if (plan.joint_bpe) {
      auto both = side(d.train, true);
      const auto tgt = side(d.train, false);
      both.insert(both.end(), tgt.begin(), tgt.end());
      src_table = tgt_table = learn_bpe(both, plan.bpe_merges);
      save_merges(src_table, dir / "merges.joint");
    } else {
      src_table = learn_bpe(side(d.train, true), plan.bpe_merges);
      tgt_table = learn_bpe(side(d.train, false), plan.bpe_merges);
      save_merges(src_table, dir / "merges.src");
      save_merges(tgt_table, dir / "merges.tgt");
    }
    if (log) log("bpe: " + std::to_string(src_table.size()) + " source / " +
                 std::to_string(tgt_table.size()) + " target merges");
    for (auto* c : {&d.train, &d.valid, &d.test}) segment(*c, src_table, tgt_table);
  }
  d.src_vocab = build_vocab(side(d.train, true), plan.vocab_size);
  d.tgt_vocab = build_vocab(side(d.train, false), plan.vocab_size);
  save_vocab(d.src_vocab, dir / "vocab.src");
  save_vocab(d.tgt_vocab, dir / "vocab.tgt");
  d.train_ids = encode_corpus(d.train, d.src_vocab, d.tgt_vocab);
  d.valid_ids = encode_corpus(d.valid, d.src_vocab, d.tgt_vocab);
  d.test_ids = encode_corpus(d.test, d.src_vocab, d.tgt_vocab);
  return d;
}

Checkpoint train_and_save(const TrainConfig& config, const Data& d, const ModelDims& dims,
                          const fs::path& dir, const std::string& what, const LogFn& log) {
  fs::create_directories(dir);
  auto result = train(config, d.train_ids, d.valid_ids, dims, [&](const EpochRecord& e) {
    if (!log) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: epoch %d lr %.4g loss %.4f valid %.4f%s", what.c_str(),
                  e.epoch, e.learning_rate, e.train_loss, e.validation_score,
                  e.improved ? " *" : "");
    log(buf);
  });
  attach_vocabs(result.best.meta, d.src_vocab, d.tgt_vocab);
  save_checkpoint(result.best, dir / "model.ckpt");
  save_history(result.history, dir / "history.tsv");
  return result.best;
}

}  // namespace

PlanRun execute_plan(const PlanFile& plan, const fs::path& out_root, std::optional<int> workers,
                     const LogFn& log) {
  plan.validate();
  const int nworkers = workers.value_or(plan.workers);
  if (nworkers < 1) throw ConfigError("workers must be >= 1");
  PlanRun run;
  run.dir = out_root / plan.name;
  fs::create_directories(run.dir / "data");
  const Data d = prepare_data(plan, run.dir / "data", log);
  const auto vs = static_cast<std::int64_t>(d.src_vocab.size());
  const auto vt = static_cast<std::int64_t>(d.tgt_vocab.size());
  const ModelDims baseline_dims{vs, vt, plan.baseline_embed, plan.baseline_hidden};
  const ModelDims student_dims{vs, vt, plan.student_embed, plan.student_hidden};

  TrainConfig tc = plan.train;
  tc.workers = nworkers;
  tc.init.reset();

  // Teachers: trained here from seeds seed, seed+1, ... or loaded.
  std::vector<std::shared_ptr<const ModelParams>> members;
  if (plan.teacher_kind != "none") {
    if (plan.teacher_models.empty()) {
      for (int k = 0; k < plan.teacher_members; ++k) {
        TrainConfig mc = tc;
        mc.seed = plan.seed + static_cast<std::uint64_t>(k);
        const auto ck = train_and_save(mc, d, baseline_dims,
                                       run.dir / ("teacher_" + std::to_string(k)),
                                       "teacher " + std::to_string(k), log);
        members.push_back(std::make_shared<const ModelParams>(ck.params));
      }
    } else {
      for (const auto& path : plan.teacher_models) {
        Checkpoint ck = load_checkpoint(path);
        const auto [sv, tv] = checkpoint_vocabs(ck.meta);
        if (!(sv == d.src_vocab) || !(tv == d.tgt_vocab))
          throw ConfigError("teacher " + path.string() + " was trained with different vocabularies");
        members.push_back(std::make_shared<const ModelParams>(std::move(ck.params)));
      }
    }
  }

  // Baseline for continue-training: teacher 0 when dims agree, else its own run.
  std::shared_ptr<const ModelParams> baseline;
  if (plan.init == InitMode::kContinueFromBaseline) {
    if (!members.empty() && plan.teacher_models.empty() && baseline_dims == student_dims) {
      baseline = members.front();
    } else {
      if (!(baseline_dims == student_dims))
        throw ConfigError("plan: continue training needs student dims equal to baseline dims");
      baseline = std::make_shared<const ModelParams>(
          train_and_save(tc, d, baseline_dims, run.dir / "baseline", "baseline", log).params);
    }
  }

  DistillPlan dp;
  dp.name = plan.name;
  if (!members.empty()) {
    TeacherSpec t;
    t.kind = plan.teacher_kind == "single"   ? TeacherKind::kSingle
             : plan.teacher_kind == "oracle" ? TeacherKind::kOracleBleu
                                             : TeacherKind::kEnsemble;
    t.members = members;
    dp.teacher = t;
  }
  dp.recipe = plan.recipe;
  dp.filter = plan.filter;
  dp.student_dims = student_dims;
  dp.init = plan.init;
  dp.baseline = baseline;
  dp.train = tc;
  dp.beam_size = plan.beam;
  dp.workers = nworkers;
  if (plan.bpe_merges > 0) dp.subword_vocab = std::make_shared<const Vocab>(d.tgt_vocab);

  ForwardTranslation fwd;
  const bool needs_forward = plan.recipe != DataRecipe::kReferenceOnly || plan.filter.enabled;
  if (needs_forward) {
    if (log) log("forward translation with " + teacher_label(dp.teacher) + " teacher");
    DecodeConfig dc;
    dc.beam_size = plan.beam;
    fwd = forward_translate_training_data(*dp.teacher, d.train_ids, dc, nworkers);
    fs::create_directories(run.dir / "forward");
    std::vector<TokenStrings> lines;
    std::string ter_tsv = "pair_id\tter\n";
    char buf[64];
    for (const auto& p : fwd.synthetic.pairs) {
      lines.push_back(decode(p.target, d.tgt_vocab));
      std::snprintf(buf, sizeof buf, "%lld\t%.6f\n", static_cast<long long>(p.pair_id),
                    fwd.ter.at(p.pair_id));
      ter_tsv += buf;
    }
    write_lines(lines, run.dir / "forward" / "synthetic.tgt");
    write_text(run.dir / "forward" / "ter.tsv", ter_tsv);
  }

  PlanResult res = run_plan(dp, d.train_ids, d.valid_ids, d.test_ids, needs_forward ? &fwd : nullptr);
  fs::create_directories(run.dir / "training");
  write_parallel(decode_corpus(res.training_set.corpus, d.src_vocab, d.tgt_vocab),
                 run.dir / "training" / "train.src", run.dir / "training" / "train.tgt");
  char stats[160];
  std::snprintf(stats, sizeof stats, "total\tkept\tdropped\tdropped_fraction\n%lld\t%lld\t%lld\t%.6f\n",
                static_cast<long long>(res.training_set.stats.total),
                static_cast<long long>(res.training_set.stats.kept),
                static_cast<long long>(res.training_set.stats.dropped),
                res.training_set.stats.dropped_fraction());
  write_text(run.dir / "training" / "filter_stats.tsv", stats);

  fs::create_directories(run.dir / "student");
  Checkpoint student = res.training.best;
  attach_vocabs(student.meta, d.src_vocab, d.tgt_vocab);
  save_checkpoint(student, run.dir / "student" / "model.ckpt");
  save_history(res.training.history, run.dir / "student" / "history.tsv");

  write_text(run.dir / "report.tsv", render_report_tsv({res.row}));
  write_text(run.dir / "report.txt", render_report_text({res.row}));
  run.row = res.row;
  if (log) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " test BLEU %.2f TER %.2f", run.row.test_bleu, run.row.test_ter);
    log("report: " + run.row.plan + buf);
  }
  return run;
}

}  // namespace distill
