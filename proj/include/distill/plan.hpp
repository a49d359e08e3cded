// include/distill/plan.hpp

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


// Plan files: INI-style "key = value" lines grouped in [sections].
//
//   name = toy                 top level: name, seed, workers
//   [data]                     toy_seed, toy_train, toy_valid, toy_test,
//                              noise_rate, or train_src/train_tgt/valid_src/
//                              valid_tgt/test_src/test_tgt (relative to the
//                              plan file); vocab_size, bpe_merges, joint_bpe
//   [baseline]                 hlayer, wemb (dims of baseline and teachers)
//   [teacher]                  kind = none|single|ensemble|oracle,
//                              members = N (trained here) or models = a b
//   [student]                  recipe, filter, ter_threshold,
//                              init = scratch|continue, hlayer, wemb
//   [train]                    batch_size, initial_lr, halve_start, patience,
//                              max_epochs, clip_norm, metric = bleu|perplexity
//   [decode]                   beam

#ifndef DISTILL_PLAN_HPP_
#define DISTILL_PLAN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "distill/distill.hpp"

namespace distill {

struct PlanFile {
  std::string name;
  std::filesystem::path base_dir;
  std::uint64_t seed = 1;
  int workers = 1;

  // [data]
  std::uint64_t toy_seed = 0;
  std::size_t toy_train = 0;  // > 0 selects generated toy data
  std::size_t toy_valid = 0;
  std::size_t toy_test = 0;
  double noise_rate = 0.0;
  std::filesystem::path train_src, train_tgt, valid_src, valid_tgt, test_src, test_tgt;
  std::size_t vocab_size = 1000;
  std::size_t bpe_merges = 0;  // 0: no subword segmentation
  bool joint_bpe = false;

  // [baseline]
  std::int64_t baseline_hidden = 64;
  std::int64_t baseline_embed = 32;

  // [teacher]
  std::string teacher_kind = "none";
  int teacher_members = 0;
  std::vector<std::filesystem::path> teacher_models;

  // [student]
  DataRecipe recipe = DataRecipe::kForwardPlusOriginal;
  FilterSpec filter;
  InitMode init = InitMode::kScratch;
  std::int64_t student_hidden = 64;
  std::int64_t student_embed = 32;

  // [train], [decode]
  TrainConfig train;
  int beam = 5;

  bool uses_toy_data() const { return toy_train > 0; }
  void validate() const;
};

/// Throws ConfigError on unknown keys, bad values or missing fields.
PlanFile parse_plan(const std::filesystem::path& path);
PlanFile parse_plan_text(const std::string& text, const std::filesystem::path& base_dir);

using LogFn = std::function<void(const std::string&)>;

struct PlanRun {
  ReportRow row;
  std::filesystem::path dir;  // <out_root>/<name>
};

/// Runs the plan and writes every artifact under <out_root>/<name>:
/// data/, teacher_<k>/, baseline/, forward/, training/, student/,
/// report.tsv and report.txt. Output bytes depend only on the plan and
/// its inputs, not on `workers`.
PlanRun execute_plan(const PlanFile& plan, const std::filesystem::path& out_root,
                     std::optional<int> workers = std::nullopt, const LogFn& log = {});

}  // namespace distill

#endif  // DISTILL_PLAN_HPP_
