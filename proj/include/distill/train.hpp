// include/distill/train.hpp

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

#ifndef DISTILL_TRAIN_HPP_
#define DISTILL_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "distill/checkpoint.hpp"
#include "distill/model.hpp"
#include "distill/textcore.hpp"

namespace distill {

/// Start from a trained model instead of random weights. `params`, when
/// set, is used directly and `path` is only informative.
struct ContinueFrom {
  std::filesystem::path path;
  std::shared_ptr<const ModelParams> params;
};

enum class ValidationMetric { kBleu, kPerplexity };

struct TrainConfig {
  int batch_size = 64;
  double initial_lr = 1.0;
  int lr_halve_start_epoch = 4;
  int patience = 3;
  int max_epochs = 20;
  std::uint64_t seed = 1;
  std::optional<ContinueFrom> init;  // empty: scratch
  double clip_norm = 0.0;            // <= 0: no clipping
  ValidationMetric metric = ValidationMetric::kBleu;
  int beam_size = 5;                 // validation decoding
  int workers = 1;                   // validation decoding threads

  void validate() const;
};

/// lr for a 1-based epoch: initial_lr until lr_halve_start_epoch - 1, then
/// halved once more at the start of every later epoch.
double learning_rate_for_epoch(const TrainConfig& config, int epoch);

/// Tracks the best validation score; asks to stop once `patience` epochs in
/// a row brought no strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  /// Returns true when `score` is a new best.
  bool update(double score);
  bool should_stop() const { return since_best_ >= patience_; }
  double best() const { return best_; }
  int best_epoch() const { return best_epoch_; }

 private:
  int patience_;
  int epochs_ = 0;
  int since_best_ = 0;
  int best_epoch_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;  // token-weighted mean over the epoch
  double validation_score = 0.0;
  bool improved = false;
};

struct TrainResult {
  Checkpoint best;  // parameters of the best validation epoch
  std::vector<EpochRecord> history;
  int epochs_run = 0;
};

/// Higher is better: corpus BLEU of beam decodes, or negative perplexity.
double validation_score(const ModelParams& params, const ParallelCorpus& validation,
                        ValidationMetric metric, int beam_size, int workers);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch SGD with the halving schedule and patience-based stopping.
/// Throws ConfigError when a ContinueFrom model does not match `dims`.
TrainResult train(const TrainConfig& config, const ParallelCorpus& train_set,
                  const ParallelCorpus& validation, const ModelDims& dims,
                  const EpochCallback& on_epoch = {});

/// Writes the history as TSV (epoch, lr, train_loss, validation, improved).
void save_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace distill

#endif  // DISTILL_TRAIN_HPP_
