// src/train.cpp

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

#include "distill/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "distill/decode.hpp"
#include "distill/errors.hpp"
#include "distill/metrics.hpp"

namespace distill {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(initial_lr > 0.0)) throw ConfigError("initial learning rate must be positive");
  if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (lr_halve_start_epoch < 1) throw ConfigError("lr_halve_start_epoch must be >= 1");
  if (beam_size < 1) throw ConfigError("beam_size must be >= 1");
}

double learning_rate_for_epoch(const TrainConfig& config, int epoch) {
  const int halvings = std::max(0, epoch - config.lr_halve_start_epoch + 1);
  return std::ldexp(config.initial_lr, -halvings);
}

bool EarlyStopping::update(double score) {
  ++epochs_;
  if (score > best_) {
    best_ = score;
    best_epoch_ = epochs_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

namespace {

// Flat views over every tensor, in visit order.
std::vector<Eigen::Map<Eigen::VectorXd>> flat_views(ModelParams& p) {
  std::vector<Eigen::Map<Eigen::VectorXd>> v;
  p.visit([&](const std::string&, auto& t, TensorKind) { v.emplace_back(t.data(), t.size()); });
  return v;
}

std::vector<Eigen::Map<const Eigen::VectorXd>> flat_views(const ModelParams& p) {
  std::vector<Eigen::Map<const Eigen::VectorXd>> v;
  p.visit([&](const std::string&, const auto& t, TensorKind) { v.emplace_back(t.data(), t.size()); });
  return v;
}

void sgd_update(ModelParams& params, const ModelParams& grad, double lr, double clip_norm) {
  const auto g = flat_views(grad);
  double scale = lr;
  if (clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& t : g) sq += t.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > clip_norm) scale *= clip_norm / norm;
  }
  auto p = flat_views(params);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= scale * g[i];
}

std::shared_ptr<const ModelParams> borrow(const ModelParams& p) {
  return std::shared_ptr<const ModelParams>(std::shared_ptr<const ModelParams>{}, &p);
}

}  // namespace

double validation_score(const ModelParams& params, const ParallelCorpus& validation,
                        ValidationMetric metric, int beam_size, int workers) {
  if (metric == ValidationMetric::kPerplexity) {
    double nll = 0.0;
    std::int64_t tokens = 0;
    for (const auto& pair : validation.pairs) {
      const auto lps = forward_logprobs(params, pair.source, pair.target);
      for (std::size_t i = 0; i < lps.size(); ++i)
        nll -= lps[i](i < pair.target.size() ? pair.target[i] : kEosId);
      tokens += static_cast<std::int64_t>(lps.size());
    }
    return -std::exp(nll / static_cast<double>(std::max<std::int64_t>(tokens, 1)));
  }
  std::vector<Sentence> sources, refs;
  sources.reserve(validation.size());
  refs.reserve(validation.size());
  for (const auto& pair : validation.pairs) {
    sources.push_back(pair.source);
    refs.push_back(pair.target);
  }
  DecodeConfig dc;
  dc.beam_size = beam_size;
  const auto hyps = translate_corpus(Scorer::single(borrow(params)), sources, dc, nullptr, workers);
  std::vector<Sentence> out;
  out.reserve(hyps.size());
  for (const auto& h : hyps) out.push_back(h.tokens);
  return corpus_bleu(out, refs).score;
}

TrainResult train(const TrainConfig& config, const ParallelCorpus& train_set,
                  const ParallelCorpus& validation, const ModelDims& dims,
                  const EpochCallback& on_epoch) {
  config.validate();
  dims.validate();
  if (train_set.empty()) throw DataError("train: empty training corpus");
  if (validation.empty()) throw DataError("train: empty validation corpus");

  ModelParams params;
  if (config.init) {
    if (config.init->params) {
      params = *config.init->params;
    } else {
      params = load_checkpoint(config.init->path).params;
    }
    if (!(params.dims == dims))
      throw ConfigError("train: continue-from model dims do not match the requested dims");
  } else {
    params = init_params(dims, config.seed);
  }

  TrainResult result;
  result.best.params = params;
  result.best.meta.seed = config.seed;
  if (config.init) result.best.meta.init = "continue:" + config.init->path.string();
  result.best.meta.learning_rate = config.max_epochs > 0 ? learning_rate_for_epoch(config, 1) : 0.0;

  EarlyStopping stopper(config.patience);
  ModelParams grad(dims);
  std::vector<const SentencePair*> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));
  const std::size_t n = train_set.size();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double lr = learning_rate_for_epoch(config, epoch);
    const auto order = shuffle_order(n, epoch, config.seed);
    double loss_sum = 0.0;
    std::int64_t token_sum = 0;
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t k = begin; k < end; ++k) batch.push_back(&train_set.pairs[order[k]]);
      std::int64_t tokens = 0;
      const double loss = loss_and_gradients(params, batch, grad, &tokens);
      loss_sum += loss * static_cast<double>(tokens);
      token_sum += tokens;
      sgd_update(params, grad, lr, config.clip_norm);
    }
    check_finite(params, "train");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = lr;
    rec.train_loss = loss_sum / static_cast<double>(token_sum);
    rec.validation_score =
        validation_score(params, validation, config.metric, config.beam_size, config.workers);
    rec.improved = stopper.update(rec.validation_score);
    if (rec.improved) {
      result.best.params = params;
      result.best.meta.epoch = epoch;
      result.best.meta.learning_rate = lr;
      result.best.meta.best_validation = rec.validation_score;
    }
    result.history.push_back(rec);
    result.epochs_run = epoch;
    if (on_epoch) on_epoch(rec);
    if (stopper.should_stop()) break;
  }
  return result;
}

void save_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch\tlr\ttrain_loss\tvalidation\timproved\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d\t%.10g\t%.10f\t%.10f\t%d\n", r.epoch, r.learning_rate,
                  r.train_loss, r.validation_score, r.improved ? 1 : 0);
    out << buf;
  }
}

}  // namespace distill
