// src/decode.cpp

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

#include "distill/decode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "distill/errors.hpp"
#include "distill/metrics.hpp"

namespace distill {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

int DecodeConfig::resolved_max_len(std::size_t source_len) const {
  if (max_len > 0) return max_len;
  return std::max(1, static_cast<int>(std::floor(max_len_factor * static_cast<double>(source_len))) +
                         max_len_offset);
}

void DecodeConfig::validate() const {
  if (beam_size < 1) throw ConfigError("beam_size must be >= 1");
  if (max_len < 0) throw ConfigError("max_len must be >= 0 (0 = automatic)");
}

Scorer Scorer::single(ParamsPtr params) {
  if (!params) throw ConfigError("scorer: null model");
  return Scorer({std::move(params)});
}

Scorer Scorer::ensemble(std::vector<ParamsPtr> members) {
  if (members.empty()) throw ConfigError("scorer: ensemble needs at least one member");
  for (const auto& m : members) {
    if (!m) throw ConfigError("scorer: null ensemble member");
    if (!(m->dims == members.front()->dims))
      throw ConfigError("scorer: ensemble members have different dims");
  }
  return Scorer(std::move(members));
}

Scorer::Context Scorer::encode(const Sentence& source) const {
  Context ctx;
  ctx.encoded.reserve(members_.size());
  for (const auto& m : members_) ctx.encoded.push_back(encode_source(*m, source));
  return ctx;
}

Scorer::State Scorer::initial_state(const Context& ctx) const {
  State s;
  for (const auto& e : ctx.encoded) s.member_states.push_back(e.init_state);
  return s;
}

void Scorer::step(const Context& ctx, const State& state, TokenId prev_token, State& next,
                  Vector& probs) const {
  next.member_states.resize(members_.size());
  Vector lp;
  probs = Vector::Zero(dims().tgt_vocab);
  for (std::size_t k = 0; k < members_.size(); ++k) {
    decoder_step(*members_[k], ctx.encoded[k], state.member_states[k], prev_token,
                 next.member_states[k], lp);
    // Flush exp underflow to zero; the vectorized exp returns a denormal.
    probs.array() += (lp.array() < -708.0).select(0.0, lp.array().exp());
  }
  probs /= static_cast<double>(members_.size());
}

Vector next_token_distribution(const Scorer& scorer, const Sentence& source,
                               const Sentence& prefix) {
  const auto ctx = scorer.encode(source);
  Scorer::State state = scorer.initial_state(ctx), next;
  Vector probs;
  scorer.step(ctx, state, kBosId, next, probs);
  for (TokenId t : prefix) {
    state = std::move(next);
    scorer.step(ctx, state, t, next, probs);
  }
  return probs;
}

namespace {

struct LiveHyp {
  Sentence tokens;
  double logprob = 0.0;
  Scorer::State state;  // after consuming the last token
  Vector probs;         // next-token distribution in that state
};

struct Expansion {
  std::size_t parent;
  TokenId token;
  double logprob;
};

// Orders by log-probability, then by the token sequence parent+token.
bool expansion_before(const Expansion& a, const Expansion& b, const std::vector<LiveHyp>& live) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  const Sentence& pa = live[a.parent].tokens;
  const Sentence& pb = live[b.parent].tokens;
  const std::size_t n = std::min(pa.size(), pb.size());
  for (std::size_t i = 0; i < n; ++i)
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  if (pa.size() != pb.size()) {
    // Equal-length beams make this unreachable; kept for a total order.
    const TokenId na = pa.size() > n ? pa[n] : a.token;
    const TokenId nb = pb.size() > n ? pb[n] : b.token;
    if (na != nb) return na < nb;
    return pa.size() < pb.size();
  }
  return a.token < b.token;
}

bool hyp_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.tokens < b.tokens;
}

}  // namespace

std::vector<Hypothesis> beam_search(const Scorer& scorer, const Sentence& source,
                                    const DecodeConfig& config) {
  config.validate();
  if (source.empty()) throw DataError("beam_search: empty source sentence");
  const auto beam = static_cast<std::size_t>(config.beam_size);
  const int max_len = config.resolved_max_len(source.size());
  const auto vocab = static_cast<TokenId>(scorer.dims().tgt_vocab);

  const auto ctx = scorer.encode(source);
  std::vector<LiveHyp> live(1);
  scorer.step(ctx, scorer.initial_state(ctx), kBosId, live[0].state, live[0].probs);

  std::vector<Hypothesis> finished;
  std::vector<Expansion> expansions;
  while (!live.empty() && finished.size() < beam) {
    expansions.clear();
    for (std::size_t h = 0; h < live.size(); ++h)
      for (TokenId t = kEosId; t < vocab; ++t)
        expansions.push_back({h, t, live[h].logprob + std::log(live[h].probs(t))});
    std::sort(expansions.begin(), expansions.end(),
              [&](const Expansion& a, const Expansion& b) { return expansion_before(a, b, live); });

    std::vector<LiveHyp> next;
    std::size_t selected = 0;
    for (const Expansion& ex : expansions) {
      if (selected >= beam || finished.size() >= beam) break;
      // Zero-probability continuations are not hypotheses; the sort puts
      // them last. Kept only when nothing else exists.
      if (ex.logprob == -kInf && (selected > 0 || !finished.empty())) break;
      const LiveHyp& parent = live[ex.parent];
      if (ex.token == kEosId) {
        finished.push_back({parent.tokens, ex.logprob, true});
        continue;
      }
      ++selected;
      LiveHyp child;
      child.tokens = parent.tokens;
      child.tokens.push_back(ex.token);
      child.logprob = ex.logprob;
      scorer.step(ctx, parent.state, ex.token, child.state, child.probs);
      if (static_cast<int>(child.tokens.size()) >= max_len) {
        // Length cap reached: close with the model's own </s> probability.
        finished.push_back({std::move(child.tokens), child.logprob + std::log(child.probs(kEosId)), true});
      } else {
        next.push_back(std::move(child));
      }
    }
    live = std::move(next);
  }

  std::sort(finished.begin(), finished.end(), hyp_before);
  if (finished.size() > beam) finished.resize(beam);
  return finished;
}

Hypothesis select_final(const std::vector<Hypothesis>& candidates, const Selection& selection) {
  if (candidates.empty()) throw DataError("select_final: empty candidate list");
  if (selection.kind == SelectionKind::kMaxLogProb) {
    auto key = [&](const Hypothesis& h) {
      if (!selection.length_normalize) return h.logprob;
      return h.logprob / static_cast<double>(std::max<std::size_t>(1, h.tokens.size() + 1));
    };
    const Hypothesis* best = &candidates.front();
    for (const auto& c : candidates) {
      const double kc = key(c), kb = key(*best);
      if (kc > kb || (kc == kb && c.tokens < best->tokens)) best = &c;
    }
    return *best;
  }
  if (selection.reference.empty())
    throw DataError("select_final: oracle BLEU selection needs a non-empty reference");
  const Hypothesis* best = nullptr;
  double best_bleu = -1.0;
  for (const auto& c : candidates) {
    const double b = sentence_bleu(c.tokens, selection.reference).score;
    const bool better =
        best == nullptr || b > best_bleu ||
        (b == best_bleu && (c.logprob > best->logprob ||
                            (c.logprob == best->logprob && c.tokens < best->tokens)));
    if (better) {
      best = &c;
      best_bleu = b;
    }
  }
  return *best;
}

namespace {

// Runs fn(i) for i in [0, n) on `workers` threads; rethrows the first error.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
  if (nthreads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(nthreads, n); ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<std::vector<Hypothesis>> beam_search_corpus(const Scorer& scorer,
                                                        const std::vector<Sentence>& sources,
                                                        const DecodeConfig& config, int workers) {
  std::vector<std::vector<Hypothesis>> out(sources.size());
  parallel_for(sources.size(), workers,
               [&](std::size_t i) { out[i] = beam_search(scorer, sources[i], config); });
  return out;
}

std::vector<Hypothesis> translate_corpus(const Scorer& scorer, const std::vector<Sentence>& sources,
                                         const DecodeConfig& config,
                                         const std::vector<Sentence>* refs, int workers) {
  const bool oracle = config.selection.kind == SelectionKind::kOracleBleu;
  if (oracle && (refs == nullptr || refs->size() != sources.size()))
    throw DataError("translate_corpus: oracle BLEU selection needs one reference per source (" +
                    std::to_string(sources.size()) + " sources, " +
                    std::to_string(refs ? refs->size() : 0) + " references)");
  std::vector<Hypothesis> out(sources.size());
  parallel_for(sources.size(), workers, [&](std::size_t i) {
    const auto candidates = beam_search(scorer, sources[i], config);
    if (oracle) {
      out[i] = select_final(candidates, Selection::oracle_bleu((*refs)[i]));
    } else {
      out[i] = select_final(candidates, config.selection);
    }
  });
  return out;
}

}  // namespace distill
