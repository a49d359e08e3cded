// include/distill/model.hpp

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

// Attentional encoder-decoder with a bidirectional GRU encoder and a single
// GRU decoder layer. All arithmetic is in double precision.
//
// GRU (same for all three recurrent layers), input x, previous state h:
//   z  = sigmoid(W_z x + U_z h + b_z)
//   r  = sigmoid(W_r x + U_r h + b_r)
//   h~ = tanh(W_h x + U_h (r * h) + b_h)
//   h' = (1 - z) * h + z * h~
//
// Encoder: annotation j is [forward state after x_j ; backward state at x_j].
// Decoder, for output step i with previous token y and previous state s:
//   e_j = v_a . tanh(W_a s + U_a h_j),  alpha = softmax(e)
//   c   = sum_j alpha_j h_j
//   s'  = GRU_dec([E_tgt(y) ; c], s)
//   p   = softmax(W_o [s' ; c] + b_o)
// The first decoder state is tanh(W_init hb_0 + b_init), hb_0 being the
// final state of the backward encoder.

#ifndef DISTILL_MODEL_HPP_
#define DISTILL_MODEL_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "distill/textcore.hpp"

namespace distill {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ModelDims {
  std::int64_t src_vocab = 0;
  std::int64_t tgt_vocab = 0;
  std::int64_t embed_dim = 0;
  std::int64_t hidden_dim = 0;

  bool operator==(const ModelDims&) const = default;
  /// Throws ConfigError unless every field is positive and both vocabularies
  /// hold at least the reserved tokens.
  void validate() const;
};

enum class TensorKind { kWeight, kBias };

struct GruParams {
  Matrix w_z, w_r, w_h;  // hidden x input
  Matrix u_z, u_r, u_h;  // hidden x hidden
  Vector b_z, b_r, b_h;

  GruParams() = default;
  GruParams(std::int64_t input, std::int64_t hidden);

  template <typename Self, typename F>
  static void visit(Self& self, std::string_view prefix, F&& f);
};

/// Named tensors of the whole model, each shaped by ModelDims.
struct ModelParams {
  ModelDims dims;
  Matrix src_embed;  // src_vocab x embed (row = embedding)
  Matrix tgt_embed;  // tgt_vocab x embed
  GruParams enc_fwd;
  GruParams enc_bwd;
  GruParams dec;     // input = embed + 2 hidden
  Matrix att_w;      // hidden x hidden      (applied to decoder state)
  Matrix att_u;      // hidden x 2 hidden    (applied to annotations)
  Vector att_v;      // hidden
  Matrix init_w;     // hidden x hidden
  Vector init_b;
  Matrix out_w;      // tgt_vocab x 3 hidden
  Vector out_b;

  ModelParams() = default;
  /// All-zero tensors of the right shapes.
  explicit ModelParams(const ModelDims& dims);

  /// Calls f(name, tensor, kind) for every tensor in a fixed order; tensor
  /// is a Matrix or a Vector.
  template <typename F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <typename F>
  void visit(F&& f) const { visit_impl(*this, f); }

  void set_zero();
  std::size_t num_values() const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f);
};

/// Weights ~ U(-0.08, 0.08), biases 0; a pure function of (dims, seed).
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

/// Throws NumericError naming the first tensor that holds NaN or Inf.
void check_finite(const ModelParams& params, std::string_view what);

/// Encoder output reused across decoder steps.
struct EncodedSource {
  Matrix annotations;  // 2 hidden x source length
  Matrix att_keys;     // hidden x source length, U_a * annotations
  Vector init_state;
};

EncodedSource encode_source(const ModelParams& params, const Sentence& source);

/// One decoder step: consumes `prev_token` in state `state`, writes the new
/// state and the log-distribution over the target vocabulary.
void decoder_step(const ModelParams& params, const EncodedSource& enc,
                  const Vector& state, TokenId prev_token, Vector& next_state,
                  Vector& log_probs);

/// Teacher-forced log-distributions for every step of <s> + target_prefix:
/// target_prefix.size() + 1 vectors. Throws DataError for an empty source or
/// out-of-range ids.
std::vector<Vector> forward_logprobs(const ModelParams& params, const Sentence& source,
                                     const Sentence& target_prefix);

struct LossAndGradients {
  double loss = 0.0;        // mean negative log-likelihood per target token
  std::int64_t tokens = 0;  // target tokens including </s>
  ModelParams gradients;
};

/// Cross-entropy over the batch (teacher forcing, </s> included), averaged
/// over target tokens, with exact gradients.
LossAndGradients loss_and_gradients(const ModelParams& params,
                                    const std::vector<const SentencePair*>& batch);

/// Same, accumulating into a caller-owned gradient buffer (zeroed first).
/// Returns the mean loss; `tokens` receives the token count.
double loss_and_gradients(const ModelParams& params,
                          const std::vector<const SentencePair*>& batch,
                          ModelParams& gradients, std::int64_t* tokens = nullptr);

// ---------------------------------------------------------------------------

template <typename Self, typename F>
void GruParams::visit(Self& self, std::string_view prefix, F&& f) {
  const std::string p(prefix);
  f(p + ".w_z", self.w_z, TensorKind::kWeight);
  f(p + ".w_r", self.w_r, TensorKind::kWeight);
  f(p + ".w_h", self.w_h, TensorKind::kWeight);
  f(p + ".u_z", self.u_z, TensorKind::kWeight);
  f(p + ".u_r", self.u_r, TensorKind::kWeight);
  f(p + ".u_h", self.u_h, TensorKind::kWeight);
  f(p + ".b_z", self.b_z, TensorKind::kBias);
  f(p + ".b_r", self.b_r, TensorKind::kBias);
  f(p + ".b_h", self.b_h, TensorKind::kBias);
}

template <typename Self, typename F>
void ModelParams::visit_impl(Self& self, F& f) {
  f(std::string("src_embed"), self.src_embed, TensorKind::kWeight);
  f(std::string("tgt_embed"), self.tgt_embed, TensorKind::kWeight);
  GruParams::visit(self.enc_fwd, "enc_fwd", f);
  GruParams::visit(self.enc_bwd, "enc_bwd", f);
  GruParams::visit(self.dec, "dec", f);
  f(std::string("att_w"), self.att_w, TensorKind::kWeight);
  f(std::string("att_u"), self.att_u, TensorKind::kWeight);
  f(std::string("att_v"), self.att_v, TensorKind::kWeight);
  f(std::string("init_w"), self.init_w, TensorKind::kWeight);
  f(std::string("init_b"), self.init_b, TensorKind::kBias);
  f(std::string("out_w"), self.out_w, TensorKind::kWeight);
  f(std::string("out_b"), self.out_b, TensorKind::kBias);
}

}  // namespace distill

#endif  // DISTILL_MODEL_HPP_
