// src/model.cpp

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

#include "distill/model.hpp"

#include <cmath>
#include <string>

#include "distill/errors.hpp"
#include "distill/rng.hpp"

namespace distill {

void ModelDims::validate() const {
  if (src_vocab < kNumReserved || tgt_vocab < kNumReserved || embed_dim <= 0 ||
      hidden_dim <= 0)
    throw ConfigError("invalid model dims: src_vocab=" + std::to_string(src_vocab) +
                      " tgt_vocab=" + std::to_string(tgt_vocab) +
                      " embed=" + std::to_string(embed_dim) +
                      " hidden=" + std::to_string(hidden_dim));
}

GruParams::GruParams(std::int64_t input, std::int64_t hidden)
    : w_z(Matrix::Zero(hidden, input)),
      w_r(Matrix::Zero(hidden, input)),
      w_h(Matrix::Zero(hidden, input)),
      u_z(Matrix::Zero(hidden, hidden)),
      u_r(Matrix::Zero(hidden, hidden)),
      u_h(Matrix::Zero(hidden, hidden)),
      b_z(Vector::Zero(hidden)),
      b_r(Vector::Zero(hidden)),
      b_h(Vector::Zero(hidden)) {}

ModelParams::ModelParams(const ModelDims& d) : dims(d) {
  d.validate();
  const auto e = d.embed_dim, h = d.hidden_dim;
  src_embed = Matrix::Zero(d.src_vocab, e);
  tgt_embed = Matrix::Zero(d.tgt_vocab, e);
  enc_fwd = GruParams(e, h);
  enc_bwd = GruParams(e, h);
  dec = GruParams(e + 2 * h, h);
  att_w = Matrix::Zero(h, h);
  att_u = Matrix::Zero(h, 2 * h);
  att_v = Vector::Zero(h);
  init_w = Matrix::Zero(h, h);
  init_b = Vector::Zero(h);
  out_w = Matrix::Zero(d.tgt_vocab, 3 * h);
  out_b = Vector::Zero(d.tgt_vocab);
}

void ModelParams::set_zero() {
  visit([](const std::string&, auto& t, TensorKind) { t.setZero(); });
}

std::size_t ModelParams::num_values() const {
  std::size_t n = 0;
  visit([&](const std::string&, const auto& t, TensorKind) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p(dims);
  CounterRng rng(seed, 0x696E6974ULL);
  p.visit([&](const std::string&, auto& t, TensorKind kind) {
    if (kind == TensorKind::kBias) return;
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c)
        t(r, c) = -0.08 + 0.16 * uniform_open01(rng);
  });
  return p;
}

void check_finite(const ModelParams& params, std::string_view what) {
  params.visit([&](const std::string& name, const auto& t, TensorKind) {
    if (!t.allFinite())
      throw NumericError(std::string(what) + ": non-finite value in tensor '" + name + "'");
  });
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Vectorized exp clamps its argument near -709 and returns a denormal
// instead of underflowing; flush those to zero.
template <typename Derived>
auto exact_exp(const Eigen::ArrayBase<Derived>& a) {
  return (a < -708.0).select(0.0, a.exp());
}

// Log-softmax in place; returns nothing, `v` becomes log-probabilities.
void log_softmax_inplace(Vector& v) {
  const double mx = v.maxCoeff();
  const double lse = mx + std::log(exact_exp(v.array() - mx).sum());
  v.array() -= lse;
}

void softmax_inplace(Vector& v) {
  const double mx = v.maxCoeff();
  v = exact_exp(v.array() - mx).matrix();
  v /= v.sum();
}

void check_ids(const Sentence& s, std::int64_t vocab, const char* side) {
  for (TokenId id : s)
    if (id < 0 || id >= vocab)
      throw DataError(std::string(side) + " token id " + std::to_string(id) +
                      " out of range for vocab of size " + std::to_string(vocab));
}

// Per-step GRU quantities kept for the backward pass; columns are time steps.
struct GruTrace {
  Matrix h_prev, z, r, cand;
};

// Forward step from precomputed input projections xz/xr/xh.
template <typename In>
void gru_step(const GruParams& g, const In& xz, const In& xr, const In& xh, const Vector& h,
              Vector& z, Vector& r, Vector& cand, Vector& out) {
  z = (xz + g.u_z * h + g.b_z).unaryExpr([](double v) { return sigmoid(v); });
  r = (xr + g.u_r * h + g.b_r).unaryExpr([](double v) { return sigmoid(v); });
  cand = (xh + g.u_h * r.cwiseProduct(h) + g.b_h).array().tanh();
  out = (1.0 - z.array()) * h.array() + z.array() * cand.array();
}

// Backward of one GRU step. Writes pre-activation gradients (daz, dar, dah)
// and the gradient w.r.t. the previous state.
void gru_step_backward(const GruParams& g, const Vector& dout, const Vector& h,
                       const Vector& z, const Vector& r, const Vector& cand, Vector& daz,
                       Vector& dar, Vector& dah, Vector& dh_prev) {
  const Vector dz = dout.cwiseProduct(cand - h);
  const Vector dcand = dout.cwiseProduct(z);
  dh_prev = dout.cwiseProduct((1.0 - z.array()).matrix());
  dah = dcand.cwiseProduct((1.0 - cand.array().square()).matrix());
  const Vector drh = g.u_h.transpose() * dah;
  const Vector dr = drh.cwiseProduct(h);
  dh_prev += drh.cwiseProduct(r);
  daz = dz.cwiseProduct((z.array() * (1.0 - z.array())).matrix());
  dar = dr.cwiseProduct((r.array() * (1.0 - r.array())).matrix());
  dh_prev.noalias() += g.u_z.transpose() * daz;
  dh_prev.noalias() += g.u_r.transpose() * dar;
}

// Parameter gradients of a whole sequence from stacked per-step pieces.
void gru_param_grads(const GruParams& g, GruParams& grad, const Matrix& x, const GruTrace& tr,
                     const Matrix& daz, const Matrix& dar, const Matrix& dah) {
  grad.w_z.noalias() += daz * x.transpose();
  grad.w_r.noalias() += dar * x.transpose();
  grad.w_h.noalias() += dah * x.transpose();
  grad.u_z.noalias() += daz * tr.h_prev.transpose();
  grad.u_r.noalias() += dar * tr.h_prev.transpose();
  const Matrix rh = tr.r.cwiseProduct(tr.h_prev);
  grad.u_h.noalias() += dah * rh.transpose();
  grad.b_z += daz.rowwise().sum();
  grad.b_r += dar.rowwise().sum();
  grad.b_h += dah.rowwise().sum();
  (void)g;
}

struct EncoderTrace {
  Matrix x;  // embed x S
  GruTrace fwd, bwd;
  Matrix annotations;  // 2H x S
};

void run_encoder(const ModelParams& p, const Sentence& source, EncoderTrace& tr) {
  const auto S = static_cast<Eigen::Index>(source.size());
  const auto H = p.dims.hidden_dim;
  tr.x.resize(p.dims.embed_dim, S);
  for (Eigen::Index j = 0; j < S; ++j) tr.x.col(j) = p.src_embed.row(source[j]).transpose();

  tr.annotations.resize(2 * H, S);
  Vector z, r, cand, out;
  for (int dir = 0; dir < 2; ++dir) {
    const GruParams& g = dir == 0 ? p.enc_fwd : p.enc_bwd;
    GruTrace& t = dir == 0 ? tr.fwd : tr.bwd;
    const Matrix xz = g.w_z * tr.x, xr = g.w_r * tr.x, xh = g.w_h * tr.x;
    t.h_prev.resize(H, S);
    t.z.resize(H, S);
    t.r.resize(H, S);
    t.cand.resize(H, S);
    Vector h = Vector::Zero(H);
    for (Eigen::Index k = 0; k < S; ++k) {
      const Eigen::Index j = dir == 0 ? k : S - 1 - k;
      gru_step(g, xz.col(j), xr.col(j), xh.col(j), h, z, r, cand, out);
      t.h_prev.col(j) = h;
      t.z.col(j) = z;
      t.r.col(j) = r;
      t.cand.col(j) = cand;
      tr.annotations.block(dir * H, j, H, 1) = out;
      h = out;
    }
  }
}

// Attention read for decoder state s; writes the tanh activations (for
// backward), attention weights and context.
void attend(const ModelParams& p, const Matrix& annotations, const Matrix& att_keys,
            const Vector& s, Matrix& act, Vector& alpha, Vector& context) {
  const Vector query = p.att_w * s;
  act = (att_keys.colwise() + query).array().tanh();
  alpha = act.transpose() * p.att_v;
  softmax_inplace(alpha);
  context.noalias() = annotations * alpha;
}

}  // namespace

EncodedSource encode_source(const ModelParams& params, const Sentence& source) {
  if (source.empty()) throw DataError("encode_source: empty source sentence");
  check_ids(source, params.dims.src_vocab, "source");
  EncoderTrace tr;
  run_encoder(params, source, tr);
  EncodedSource enc;
  const auto H = params.dims.hidden_dim;
  enc.att_keys = params.att_u * tr.annotations;
  enc.init_state =
      (params.init_w * tr.annotations.block(H, 0, H, 1) + params.init_b).array().tanh();
  enc.annotations = std::move(tr.annotations);
  return enc;
}

void decoder_step(const ModelParams& params, const EncodedSource& enc, const Vector& state,
                  TokenId prev_token, Vector& next_state, Vector& log_probs) {
  if (prev_token < 0 || prev_token >= params.dims.tgt_vocab)
    throw DataError("target token id " + std::to_string(prev_token) + " out of range");
  const auto E = params.dims.embed_dim;
  const auto H = params.dims.hidden_dim;
  Matrix act;
  Vector alpha, context;
  attend(params, enc.annotations, enc.att_keys, state, act, alpha, context);
  Vector x(E + 2 * H);
  x.head(E) = params.tgt_embed.row(prev_token).transpose();
  x.tail(2 * H) = context;
  const GruParams& g = params.dec;
  Vector z, r, cand;
  const Vector xz = g.w_z * x, xr = g.w_r * x, xh = g.w_h * x;
  gru_step(g, xz, xr, xh, state, z, r, cand, next_state);
  Vector o(3 * H);
  o.head(H) = next_state;
  o.tail(2 * H) = context;
  log_probs = params.out_w * o + params.out_b;
  log_softmax_inplace(log_probs);
}

std::vector<Vector> forward_logprobs(const ModelParams& params, const Sentence& source,
                                     const Sentence& target_prefix) {
  check_ids(target_prefix, params.dims.tgt_vocab, "target");
  const EncodedSource enc = encode_source(params, source);
  std::vector<Vector> out;
  out.reserve(target_prefix.size() + 1);
  Vector state = enc.init_state, next, lp;
  TokenId prev = kBosId;
  for (std::size_t i = 0; i <= target_prefix.size(); ++i) {
    decoder_step(params, enc, state, prev, next, lp);
    out.push_back(lp);
    state = next;
    if (i < target_prefix.size()) prev = target_prefix[i];
  }
  return out;
}

namespace {

// Forward + backward for one pair; gradients scaled by `weight` are added to
// `grad`. Returns the summed negative log-likelihood.
double sentence_loss_and_grad(const ModelParams& p, const SentencePair& pair, double weight,
                              ModelParams& grad) {
  const auto E = p.dims.embed_dim;
  const auto H = p.dims.hidden_dim;
  const auto V = p.dims.tgt_vocab;
  const Sentence& src = pair.source;
  const auto S = static_cast<Eigen::Index>(src.size());
  const auto T = static_cast<Eigen::Index>(pair.target.size()) + 1;  // incl. </s>

  // ---- forward ----
  EncoderTrace enc;
  run_encoder(p, src, enc);
  const Matrix& ann = enc.annotations;
  const Matrix keys = p.att_u * ann;
  const Vector hb0 = ann.block(H, 0, H, 1);
  const Vector s0 = (p.init_w * hb0 + p.init_b).array().tanh();

  std::vector<TokenId> inputs(static_cast<std::size_t>(T));
  std::vector<TokenId> outputs(static_cast<std::size_t>(T));
  inputs[0] = kBosId;
  for (Eigen::Index i = 0; i < T; ++i) {
    outputs[static_cast<std::size_t>(i)] =
        i + 1 < T ? pair.target[static_cast<std::size_t>(i)] : kEosId;
    if (i > 0) inputs[static_cast<std::size_t>(i)] = pair.target[static_cast<std::size_t>(i - 1)];
  }

  std::vector<Matrix> acts(static_cast<std::size_t>(T));
  Matrix alphas(S, T), xs(E + 2 * H, T), outs(3 * H, T), dlogits(V, T);
  GruTrace dtr;
  dtr.h_prev.resize(H, T);
  dtr.z.resize(H, T);
  dtr.r.resize(H, T);
  dtr.cand.resize(H, T);

  double nll = 0.0;
  Vector s = s0, alpha, context, z, r, cand, s_next, logits;
  for (Eigen::Index i = 0; i < T; ++i) {
    attend(p, ann, keys, s, acts[static_cast<std::size_t>(i)], alpha, context);
    alphas.col(i) = alpha;
    xs.col(i).head(E) = p.tgt_embed.row(inputs[static_cast<std::size_t>(i)]).transpose();
    xs.col(i).tail(2 * H) = context;
    const Vector xz = p.dec.w_z * xs.col(i), xr = p.dec.w_r * xs.col(i),
                 xh = p.dec.w_h * xs.col(i);
    gru_step(p.dec, xz, xr, xh, s, z, r, cand, s_next);
    dtr.h_prev.col(i) = s;
    dtr.z.col(i) = z;
    dtr.r.col(i) = r;
    dtr.cand.col(i) = cand;
    outs.col(i).head(H) = s_next;
    outs.col(i).tail(2 * H) = context;
    logits = p.out_w * outs.col(i) + p.out_b;
    log_softmax_inplace(logits);
    const TokenId y = outputs[static_cast<std::size_t>(i)];
    nll -= logits(y);
    // d(-log p_y)/d logits = p - onehot(y)
    dlogits.col(i) = exact_exp(logits.array()).matrix();
    dlogits(y, i) -= 1.0;
    s = s_next;
  }
  dlogits *= weight;

  // ---- backward: output layer ----
  grad.out_w.noalias() += dlogits * outs.transpose();
  grad.out_b += dlogits.rowwise().sum();
  const Matrix douts = p.out_w.transpose() * dlogits;  // 3H x T

  // ---- backward: decoder recurrence ----
  Matrix daz(H, T), dar(H, T), dah(H, T);
  Matrix dann = Matrix::Zero(2 * H, S);
  Matrix dkeys = Matrix::Zero(H, S);
  Vector ds = Vector::Zero(H);  // gradient w.r.t. the state leaving step i
  Vector vz, vr, vh, dh_prev;
  for (Eigen::Index i = T - 1; i >= 0; --i) {
    const Vector dstate = ds + douts.col(i).head(H);
    gru_step_backward(p.dec, dstate, dtr.h_prev.col(i), dtr.z.col(i), dtr.r.col(i),
                      dtr.cand.col(i), vz, vr, vh, dh_prev);
    daz.col(i) = vz;
    dar.col(i) = vr;
    dah.col(i) = vh;
    Vector dx = p.dec.w_z.transpose() * vz;
    dx.noalias() += p.dec.w_r.transpose() * vr;
    dx.noalias() += p.dec.w_h.transpose() * vh;
    grad.tgt_embed.row(inputs[static_cast<std::size_t>(i)]) += dx.head(E).transpose();

    // context feeds both the GRU input and the output layer
    const Vector dctx = dx.tail(2 * H) + douts.col(i).tail(2 * H);
    const auto& act = acts[static_cast<std::size_t>(i)];
    const Vector a = alphas.col(i);
    dann.noalias() += dctx * a.transpose();
    const Vector dalpha = ann.transpose() * dctx;
    const Vector de = a.cwiseProduct((dalpha.array() - a.dot(dalpha)).matrix());
    grad.att_v.noalias() += act * de;
    // d pre-activation = (v_a de^T) .* (1 - act^2)
    const Matrix dpre = (p.att_v * de.transpose()).cwiseProduct(
        (1.0 - act.array().square()).matrix());
    dkeys += dpre;
    const Vector dquery = dpre.rowwise().sum();
    grad.att_w.noalias() += dquery * dtr.h_prev.col(i).transpose();
    ds = dh_prev;
    ds.noalias() += p.att_w.transpose() * dquery;
  }
  gru_param_grads(p.dec, grad.dec, xs, dtr, daz, dar, dah);

  // keys = U_a * annotations
  grad.att_u.noalias() += dkeys * ann.transpose();
  dann.noalias() += p.att_u.transpose() * dkeys;

  // s0 = tanh(W_init hb0 + b_init)
  const Vector dinit = ds.cwiseProduct((1.0 - s0.array().square()).matrix());
  grad.init_w.noalias() += dinit * hb0.transpose();
  grad.init_b += dinit;
  dann.block(H, 0, H, 1).noalias() += p.init_w.transpose() * dinit;

  // ---- backward: encoder ----
  Matrix dx_src = Matrix::Zero(E, S);
  for (int dir = 0; dir < 2; ++dir) {
    const GruParams& g = dir == 0 ? p.enc_fwd : p.enc_bwd;
    GruParams& gg = dir == 0 ? grad.enc_fwd : grad.enc_bwd;
    const GruTrace& t = dir == 0 ? enc.fwd : enc.bwd;
    Matrix ez(H, S), er(H, S), eh(H, S);
    Vector carry = Vector::Zero(H);
    // Reverse of the processing order of this direction.
    for (Eigen::Index k = S - 1; k >= 0; --k) {
      const Eigen::Index j = dir == 0 ? k : S - 1 - k;
      const Vector dout = carry + dann.block(dir * H, j, H, 1);
      gru_step_backward(g, dout, t.h_prev.col(j), t.z.col(j), t.r.col(j), t.cand.col(j), vz,
                        vr, vh, dh_prev);
      ez.col(j) = vz;
      er.col(j) = vr;
      eh.col(j) = vh;
      carry = dh_prev;
    }
    gru_param_grads(g, gg, enc.x, t, ez, er, eh);
    dx_src.noalias() += g.w_z.transpose() * ez;
    dx_src.noalias() += g.w_r.transpose() * er;
    dx_src.noalias() += g.w_h.transpose() * eh;
  }
  for (Eigen::Index j = 0; j < S; ++j)
    grad.src_embed.row(src[static_cast<std::size_t>(j)]) += dx_src.col(j).transpose();

  return nll;
}

}  // namespace

double loss_and_gradients(const ModelParams& params,
                          const std::vector<const SentencePair*>& batch,
                          ModelParams& gradients, std::int64_t* tokens) {
  if (batch.empty()) throw DataError("loss_and_gradients: empty batch");
  if (!(gradients.dims == params.dims)) gradients = ModelParams(params.dims);
  gradients.set_zero();
  std::int64_t total = 0;
  for (const SentencePair* pair : batch) {
    if (pair->source.empty())
      throw DataError("pair " + std::to_string(pair->pair_id) + ": empty source sentence");
    check_ids(pair->source, params.dims.src_vocab, "source");
    check_ids(pair->target, params.dims.tgt_vocab, "target");
    total += static_cast<std::int64_t>(pair->target.size()) + 1;
  }
  const double weight = 1.0 / static_cast<double>(total);
  double nll = 0.0;
  for (const SentencePair* pair : batch) nll += sentence_loss_and_grad(params, *pair, weight, gradients);
  const double loss = nll / static_cast<double>(total);
  check_finite(gradients, "loss_and_gradients");
  if (!std::isfinite(loss)) throw NumericError("loss_and_gradients: non-finite loss");
  if (tokens != nullptr) *tokens = total;
  return loss;
}

LossAndGradients loss_and_gradients(const ModelParams& params,
                                    const std::vector<const SentencePair*>& batch) {
  LossAndGradients out;
  out.gradients = ModelParams(params.dims);
  out.loss = loss_and_gradients(params, batch, out.gradients, &out.tokens);
  return out;
}

}  // namespace distill
