// tests/oracles/toy_models.hpp

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

// Hand-built and random models with known decoding behavior.

#ifndef DISTILL_TESTS_TOY_MODELS_HPP_
#define DISTILL_TESTS_TOY_MODELS_HPP_

#include <cmath>
#include <memory>
#include <vector>

#include "distill/model.hpp"
#include "oracles/finite_diff.hpp"

namespace distill::testing {

using Ptr = std::shared_ptr<const ModelParams>;

inline Ptr share(ModelParams p) { return std::make_shared<const ModelParams>(std::move(p)); }

// Random weights large enough to give peaked, input-dependent distributions.
inline Ptr random_tiny(std::int64_t tgt_vocab, std::uint64_t seed) {
  return share(testing::random_model(ModelDims{7, tgt_vocab, 3, 4}, 1.5, seed));
}

// Input-independent model: all weights zero, output bias = log(probs).
inline Ptr constant_model(const std::vector<double>& probs) {
  ModelParams p(ModelDims{5, static_cast<std::int64_t>(probs.size()), 2, 2});
  for (std::size_t i = 0; i < probs.size(); ++i)
    p.out_b(static_cast<Eigen::Index>(i)) = probs[i] > 0 ? std::log(probs[i]) : -1e4;
  return share(std::move(p));
}

// Emits 4 5 </s> with probability 1: the decoder state is a saturated copy
// of the previous token's one-hot embedding, the output layer maps each
// previous token to its successor with a huge logit.
inline Ptr chain_model() {
  const std::int64_t V = 6;
  ModelParams p(ModelDims{5, V, V, V});
  p.tgt_embed.setIdentity();
  p.dec.b_z.setConstant(50.0);
  p.dec.w_h.leftCols(V) = 10.0 * Matrix::Identity(V, V);
  p.out_w(4, kBosId) = 2000.0;
  p.out_w(5, 4) = 2000.0;
  p.out_w(kEosId, 5) = 2000.0;
  return share(std::move(p));
}

}  // namespace distill::testing

#endif  // DISTILL_TESTS_TOY_MODELS_HPP_
