// include/distill/checkpoint.hpp

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

// Binary layout (all integers u64 little-endian unless noted):
//   "DKPT" | u32 version | metadata length | metadata (JSON text)
//   | tensor count | per tensor: name length, name, rank, dims..., f64 values
// Matrix values are stored row-major.

#ifndef DISTILL_CHECKPOINT_HPP_
#define DISTILL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "distill/model.hpp"
#include "distill/textcore.hpp"

namespace distill {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::int64_t epoch = 0;
  double learning_rate = 0.0;
  double best_validation = 0.0;
  std::uint64_t seed = 0;
  std::string init = "uniform(-0.08,0.08)";
  // Vocabularies travel with the model so decoding needs no side files.
  std::vector<std::string> src_vocab;
  std::vector<std::string> tgt_vocab;

  bool operator==(const CheckpointMeta&) const = default;
};

struct Checkpoint {
  ModelParams params;
  CheckpointMeta meta;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws CorruptionError on bad magic, version, truncation or tensor shapes
/// that disagree with the header dims; ConfigError when `expected` is given
/// and differs.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelDims>& expected = std::nullopt);

/// Serialized bytes (what save_checkpoint writes).
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

/// Full token lists (reserved tokens included) from the vocabularies.
void attach_vocabs(CheckpointMeta& meta, const Vocab& src, const Vocab& tgt);
/// Rebuilds the vocabularies; throws DataError if the checkpoint has none.
std::pair<Vocab, Vocab> checkpoint_vocabs(const CheckpointMeta& meta);

}  // namespace distill

#endif  // DISTILL_CHECKPOINT_HPP_
