// include/distill/textcore.hpp

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

#ifndef DISTILL_TEXTCORE_HPP_
#define DISTILL_TEXTCORE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace distill {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr int kNumReserved = 4;

/// Token ids of one sentence, without <s> / </s> framing.
using Sentence = std::vector<TokenId>;
using TokenStrings = std::vector<std::string>;

/// Dense bijection between token strings and ids. Ids 0..3 are always
/// <pad>, <s>, </s>, <unk>.
class Vocab {
 public:
  /// Reserved tokens only.
  Vocab();
  /// Reserved tokens followed by `tokens` in order. Duplicates or reserved
  /// names inside `tokens` are a ConfigError.
  explicit Vocab(const std::vector<std::string>& tokens);

  std::size_t size() const { return id_to_token_.size(); }
  bool contains(std::string_view token) const;
  /// <unk> for unknown tokens.
  TokenId id(std::string_view token) const;
  /// Throws CorruptionError when out of range.
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  bool operator==(const Vocab& other) const {
    return id_to_token_ == other.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

/// Keeps the reserved ids plus the (max_size - 4) most frequent tokens,
/// ties broken by byte-wise token order. Throws ConfigError for
/// max_size < 5 and DataError for an empty corpus.
Vocab build_vocab(const std::vector<TokenStrings>& corpus, std::size_t max_size);

Sentence encode(const TokenStrings& sentence, const Vocab& vocab);
TokenStrings decode(const Sentence& sentence, const Vocab& vocab);

void save_vocab(const Vocab& vocab, const std::filesystem::path& path);
Vocab load_vocab(const std::filesystem::path& path);

/// Whitespace tokenization (spaces and tabs).
TokenStrings split_tokens(std::string_view line);
std::string join_tokens(const TokenStrings& tokens);

struct TextPair {
  std::int64_t pair_id = 0;
  TokenStrings source;
  TokenStrings target;
  bool operator==(const TextPair&) const = default;
};
using TextCorpus = std::vector<TextPair>;

struct SentencePair {
  std::int64_t pair_id = 0;
  Sentence source;
  Sentence target;
  bool operator==(const SentencePair&) const = default;
};

/// Aligned id-level corpus with unique pair ids.
struct ParallelCorpus {
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool operator==(const ParallelCorpus&) const = default;
};

/// One sentence per line, whitespace tokenized. Rejects invalid UTF-8
/// with the offending (1-based) line number.
std::vector<TokenStrings> read_lines(const std::filesystem::path& path);
void write_lines(const std::vector<TokenStrings>& lines,
                 const std::filesystem::path& path);

/// Pair i comes from line i of both files and gets pair_id i.
TextCorpus read_parallel(const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path);
void write_parallel(const TextCorpus& corpus,
                    const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path);

ParallelCorpus encode_corpus(const TextCorpus& corpus, const Vocab& source_vocab,
                             const Vocab& target_vocab);
TextCorpus decode_corpus(const ParallelCorpus& corpus, const Vocab& source_vocab,
                         const Vocab& target_vocab);

/// Throws DataError on duplicate pair ids.
void check_unique_pair_ids(const ParallelCorpus& corpus);

/// Deterministic permutation of 0..n-1 for a given (epoch, seed), drawn
/// from a counter-based generator keyed by both.
std::vector<std::size_t> shuffle_order(std::size_t n, std::int64_t epoch,
                                       std::uint64_t seed);

}  // namespace distill

#endif  // DISTILL_TEXTCORE_HPP_
