// include/distill/bpe.hpp

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

#ifndef DISTILL_BPE_HPP_
#define DISTILL_BPE_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "distill/textcore.hpp"

namespace distill {

inline constexpr const char* kBpeMarker = "@@";

/// Ordered merge list; position is priority (earlier merges win).
class MergeTable {
 public:
  using Merge = std::pair<std::string, std::string>;

  MergeTable() = default;
  /// Throws ConfigError on duplicate pairs.
  explicit MergeTable(std::vector<Merge> merges);

  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t size() const { return merges_.size(); }
  /// Priority of a pair, or -1 when absent.
  std::ptrdiff_t rank(const std::string& left, const std::string& right) const;

  bool operator==(const MergeTable& other) const { return merges_ == other.merges_; }

 private:
  std::vector<Merge> merges_;
  std::map<Merge, std::ptrdiff_t> ranks_;
};

/// Splits a word into UTF-8 code points.
std::vector<std::string> split_chars(const std::string& word);

/// Learns up to num_merges merges over the word types of the corpus. Words
/// start as character sequences; each step merges the most frequent adjacent
/// pair (ties: smaller (left, right) byte-wise). Stops early once no pair
/// occurs at least twice.
MergeTable learn_bpe(const std::vector<TokenStrings>& corpus, std::size_t num_merges);

/// Segments one word; returns subwords without markers.
std::vector<std::string> segment_word(const std::string& word, const MergeTable& table);

/// Non-final subwords of every word get the "@@" suffix. A word that itself
/// ends in "@@" cannot be restored and is a DataError.
TokenStrings apply_bpe(const TokenStrings& sentence, const MergeTable& table);

/// Glues "@@"-suffixed tokens to their successors. A marker on the last
/// token is a DataError.
TokenStrings undo_bpe(const TokenStrings& sentence);

/// "#version:1" header followed by "left right" lines.
void save_merges(const MergeTable& table, const std::filesystem::path& path);
MergeTable load_merges(const std::filesystem::path& path);

}  // namespace distill

#endif  // DISTILL_BPE_HPP_
