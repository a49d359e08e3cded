// src/bpe.cpp

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

#include "distill/bpe.hpp"

#include <fstream>

#include "distill/errors.hpp"

namespace distill {

namespace {

const std::string kMarker = kBpeMarker;
const std::string kHeader = "#version:1";

bool has_marker(const std::string& tok) {
  return tok.size() >= kMarker.size() &&
         tok.compare(tok.size() - kMarker.size(), kMarker.size(), kMarker) == 0;
}

// Merges every non-overlapping occurrence of (left, right), left to right.
void merge_pair(std::vector<std::string>& symbols, const std::string& left,
                const std::string& right) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      out.push_back(left + right);
      ++i;
    } else {
      out.push_back(std::move(symbols[i]));
    }
  }
  symbols = std::move(out);
}

}  // namespace

MergeTable::MergeTable(std::vector<Merge> merges) : merges_(std::move(merges)) {
  for (std::size_t i = 0; i < merges_.size(); ++i)
    if (!ranks_.emplace(merges_[i], static_cast<std::ptrdiff_t>(i)).second)
      throw ConfigError("merge table: duplicate pair (" + merges_[i].first + ", " +
                        merges_[i].second + ")");
}

std::ptrdiff_t MergeTable::rank(const std::string& left, const std::string& right) const {
  auto it = ranks_.find(Merge(left, right));
  return it == ranks_.end() ? -1 : it->second;
}

std::vector<std::string> split_chars(const std::string& word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto c = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    len = std::min(len, word.size() - i);
    out.push_back(word.substr(i, len));
    i += len;
  }
  return out;
}

MergeTable learn_bpe(const std::vector<TokenStrings>& corpus, std::size_t num_merges) {
  if (corpus.empty()) throw DataError("learn_bpe: empty corpus");
  std::map<std::string, std::int64_t> word_counts;
  for (const auto& line : corpus)
    for (const auto& w : line) ++word_counts[w];

  std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
  words.reserve(word_counts.size());
  for (const auto& [w, c] : word_counts) words.emplace_back(split_chars(w), c);

  std::vector<MergeTable::Merge> merges;
  while (merges.size() < num_merges) {
    std::map<MergeTable::Merge, std::int64_t> pair_counts;
    for (const auto& [symbols, count] : words)
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
        pair_counts[{symbols[i], symbols[i + 1]}] += count;

    // std::map iterates in (left, right) order, so the first maximum wins ties.
    const MergeTable::Merge* best = nullptr;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr || best_count < 2) break;
    const MergeTable::Merge chosen = *best;
    for (auto& entry : words) merge_pair(entry.first, chosen.first, chosen.second);
    merges.push_back(chosen);
  }
  return MergeTable(std::move(merges));
}

std::vector<std::string> segment_word(const std::string& word, const MergeTable& table) {
  std::vector<std::string> symbols = split_chars(word);
  while (symbols.size() > 1) {
    std::ptrdiff_t best_rank = -1;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const std::ptrdiff_t r = table.rank(symbols[i], symbols[i + 1]);
      if (r >= 0 && (best_rank < 0 || r < best_rank)) {
        best_rank = r;
        best_pos = i;
      }
    }
    if (best_rank < 0) break;
    const std::string left = symbols[best_pos];
    const std::string right = symbols[best_pos + 1];
    merge_pair(symbols, left, right);
  }
  return symbols;
}

TokenStrings apply_bpe(const TokenStrings& sentence, const MergeTable& table) {
  TokenStrings out;
  out.reserve(sentence.size() * 2);
  for (const auto& word : sentence) {
    if (has_marker(word))
      throw DataError("apply_bpe: word '" + word + "' ends with the continuation marker");
    auto pieces = segment_word(word, table);
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) out.push_back(pieces[i] + kMarker);
    if (!pieces.empty()) out.push_back(std::move(pieces.back()));
  }
  return out;
}

TokenStrings undo_bpe(const TokenStrings& sentence) {
  TokenStrings out;
  std::string pending;
  bool open = false;
  for (const auto& tok : sentence) {
    if (has_marker(tok)) {
      pending += tok.substr(0, tok.size() - kMarker.size());
      open = true;
    } else {
      out.push_back(pending + tok);
      pending.clear();
      open = false;
    }
  }
  if (open) throw DataError("undo_bpe: dangling continuation marker at sentence end");
  return out;
}

void save_merges(const MergeTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write merge table " + path.string());
  out << kHeader << '\n';
  for (const auto& [l, r] : table.merges()) out << l << ' ' << r << '\n';
  if (!out) throw DataError("error writing merge table " + path.string());
}

MergeTable load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open merge table " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw CorruptionError(path.string() + ": missing '" + kHeader + "' header");
  std::vector<MergeTable::Merge> merges;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_tokens(line);
    if (fields.size() != 2)
      throw CorruptionError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 'left right'");
    merges.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  return MergeTable(std::move(merges));
}

}  // namespace distill
