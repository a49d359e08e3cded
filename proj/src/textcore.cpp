// src/textcore.cpp

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

#include "distill/textcore.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

#include "distill/errors.hpp"
#include "distill/rng.hpp"

namespace distill {

namespace {

const std::vector<std::string> kReservedTokens = {"<pad>", "<s>", "</s>", "<unk>"};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += extra + 1;
  }
  return true;
}

}  // namespace

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& tokens) {
  id_to_token_.reserve(kNumReserved + tokens.size());
  for (const auto& t : kReservedTokens) {
    token_to_id_.emplace(t, static_cast<TokenId>(id_to_token_.size()));
    id_to_token_.push_back(t);
  }
  for (const auto& t : tokens) {
    if (t.empty()) throw ConfigError("vocab: empty token");
    if (!token_to_id_.emplace(t, static_cast<TokenId>(id_to_token_.size())).second)
      throw ConfigError("vocab: duplicate or reserved token '" + t + "'");
    id_to_token_.push_back(t);
  }
}

bool Vocab::contains(std::string_view token) const {
  return token_to_id_.find(std::string(token)) != token_to_id_.end();
}

TokenId Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size())
    throw CorruptionError("token id " + std::to_string(id) +
                          " out of range for vocab of size " +
                          std::to_string(id_to_token_.size()));
  return id_to_token_[static_cast<std::size_t>(id)];
}

Vocab build_vocab(const std::vector<TokenStrings>& corpus, std::size_t max_size) {
  if (max_size < kNumReserved + 1)
    throw ConfigError("build_vocab: max_size must be at least 5, got " +
                      std::to_string(max_size));
  if (corpus.empty()) throw DataError("build_vocab: empty corpus");

  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& line : corpus)
    for (const auto& tok : line) ++counts[tok];
  for (const auto& r : kReservedTokens) counts.erase(r);

  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t keep = std::min(ranked.size(), max_size - kNumReserved);
  std::vector<std::string> tokens;
  tokens.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) tokens.push_back(ranked[i].first);
  return Vocab(tokens);
}

Sentence encode(const TokenStrings& sentence, const Vocab& vocab) {
  Sentence out;
  out.reserve(sentence.size());
  for (const auto& tok : sentence) out.push_back(vocab.id(tok));
  return out;
}

TokenStrings decode(const Sentence& sentence, const Vocab& vocab) {
  TokenStrings out;
  out.reserve(sentence.size());
  for (TokenId id : sentence) out.push_back(vocab.token(id));
  return out;
}

void save_vocab(const Vocab& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocab file " + path.string());
  for (std::size_t i = kNumReserved; i < vocab.size(); ++i)
    out << vocab.tokens()[i] << '\n';
  if (!out) throw DataError("error writing vocab file " + path.string());
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::vector<std::string> tokens;
  for (auto& line : read_lines(path)) {
    if (line.size() != 1)
      throw DataError("vocab file " + path.string() + ": expected one token per line");
    tokens.push_back(std::move(line[0]));
  }
  return Vocab(tokens);
}

TokenStrings split_tokens(std::string_view line) {
  TokenStrings out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join_tokens(const TokenStrings& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<TokenStrings> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<TokenStrings> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!valid_utf8(line))
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": invalid UTF-8");
    lines.push_back(split_tokens(line));
  }
  return lines;
}

void write_lines(const std::vector<TokenStrings>& lines,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << join_tokens(l) << '\n';
  if (!out) throw DataError("error writing " + path.string());
}

TextCorpus read_parallel(const std::filesystem::path& source_path,
                         const std::filesystem::path& target_path) {
  auto src = read_lines(source_path);
  auto tgt = read_lines(target_path);
  if (src.size() != tgt.size())
    throw DataError("line count mismatch: " + source_path.string() + " has " +
                    std::to_string(src.size()) + " lines, " + target_path.string() +
                    " has " + std::to_string(tgt.size()));
  TextCorpus corpus(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus[i].pair_id = static_cast<std::int64_t>(i);
    corpus[i].source = std::move(src[i]);
    corpus[i].target = std::move(tgt[i]);
  }
  return corpus;
}

void write_parallel(const TextCorpus& corpus,
                    const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path) {
  std::vector<TokenStrings> src, tgt;
  src.reserve(corpus.size());
  tgt.reserve(corpus.size());
  for (const auto& p : corpus) {
    src.push_back(p.source);
    tgt.push_back(p.target);
  }
  write_lines(src, source_path);
  write_lines(tgt, target_path);
}

ParallelCorpus encode_corpus(const TextCorpus& corpus, const Vocab& source_vocab,
                             const Vocab& target_vocab) {
  ParallelCorpus out;
  out.pairs.reserve(corpus.size());
  for (const auto& p : corpus)
    out.pairs.push_back({p.pair_id, encode(p.source, source_vocab),
                         encode(p.target, target_vocab)});
  return out;
}

TextCorpus decode_corpus(const ParallelCorpus& corpus, const Vocab& source_vocab,
                         const Vocab& target_vocab) {
  TextCorpus out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs)
    out.push_back({p.pair_id, decode(p.source, source_vocab),
                   decode(p.target, target_vocab)});
  return out;
}

void check_unique_pair_ids(const ParallelCorpus& corpus) {
  std::unordered_set<std::int64_t> seen;
  for (const auto& p : corpus.pairs)
    if (!seen.insert(p.pair_id).second)
      throw DataError("duplicate pair_id " + std::to_string(p.pair_id));
}

std::vector<std::size_t> shuffle_order(std::size_t n, std::int64_t epoch,
                                       std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed, static_cast<std::uint64_t>(epoch));
  // Fisher-Yates, back to front.
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace distill
