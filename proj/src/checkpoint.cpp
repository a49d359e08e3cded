// src/checkpoint.cpp

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

#include "distill/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "distill/errors.hpp"

namespace distill {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'P', 'T'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  void need(std::size_t n, const char* what) const {
    if (data_.size() - pos_ < n)
      throw CorruptionError(std::string("checkpoint truncated while reading ") + what);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const std::uint64_t n = u64(what);
    need(n, what);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

nlohmann::json meta_to_json(const ModelDims& dims, const CheckpointMeta& m) {
  nlohmann::json j;
  j["dims"] = {{"src_vocab", dims.src_vocab},
               {"tgt_vocab", dims.tgt_vocab},
               {"embed_dim", dims.embed_dim},
               {"hidden_dim", dims.hidden_dim}};
  j["epoch"] = m.epoch;
  j["learning_rate"] = m.learning_rate;
  j["best_validation"] = m.best_validation;
  j["seed"] = m.seed;
  j["init"] = m.init;
  j["src_vocab"] = m.src_vocab;
  j["tgt_vocab"] = m.tgt_vocab;
  return j;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.str(meta_to_json(ckpt.params.dims, ckpt.meta).dump());
  std::uint64_t count = 0;
  ckpt.params.visit([&](const std::string&, const auto&, TensorKind) { ++count; });
  w.u64(count);
  ckpt.params.visit([&](const std::string& name, const auto& t, TensorKind) {
    w.str(name);
    constexpr bool is_vector = std::decay_t<decltype(t)>::ColsAtCompileTime == 1;
    if constexpr (is_vector) {
      w.u64(1);
      w.u64(static_cast<std::uint64_t>(t.size()));
    } else {
      w.u64(2);
      w.u64(static_cast<std::uint64_t>(t.rows()));
      w.u64(static_cast<std::uint64_t>(t.cols()));
    }
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) w.f64(t(r, c));
  });
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader rd(bytes);
  rd.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CorruptionError("not a checkpoint (bad magic bytes)");
  rd.skip(4);
  const std::uint32_t version = rd.u32("version");
  if (version != kCheckpointVersion)
    throw CorruptionError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");

  Checkpoint ckpt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(rd.str("metadata"));
    const auto& d = j.at("dims");
    ModelDims dims{d.at("src_vocab").get<std::int64_t>(), d.at("tgt_vocab").get<std::int64_t>(),
                   d.at("embed_dim").get<std::int64_t>(), d.at("hidden_dim").get<std::int64_t>()};
    dims.validate();
    ckpt.params = ModelParams(dims);
    ckpt.meta.epoch = j.at("epoch").get<std::int64_t>();
    ckpt.meta.learning_rate = j.at("learning_rate").get<double>();
    ckpt.meta.best_validation = j.at("best_validation").get<double>();
    ckpt.meta.seed = j.at("seed").get<std::uint64_t>();
    ckpt.meta.init = j.at("init").get<std::string>();
    ckpt.meta.src_vocab = j.at("src_vocab").get<std::vector<std::string>>();
    ckpt.meta.tgt_vocab = j.at("tgt_vocab").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("checkpoint metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw CorruptionError(std::string("checkpoint metadata: ") + e.what());
  }

  std::uint64_t expected_count = 0;
  ckpt.params.visit([&](const std::string&, const auto&, TensorKind) { ++expected_count; });
  const std::uint64_t count = rd.u64("tensor count");
  if (count != expected_count)
    throw CorruptionError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                          std::to_string(expected_count));

  ckpt.params.visit([&](const std::string& name, auto& t, TensorKind) {
    const std::string stored = rd.str("tensor name");
    if (stored != name)
      throw CorruptionError("checkpoint tensor '" + stored + "' where '" + name + "' was expected");
    const std::uint64_t rank = rd.u64("tensor rank");
    constexpr bool is_vector = std::decay_t<decltype(t)>::ColsAtCompileTime == 1;
    if (rank != (is_vector ? 1u : 2u))
      throw CorruptionError("tensor '" + name + "': rank " + std::to_string(rank) + " disagrees with header");
    const std::uint64_t rows = rd.u64("tensor dims");
    const std::uint64_t cols = is_vector ? 1 : rd.u64("tensor dims");
    if (rows != static_cast<std::uint64_t>(t.rows()) || cols != static_cast<std::uint64_t>(t.cols()))
      throw CorruptionError("tensor '" + name + "': shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " disagrees with header dims");
    rd.need(rows * cols * 8, "tensor values");
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = rd.f64("tensor values");
  });
  if (!rd.at_end()) throw CorruptionError("trailing bytes after checkpoint payload");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("error writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelDims>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Checkpoint ckpt = deserialize_checkpoint(bytes);
  if (expected && !(*expected == ckpt.params.dims)) {
    const auto& d = ckpt.params.dims;
    throw ConfigError(path.string() + ": checkpoint dims (" + std::to_string(d.src_vocab) + "," +
                      std::to_string(d.tgt_vocab) + "," + std::to_string(d.embed_dim) + "," +
                      std::to_string(d.hidden_dim) + ") do not match the requested dims");
  }
  return ckpt;
}

void attach_vocabs(CheckpointMeta& meta, const Vocab& src, const Vocab& tgt) {
  meta.src_vocab = src.tokens();
  meta.tgt_vocab = tgt.tokens();
}

std::pair<Vocab, Vocab> checkpoint_vocabs(const CheckpointMeta& meta) {
  if (meta.src_vocab.size() < kNumReserved || meta.tgt_vocab.size() < kNumReserved)
    throw DataError("checkpoint carries no vocabularies");
  auto strip = [](const std::vector<std::string>& all) {
    return std::vector<std::string>(all.begin() + kNumReserved, all.end());
  };
  return {Vocab(strip(meta.src_vocab)), Vocab(strip(meta.tgt_vocab))};
}

}  // namespace distill
