// src/model_io.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "g2p/model_io.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace g2p {
namespace {

using Side = SymbolTable::Side;

constexpr char kMagic[4] = {'G', '2', 'P', 'M'};
constexpr uint32_t kMaxStringBytes = 1u << 20;

const std::array<uint32_t, 256>& CrcTable() {
  static const std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

uint32_t UpdateCrc(uint32_t crc, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  const auto& table = CrcTable();
  for (size_t i = 0; i < n; ++i) crc = table[(crc ^ p[i]) & 0xFFu] ^ (crc >> 8);
  return crc;
}

class CrcWriter {
 public:
  explicit CrcWriter(std::ostream& os) : os_(os) {}

  void Bytes(const void* data, size_t n) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    crc_ = UpdateCrc(crc_, data, n);
  }
  void U8(uint8_t v) { Bytes(&v, 1); }
  void U32(uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    Bytes(b, 4);
  }
  void U64(uint64_t v) {
    U32(static_cast<uint32_t>(v));
    U32(static_cast<uint32_t>(v >> 32));
  }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void String(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }

  // Appends the checksum of everything written so far; not itself summed.
  void Finish() {
    const uint32_t crc = crc_ ^ 0xFFFFFFFFu;
    unsigned char b[4] = {static_cast<unsigned char>(crc),
                          static_cast<unsigned char>(crc >> 8),
                          static_cast<unsigned char>(crc >> 16),
                          static_cast<unsigned char>(crc >> 24)};
    os_.write(reinterpret_cast<const char*>(b), 4);
  }

 private:
  std::ostream& os_;
  uint32_t crc_ = 0xFFFFFFFFu;
};

class CrcReader {
 public:
  explicit CrcReader(std::istream& is) : is_(is) {}

  void Bytes(void* data, size_t n) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    G2P_CHECK(static_cast<size_t>(is_.gcount()) == n, ErrorKind::kIoTruncated,
              "model file ends early");
    crc_ = UpdateCrc(crc_, data, n);
  }
  uint8_t U8() {
    uint8_t v = 0;
    Bytes(&v, 1);
    return v;
  }
  uint32_t U32() {
    unsigned char b[4];
    Bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 |
           static_cast<uint32_t>(b[3]) << 24;
  }
  uint64_t U64() {
    const uint64_t lo = U32();
    return lo | static_cast<uint64_t>(U32()) << 32;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string String() {
    const uint32_t n = U32();
    G2P_CHECK(n <= kMaxStringBytes, ErrorKind::kParse,
              "symbol length " << n << " is implausible");
    std::string s(n, '\0');
    if (n > 0) Bytes(s.data(), n);
    return s;
  }

  // Reads the stored checksum (not summed) and compares it to the running one.
  void VerifyTrailer() {
    const uint32_t expected = crc_ ^ 0xFFFFFFFFu;
    unsigned char b[4];
    is_.read(reinterpret_cast<char*>(b), 4);
    G2P_CHECK(is_.gcount() == 4, ErrorKind::kIoTruncated,
              "model file ends early");
    const uint32_t stored = static_cast<uint32_t>(b[0]) |
                            static_cast<uint32_t>(b[1]) << 8 |
                            static_cast<uint32_t>(b[2]) << 16 |
                            static_cast<uint32_t>(b[3]) << 24;
    G2P_CHECK(stored == expected, ErrorKind::kIoChecksum,
              "model file checksum mismatch");
  }

 private:
  std::istream& is_;
  uint32_t crc_ = 0xFFFFFFFFu;
};

void WriteTable(CrcWriter* w, const SymbolTable& table) {
  w->U32(static_cast<uint32_t>(table.size()));
  for (int i = 0; i < table.size(); ++i) w->String(table.Symbol(i));
}

SymbolTable ReadTable(CrcReader* r, Side side) {
  SymbolTable table(side);
  const uint32_t count = r->U32();
  G2P_CHECK(count >= static_cast<uint32_t>(table.num_reserved()),
            ErrorKind::kParse, "symbol table too small");
  for (uint32_t i = 0; i < count; ++i) {
    const std::string sym = r->String();
    if (i < static_cast<uint32_t>(table.num_reserved())) {
      G2P_CHECK(sym == table.Symbol(static_cast<int>(i)), ErrorKind::kParse,
                "reserved symbol mismatch: '" << sym << "'");
      continue;
    }
    const int id = table.Add(sym);
    G2P_CHECK(id == static_cast<int>(i), ErrorKind::kParse,
              "duplicate symbol '" << sym << "'");
  }
  return table;
}

}  // namespace

void SaveModel(const G2PModel<float>& model, std::ostream& os) {
  model.config.Validate();
  CrcWriter w(os);
  w.Bytes(kMagic, 4);
  w.U32(kModelFormatVersion);
  w.U8(static_cast<uint8_t>(model.config.arch));
  w.U32(static_cast<uint32_t>(model.config.letter_emb_dim));
  w.U32(static_cast<uint32_t>(model.config.phoneme_emb_dim));
  w.U32(static_cast<uint32_t>(model.config.hidden_dim));
  w.U32(static_cast<uint32_t>(model.config.layers));
  w.U32(static_cast<uint32_t>(model.config.window));
  w.U64(model.config.seed);
  WriteTable(&w, model.letters);
  WriteTable(&w, model.phonemes);
  VisitParams(model.config,
              const_cast<ParamSet<float>*>(&model.params),
              [&w](Matrix<float>* m) {
                w.U32(static_cast<uint32_t>(m->rows()));
                w.U32(static_cast<uint32_t>(m->cols()));
                for (int64_t i = 0; i < m->size(); ++i) w.F32(m->data()[i]);
              });
  w.Finish();
  G2P_CHECK(os.good(), ErrorKind::kIo, "model write failed");
}

void SaveModelFile(const G2PModel<float>& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  G2P_CHECK(os.is_open(), ErrorKind::kIo, "cannot open '" << path
                                                          << "' for writing");
  SaveModel(model, os);
  os.flush();
  G2P_CHECK(os.good(), ErrorKind::kIo, "model write failed: '" << path << "'");
}

G2PModel<float> LoadModel(std::istream& is) {
  CrcReader r(is);
  char magic[4];
  r.Bytes(magic, 4);
  G2P_CHECK(std::memcmp(magic, kMagic, 4) == 0, ErrorKind::kIoMagic,
            "not a model file");
  const uint32_t version = r.U32();
  G2P_CHECK(version == kModelFormatVersion, ErrorKind::kIoVersion,
            "unsupported model version " << version);
  const uint8_t arch_tag = r.U8();
  G2P_CHECK(arch_tag <= static_cast<uint8_t>(Arch::kBi), ErrorKind::kParse,
            "unknown architecture tag " << static_cast<int>(arch_tag));

  G2PModel<float> model;
  ModelConfig& c = model.config;
  c.arch = static_cast<Arch>(arch_tag);
  c.letter_emb_dim = static_cast<int>(r.U32());
  c.phoneme_emb_dim = static_cast<int>(r.U32());
  c.hidden_dim = static_cast<int>(r.U32());
  c.layers = static_cast<int>(r.U32());
  c.window = static_cast<int>(r.U32());
  c.seed = r.U64();
  G2P_CHECK(c.letter_emb_dim >= 1 && c.phoneme_emb_dim >= 1 &&
                c.hidden_dim >= 1 && c.layers >= 1 && c.window >= 1 &&
                c.letter_emb_dim <= (1 << 20) && c.phoneme_emb_dim <= (1 << 20) &&
                c.hidden_dim <= (1 << 20) && c.layers <= 64 &&
                c.window <= (1 << 10),
            ErrorKind::kParse, "model dimensions out of range");

  model.letters = ReadTable(&r, Side::kLetter);
  model.phonemes = ReadTable(&r, Side::kPhoneme);
  model.params = ZeroParams<float>(c, model.letters.size(),
                                   model.phonemes.size());
  VisitParams(c, &model.params, [&r](Matrix<float>* m) {
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    G2P_CHECK(rows == static_cast<uint32_t>(m->rows()) &&
                  cols == static_cast<uint32_t>(m->cols()),
              ErrorKind::kParse,
              "tensor shape " << rows << "x" << cols << " does not match "
                              << m->rows() << "x" << m->cols());
    for (int64_t i = 0; i < m->size(); ++i) m->data()[i] = r.F32();
  });
  r.VerifyTrailer();
  G2P_CHECK(is.peek() == std::char_traits<char>::eof(), ErrorKind::kParse,
            "trailing data after the model trailer");
  return model;
}

G2PModel<float> LoadModelFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  G2P_CHECK(is.is_open(), ErrorKind::kIo, "cannot open '" << path
                                                          << "' for reading");
  return LoadModel(is);
}

}  // namespace g2p
