// src/model.cc
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

#include "g2p/model.h"

namespace g2p {
namespace {

int64_t CellCount(int64_t in, int64_t hid) {
  return 4 * hid * (in + hid + 1);
}

}  // namespace

const char* ArchName(Arch arch) {
  switch (arch) {
    case Arch::kEncDec: return "encdec";
    case Arch::kUni: return "uni";
    case Arch::kBi: return "bi";
  }
  Fail(ErrorKind::kConfig, "unknown architecture tag");
}

Arch ArchFromName(const std::string& name) {
  if (name == "encdec") return Arch::kEncDec;
  if (name == "uni") return Arch::kUni;
  if (name == "bi") return Arch::kBi;
  Fail(ErrorKind::kConfig,
       "unknown architecture '" + name + "' (expected encdec|uni|bi)");
}

int64_t ExpectedParamCount(const ModelConfig& c, int letter_vocab,
                           int phoneme_vocab) {
  const int64_t hid = c.hidden_dim, el = c.letter_emb_dim,
                ep = c.phoneme_emb_dim;
  int64_t n = letter_vocab * el + phoneme_vocab * ep;
  switch (c.arch) {
    case Arch::kEncDec:
      n += CellCount(el, hid) + CellCount(ep, hid);
      n += 2 * (c.layers - 1) * CellCount(hid, hid);
      break;
    case Arch::kUni:
      n += CellCount(c.window * el + ep, hid);
      n += (c.layers - 1) * CellCount(hid, hid);
      break;
    case Arch::kBi:
      n += CellCount(c.window * el + ep, hid) + CellCount(el, hid);
      n += (c.layers - 1) * (CellCount(2 * hid, hid) + CellCount(hid, hid));
      n += CellCount(2 * hid, hid);
      break;
  }
  n += static_cast<int64_t>(phoneme_vocab) * hid + phoneme_vocab;
  return n;
}

}  // namespace g2p
