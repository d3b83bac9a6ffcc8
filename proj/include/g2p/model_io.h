// include/g2p/model_io.h
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

#ifndef G2P_MODEL_IO_H_
#define G2P_MODEL_IO_H_

#include <iosfwd>
#include <string>

#include "g2p/model.h"

namespace g2p {

// Binary checkpoint layout, little-endian throughout:
//   "G2PM" magic, u32 version, u8 architecture tag,
//   u32 letter_emb_dim / phoneme_emb_dim / hidden_dim / layers / window,
//   u64 seed, both symbol tables (u32 count, then u32 byte length + UTF-8
//   per symbol), every parameter matrix in canonical visit order
//   (u32 rows, u32 cols, f32 row-major data), and a CRC-32 of all
//   preceding bytes.
inline constexpr uint32_t kModelFormatVersion = 1;

void SaveModel(const G2PModel<float>& model, std::ostream& os);
void SaveModelFile(const G2PModel<float>& model, const std::string& path);

G2PModel<float> LoadModel(std::istream& is);
G2PModel<float> LoadModelFile(const std::string& path);

}  // namespace g2p

#endif  // G2P_MODEL_IO_H_
