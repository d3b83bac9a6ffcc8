// include/g2p/symbols.h
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

#ifndef G2P_SYMBOLS_H_
#define G2P_SYMBOLS_H_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "g2p/common.h"

namespace g2p {

// Reserved indices. Letter tables hold the word-boundary pair, phoneme
// tables the output-boundary pair plus the null emission.
constexpr int kBosId = 0;   // "<s>"  (letter side)
constexpr int kEosId = 1;   // "</s>" (letter side)
constexpr int kOsId = 0;    // "<os>"  (phoneme side)
constexpr int kEOsId = 1;   // "</os>" (phoneme side)
constexpr int kNullId = 2;  // null emission (phoneme side)

extern const char kBosSym[];
extern const char kEosSym[];
extern const char kOsSym[];
extern const char kEOsSym[];
extern const char kNullSym[];

// Bidirectional string<->dense-id map. Construction installs the reserved
// symbols for the chosen side; ids are assigned in insertion order after
// them, so building from a sorted symbol list gives a canonical table.
class SymbolTable {
 public:
  enum class Side { kLetter, kPhoneme };

  explicit SymbolTable(Side side);
  SymbolTable() : SymbolTable(Side::kLetter) {}

  Side side() const { return side_; }
  int size() const { return static_cast<int>(symbols_.size()); }
  int num_reserved() const { return side_ == Side::kLetter ? 2 : 3; }

  // Returns the id, inserting if absent. Rejects empty and whitespace-holding
  // symbols.
  int Add(const std::string& symbol);
  // Returns the id or throws kVocab.
  int Index(const std::string& symbol) const;
  // Returns the id or -1.
  int TryIndex(const std::string& symbol) const;
  const std::string& Symbol(int id) const;
  bool Contains(const std::string& symbol) const {
    return TryIndex(symbol) >= 0;
  }

  // One symbol per line, in id order / read back in id order. Read verifies
  // the reserved prefix.
  void Write(std::ostream& os) const;
  static SymbolTable Read(std::istream& is, Side side);

  bool operator==(const SymbolTable& o) const {
    return side_ == o.side_ && symbols_ == o.symbols_;
  }

 private:
  Side side_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace g2p

#endif  // G2P_SYMBOLS_H_
