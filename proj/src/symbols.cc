// src/symbols.cc
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

#include "g2p/symbols.h"

#include <cctype>
#include <istream>
#include <ostream>

namespace g2p {

const char kBosSym[] = "<s>";
const char kEosSym[] = "</s>";
const char kOsSym[] = "<os>";
const char kEOsSym[] = "</os>";
const char kNullSym[] = "∅";

SymbolTable::SymbolTable(Side side) : side_(side) {
  if (side == Side::kLetter) {
    Add(kBosSym);
    Add(kEosSym);
  } else {
    Add(kOsSym);
    Add(kEOsSym);
    Add(kNullSym);
  }
}

int SymbolTable::Add(const std::string& symbol) {
  G2P_CHECK(!symbol.empty(), ErrorKind::kVocab, "empty symbol");
  for (char c : symbol)
    G2P_CHECK(!std::isspace(static_cast<unsigned char>(c)), ErrorKind::kVocab,
              "whitespace in symbol '" << symbol << "'");
  auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(symbols_.size());
  symbols_.push_back(symbol);
  index_.emplace(symbol, id);
  return id;
}

int SymbolTable::Index(const std::string& symbol) const {
  const int id = TryIndex(symbol);
  G2P_CHECK(id >= 0, ErrorKind::kVocab, "unknown symbol '" << symbol << "'");
  return id;
}

int SymbolTable::TryIndex(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

const std::string& SymbolTable::Symbol(int id) const {
  G2P_CHECK(id >= 0 && id < size(), ErrorKind::kIndex,
            "symbol id " << id << " out of range " << size());
  return symbols_[id];
}

void SymbolTable::Write(std::ostream& os) const {
  for (const std::string& s : symbols_) os << s << '\n';
}

SymbolTable SymbolTable::Read(std::istream& is, Side side) {
  SymbolTable table(side);
  std::string line;
  int id = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (id < table.num_reserved()) {
      G2P_CHECK(line == table.symbols_[id], ErrorKind::kParse,
                "symbol table line " << id + 1 << ": expected reserved '"
                                     << table.symbols_[id] << "', got '"
                                     << line << "'");
    } else {
      G2P_CHECK(table.TryIndex(line) < 0, ErrorKind::kParse,
                "duplicate symbol '" << line << "'");
      table.Add(line);
    }
    ++id;
  }
  G2P_CHECK(id >= table.num_reserved(), ErrorKind::kParse,
            "symbol table truncated: " << id << " lines");
  return table;
}

}  // namespace g2p
