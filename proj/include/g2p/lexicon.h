// include/g2p/lexicon.h
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
//
// Pronunciation lexicon parsing (cmudict-style and tabular), multiple
// reference pronunciations per headword, vocabulary construction, and
// predefined train/validation/test partitions.

#ifndef G2P_LEXICON_H_
#define G2P_LEXICON_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "g2p/common.h"
#include "g2p/symbols.h"

namespace g2p {

// One headword with all its reference pronunciations (distinct, in first-seen
// order).
struct LexiconEntry {
  std::string word;
  std::vector<std::vector<std::string>> pronunciations;

  std::vector<std::string> Letters() const { return SplitUtf8(word); }
  bool operator==(const LexiconEntry& o) const {
    return word == o.word && pronunciations == o.pronunciations;
  }
};

enum class LexiconFormat { kCmudict, kTabular };

// cmudict format: `WORD  PH PH ...` with `(n)` variant suffixes and `;;;`
// comment lines, any whitespace run as separator. Tabular format:
// `word<TAB>PH PH ...`. Headwords are uppercased (ASCII); trailing stress
// digits are stripped from phonemes when strip_stress is set. Variants of a
// headword merge into one entry; exact duplicate pronunciations collapse.
// Entries come back sorted by headword (the canonical order).
std::vector<LexiconEntry> ParseLexicon(std::istream& is, LexiconFormat format,
                                       bool strip_stress);

// Canonical form: tabular, sorted by headword, variants on consecutive lines.
void SerializeLexicon(const std::vector<LexiconEntry>& entries,
                      std::ostream& os);

// Tables hold the reserved symbols first, then every observed letter /
// phoneme in lexicographic order.
void BuildSymbolTables(const std::vector<LexiconEntry>& entries,
                       SymbolTable* letters, SymbolTable* phonemes);

struct DatasetSplit {
  std::vector<LexiconEntry> train;
  std::vector<LexiconEntry> validation;
  std::vector<LexiconEntry> test;
};

struct SplitReport {
  // Listed in a partition file but absent from the lexicon.
  std::vector<std::string> missing;
  // Present in the lexicon but listed nowhere.
  std::vector<std::string> unlisted;
};

// One headword per line; blank lines skipped.
std::vector<std::string> ReadWordList(std::istream& is);

// Routes entries to partitions by headword. A word listed in two partitions
// is a conflict error; unknown listed words and unlisted lexicon words go
// into the report. Partition order follows the lexicon's canonical order.
DatasetSplit LoadSplit(const std::vector<LexiconEntry>& entries,
                       const std::vector<std::string>& train_words,
                       const std::vector<std::string>& validation_words,
                       const std::vector<std::string>& test_words,
                       SplitReport* report);

}  // namespace g2p

#endif  // G2P_LEXICON_H_
