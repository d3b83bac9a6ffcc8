// tests/test_lexicon.cc
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

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "g2p/lexicon.h"
#include "g2p/symbols.h"

namespace g2p {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kContract;
}

TEST_CASE("symbol table reserved prefix and lookup") {
  SymbolTable letters(SymbolTable::Side::kLetter);
  CHECK(letters.size() == 2);
  CHECK(letters.Symbol(kBosId) == kBosSym);
  CHECK(letters.Symbol(kEosId) == kEosSym);
  CHECK(letters.Add("A") == 2);
  CHECK(letters.Add("B") == 3);
  CHECK(letters.Add("A") == 2);
  CHECK(letters.Index("B") == 3);
  CHECK(letters.TryIndex("Z") == -1);
  CHECK_THROWS_AS((void)letters.Index("Z"), Error);
  CHECK_THROWS_AS((void)letters.Add(""), Error);
  CHECK_THROWS_AS((void)letters.Add("A B"), Error);

  SymbolTable phonemes(SymbolTable::Side::kPhoneme);
  CHECK(phonemes.size() == 3);
  CHECK(phonemes.Symbol(kOsId) == kOsSym);
  CHECK(phonemes.Symbol(kEOsId) == kEOsSym);
  CHECK(phonemes.Symbol(kNullId) == kNullSym);

  std::stringstream ss;
  letters.Write(ss);
  const SymbolTable back = SymbolTable::Read(ss, SymbolTable::Side::kLetter);
  CHECK(back == letters);

  std::stringstream bad("X\nY\nA\n");
  CHECK(KindOf([&] {
          (void)SymbolTable::Read(bad, SymbolTable::Side::kLetter);
        }) == ErrorKind::kParse);
}

TEST_CASE("cmudict parsing merges variants and strips stress") {
  std::stringstream in(
      ";;; header comment\n"
      "\n"
      "cat  K AE1 T\n"
      "READ  R EH1 D\n"
      "READ(1)  R IY1 D\n"
      "READ(2)  R EH1 D\n"  // duplicate of the base after stress stripping
      "A AH0\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kCmudict, true);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].word == "A");
  CHECK(entries[0].pronunciations ==
        std::vector<std::vector<std::string>>{{"AH"}});
  CHECK(entries[1].word == "CAT");
  CHECK(entries[1].pronunciations ==
        std::vector<std::vector<std::string>>{{"K", "AE", "T"}});
  CHECK(entries[2].word == "READ");
  CHECK(entries[2].pronunciations ==
        std::vector<std::vector<std::string>>{{"R", "EH", "D"},
                                              {"R", "IY", "D"}});
}

TEST_CASE("cmudict parsing keeps stress when asked") {
  std::stringstream in("CAT  K AE1 T\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kCmudict, false);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].pronunciations[0] ==
        std::vector<std::string>{"K", "AE1", "T"});
}

TEST_CASE("parse errors name the line") {
  std::stringstream only_word("first  F ER1 S T\nsecond\n");
  try {
    (void)ParseLexicon(only_word, LexiconFormat::kCmudict, true);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }

  // A phoneme that is nothing but digits cannot survive stress stripping.
  std::stringstream digits("WORD  W ER1 123\n");
  CHECK(KindOf([&] {
          (void)ParseLexicon(digits, LexiconFormat::kCmudict, true);
        }) == ErrorKind::kParse);

  std::stringstream no_tab("word K AE T\n");
  CHECK(KindOf([&] {
          (void)ParseLexicon(no_tab, LexiconFormat::kTabular, false);
        }) == ErrorKind::kParse);
}

TEST_CASE("tabular parsing and round trip") {
  std::stringstream in(
      "bat\tB AE T\n"
      "ash\tAE SH\n"
      "bat\tB AA T\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kTabular, false);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].word == "ASH");
  CHECK(entries[1].word == "BAT");
  CHECK(entries[1].pronunciations.size() == 2);

  std::stringstream out;
  SerializeLexicon(entries, out);
  const auto again = ParseLexicon(out, LexiconFormat::kTabular, false);
  CHECK(again == entries);
}

TEST_CASE("symbol tables list observed symbols in sorted order") {
  std::stringstream in(
      "ba\tB AH\n"
      "ab\tAH B\n"
      "cab\tK AH B\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kTabular, false);
  SymbolTable letters(SymbolTable::Side::kLetter);
  SymbolTable phonemes(SymbolTable::Side::kPhoneme);
  BuildSymbolTables(entries, &letters, &phonemes);
  REQUIRE(letters.size() == 5);
  CHECK(letters.Symbol(2) == "A");
  CHECK(letters.Symbol(3) == "B");
  CHECK(letters.Symbol(4) == "C");
  REQUIRE(phonemes.size() == 6);
  CHECK(phonemes.Symbol(3) == "AH");
  CHECK(phonemes.Symbol(4) == "B");
  CHECK(phonemes.Symbol(5) == "K");

  CHECK(KindOf([&] {
          SymbolTable l(SymbolTable::Side::kLetter);
          SymbolTable p(SymbolTable::Side::kPhoneme);
          BuildSymbolTables({}, &l, &p);
        }) == ErrorKind::kEmptyCorpus);
}

TEST_CASE("word list reader") {
  std::stringstream in("cat\n\n  dog \nbird\n");
  CHECK(ReadWordList(in) == std::vector<std::string>{"CAT", "DOG", "BIRD"});
}

TEST_CASE("split routing follows canonical order") {
  std::stringstream in(
      "ape\tEY P\n"
      "bat\tB AE T\n"
      "cat\tK AE T\n"
      "dog\tD AO G\n"
      "eel\tIY L\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kTabular, false);
  SplitReport report;
  const DatasetSplit split = LoadSplit(entries, {"DOG", "APE"}, {"CAT"},
                                       {"BAT", "GNU"}, &report);
  REQUIRE(split.train.size() == 2);
  CHECK(split.train[0].word == "APE");  // lexicon order, not list order
  CHECK(split.train[1].word == "DOG");
  REQUIRE(split.validation.size() == 1);
  CHECK(split.validation[0].word == "CAT");
  REQUIRE(split.test.size() == 1);
  CHECK(split.test[0].word == "BAT");
  CHECK(report.missing == std::vector<std::string>{"GNU"});
  CHECK(report.unlisted == std::vector<std::string>{"EEL"});
}

TEST_CASE("split conflicts name the word") {
  std::stringstream in("cat\tK AE T\n");
  const auto entries = ParseLexicon(in, LexiconFormat::kTabular, false);
  try {
    SplitReport report;
    (void)LoadSplit(entries, {"CAT"}, {}, {"CAT"}, &report);
    FAIL("expected a conflict error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConflict);
    CHECK(std::string(e.what()).find("CAT") != std::string::npos);
  }
}

}  // namespace
}  // namespace g2p
