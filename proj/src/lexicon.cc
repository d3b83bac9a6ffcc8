// src/lexicon.cc
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

#include "g2p/lexicon.h"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace g2p {
namespace {

// Strips a cmudict variant marker: READ(2) -> READ. Anything that is not a
// pure `(digits)` suffix stays part of the word.
std::string StripVariantMarker(const std::string& token) {
  if (token.empty() || token.back() != ')') return token;
  const size_t open = token.rfind('(');
  if (open == std::string::npos || open == 0) return token;
  const size_t digits_begin = open + 1, digits_end = token.size() - 1;
  if (digits_begin >= digits_end) return token;  // bare "()"
  for (size_t i = digits_begin; i < digits_end; ++i)
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return token;
  return token.substr(0, open);
}

std::string StripStress(const std::string& phone, int line_no) {
  size_t end = phone.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(phone[end - 1])))
    --end;
  G2P_CHECK(end > 0, ErrorKind::kParse,
            "line " << line_no << ": phoneme '" << phone
                    << "' is all stress digits");
  return phone.substr(0, end);
}

}  // namespace

std::vector<LexiconEntry> ParseLexicon(std::istream& is, LexiconFormat format,
                                       bool strip_stress) {
  std::vector<LexiconEntry> entries;
  std::unordered_map<std::string, size_t> by_word;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == LexiconFormat::kCmudict && line.rfind(";;;", 0) == 0)
      continue;

    std::string word;
    std::vector<std::string> phones;
    if (format == LexiconFormat::kCmudict) {
      std::vector<std::string> tokens = SplitWhitespace(line);
      if (tokens.empty()) continue;
      G2P_CHECK(tokens.size() >= 2, ErrorKind::kParse,
                "line " << line_no << ": no pronunciation for '" << tokens[0]
                        << "'");
      word = StripVariantMarker(tokens[0]);
      phones.assign(tokens.begin() + 1, tokens.end());
    } else {
      auto [head, rest] = SplitFirstTab(line, line_no);
      word = head;
      phones = SplitWhitespace(rest);
      G2P_CHECK(!phones.empty(), ErrorKind::kParse,
                "line " << line_no << ": no pronunciation for '" << word
                        << "'");
    }
    G2P_CHECK(!word.empty(), ErrorKind::kParse,
              "line " << line_no << ": empty headword");
    word = ToUpperAscii(word);
    if (strip_stress)
      for (std::string& p : phones) p = StripStress(p, line_no);

    auto it = by_word.find(word);
    if (it == by_word.end()) {
      by_word.emplace(word, entries.size());
      entries.push_back({word, {std::move(phones)}});
    } else {
      auto& prons = entries[it->second].pronunciations;
      if (std::find(prons.begin(), prons.end(), phones) == prons.end())
        prons.push_back(std::move(phones));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const LexiconEntry& a, const LexiconEntry& b) {
              return a.word < b.word;
            });
  return entries;
}

void SerializeLexicon(const std::vector<LexiconEntry>& entries,
                      std::ostream& os) {
  for (const LexiconEntry& e : entries)
    for (const auto& pron : e.pronunciations)
      os << e.word << '\t' << JoinStrings(pron, " ") << '\n';
}

void BuildSymbolTables(const std::vector<LexiconEntry>& entries,
                       SymbolTable* letters, SymbolTable* phonemes) {
  G2P_CHECK(!entries.empty(), ErrorKind::kEmptyCorpus,
            "no lexicon entries to build vocabularies from");
  std::set<std::string> letter_set, phone_set;
  for (const LexiconEntry& e : entries) {
    for (const std::string& l : e.Letters()) letter_set.insert(l);
    for (const auto& pron : e.pronunciations)
      for (const std::string& p : pron) phone_set.insert(p);
  }
  *letters = SymbolTable(SymbolTable::Side::kLetter);
  *phonemes = SymbolTable(SymbolTable::Side::kPhoneme);
  for (const std::string& s : letter_set) letters->Add(s);
  for (const std::string& s : phone_set) phonemes->Add(s);
}

std::vector<std::string> ReadWordList(std::istream& is) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    words.push_back(ToUpperAscii(tokens[0]));
  }
  return words;
}

DatasetSplit LoadSplit(const std::vector<LexiconEntry>& entries,
                       const std::vector<std::string>& train_words,
                       const std::vector<std::string>& validation_words,
                       const std::vector<std::string>& test_words,
                       SplitReport* report) {
  // 0 = train, 1 = validation, 2 = test.
  std::map<std::string, int> assignment;
  const std::vector<std::string>* lists[3] = {&train_words, &validation_words,
                                              &test_words};
  static const char* kNames[3] = {"train", "validation", "test"};
  for (int part = 0; part < 3; ++part) {
    for (const std::string& w : *lists[part]) {
      auto [it, inserted] = assignment.emplace(w, part);
      G2P_CHECK(inserted || it->second == part, ErrorKind::kConflict,
                "word '" << w << "' listed in both " << kNames[it->second]
                         << " and " << kNames[part]);
    }
  }

  DatasetSplit split;
  std::set<std::string> seen;
  for (const LexiconEntry& e : entries) {
    seen.insert(e.word);
    auto it = assignment.find(e.word);
    if (it == assignment.end()) {
      if (report != nullptr) report->unlisted.push_back(e.word);
      continue;
    }
    switch (it->second) {
      case 0: split.train.push_back(e); break;
      case 1: split.validation.push_back(e); break;
      default: split.test.push_back(e); break;
    }
  }
  if (report != nullptr)
    for (const auto& [word, part] : assignment)
      if (seen.count(word) == 0) report->missing.push_back(word);
  return split;
}

}  // namespace g2p
