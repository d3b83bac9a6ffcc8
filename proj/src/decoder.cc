// src/decoder.cc
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

#include "g2p/decoder.h"

#include <istream>
#include <ostream>
#include <set>

namespace g2p {

std::vector<std::string> PostProcessOutput(const std::vector<int>& raw_ids,
                                           const SymbolTable& phonemes) {
  std::vector<std::string> out;
  for (int id : raw_ids) {
    if (id == kOsId || id == kEOsId || id == kNullId) continue;
    const std::string& sym = phonemes.Symbol(id);
    const size_t colon = sym.find(':');
    if (colon == std::string::npos) {
      out.push_back(sym);
    } else {
      out.push_back(sym.substr(0, colon));
      out.push_back(sym.substr(colon + 1));
    }
  }
  return out;
}

void WriteDecodeLines(std::ostream& os, const std::string& word,
                      const std::vector<ScoredSequence>& nbest) {
  for (const ScoredSequence& s : nbest)
    os << word << '\t' << FormatFixed(s.ll, 6) << '\t'
       << JoinStrings(s.phonemes, " ") << '\n';
}

std::vector<std::pair<std::string, std::vector<std::string>>> ReadHypotheses(
    std::istream& is) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::set<std::string> seen;
  std::string line, last_word;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto [word, rest] = SplitFirstTab(line, line_no);
    if (word == last_word) continue;  // lower-ranked n-best entry
    G2P_CHECK(seen.insert(word).second, ErrorKind::kParse,
              "line " << line_no << ": word '" << word
                      << "' reappears after other words");
    last_word = word;
    auto [ll, phones] = SplitFirstTab(rest, line_no);
    (void)ll;
    out.emplace_back(word, SplitWhitespace(phones));
  }
  return out;
}

}  // namespace g2p
