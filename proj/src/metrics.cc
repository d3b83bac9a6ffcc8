// src/metrics.cc
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

#include "g2p/metrics.h"

#include <map>
#include <ostream>

namespace g2p {

EditOps EditDistance(const std::vector<std::string>& hyp,
                     const std::vector<std::string>& ref) {
  const int n = static_cast<int>(hyp.size());
  const int m = static_cast<int>(ref.size());
  struct Cell {
    int dist;
    EditOps ops;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (int j = 0; j <= m; ++j) {
    prev[j].dist = j;
    prev[j].ops.deletions = j;
  }
  for (int i = 1; i <= n; ++i) {
    cur[0].dist = i;
    cur[0].ops = EditOps{0, i, 0};
    for (int j = 1; j <= m; ++j) {
      const bool match = hyp[i - 1] == ref[j - 1];
      Cell best = prev[j - 1];  // match or substitution
      best.dist += match ? 0 : 1;
      if (!match) ++best.ops.substitutions;
      if (prev[j].dist + 1 < best.dist) {  // hypothesis symbol inserted
        best = prev[j];
        ++best.dist;
        ++best.ops.insertions;
      }
      if (cur[j - 1].dist + 1 < best.dist) {  // reference symbol deleted
        best = cur[j - 1];
        ++best.dist;
        ++best.ops.deletions;
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  G2P_ASSERT(prev[m].dist == prev[m].ops.total(), "edit op count mismatch");
  return prev[m].ops;
}

WordScore ScoreWord(const std::vector<std::string>& hyp,
                    const std::vector<std::vector<std::string>>& refs) {
  G2P_CHECK(!refs.empty(), ErrorKind::kContract, "no reference pronunciation");
  WordScore best;
  for (int r = 0; r < static_cast<int>(refs.size()); ++r) {
    const int d = EditDistance(hyp, refs[r]).total();
    if (r == 0) {
      best = {d, 0, d > 0};
      continue;
    }
    const auto& cur = refs[r];
    const auto& held = refs[best.chosen_ref];
    const bool better =
        d < best.edits ||
        (d == best.edits &&
         (cur.size() < held.size() ||
          (cur.size() == held.size() && cur < held)));
    if (better) best = {d, r, d > 0};
  }
  return best;
}

EvalReport Evaluate(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        hypotheses,
    const std::vector<LexiconEntry>& entries) {
  std::map<std::string, const LexiconEntry*> by_word;
  for (const LexiconEntry& e : entries) by_word.emplace(e.word, &e);

  std::map<std::string, const std::vector<std::string>*> hyp_by_word;
  for (const auto& [word, hyp] : hypotheses) {
    G2P_CHECK(by_word.count(word) > 0, ErrorKind::kCoverage,
              "hypothesis for unknown word '" << word << "'");
    G2P_CHECK(hyp_by_word.emplace(word, &hyp).second, ErrorKind::kCoverage,
              "duplicate hypothesis for word '" << word << "'");
  }

  EvalReport report;
  for (const LexiconEntry& e : entries) {
    auto it = hyp_by_word.find(e.word);
    G2P_CHECK(it != hyp_by_word.end(), ErrorKind::kCoverage,
              "no hypothesis for word '" << e.word << "'");
    const WordScore score = ScoreWord(*it->second, e.pronunciations);
    report.records.push_back({e.word, *it->second,
                              e.pronunciations[score.chosen_ref],
                              score.edits});
    report.total_edits += score.edits;
    report.total_ref_phonemes +=
        static_cast<int64_t>(e.pronunciations[score.chosen_ref].size());
    report.word_errors += score.error ? 1 : 0;
    ++report.words;
  }
  G2P_CHECK(report.total_ref_phonemes > 0, ErrorKind::kContract,
            "empty reference phoneme total");
  report.per = 100.0 * static_cast<double>(report.total_edits) /
               static_cast<double>(report.total_ref_phonemes);
  report.wer = 100.0 * static_cast<double>(report.word_errors) /
               static_cast<double>(report.words);
  return report;
}

std::string EvalReport::Summary() const {
  return "PER " + FormatFixed(per, 2) + "% WER " + FormatFixed(wer, 2) + "%";
}

void WriteEvalRecords(const EvalReport& report, std::ostream& os) {
  for (const EvalRecord& r : report.records)
    os << r.word << '\t' << JoinStrings(r.hyp, " ") << '\t'
       << JoinStrings(r.chosen_ref, " ") << '\t' << r.edits << '\n';
}

}  // namespace g2p
