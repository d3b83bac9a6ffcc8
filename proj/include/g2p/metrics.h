// include/g2p/metrics.h
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
// Phoneme and word error rates with multi-reference scoring: each word is
// scored against its closest reference pronunciation, and a word error
// occurs only when the hypothesis matches none of them.

#ifndef G2P_METRICS_H_
#define G2P_METRICS_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "g2p/lexicon.h"

namespace g2p {

struct EditOps {
  int substitutions = 0;
  int insertions = 0;  // hypothesis symbols with no reference counterpart
  int deletions = 0;   // reference symbols missing from the hypothesis
  int total() const { return substitutions + insertions + deletions; }
};

// Unit-cost Levenshtein distance with an operation breakdown.
EditOps EditDistance(const std::vector<std::string>& hyp,
                     const std::vector<std::string>& ref);

struct WordScore {
  int edits = 0;
  int chosen_ref = 0;  // index into the reference list
  bool error = false;
};

// Minimum edit distance over the references; ties pick the shortest, then
// lexicographically smallest reference.
WordScore ScoreWord(const std::vector<std::string>& hyp,
                    const std::vector<std::vector<std::string>>& refs);

struct EvalRecord {
  std::string word;
  std::vector<std::string> hyp;
  std::vector<std::string> chosen_ref;
  int edits = 0;
};

struct EvalReport {
  std::vector<EvalRecord> records;
  int64_t total_edits = 0;
  int64_t total_ref_phonemes = 0;  // of the chosen references
  int64_t word_errors = 0;
  int64_t words = 0;
  double per = 0.0;  // 100 * total_edits / total_ref_phonemes
  double wer = 0.0;  // 100 * word_errors / words

  // "PER <x.xx>% WER <y.yy>%"
  std::string Summary() const;
};

// Scores one hypothesis per entry. Every entry needs exactly one hypothesis
// (missing or duplicated words are coverage errors); hypotheses for unknown
// words are rejected the same way.
EvalReport Evaluate(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        hypotheses,
    const std::vector<LexiconEntry>& entries);

// Per-word TSV: word, hypothesis, chosen reference, edit count.
void WriteEvalRecords(const EvalReport& report, std::ostream& os);

}  // namespace g2p

#endif  // G2P_METRICS_H_
