// include/g2p/aligner.h
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
// EM-trained monotone alignment of letters to phoneme chunks. Each letter
// consumes zero phonemes (null), one phoneme, or an ordered pair (a compound
// chunk), so a pronunciation is feasible iff |P| <= 2|L|.

#ifndef G2P_ALIGNER_H_
#define G2P_ALIGNER_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "g2p/common.h"
#include "g2p/lexicon.h"
#include "g2p/symbols.h"

namespace g2p {

// Zero, one, or two phonemes emitted by one letter.
struct Chunk {
  std::string first, second;  // null: both empty; single: second empty

  int PhonemeCount() const {
    return first.empty() ? 0 : (second.empty() ? 1 : 2);
  }
  bool operator<(const Chunk& o) const {
    return first != o.first ? first < o.first : second < o.second;
  }
  bool operator==(const Chunk& o) const {
    return first == o.first && second == o.second;
  }

  // "∅", "PH", or "PH:PH".
  std::string ToString() const;
  static Chunk FromString(const std::string& text);
};

// Per-letter categorical distribution over chunks. Deterministic iteration
// order throughout (ordered maps).
struct ChunkProbTable {
  std::map<std::string, std::map<Chunk, double>> rows;

  // 0 when the letter or chunk is absent.
  double Prob(const std::string& letter, const Chunk& chunk) const;
  // Every row sums to 1 within tol.
  void CheckNormalized(double tol) const;
};

// One (word, pronunciation) pair with its alignment: slots[i] is the chunk
// emitted by letters[i]; expanding the slots reproduces the pronunciation.
struct AlignedPair {
  std::vector<std::string> letters;
  std::vector<Chunk> slots;

  std::vector<std::string> ExpandSlots() const;
  bool operator==(const AlignedPair& o) const {
    return letters == o.letters && slots == o.slots;
  }
};

struct AlignerStats {
  // Corpus log-likelihood under the table in force at the start of each
  // iteration (entry 0 is the uniform-support initialization).
  std::vector<double> iteration_ll;
  // (word, pronunciation index) pairs skipped as infeasible.
  std::vector<std::pair<std::string, int>> infeasible;
  int64_t used_pairs = 0;
};

// Initializes uniformly over the chunk support of the feasible pairs, then
// runs forward-backward EM until max_iters or the log-likelihood gain drops
// below tol. Throws kEmptyCorpus when nothing is feasible.
ChunkProbTable EmTrainAligner(const std::vector<LexiconEntry>& entries,
                              int max_iters, double tol, AlignerStats* stats);

// Max-probability monotone alignment. Probabilities take an additive floor
// of `floor` so unseen chunks never zero out every path; exact score ties
// prefer single over compound over null chunks. Throws kAlignment when no
// feasible path exists.
AlignedPair ViterbiAlign(const std::vector<std::string>& letters,
                         const std::vector<std::string>& pron,
                         const ChunkProbTable& table, double floor = 1e-12);

// Log-probability of one specific alignment under the table (same floor as
// ViterbiAlign); the score ViterbiAlign maximizes.
double AlignmentScore(const AlignedPair& pair, const ChunkProbTable& table,
                      double floor = 1e-12);

struct AlignmentFailure {
  std::string word;
  int pron_index = 0;
  std::string reason;
};

struct AlignedCorpus {
  std::vector<AlignedPair> pairs;
  std::vector<AlignmentFailure> failures;
};

// Aligns every (word, pronunciation) pair; failures are collected, not
// fatal. When phonemes is non-null it gains every compound chunk observed in
// the output ("P1:P2" symbols, added in sorted order).
AlignedCorpus AlignCorpus(const std::vector<LexiconEntry>& entries,
                          const ChunkProbTable& table, SymbolTable* phonemes);

// One pair per line: `word<TAB>slot slot ...` with slots ∅ | PH | PH:PH.
void WriteAlignedCorpus(const std::vector<AlignedPair>& pairs,
                        std::ostream& os);
std::vector<AlignedPair> ReadAlignedCorpus(std::istream& is);

}  // namespace g2p

#endif  // G2P_ALIGNER_H_
