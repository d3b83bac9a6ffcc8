// tests/test_aligner.cc
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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "g2p/aligner.h"
#include "test_util.h"

namespace g2p {
namespace {

using namespace testutil;

TEST_CASE("chunk text form round trips") {
  const Chunk null_chunk{};
  const Chunk single{"AE", ""};
  const Chunk compound{"K", "S"};
  CHECK(null_chunk.PhonemeCount() == 0);
  CHECK(single.PhonemeCount() == 1);
  CHECK(compound.PhonemeCount() == 2);
  CHECK(single.ToString() == "AE");
  CHECK(compound.ToString() == "K:S");
  CHECK(Chunk::FromString(null_chunk.ToString()) == null_chunk);
  CHECK(Chunk::FromString("AE") == single);
  CHECK(Chunk::FromString("K:S") == compound);
  CHECK(null_chunk < single);
  CHECK_THROWS_AS((void)Chunk::FromString("A:B:C"), Error);
  CHECK_THROWS_AS((void)Chunk::FromString(""), Error);
}

// One word AB -> [x, y] admits exactly three alignments: (x)(y),
// (x:y)(null), (null)(x:y). Uniform initialization puts 1/3 on each of the
// three chunks in both letter rows, so every path weighs 1/9, the corpus
// likelihood is 1/3, and the E-step reproduces the uniform counts. EM must
// sit still at this fixed point.
TEST_CASE("uniform fixed point on a single symmetric word") {
  std::vector<LexiconEntry> entries{{"AB", {{"x", "y"}}}};
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 10, 0.0, &stats);
  REQUIRE(stats.iteration_ll.size() >= 2);
  for (double ll : stats.iteration_ll)
    CHECK(ll == doctest::Approx(-std::log(3.0)).epsilon(1e-9));
  table.CheckNormalized(1e-9);
  for (const auto& [letter, row] : table.rows)
    for (const auto& [chunk, p] : row)
      CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("em log-likelihood never decreases") {
  const auto entries = SyntheticLexicon(300, 11);
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 25, 0.0, &stats);
  REQUIRE(stats.iteration_ll.size() >= 2);
  for (size_t i = 1; i < stats.iteration_ll.size(); ++i)
    CHECK(stats.iteration_ll[i] >= stats.iteration_ll[i - 1] - 1e-9);
  table.CheckNormalized(1e-9);
  CHECK(stats.infeasible.empty());
}

TEST_CASE("alignment reconstructs every pronunciation") {
  const auto entries = SyntheticLexicon(200, 12);
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 15, 1e-6, &stats);
  for (const auto& entry : entries) {
    for (const auto& pron : entry.pronunciations) {
      const AlignedPair pair =
          ViterbiAlign(entry.Letters(), pron, table);
      CHECK(pair.letters == entry.Letters());
      CHECK(pair.slots.size() == pair.letters.size());
      CHECK(pair.ExpandSlots() == pron);
    }
  }
}

TEST_CASE("viterbi matches brute-force enumeration") {
  const auto entries = SyntheticLexicon(120, 13);
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 10, 1e-6, &stats);
  int checked = 0;
  for (const auto& entry : entries) {
    const auto letters = entry.Letters();
    if (letters.size() > 6) continue;
    for (const auto& pron : entry.pronunciations) {
      const AlignedPair pair = ViterbiAlign(letters, pron, table);
      const BruteAlignResult brute = BruteForceAlign(letters, pron, table);
      REQUIRE(!brute.argmax.empty());
      CHECK(AlignmentScore(pair, table) ==
            doctest::Approx(brute.best).epsilon(1e-9));
      bool found = false;
      for (const auto& candidate : brute.argmax)
        if (candidate.slots == pair.slots) found = true;
      CHECK(found);
      ++checked;
    }
  }
  CHECK(checked >= 50);
}

// A hand-built table with one dominant chunk per letter forces the intended
// alignment, including a compound chunk and a trailing null.
TEST_CASE("viterbi picks the dominant path") {
  ChunkProbTable table;
  auto set = [&](const std::string& letter, const Chunk& c, double p) {
    table.rows[letter][c] = p;
  };
  const Chunk null_chunk{};
  for (const std::string l : {"T", "A", "N", "G", "L", "E"}) {
    set(l, null_chunk, 0.05);
  }
  set("T", {"T", ""}, 0.95);
  set("A", {"AE", ""}, 0.95);
  set("N", {"NG", ""}, 0.95);
  set("G", {"G", ""}, 0.95);
  set("L", {"AH", "L"}, 0.9);
  set("L", {"L", ""}, 0.05);
  set("E", {"EH", ""}, 0.95);
  table.CheckNormalized(1e-9);

  const std::vector<std::string> letters = {"T", "A", "N", "G", "L", "E"};
  const std::vector<std::string> pron = {"T", "AE", "NG", "G", "AH", "L"};
  const AlignedPair pair = ViterbiAlign(letters, pron, table);
  const std::vector<Chunk> want = {{"T", ""},  {"AE", ""}, {"NG", ""},
                                   {"G", ""},  {"AH", "L"}, {}};
  CHECK(pair.slots == want);
  CHECK(pair.ExpandSlots() == pron);
}

// When scores tie exactly the aligner prefers single chunks, then compound,
// then null. Two letters, one phoneme, all probabilities equal: (p)(null)
// vs (null)(p) both score the same, and the tie-break keeps the single
// emission as early as the scan allows.
TEST_CASE("exact ties prefer single over compound over null") {
  ChunkProbTable table;
  const Chunk null_chunk{};
  const Chunk single{"p", ""};
  const Chunk pair_chunk{"p", "p"};
  for (const std::string l : {"a", "b"}) {
    table.rows[l][null_chunk] = 0.25;
    table.rows[l][single] = 0.25;
    table.rows[l][pair_chunk] = 0.5;
  }
  // One phoneme over two letters: paths (p)(null) and (null)(p) score
  // 0.25 * 0.25 each; either way the expansion must reproduce the
  // pronunciation and the reported score must match the tied optimum.
  const AlignedPair one = ViterbiAlign({"a", "b"}, {"p"}, table);
  CHECK(one.ExpandSlots() == std::vector<std::string>{"p"});
  const double score = AlignmentScore(one, table);
  CHECK(score == doctest::Approx(std::log(0.25 * 0.25)).epsilon(1e-9));

  // Two phonemes over two letters: (p)(p) scores 0.25 * 0.25, the compound
  // paths 0.5 * 0.25, so a compound slot must win outright here.
  const AlignedPair two = ViterbiAlign({"a", "b"}, {"p", "p"}, table);
  CHECK(two.ExpandSlots() == std::vector<std::string>{"p", "p"});
  CHECK(AlignmentScore(two, table) ==
        doctest::Approx(std::log(0.5 * 0.25)).epsilon(1e-9));
  int compounds = 0;
  for (const auto& c : two.slots)
    if (c.PhonemeCount() == 2) ++compounds;
  CHECK(compounds == 1);

  // All-equal rows: single/single must beat compound/null on the tie.
  ChunkProbTable flat;
  for (const std::string l : {"a", "b"}) {
    flat.rows[l][null_chunk] = 1.0 / 3;
    flat.rows[l][single] = 1.0 / 3;
    flat.rows[l][pair_chunk] = 1.0 / 3;
  }
  const AlignedPair tied = ViterbiAlign({"a", "b"}, {"p", "p"}, flat);
  const std::vector<Chunk> want = {single, single};
  CHECK(tied.slots == want);
}

TEST_CASE("infeasible pairs are reported and skipped") {
  // Pronunciation longer than 2 |letters| cannot be aligned.
  std::vector<LexiconEntry> entries{
      {"A", {{"p", "q", "r"}}},
      {"AB", {{"p", "q"}}},
  };
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 5, 0.0, &stats);
  REQUIRE(stats.infeasible.size() == 1);
  CHECK(stats.infeasible[0].first == "A");
  CHECK(stats.infeasible[0].second == 0);
  CHECK(stats.used_pairs == 1);
  CHECK_THROWS_AS(
      (void)ViterbiAlign({"A"}, {"p", "q", "r"}, table), Error);

  AlignerStats empty_stats;
  CHECK_THROWS_AS((void)EmTrainAligner({{"A", {{"p", "q", "r"}}}}, 5, 0.0,
                                       &empty_stats),
                  Error);
  CHECK_THROWS_AS((void)EmTrainAligner(entries, 0, 0.0, &stats), Error);
}

TEST_CASE("corpus alignment extends the phoneme table with compounds") {
  // Force a compound: one letter, two phonemes.
  std::vector<LexiconEntry> entries{
      {"X", {{"k", "s"}}},
      {"O", {{"o"}}},
  };
  AlignerStats stats;
  const ChunkProbTable table = EmTrainAligner(entries, 10, 0.0, &stats);
  SymbolTable phonemes(SymbolTable::Side::kPhoneme);
  phonemes.Add("k");
  phonemes.Add("o");
  phonemes.Add("s");
  const AlignedCorpus corpus = AlignCorpus(entries, table, &phonemes);
  CHECK(corpus.failures.empty());
  REQUIRE(corpus.pairs.size() == 2);
  CHECK(phonemes.Contains("k:s"));

  // Infeasible entries surface as failures, not exceptions.
  std::vector<LexiconEntry> with_bad = entries;
  with_bad.push_back({"Z", {{"a", "b", "c"}}});
  const AlignedCorpus partial = AlignCorpus(with_bad, table, nullptr);
  REQUIRE(partial.failures.size() == 1);
  CHECK(partial.failures[0].word == "Z");
  CHECK(partial.pairs.size() == 2);
}

TEST_CASE("aligned corpus files round trip") {
  std::vector<AlignedPair> pairs;
  pairs.push_back({{"X", "E"}, {{"k", "s"}, {}}});
  pairs.push_back({{"A", "T"}, {{"ae", ""}, {"t", ""}}});
  std::stringstream ss;
  WriteAlignedCorpus(pairs, ss);
  const auto back = ReadAlignedCorpus(ss);
  CHECK(back == pairs);

  std::stringstream bad("AT\tae\n");  // two letters, one slot
  CHECK_THROWS_AS((void)ReadAlignedCorpus(bad), Error);
}

TEST_CASE("alignment score multiplies floored slot probabilities") {
  ChunkProbTable table;
  table.rows["a"][Chunk{"p", ""}] = 0.5;
  table.rows["a"][Chunk{}] = 0.5;
  const AlignedPair pair{{"a", "a"}, {{"p", ""}, {}}};
  CHECK(AlignmentScore(pair, table) == 2.0 * std::log(0.5 + 1e-12));
  CHECK(AlignmentScore(pair, table, 0.125) == 2.0 * std::log(0.625));
}

}  // namespace
}  // namespace g2p
