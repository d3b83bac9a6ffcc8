// src/aligner.cc
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

#include "g2p/aligner.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace g2p {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lattice states are (letters consumed, phonemes consumed); a state is on
// some complete path iff the prefix fits in 2 phonemes per letter and the
// suffix still can.
struct Lattice {
  int num_letters, num_phones;
  bool Reachable(int i, int j) const {
    return j <= 2 * i && num_phones - j <= 2 * (num_letters - i);
  }
};

Chunk MakeChunk(const std::vector<std::string>& pron, int at, int len) {
  if (len == 0) return {};
  if (len == 1) return {pron[at], ""};
  return {pron[at], pron[at + 1]};
}

void CheckPhone(const std::string& phone) {
  G2P_CHECK(phone.find(':') == std::string::npos, ErrorKind::kVocab,
            "phoneme '" << phone << "' contains the compound separator ':'");
  G2P_CHECK(phone != kNullSym, ErrorKind::kVocab,
            "phoneme collides with the null symbol");
}

struct FeasiblePair {
  const LexiconEntry* entry;
  int pron_index;
  std::vector<std::string> letters;
};

}  // namespace

std::string Chunk::ToString() const {
  switch (PhonemeCount()) {
    case 0: return kNullSym;
    case 1: return first;
    default: return first + ":" + second;
  }
}

Chunk Chunk::FromString(const std::string& text) {
  G2P_CHECK(!text.empty(), ErrorKind::kParse, "empty alignment slot");
  if (text == kNullSym) return {};
  const size_t colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  const std::string a = text.substr(0, colon);
  const std::string b = text.substr(colon + 1);
  G2P_CHECK(!a.empty() && !b.empty() && b.find(':') == std::string::npos,
            ErrorKind::kParse, "malformed alignment slot '" << text << "'");
  return {a, b};
}

double ChunkProbTable::Prob(const std::string& letter,
                            const Chunk& chunk) const {
  auto row = rows.find(letter);
  if (row == rows.end()) return 0.0;
  auto it = row->second.find(chunk);
  return it == row->second.end() ? 0.0 : it->second;
}

void ChunkProbTable::CheckNormalized(double tol) const {
  for (const auto& [letter, row] : rows) {
    double sum = 0.0;
    for (const auto& [chunk, p] : row) {
      G2P_CHECK(p >= 0.0, ErrorKind::kContract,
                "negative probability for letter '" << letter << "'");
      sum += p;
    }
    G2P_CHECK(std::fabs(sum - 1.0) <= tol, ErrorKind::kContract,
              "letter '" << letter << "' row sums to " << sum);
  }
}

std::vector<std::string> AlignedPair::ExpandSlots() const {
  std::vector<std::string> phones;
  for (const Chunk& c : slots) {
    if (!c.first.empty()) phones.push_back(c.first);
    if (!c.second.empty()) phones.push_back(c.second);
  }
  return phones;
}

ChunkProbTable EmTrainAligner(const std::vector<LexiconEntry>& entries,
                              int max_iters, double tol, AlignerStats* stats) {
  G2P_CHECK(max_iters >= 1, ErrorKind::kConfig, "em iterations must be >= 1");
  std::vector<FeasiblePair> pairs;
  for (const LexiconEntry& entry : entries) {
    std::vector<std::string> letters = entry.Letters();
    for (int pi = 0; pi < static_cast<int>(entry.pronunciations.size());
         ++pi) {
      const auto& pron = entry.pronunciations[pi];
      for (const std::string& p : pron) CheckPhone(p);
      if (static_cast<int>(pron.size()) >
          2 * static_cast<int>(letters.size())) {
        if (stats != nullptr) stats->infeasible.emplace_back(entry.word, pi);
        continue;
      }
      pairs.push_back({&entry, pi, letters});
    }
  }
  G2P_CHECK(!pairs.empty(), ErrorKind::kEmptyCorpus,
            "no feasible (word, pronunciation) pairs to align");
  if (stats != nullptr) stats->used_pairs = static_cast<int64_t>(pairs.size());

  // Uniform initialization over every chunk that lies on some complete path.
  ChunkProbTable table;
  for (const FeasiblePair& fp : pairs) {
    const auto& pron = fp.entry->pronunciations[fp.pron_index];
    const Lattice lat{static_cast<int>(fp.letters.size()),
                      static_cast<int>(pron.size())};
    for (int i = 0; i < lat.num_letters; ++i)
      for (int j = 0; j <= lat.num_phones; ++j) {
        if (!lat.Reachable(i, j)) continue;
        for (int k = 0; k <= 2; ++k) {
          if (j + k > lat.num_phones || !lat.Reachable(i + 1, j + k)) continue;
          table.rows[fp.letters[i]][MakeChunk(pron, j, k)] = 1.0;
        }
      }
  }
  for (auto& [letter, row] : table.rows) {
    const double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [chunk, p] : row) p = uniform;
  }

  double prev_ll = kNegInf;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::map<std::string, std::map<Chunk, double>> counts;
    double ll = 0.0;
    for (const FeasiblePair& fp : pairs) {
      const auto& pron = fp.entry->pronunciations[fp.pron_index];
      const Lattice lat{static_cast<int>(fp.letters.size()),
                        static_cast<int>(pron.size())};
      const int rows = lat.num_letters + 1, cols = lat.num_phones + 1;
      std::vector<double> alpha(rows * cols, 0.0), beta(rows * cols, 0.0);
      auto idx = [cols](int i, int j) { return i * cols + j; };

      alpha[idx(0, 0)] = 1.0;
      for (int i = 0; i < lat.num_letters; ++i)
        for (int j = 0; j <= lat.num_phones; ++j) {
          const double a = alpha[idx(i, j)];
          if (a == 0.0 || !lat.Reachable(i, j)) continue;
          const auto& row = table.rows.at(fp.letters[i]);
          for (int k = 0; k <= 2; ++k) {
            if (j + k > lat.num_phones || !lat.Reachable(i + 1, j + k))
              continue;
            auto it = row.find(MakeChunk(pron, j, k));
            if (it == row.end() || it->second == 0.0) continue;
            alpha[idx(i + 1, j + k)] += a * it->second;
          }
        }
      const double lik = alpha[idx(lat.num_letters, lat.num_phones)];
      G2P_CHECK(lik > 0.0, ErrorKind::kAlignment,
                "zero alignment likelihood for '" << fp.entry->word << "'");

      beta[idx(lat.num_letters, lat.num_phones)] = 1.0;
      for (int i = lat.num_letters - 1; i >= 0; --i)
        for (int j = lat.num_phones; j >= 0; --j) {
          if (!lat.Reachable(i, j)) continue;
          const auto& row = table.rows.at(fp.letters[i]);
          double b = 0.0;
          for (int k = 0; k <= 2; ++k) {
            if (j + k > lat.num_phones || !lat.Reachable(i + 1, j + k))
              continue;
            auto it = row.find(MakeChunk(pron, j, k));
            if (it == row.end() || it->second == 0.0) continue;
            b += it->second * beta[idx(i + 1, j + k)];
          }
          beta[idx(i, j)] = b;
        }

      for (int i = 0; i < lat.num_letters; ++i)
        for (int j = 0; j <= lat.num_phones; ++j) {
          const double a = alpha[idx(i, j)];
          if (a == 0.0 || !lat.Reachable(i, j)) continue;
          const auto& row = table.rows.at(fp.letters[i]);
          for (int k = 0; k <= 2; ++k) {
            if (j + k > lat.num_phones || !lat.Reachable(i + 1, j + k))
              continue;
            const Chunk chunk = MakeChunk(pron, j, k);
            auto it = row.find(chunk);
            if (it == row.end() || it->second == 0.0) continue;
            const double post =
                a * it->second * beta[idx(i + 1, j + k)] / lik;
            if (post > 0.0) counts[fp.letters[i]][chunk] += post;
          }
        }
      ll += std::log(lik);
    }

    if (stats != nullptr) stats->iteration_ll.push_back(ll);
    G2P_CHECK(iter == 0 || ll >= prev_ll - 1e-9, ErrorKind::kContract,
              "alignment log-likelihood decreased: " << prev_ll << " -> "
                                                     << ll);
    const bool converged = iter > 0 && ll - prev_ll < tol;
    prev_ll = ll;

    for (auto& [letter, row] : counts) {
      double total = 0.0;
      for (const auto& [chunk, c] : row) total += c;
      if (total <= 0.0) continue;
      auto& out_row = table.rows.at(letter);
      out_row.clear();
      for (const auto& [chunk, c] : row) out_row[chunk] = c / total;
    }
    if (converged) break;
  }
  table.CheckNormalized(1e-9);
  return table;
}

AlignedPair ViterbiAlign(const std::vector<std::string>& letters,
                         const std::vector<std::string>& pron,
                         const ChunkProbTable& table, double floor) {
  const Lattice lat{static_cast<int>(letters.size()),
                    static_cast<int>(pron.size())};
  G2P_CHECK(lat.num_letters > 0, ErrorKind::kAlignment, "empty word");
  G2P_CHECK(lat.num_phones <= 2 * lat.num_letters, ErrorKind::kAlignment,
            "pronunciation with " << lat.num_phones
                                  << " phonemes cannot align to "
                                  << lat.num_letters << " letters");
  for (const std::string& p : pron) CheckPhone(p);
  const int cols = lat.num_phones + 1;
  auto idx = [cols](int i, int j) { return i * cols + j; };
  std::vector<double> score((lat.num_letters + 1) * cols, kNegInf);
  std::vector<int8_t> back((lat.num_letters + 1) * cols, -1);
  score[idx(0, 0)] = 0.0;

  // Targets scan their three possible sources in the tie preference order:
  // single, compound, null.
  static const int kOrder[3] = {1, 2, 0};
  for (int i = 1; i <= lat.num_letters; ++i)
    for (int t = 0; t <= lat.num_phones; ++t) {
      if (!lat.Reachable(i, t)) continue;
      double best = kNegInf;
      int best_k = -1;
      for (int k : kOrder) {
        const int s = t - k;
        if (s < 0 || !lat.Reachable(i - 1, s)) continue;
        const double base = score[idx(i - 1, s)];
        if (base == kNegInf) continue;
        const double step =
            std::log(table.Prob(letters[i - 1], MakeChunk(pron, s, k)) +
                     floor);
        const double cand = base + step;
        if (cand > best) {
          best = cand;
          best_k = k;
        }
      }
      score[idx(i, t)] = best;
      back[idx(i, t)] = static_cast<int8_t>(best_k);
    }

  G2P_CHECK(score[idx(lat.num_letters, lat.num_phones)] > kNegInf,
            ErrorKind::kAlignment, "no feasible alignment path");
  AlignedPair out;
  out.letters = letters;
  out.slots.resize(letters.size());
  int j = lat.num_phones;
  for (int i = lat.num_letters; i > 0; --i) {
    const int k = back[idx(i, j)];
    G2P_ASSERT(k >= 0, "broken alignment traceback");
    j -= k;
    out.slots[i - 1] = MakeChunk(pron, j, k);
  }
  G2P_ASSERT(j == 0, "alignment traceback did not consume all phonemes");
  return out;
}

double AlignmentScore(const AlignedPair& pair, const ChunkProbTable& table,
                      double floor) {
  G2P_CHECK(pair.letters.size() == pair.slots.size(), ErrorKind::kShape,
            "alignment with " << pair.letters.size() << " letters but "
                              << pair.slots.size() << " slots");
  double score = 0.0;
  for (size_t i = 0; i < pair.letters.size(); ++i)
    score += std::log(table.Prob(pair.letters[i], pair.slots[i]) + floor);
  return score;
}

AlignedCorpus AlignCorpus(const std::vector<LexiconEntry>& entries,
                          const ChunkProbTable& table, SymbolTable* phonemes) {
  AlignedCorpus out;
  std::set<std::string> compounds;
  for (const LexiconEntry& entry : entries) {
    const std::vector<std::string> letters = entry.Letters();
    for (int pi = 0; pi < static_cast<int>(entry.pronunciations.size());
         ++pi) {
      try {
        AlignedPair pair =
            ViterbiAlign(letters, entry.pronunciations[pi], table);
        for (const Chunk& c : pair.slots)
          if (c.PhonemeCount() == 2) compounds.insert(c.ToString());
        out.pairs.push_back(std::move(pair));
      } catch (const Error& e) {
        out.failures.push_back({entry.word, pi, e.what()});
      }
    }
  }
  if (phonemes != nullptr)
    for (const std::string& c : compounds) phonemes->Add(c);
  return out;
}

void WriteAlignedCorpus(const std::vector<AlignedPair>& pairs,
                        std::ostream& os) {
  for (const AlignedPair& p : pairs) {
    os << JoinStrings(p.letters, "") << '\t';
    for (size_t i = 0; i < p.slots.size(); ++i)
      os << (i > 0 ? " " : "") << p.slots[i].ToString();
    os << '\n';
  }
}

std::vector<AlignedPair> ReadAlignedCorpus(std::istream& is) {
  std::vector<AlignedPair> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto [word, slot_text] = SplitFirstTab(line, line_no);
    AlignedPair pair;
    pair.letters = SplitUtf8(word);
    for (const std::string& s : SplitWhitespace(slot_text))
      pair.slots.push_back(Chunk::FromString(s));
    G2P_CHECK(pair.letters.size() == pair.slots.size(), ErrorKind::kParse,
              "line " << line_no << ": " << pair.letters.size()
                      << " letters but " << pair.slots.size() << " slots");
    G2P_CHECK(!pair.letters.empty(), ErrorKind::kParse,
              "line " << line_no << ": empty alignment");
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace g2p
