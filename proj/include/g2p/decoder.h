// include/g2p/decoder.h
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
// Beam search over the three model families. Pruning keeps, at every step,
// the hypotheses whose log-likelihood is within `band` of the step best,
// then truncates to `max_beam`; exact ties order lexicographically by symbol
// ids. Alignment models decode exactly the T+2 positions of a word (the
// backward stack's activities are precomputed once per word); enc-dec
// hypotheses run until </os> or the length cap.

#ifndef G2P_DECODER_H_
#define G2P_DECODER_H_

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "g2p/graph.h"
#include "g2p/model.h"

namespace g2p {

struct BeamConfig {
  double band = 1.0;  // natural-log likelihood width below the step best
  int max_beam = 100;
  int max_length = 0;  // enc-dec emission cap; 0 means 4 * letters + 5
  int nbest = 1;

  void Validate() const {
    G2P_CHECK(band >= 0.0, ErrorKind::kConfig, "band must be >= 0");
    G2P_CHECK(max_beam >= 1, ErrorKind::kConfig, "max-beam must be >= 1");
    G2P_CHECK(max_length >= 0, ErrorKind::kConfig, "max-length must be >= 0");
    G2P_CHECK(nbest >= 1, ErrorKind::kConfig, "nbest must be >= 1");
  }
};

struct ScoredSequence {
  std::vector<int> raw_ids;           // symbols as emitted
  std::vector<std::string> phonemes;  // nulls dropped, compounds split
  double ll = 0.0;
};

// Drops boundary and null symbols, splits compound symbols in order.
std::vector<std::string> PostProcessOutput(const std::vector<int>& raw_ids,
                                           const SymbolTable& phonemes);

namespace detail {

// Copies row `row` of src into every row of dst columns [c0, c0 + width).
template <typename T>
void BroadcastRow(const Matrix<T>& src, int row, int c0, Matrix<T>* dst) {
  const T* s = src.row(row);
  const int width = src.cols();
  for (int b = 0; b < dst->rows(); ++b) {
    T* d = dst->row(b) + c0;
    for (int j = 0; j < width; ++j) d[j] = s[j];
  }
}

// dst columns [c0, c0 + src.cols()) = src, row by row.
template <typename T>
void CopyIntoCols(const Matrix<T>& src, int c0, Matrix<T>* dst) {
  for (int b = 0; b < src.rows(); ++b) {
    const T* s = src.row(b);
    T* d = dst->row(b) + c0;
    for (int j = 0; j < src.cols(); ++j) d[j] = s[j];
  }
}

template <typename T>
LstmState<T> SelectStateRows(const LstmState<T>& s,
                             const std::vector<int>& rows) {
  LstmState<T> out(static_cast<int>(rows.size()), s.h.cols());
  kernels::GatherRows(s.h, rows.data(), static_cast<int>(rows.size()),
                      &out.h);
  kernels::GatherRows(s.c, rows.data(), static_cast<int>(rows.size()),
                      &out.c);
  return out;
}

}  // namespace detail

// Incremental forward stepping for uni/bi models over one word. Window
// embeddings and (for bi) the whole backward stack are precomputed from the
// letters; Step advances a batch of hypotheses one position.
template <typename T>
class AlignStepper {
 public:
  struct State {
    std::vector<LstmState<T>> stack;  // forward (or uni) layers, bottom up
    LstmState<T> top;                 // bi prediction layer
  };

  AlignStepper(const G2PModel<T>& model, const std::vector<int>& stream)
      : model_(&model), stream_(stream) {
    const ModelConfig& c = model.config;
    G2P_CHECK(c.arch != Arch::kEncDec, ErrorKind::kConfig,
              "alignment stepper requires a uni or bi model");
    n_ = static_cast<int>(stream.size());
    G2P_CHECK(n_ >= 2, ErrorKind::kShape, "letter stream too short");
    const ParamSet<T>& p = model.params;
    const int el = c.letter_emb_dim;

    win_emb_ = Matrix<T>(n_, c.window * el);
    std::vector<int> ids(n_);
    for (int d = 0; d < c.window; ++d) {
      for (int t = 0; t < n_; ++t)
        ids[t] = t + d < n_ ? stream_[t + d] : kEosId;
      kernels::GatherRows(p.letter_emb, ids.data(), n_, &win_emb_, d * el);
    }

    if (c.arch == Arch::kBi) {
      bwd_h_.assign(c.layers, Matrix<T>(n_, c.hidden_dim));
      LstmSequence<T> seq;
      for (int k = 0; k < c.layers; ++k) {
        std::vector<Matrix<T>> inputs(n_);
        for (int s = 0; s < n_; ++s) {
          const int t = n_ - 1 - s;
          if (k == 0) {
            inputs[s] = Matrix<T>(1, el);
            kernels::GatherRows(p.letter_emb, &stream_[t], 1, &inputs[s]);
          } else {
            inputs[s] = Matrix<T>(1, c.hidden_dim);
            detail::BroadcastRow(bwd_h_[k - 1], t, 0, &inputs[s]);
          }
        }
        seq.Run(p.bwd[k], std::move(inputs), nullptr);
        for (int s = 0; s < n_; ++s) {
          const T* h = seq.h(s).row(0);
          std::copy(h, h + c.hidden_dim, bwd_h_[k].row(n_ - 1 - s));
        }
      }
    }
  }

  int num_positions() const { return n_; }
  int vocab() const { return model_->params.out_w.rows(); }

  State InitState(int batch) const {
    const ModelConfig& c = model_->config;
    State s;
    s.stack.assign(c.layers, LstmState<T>(batch, c.hidden_dim));
    if (c.arch == Arch::kBi) s.top = LstmState<T>(batch, c.hidden_dim);
    return s;
  }

  State SelectRows(const State& s, const std::vector<int>& rows) const {
    State out;
    out.stack.reserve(s.stack.size());
    for (const LstmState<T>& l : s.stack)
      out.stack.push_back(detail::SelectStateRows(l, rows));
    if (model_->config.arch == Arch::kBi)
      out.top = detail::SelectStateRows(s.top, rows);
    return out;
  }

  void Step(int t, const State& in, const std::vector<int>& prev_out,
            Matrix<T>* logits, State* out) const {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    const int batch = static_cast<int>(prev_out.size());
    const int hid = c.hidden_dim;
    const bool bi = c.arch == Arch::kBi;
    const std::vector<LstmCellParams<T>>& stack = bi ? p.fwd : p.uni;

    *out = InitState(batch);
    Matrix<T> gates;
    Matrix<T> x(batch, c.window * c.letter_emb_dim + c.phoneme_emb_dim);
    detail::BroadcastRow(win_emb_, t, 0, &x);
    kernels::GatherRows(p.phoneme_emb, prev_out.data(), batch, &x,
                        c.window * c.letter_emb_dim);
    for (int k = 0; k < c.layers; ++k) {
      if (k > 0) {
        if (bi) {
          x = Matrix<T>(batch, 2 * hid);
          detail::CopyIntoCols(out->stack[k - 1].h, 0, &x);
          detail::BroadcastRow(bwd_h_[k - 1], t, hid, &x);
        } else {
          x = out->stack[k - 1].h;
        }
      }
      gates = Matrix<T>(batch, kNumGates * hid);
      LstmStep(stack[k], x, in.stack[k], &gates, &out->stack[k]);
    }
    const LstmState<T>* final_h = &out->stack[c.layers - 1];
    if (bi) {
      x = Matrix<T>(batch, 2 * hid);
      detail::CopyIntoCols(out->stack[c.layers - 1].h, 0, &x);
      detail::BroadcastRow(bwd_h_[c.layers - 1], t, hid, &x);
      gates = Matrix<T>(batch, kNumGates * hid);
      LstmStep(p.top, x, in.top, &gates, &out->top);
      final_h = &out->top;
    }
    *logits = Matrix<T>(batch, vocab());
    kernels::MatMulNT(final_h->h, p.out_w, logits);
    kernels::AddRowVector(logits, p.out_b);
  }

 private:
  const G2PModel<T>* model_;
  std::vector<int> stream_;
  int n_ = 0;
  Matrix<T> win_emb_;               // [n x window*letter_emb_dim]
  std::vector<Matrix<T>> bwd_h_;    // per layer, [n x hidden], row = position
};

// Incremental decoder stepping for the enc-dec model: the encoder runs once
// per word and seeds every hypothesis's decoder state.
template <typename T>
class EncDecStepper {
 public:
  struct State {
    std::vector<LstmState<T>> stack;
  };

  EncDecStepper(const G2PModel<T>& model, const std::vector<int>& letters)
      : model_(&model) {
    const ModelConfig& c = model.config;
    G2P_CHECK(c.arch == Arch::kEncDec, ErrorKind::kConfig,
              "enc-dec stepper requires an encdec model");
    G2P_CHECK(!letters.empty(), ErrorKind::kShape, "empty word");
    const ParamSet<T>& p = model.params;
    std::vector<int> enc_ids(1, kBosId);
    enc_ids.insert(enc_ids.end(), letters.rbegin(), letters.rend());
    const int steps = static_cast<int>(enc_ids.size());
    std::vector<LstmSequence<T>> seqs(c.layers);
    for (int k = 0; k < c.layers; ++k) {
      std::vector<Matrix<T>> inputs(steps);
      for (int s = 0; s < steps; ++s) {
        if (k == 0) {
          inputs[s] = Matrix<T>(1, c.letter_emb_dim);
          kernels::GatherRows(p.letter_emb, &enc_ids[s], 1, &inputs[s]);
        } else {
          inputs[s] = seqs[k - 1].h(s);
        }
      }
      seqs[k].Run(p.enc[k], std::move(inputs), nullptr);
      finals_.push_back(seqs[k].final_state());
    }
  }

  int vocab() const { return model_->params.out_w.rows(); }

  State InitState(int batch) const {
    const ModelConfig& c = model_->config;
    State s;
    s.stack.assign(c.layers, LstmState<T>(batch, c.hidden_dim));
    for (int k = 0; k < c.layers; ++k) {
      detail::BroadcastRow(finals_[k].h, 0, 0, &s.stack[k].h);
      detail::BroadcastRow(finals_[k].c, 0, 0, &s.stack[k].c);
    }
    return s;
  }

  State SelectRows(const State& s, const std::vector<int>& rows) const {
    State out;
    for (const LstmState<T>& l : s.stack)
      out.stack.push_back(detail::SelectStateRows(l, rows));
    return out;
  }

  void Step(int /*t*/, const State& in, const std::vector<int>& prev_out,
            Matrix<T>* logits, State* out) const {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    const int batch = static_cast<int>(prev_out.size());
    out->stack.assign(c.layers, LstmState<T>(batch, c.hidden_dim));
    Matrix<T> x(batch, c.phoneme_emb_dim);
    kernels::GatherRows(p.phoneme_emb, prev_out.data(), batch, &x);
    Matrix<T> gates;
    for (int k = 0; k < c.layers; ++k) {
      if (k > 0) x = out->stack[k - 1].h;
      gates = Matrix<T>(batch, kNumGates * c.hidden_dim);
      LstmStep(p.dec[k], x, in.stack[k], &gates, &out->stack[k]);
    }
    *logits = Matrix<T>(batch, vocab());
    kernels::MatMulNT(out->stack[c.layers - 1].h, p.out_w, logits);
    kernels::AddRowVector(logits, p.out_b);
  }

 private:
  const G2PModel<T>* model_;
  std::vector<LstmState<T>> finals_;
};

namespace detail {

struct Candidate {
  std::vector<int> seq;
  double ll;
  int parent;
  bool finished;
};

inline bool CandidateBefore(const Candidate& a, const Candidate& b) {
  if (a.ll != b.ll) return a.ll > b.ll;
  return std::lexicographical_compare(a.seq.begin(), a.seq.end(),
                                      b.seq.begin(), b.seq.end());
}

// Shared beam loop. fixed_positions > 0 runs exactly that many steps
// (alignment models); fixed_positions == 0 runs until every hypothesis
// emits </os> or hits max_length (enc-dec).
template <typename T, typename Stepper>
std::vector<ScoredSequence> BeamLoop(const Stepper& stepper,
                                     int fixed_positions, int max_length,
                                     const BeamConfig& cfg,
                                     const SymbolTable& phonemes) {
  struct Hyp {
    std::vector<int> seq;
    double ll = 0.0;
  };
  std::vector<Hyp> live(1);
  typename Stepper::State state = stepper.InitState(1);
  std::vector<Candidate> done;
  const int vocab = stepper.vocab();

  for (int t = 0; !live.empty(); ++t) {
    if (fixed_positions > 0 && t == fixed_positions) break;
    std::vector<int> prev(live.size());
    for (size_t b = 0; b < live.size(); ++b)
      prev[b] = live[b].seq.empty() ? kOsId : live[b].seq.back();
    Matrix<T> logits;
    typename Stepper::State next;
    stepper.Step(t, state, prev, &logits, &next);

    // Log-softmax per row with double accumulation, shared with the
    // teacher-forced scorer so returned scores re-derive exactly.
    std::vector<Candidate> cands;
    cands.reserve(live.size() * vocab);
    double best = -std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < live.size(); ++b) {
      const T* row = logits.row(static_cast<int>(b));
      T mx = row[0];
      for (int j = 1; j < vocab; ++j) mx = std::max(mx, row[j]);
      double se = 0.0;
      for (int j = 0; j < vocab; ++j)
        se += std::exp(static_cast<double>(row[j] - mx));
      const double lse = std::log(se);
      for (int j = 0; j < vocab; ++j) {
        const double ll =
            live[b].ll + (static_cast<double>(row[j] - mx) - lse);
        best = std::max(best, ll);
        Candidate cand{live[b].seq, ll, static_cast<int>(b), false};
        cand.seq.push_back(j);
        cands.push_back(std::move(cand));
      }
    }
    std::erase_if(cands,
                  [&](const Candidate& c) { return c.ll < best - cfg.band; });
    std::sort(cands.begin(), cands.end(), CandidateBefore);
    if (static_cast<int>(cands.size()) > cfg.max_beam)
      cands.resize(cfg.max_beam);

    const bool last_position =
        fixed_positions > 0 ? t == fixed_positions - 1 : false;
    std::vector<Hyp> next_live;
    std::vector<int> keep_rows;
    for (Candidate& c : cands) {
      const bool finish =
          fixed_positions > 0
              ? last_position
              : (c.seq.back() == kEOsId ||
                 static_cast<int>(c.seq.size()) >= max_length);
      if (finish) {
        c.finished = true;
        done.push_back(std::move(c));
      } else {
        keep_rows.push_back(c.parent);
        next_live.push_back({std::move(c.seq), c.ll});
      }
    }
    live = std::move(next_live);
    if (!live.empty()) state = stepper.SelectRows(next, keep_rows);
  }

  std::sort(done.begin(), done.end(), CandidateBefore);
  if (static_cast<int>(done.size()) > cfg.nbest) done.resize(cfg.nbest);
  std::vector<ScoredSequence> out;
  out.reserve(done.size());
  for (Candidate& c : done) {
    ScoredSequence s;
    s.ll = c.ll;
    s.phonemes = PostProcessOutput(c.seq, phonemes);
    s.raw_ids = std::move(c.seq);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// N-best decode of one word (letter strings without boundaries). Results are
// sorted by log-likelihood, ties lexicographic; alignment-model outputs are
// post-processed, raw_ids keeps the T+2 emissions.
template <typename T>
std::vector<ScoredSequence> BeamDecode(
    const G2PModel<T>& model, const std::vector<std::string>& word_letters,
    const BeamConfig& cfg) {
  cfg.Validate();
  G2P_CHECK(!word_letters.empty(), ErrorKind::kVocab, "empty word");
  std::vector<int> ids;
  for (const std::string& l : word_letters)
    ids.push_back(model.letters.Index(l));
  if (model.config.arch == Arch::kEncDec) {
    const int max_len = cfg.max_length > 0
                            ? cfg.max_length
                            : 4 * static_cast<int>(ids.size()) + 5;
    EncDecStepper<T> stepper(model, ids);
    return detail::BeamLoop<T>(stepper, 0, max_len, cfg, model.phonemes);
  }
  std::vector<int> stream;
  stream.reserve(ids.size() + 2);
  stream.push_back(kBosId);
  stream.insert(stream.end(), ids.begin(), ids.end());
  stream.push_back(kEosId);
  AlignStepper<T> stepper(model, stream);
  return detail::BeamLoop<T>(stepper, stepper.num_positions(), 0, cfg,
                             model.phonemes);
}

struct DecodeFailure {
  size_t index = 0;
  std::string word;
  std::string message;
};

struct BatchDecodeResult {
  std::vector<std::vector<ScoredSequence>> results;  // input order
  std::vector<DecodeFailure> failures;
};

// Decodes words independently (parallel across words when workers != 1;
// workers <= 0 uses the backend default). Results match sequential decoding
// exactly; per-word errors are collected, not fatal.
template <typename T>
BatchDecodeResult DecodeBatch(const G2PModel<T>& model,
                              const std::vector<std::string>& words,
                              const BeamConfig& cfg, int workers) {
  cfg.Validate();
  BatchDecodeResult out;
  out.results.assign(words.size(), {});
  std::vector<std::string> errors(words.size());
  std::vector<char> failed(words.size(), 0);
  const int saved = kernels::NumThreads();
  if (workers > 0) kernels::SetNumThreads(workers);
  kernels::ParallelFor(static_cast<int64_t>(words.size()), 2, [&](int64_t i) {
    try {
      out.results[i] = BeamDecode(model, SplitUtf8(words[i]), cfg);
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  });
  if (workers > 0) kernels::SetNumThreads(saved);
  for (size_t i = 0; i < words.size(); ++i)
    if (failed[i])
      out.failures.push_back({i, words[i], errors[i]});
  return out;
}

// Decode file: `word<TAB>log-likelihood<TAB>ph ph ...`, one line per n-best
// entry, input order then rank.
void WriteDecodeLines(std::ostream& os, const std::string& word,
                      const std::vector<ScoredSequence>& nbest);

// Reads a decode file back keeping the first (best) hypothesis per word, in
// first-appearance order. Repeated non-consecutive words are an error.
std::vector<std::pair<std::string, std::vector<std::string>>> ReadHypotheses(
    std::istream& is);

}  // namespace g2p

#endif  // G2P_DECODER_H_
