// include/g2p/graph.h
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
// Teacher-forced forward/backward graphs for the three architectures. The
// same Forward pass serves training, validation scoring, and decoder
// rescoring (a sequence's log-likelihood is minus its cross-entropy).

#ifndef G2P_GRAPH_H_
#define G2P_GRAPH_H_

#include <utility>
#include <vector>

#include "g2p/aligner.h"
#include "g2p/model.h"

namespace g2p {

// Alignment-model example. Both streams carry their boundary symbols:
// letters = <s> l_1..l_T </s> and targets = <os> slot_1..slot_T </os>, so
// they share length T+2. The past-output stream fed to the model is <os>
// followed by targets shifted right by one.
struct AlignedExample {
  std::vector<int> letters;
  std::vector<int> targets;
};

// Enc-dec example: raw letter ids (no boundaries; the graph prepends <s>
// after reversing) and the emission sequence the decoder is scored on.
// Training targets end with </os>; rescoring targets are exactly the symbols
// a hypothesis emitted.
struct SeqExample {
  std::vector<int> letters;
  std::vector<int> targets;
};

inline AlignedExample EncodeAligned(const AlignedPair& pair,
                                    const SymbolTable& letters,
                                    const SymbolTable& phonemes) {
  AlignedExample ex;
  ex.letters.reserve(pair.letters.size() + 2);
  ex.letters.push_back(kBosId);
  for (const std::string& l : pair.letters)
    ex.letters.push_back(letters.Index(l));
  ex.letters.push_back(kEosId);
  ex.targets.reserve(pair.slots.size() + 2);
  ex.targets.push_back(kOsId);
  for (const Chunk& c : pair.slots)
    ex.targets.push_back(phonemes.Index(c.ToString()));
  ex.targets.push_back(kEOsId);
  return ex;
}

inline SeqExample EncodeSeq(const std::vector<std::string>& word_letters,
                            const std::vector<std::string>& pron,
                            const SymbolTable& letters,
                            const SymbolTable& phonemes) {
  SeqExample ex;
  for (const std::string& l : word_letters)
    ex.letters.push_back(letters.Index(l));
  for (const std::string& p : pron) ex.targets.push_back(phonemes.Index(p));
  ex.targets.push_back(kEOsId);
  return ex;
}

namespace detail {

// dst = src columns [c0, c0 + dst->cols()).
template <typename T>
void SliceCols(const Matrix<T>& src, int c0, Matrix<T>* dst) {
  for (int i = 0; i < src.rows(); ++i) {
    const T* s = src.row(i) + c0;
    T* d = dst->row(i);
    for (int j = 0; j < dst->cols(); ++j) d[j] = s[j];
  }
}

// dst += src columns [c0, c0 + dst->cols()).
template <typename T>
void AddSliceCols(const Matrix<T>& src, int c0, Matrix<T>* dst) {
  for (int i = 0; i < src.rows(); ++i) {
    const T* s = src.row(i) + c0;
    T* d = dst->row(i);
    for (int j = 0; j < dst->cols(); ++j) d[j] += s[j];
  }
}

// out = [a | b] columnwise.
template <typename T>
void ConcatCols(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>* out) {
  G2P_CHECK(a.rows() == b.rows() && out->rows() == a.rows() &&
                out->cols() == a.cols() + b.cols(),
            ErrorKind::kShape, "concat shape mismatch");
  for (int i = 0; i < a.rows(); ++i) {
    T* d = out->row(i);
    const T* pa = a.row(i);
    const T* pb = b.row(i);
    for (int j = 0; j < a.cols(); ++j) d[j] = pa[j];
    for (int j = 0; j < b.cols(); ++j) d[a.cols() + j] = pb[j];
  }
}

}  // namespace detail

// One LSTM layer unrolled over a sequence in processing order (the caller
// decides whether processing order is left-to-right or right-to-left in word
// time). Keeps every step cache so Backward can run BPTT.
template <typename T>
class LstmSequence {
 public:
  void Run(const LstmCellParams<T>& p, std::vector<Matrix<T>> inputs,
           const LstmState<T>* init) {
    G2P_ASSERT(!inputs.empty(), "empty lstm sequence");
    const int batch = inputs[0].rows();
    caches_.assign(inputs.size(), LstmStepCache<T>());
    LstmState<T> zero(batch, p.hidden_dim);
    for (size_t s = 0; s < inputs.size(); ++s) {
      const LstmState<T>& prev =
          s == 0 ? (init != nullptr ? *init : zero) : caches_[s - 1].out;
      LstmStepCached(p, std::move(inputs[s]), prev, &caches_[s]);
    }
  }

  int steps() const { return static_cast<int>(caches_.size()); }
  const Matrix<T>& h(int s) const { return caches_[s].out.h; }
  const LstmState<T>& final_state() const { return caches_.back().out; }

  // BPTT. dh_ext[s] is the gradient arriving at h(s) from outside the layer
  // (an empty matrix means zero); dfinal adds gradient at the final (h, c).
  // Parameter gradients accumulate into dp; dx gets the per-step input
  // gradients; dinit, when non-null, receives the gradient at the initial
  // state.
  void Backward(const LstmCellParams<T>& p,
                const std::vector<Matrix<T>>& dh_ext,
                const LstmState<T>* dfinal, LstmCellParams<T>* dp,
                std::vector<Matrix<T>>* dx, LstmState<T>* dinit) const {
    const int n = steps();
    const int batch = caches_[0].x.rows();
    const int hid = p.hidden_dim;
    G2P_ASSERT(static_cast<int>(dh_ext.size()) == n, "dh per step required");
    dx->assign(n, Matrix<T>());
    Matrix<T> dh_rec(batch, hid), dc_rec(batch, hid);
    if (dfinal != nullptr) {
      dh_rec = dfinal->h;
      dc_rec = dfinal->c;
    }
    for (int s = n - 1; s >= 0; --s) {
      Matrix<T> dh_total = std::move(dh_rec);
      if (!dh_ext[s].empty()) kernels::AddTo(dh_ext[s], &dh_total);
      (*dx)[s] = Matrix<T>(batch, p.input_dim);
      Matrix<T> dh_prev(batch, hid), dc_prev(batch, hid);
      LstmStepBackward(p, caches_[s], dh_total, dc_rec, dp, &(*dx)[s],
                       &dh_prev, &dc_prev);
      dh_rec = std::move(dh_prev);
      dc_rec = std::move(dc_prev);
    }
    if (dinit != nullptr) {
      dinit->h = std::move(dh_rec);
      dinit->c = std::move(dc_rec);
    }
  }

 private:
  std::vector<LstmStepCache<T>> caches_;
};

// Forward/backward for the alignment-based models (uni and bi). A batch must
// share one sequence length (minibatches are bucketed by length upstream).
template <typename T>
class AlignGraph {
 public:
  explicit AlignGraph(const G2PModel<T>* model) : model_(model) {
    G2P_CHECK(model->config.arch != Arch::kEncDec, ErrorKind::kConfig,
              "alignment graph requires a uni or bi model");
  }

  // Total cross-entropy (nats, double) summed over all positions of all
  // examples.
  double Forward(const std::vector<AlignedExample>& batch) {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    batch_ = static_cast<int>(batch.size());
    G2P_CHECK(batch_ >= 1, ErrorKind::kShape, "empty batch");
    n_ = static_cast<int>(batch[0].letters.size());
    G2P_CHECK(n_ >= 2, ErrorKind::kShape, "sequence too short");
    stream_.assign(batch_, {});
    for (int b = 0; b < batch_; ++b) {
      G2P_CHECK(static_cast<int>(batch[b].letters.size()) == n_ &&
                    batch[b].targets.size() == batch[b].letters.size(),
                ErrorKind::kShape,
                "batch mixes lengths or misaligned targets");
      stream_[b] = batch[b].letters;
    }
    tgt_.assign(n_, std::vector<int>(batch_));
    past_.assign(n_, std::vector<int>(batch_));
    for (int t = 0; t < n_; ++t)
      for (int b = 0; b < batch_; ++b) {
        tgt_[t][b] = batch[b].targets[t];
        past_[t][b] = t == 0 ? kOsId : batch[b].targets[t - 1];
      }

    const int layers = c.layers;
    const int el = c.letter_emb_dim, ep = c.phoneme_emb_dim;
    const int hid = c.hidden_dim;
    const bool bi = c.arch == Arch::kBi;

    if (bi) {
      bwd_seq_.assign(layers, LstmSequence<T>());
      for (int k = 0; k < layers; ++k) {
        std::vector<Matrix<T>> inputs(n_);
        for (int s = 0; s < n_; ++s) {
          const int t = n_ - 1 - s;
          if (k == 0) {
            inputs[s] = Matrix<T>(batch_, el);
            std::vector<int> ids(batch_);
            for (int b = 0; b < batch_; ++b) ids[b] = stream_[b][t];
            kernels::GatherRows(p.letter_emb, ids.data(), batch_, &inputs[s]);
          } else {
            inputs[s] = bwd_seq_[k - 1].h(s);
          }
        }
        bwd_seq_[k].Run(p.bwd[k], std::move(inputs), nullptr);
      }
    }

    const std::vector<LstmCellParams<T>>& fwd_params = bi ? p.fwd : p.uni;
    fwd_seq_.assign(layers, LstmSequence<T>());
    for (int k = 0; k < layers; ++k) {
      std::vector<Matrix<T>> inputs(n_);
      for (int t = 0; t < n_; ++t) {
        if (k == 0) {
          inputs[t] = Matrix<T>(batch_, c.window * el + ep);
          std::vector<int> ids(batch_);
          for (int d = 0; d < c.window; ++d) {
            WindowIds(t, d, &ids);
            kernels::GatherRows(p.letter_emb, ids.data(), batch_, &inputs[t],
                                d * el);
          }
          kernels::GatherRows(p.phoneme_emb, past_[t].data(), batch_,
                              &inputs[t], c.window * el);
        } else if (bi) {
          inputs[t] = Matrix<T>(batch_, 2 * hid);
          detail::ConcatCols(fwd_seq_[k - 1].h(t), bwd_seq_[k - 1].h(n_ - 1 - t),
                             &inputs[t]);
        } else {
          inputs[t] = fwd_seq_[k - 1].h(t);
        }
      }
      fwd_seq_[k].Run(fwd_params[k], std::move(inputs), nullptr);
    }

    if (bi) {
      std::vector<Matrix<T>> inputs(n_);
      for (int t = 0; t < n_; ++t) {
        inputs[t] = Matrix<T>(batch_, 2 * hid);
        detail::ConcatCols(fwd_seq_[layers - 1].h(t),
                           bwd_seq_[layers - 1].h(n_ - 1 - t), &inputs[t]);
      }
      top_seq_.Run(p.top, std::move(inputs), nullptr);
    }

    const int vocab = p.out_w.rows();
    logits_.assign(n_, Matrix<T>());
    dlogits_.assign(n_, Matrix<T>());
    example_losses_.assign(batch_, 0.0);
    position_losses_.assign(n_, 0.0);
    double total = 0.0;
    for (int t = 0; t < n_; ++t) {
      logits_[t] = Matrix<T>(batch_, vocab);
      dlogits_[t] = Matrix<T>(batch_, vocab);
      kernels::MatMulNT(TopH(t), p.out_w, &logits_[t]);
      kernels::AddRowVector(&logits_[t], p.out_b);
      std::vector<double> per_row;
      const double loss =
          SoftmaxXentRows(logits_[t], tgt_[t].data(), &dlogits_[t], &per_row);
      for (int b = 0; b < batch_; ++b) example_losses_[b] += per_row[b];
      position_losses_[t] = loss;
      total += loss;
    }
    return total;
  }

  int64_t positions() const { return static_cast<int64_t>(batch_) * n_; }
  const std::vector<double>& example_losses() const {
    return example_losses_;
  }
  const std::vector<double>& position_losses() const {
    return position_losses_;
  }

  // Adds the gradients of the last Forward into *grads.
  void Backward(ParamSet<T>* grads) {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    const int layers = c.layers;
    const int el = c.letter_emb_dim;
    const int hid = c.hidden_dim;
    const bool bi = c.arch == Arch::kBi;

    std::vector<Matrix<T>> dh_top(n_);
    for (int t = 0; t < n_; ++t) {
      dh_top[t] = Matrix<T>(batch_, hid);
      kernels::MatMulNN(dlogits_[t], p.out_w, &dh_top[t]);
      kernels::MatMulTN(dlogits_[t], TopH(t), &grads->out_w, true);
      kernels::ColumnSums(dlogits_[t], &grads->out_b, true);
    }

    std::vector<Matrix<T>> dfwd = std::move(dh_top);
    std::vector<Matrix<T>> dbwd;
    if (bi) {
      std::vector<Matrix<T>> dx_top;
      top_seq_.Backward(p.top, dfwd, nullptr, &grads->top, &dx_top, nullptr);
      dfwd.assign(n_, Matrix<T>());
      dbwd.assign(n_, Matrix<T>());
      for (int t = 0; t < n_; ++t) {
        dfwd[t] = Matrix<T>(batch_, hid);
        detail::SliceCols(dx_top[t], 0, &dfwd[t]);
        dbwd[n_ - 1 - t] = Matrix<T>(batch_, hid);
        detail::SliceCols(dx_top[t], hid, &dbwd[n_ - 1 - t]);
      }
    }

    const std::vector<LstmCellParams<T>>& fwd_params = bi ? p.fwd : p.uni;
    std::vector<LstmCellParams<T>>& fwd_grads = bi ? grads->fwd : grads->uni;
    for (int k = layers - 1; k >= 0; --k) {
      std::vector<Matrix<T>> dxf;
      fwd_seq_[k].Backward(fwd_params[k], dfwd, nullptr, &fwd_grads[k], &dxf,
                           nullptr);
      std::vector<Matrix<T>> dxb;
      if (bi)
        bwd_seq_[k].Backward(p.bwd[k], dbwd, nullptr, &grads->bwd[k], &dxb,
                             nullptr);

      if (k > 0) {
        std::vector<Matrix<T>> next_dfwd(n_), next_dbwd;
        if (bi) next_dbwd.assign(n_, Matrix<T>());
        for (int t = 0; t < n_; ++t) {
          if (bi) {
            next_dfwd[t] = Matrix<T>(batch_, hid);
            detail::SliceCols(dxf[t], 0, &next_dfwd[t]);
            const int s = n_ - 1 - t;
            next_dbwd[s] = Matrix<T>(batch_, hid);
            detail::SliceCols(dxf[t], hid, &next_dbwd[s]);
            kernels::AddTo(dxb[s], &next_dbwd[s]);
          } else {
            next_dfwd[t] = std::move(dxf[t]);
          }
        }
        dfwd = std::move(next_dfwd);
        dbwd = std::move(next_dbwd);
      } else {
        std::vector<int> ids(batch_);
        for (int t = 0; t < n_; ++t) {
          for (int d = 0; d < c.window; ++d) {
            WindowIds(t, d, &ids);
            kernels::ScatterAddRows(dxf[t], ids.data(), batch_, d * el,
                                    &grads->letter_emb);
          }
          kernels::ScatterAddRows(dxf[t], past_[t].data(), batch_,
                                  c.window * el, &grads->phoneme_emb);
          if (bi) {
            const int s = n_ - 1 - t;
            for (int b = 0; b < batch_; ++b) ids[b] = stream_[b][t];
            kernels::ScatterAddRows(dxb[s], ids.data(), batch_, 0,
                                    &grads->letter_emb);
          }
        }
      }
    }
  }

 private:
  const Matrix<T>& TopH(int t) const {
    return model_->config.arch == Arch::kBi
               ? top_seq_.h(t)
               : fwd_seq_[model_->config.layers - 1].h(t);
  }

  // Letter window: position t sees stream[t .. t+window-1], padded with </s>.
  void WindowIds(int t, int d, std::vector<int>* ids) const {
    for (int b = 0; b < batch_; ++b)
      (*ids)[b] = t + d < n_ ? stream_[b][t + d] : kEosId;
  }

  const G2PModel<T>* model_;
  int batch_ = 0, n_ = 0;
  std::vector<std::vector<int>> stream_;      // [b][t]
  std::vector<std::vector<int>> tgt_, past_;  // [t][b]
  std::vector<LstmSequence<T>> fwd_seq_, bwd_seq_;
  LstmSequence<T> top_seq_;
  std::vector<Matrix<T>> logits_, dlogits_;
  std::vector<double> example_losses_, position_losses_;
};

// Forward/backward for the encoder-decoder model, one example at a time. The
// encoder reads <s> followed by the time-reversed letters; the final (h, c)
// of each encoder layer becomes the initial state of the matching decoder
// layer; the decoder reads <os> + targets[:-1] and is scored against
// targets.
template <typename T>
class EncDecGraph {
 public:
  explicit EncDecGraph(const G2PModel<T>* model) : model_(model) {
    G2P_CHECK(model->config.arch == Arch::kEncDec, ErrorKind::kConfig,
              "enc-dec graph requires an encdec model");
  }

  double Forward(const SeqExample& ex) {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    G2P_CHECK(!ex.letters.empty(), ErrorKind::kShape, "empty word");
    G2P_CHECK(!ex.targets.empty(), ErrorKind::kShape, "empty target");

    enc_ids_.assign(1, kBosId);
    enc_ids_.insert(enc_ids_.end(), ex.letters.rbegin(), ex.letters.rend());
    dec_ids_.assign(1, kOsId);
    dec_ids_.insert(dec_ids_.end(), ex.targets.begin(), ex.targets.end() - 1);
    tgt_ = ex.targets;

    const int layers = c.layers;
    enc_seq_.assign(layers, LstmSequence<T>());
    for (int k = 0; k < layers; ++k) {
      const int steps = static_cast<int>(enc_ids_.size());
      std::vector<Matrix<T>> inputs(steps);
      for (int s = 0; s < steps; ++s) {
        if (k == 0) {
          inputs[s] = Matrix<T>(1, c.letter_emb_dim);
          kernels::GatherRows(p.letter_emb, &enc_ids_[s], 1, &inputs[s]);
        } else {
          inputs[s] = enc_seq_[k - 1].h(s);
        }
      }
      enc_seq_[k].Run(p.enc[k], std::move(inputs), nullptr);
    }

    dec_seq_.assign(layers, LstmSequence<T>());
    for (int k = 0; k < layers; ++k) {
      const int steps = static_cast<int>(dec_ids_.size());
      std::vector<Matrix<T>> inputs(steps);
      for (int s = 0; s < steps; ++s) {
        if (k == 0) {
          inputs[s] = Matrix<T>(1, c.phoneme_emb_dim);
          kernels::GatherRows(p.phoneme_emb, &dec_ids_[s], 1, &inputs[s]);
        } else {
          inputs[s] = dec_seq_[k - 1].h(s);
        }
      }
      const LstmState<T> init = enc_seq_[k].final_state();
      dec_seq_[k].Run(p.dec[k], std::move(inputs), &init);
    }

    const int vocab = p.out_w.rows();
    const int steps = static_cast<int>(tgt_.size());
    logits_.assign(steps, Matrix<T>());
    dlogits_.assign(steps, Matrix<T>());
    position_losses_.assign(steps, 0.0);
    double total = 0.0;
    for (int s = 0; s < steps; ++s) {
      logits_[s] = Matrix<T>(1, vocab);
      dlogits_[s] = Matrix<T>(1, vocab);
      kernels::MatMulNT(dec_seq_[layers - 1].h(s), p.out_w, &logits_[s]);
      kernels::AddRowVector(&logits_[s], p.out_b);
      const double loss = SoftmaxXent(logits_[s], tgt_[s], &dlogits_[s]);
      position_losses_[s] = loss;
      total += loss;
    }
    return total;
  }

  int64_t positions() const { return static_cast<int64_t>(tgt_.size()); }
  const std::vector<double>& position_losses() const {
    return position_losses_;
  }

  // Adds the gradients of the last Forward into *grads.
  void Backward(ParamSet<T>* grads) {
    const ModelConfig& c = model_->config;
    const ParamSet<T>& p = model_->params;
    const int layers = c.layers;
    const int hid = c.hidden_dim;
    const int steps = static_cast<int>(tgt_.size());

    std::vector<Matrix<T>> dh(steps);
    for (int s = 0; s < steps; ++s) {
      dh[s] = Matrix<T>(1, hid);
      kernels::MatMulNN(dlogits_[s], p.out_w, &dh[s]);
      kernels::MatMulTN(dlogits_[s], dec_seq_[layers - 1].h(s), &grads->out_w,
                        true);
      kernels::ColumnSums(dlogits_[s], &grads->out_b, true);
    }

    std::vector<LstmState<T>> dinit(layers);
    for (int k = layers - 1; k >= 0; --k) {
      std::vector<Matrix<T>> dx;
      dec_seq_[k].Backward(p.dec[k], dh, nullptr, &grads->dec[k], &dx,
                           &dinit[k]);
      if (k > 0) {
        dh = std::move(dx);
      } else {
        for (int s = 0; s < steps; ++s)
          kernels::ScatterAddRows(dx[s], &dec_ids_[s], 1, 0,
                                  &grads->phoneme_emb);
      }
    }

    const int enc_steps = static_cast<int>(enc_ids_.size());
    dh.assign(enc_steps, Matrix<T>());
    for (int k = layers - 1; k >= 0; --k) {
      std::vector<Matrix<T>> dx;
      enc_seq_[k].Backward(p.enc[k], dh, &dinit[k], &grads->enc[k], &dx,
                           nullptr);
      if (k > 0) {
        dh = std::move(dx);
      } else {
        for (int s = 0; s < enc_steps; ++s)
          kernels::ScatterAddRows(dx[s], &enc_ids_[s], 1, 0,
                                  &grads->letter_emb);
      }
    }
  }

 private:
  const G2PModel<T>* model_;
  std::vector<int> enc_ids_, dec_ids_, tgt_;
  std::vector<LstmSequence<T>> enc_seq_, dec_seq_;
  std::vector<Matrix<T>> logits_, dlogits_;
  std::vector<double> position_losses_;
};

}  // namespace g2p

#endif  // G2P_GRAPH_H_
