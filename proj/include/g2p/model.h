// include/g2p/model.h
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
// The three grapheme-to-phoneme architectures and their parameter layout.
//
//   enc-dec: an encoder LSTM stack reads <s> followed by the time-reversed
//            letters; the final (h, c) of every encoder layer seeds the
//            matching decoder layer, which reads <os> + phonemes and
//            predicts phonemes + </os>.
//   uni:     one forward LSTM stack over the T+2 positions <s> l_1..l_T </s>;
//            the input at each position concatenates a window of letter
//            embeddings (padded with </s>) and the embedding of the previous
//            output symbol. Targets are <os> slot_1..slot_T </os>.
//   bi:      like uni plus a backward LSTM stack that reads only the letters
//            (right to left), so it never depends on past outputs and its
//            activities can be precomputed per word. Forward layer k >= 1
//            consumes the concatenated forward/backward outputs below;
//            backward layer k >= 1 consumes only the backward output below.
//            A final forward layer reads the concatenated top pair and feeds
//            the softmax. "layers = N" means N such pairs plus that top
//            layer.
//
// Parameters live in a ParamSet visited in one fixed order everywhere
// (initialization, SGD, serialization): letter embeddings, phoneme
// embeddings, the LSTM cells in stack order (w_x, w_h, bias each), output
// weights, output bias.

#ifndef G2P_MODEL_H_
#define G2P_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "g2p/common.h"
#include "g2p/nn.h"
#include "g2p/symbols.h"

namespace g2p {

enum class Arch : uint8_t { kEncDec = 0, kUni = 1, kBi = 2 };

const char* ArchName(Arch arch);
Arch ArchFromName(const std::string& name);

struct ModelConfig {
  Arch arch = Arch::kBi;
  int letter_emb_dim = 50;
  int phoneme_emb_dim = 50;
  int hidden_dim = 300;
  int layers = 1;
  // Letters visible per position: current + (window - 1) future, padded with
  // </s>. Ignored by enc-dec.
  int window = 3;
  uint64_t seed = 1;

  void Validate() const {
    G2P_CHECK(letter_emb_dim >= 1 && phoneme_emb_dim >= 1 && hidden_dim >= 1,
              ErrorKind::kConfig, "embedding/hidden dims must be >= 1");
    G2P_CHECK(layers >= 1, ErrorKind::kConfig, "layers must be >= 1");
    G2P_CHECK(window >= 1, ErrorKind::kConfig, "window must be >= 1");
  }
};

template <typename T>
struct ParamSet {
  Matrix<T> letter_emb;   // [V_L x letter_emb_dim]
  Matrix<T> phoneme_emb;  // [V_P x phoneme_emb_dim]
  std::vector<LstmCellParams<T>> enc, dec;  // enc-dec stacks
  std::vector<LstmCellParams<T>> uni;       // uni stack
  std::vector<LstmCellParams<T>> fwd, bwd;  // bi stacks
  LstmCellParams<T> top;                    // bi prediction layer
  Matrix<T> out_w;  // [V_P x hidden]
  Matrix<T> out_b;  // [1 x V_P]
};

// Applies fn to every parameter matrix in the canonical order.
template <typename T, typename Fn>
void VisitParams(const ModelConfig& c, ParamSet<T>* p, Fn&& fn) {
  auto cell = [&fn](LstmCellParams<T>* l) {
    fn(&l->w_x);
    fn(&l->w_h);
    fn(&l->bias);
  };
  fn(&p->letter_emb);
  fn(&p->phoneme_emb);
  switch (c.arch) {
    case Arch::kEncDec:
      for (auto& l : p->enc) cell(&l);
      for (auto& l : p->dec) cell(&l);
      break;
    case Arch::kUni:
      for (auto& l : p->uni) cell(&l);
      break;
    case Arch::kBi:
      for (int k = 0; k < c.layers; ++k) {
        cell(&p->fwd[k]);
        cell(&p->bwd[k]);
      }
      cell(&p->top);
      break;
  }
  fn(&p->out_w);
  fn(&p->out_b);
}

template <typename T>
std::vector<Matrix<T>*> ParamPointers(const ModelConfig& c, ParamSet<T>* p) {
  std::vector<Matrix<T>*> out;
  VisitParams(c, p, [&out](Matrix<T>* m) { out.push_back(m); });
  return out;
}

// Draws every weight uniformly from [-scale, scale] (biases zero) in the
// canonical order, so a fixed seed fixes every parameter.
template <typename T>
void InitParams(const ModelConfig& c, int letter_vocab, int phoneme_vocab,
                double scale, SeededRng* rng, ParamSet<T>* p) {
  G2P_CHECK(letter_vocab >= 3 && phoneme_vocab >= 4, ErrorKind::kConfig,
            "vocabularies must hold the reserved symbols plus content");
  const int hid = c.hidden_dim;
  const int el = c.letter_emb_dim, ep = c.phoneme_emb_dim;
  p->letter_emb = UniformMatrix<T>(letter_vocab, el, scale, rng);
  p->phoneme_emb = UniformMatrix<T>(phoneme_vocab, ep, scale, rng);
  auto init_stack = [&](std::vector<LstmCellParams<T>>* stack, int bottom_in) {
    stack->resize(c.layers);
    for (int k = 0; k < c.layers; ++k)
      (*stack)[k].Init(k == 0 ? bottom_in : hid, hid, scale, rng);
  };
  switch (c.arch) {
    case Arch::kEncDec:
      init_stack(&p->enc, el);
      init_stack(&p->dec, ep);
      break;
    case Arch::kUni:
      init_stack(&p->uni, c.window * el + ep);
      break;
    case Arch::kBi:
      p->fwd.resize(c.layers);
      p->bwd.resize(c.layers);
      for (int k = 0; k < c.layers; ++k) {
        p->fwd[k].Init(k == 0 ? c.window * el + ep : 2 * hid, hid, scale, rng);
        p->bwd[k].Init(k == 0 ? el : hid, hid, scale, rng);
      }
      p->top.Init(2 * hid, hid, scale, rng);
      break;
  }
  p->out_w = UniformMatrix<T>(phoneme_vocab, hid, scale, rng);
  p->out_b = Matrix<T>(1, phoneme_vocab);
}

// Closed-form parameter count for a config; kept in lockstep with InitParams
// by tests.
int64_t ExpectedParamCount(const ModelConfig& c, int letter_vocab,
                           int phoneme_vocab);

template <typename T>
struct G2PModel {
  ModelConfig config;
  SymbolTable letters{SymbolTable::Side::kLetter};
  SymbolTable phonemes{SymbolTable::Side::kPhoneme};
  ParamSet<T> params;

  int64_t ParamCount() const {
    int64_t n = 0;
    VisitParams(config, const_cast<ParamSet<T>*>(&params),
                [&n](Matrix<T>* m) { n += m->size(); });
    return n;
  }
};

template <typename T>
G2PModel<T> BuildModel(const ModelConfig& config, const SymbolTable& letters,
                       const SymbolTable& phonemes, double init_scale = 0.08) {
  config.Validate();
  G2PModel<T> m;
  m.config = config;
  m.letters = letters;
  m.phonemes = phonemes;
  SeededRng rng(config.seed);
  InitParams(config, letters.size(), phonemes.size(), init_scale, &rng,
             &m.params);
  return m;
}

// Zero gradients (or a zero model) with the same shapes as a config demands.
template <typename T>
ParamSet<T> ZeroParams(const ModelConfig& c, int letter_vocab,
                       int phoneme_vocab) {
  ParamSet<T> p;
  SeededRng rng(0);
  InitParams(c, letter_vocab, phoneme_vocab, 0.0, &rng, &p);
  return p;
}

template <typename T>
void ZeroParamSet(const ModelConfig& c, ParamSet<T>* p) {
  VisitParams(c, p, [](Matrix<T>* m) { m->Fill(T(0)); });
}

template <typename T>
void AccumulateParams(const ModelConfig& c, const ParamSet<T>& src,
                      ParamSet<T>* dst) {
  auto s = ParamPointers(c, const_cast<ParamSet<T>*>(&src));
  auto d = ParamPointers(c, dst);
  for (size_t i = 0; i < s.size(); ++i) kernels::AddTo(*s[i], d[i]);
}

template <typename T>
bool ParamsFinite(const ModelConfig& c, const ParamSet<T>& p) {
  bool ok = true;
  VisitParams(c, const_cast<ParamSet<T>*>(&p),
              [&ok](Matrix<T>* m) { ok = ok && m->AllFinite(); });
  return ok;
}

// One SGD step over the whole model: elementwise clip, then
// params -= lr * grads.
template <typename T>
void ApplySgd(const ModelConfig& c, ParamSet<T>* params,
              const ParamSet<T>& grads, double lr, double clip) {
  auto p = ParamPointers(c, params);
  auto g = ParamPointers(c, const_cast<ParamSet<T>*>(&grads));
  G2P_ASSERT(p.size() == g.size(), "parameter/gradient visit mismatch");
  for (size_t i = 0; i < p.size(); ++i) SgdUpdate(p[i], *g[i], lr, clip);
}

}  // namespace g2p

#endif  // G2P_MODEL_H_
