// include/g2p/nn.h
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
// LSTM cell (standard non-peephole gates: input/forget/output + tanh
// candidate), softmax cross-entropy, SGD, and a finite-difference gradient
// checker. Everything operates on batches of rows; a single example is a
// batch of one.

#ifndef G2P_NN_H_
#define G2P_NN_H_

#include <cmath>
#include <functional>
#include <vector>

#include "g2p/kernels.h"
#include "g2p/matrix.h"

namespace g2p {

constexpr int kNumGates = 4;
// Row-block order of the packed gate weights.
enum Gate { kGateInput = 0, kGateForget = 1, kGateOutput = 2, kGateCand = 3 };

// Weights for one LSTM cell, packed by gate: rows [g*H, (g+1)*H) of w_x and
// w_h and entries [g*H, (g+1)*H) of bias belong to gate g.
template <typename T>
struct LstmCellParams {
  int input_dim = 0;
  int hidden_dim = 0;
  Matrix<T> w_x;   // [4H x input_dim]
  Matrix<T> w_h;   // [4H x H]
  Matrix<T> bias;  // [1 x 4H]

  void Init(int in_dim, int hid_dim, double scale, SeededRng* rng) {
    input_dim = in_dim;
    hidden_dim = hid_dim;
    w_x = UniformMatrix<T>(kNumGates * hid_dim, in_dim, scale, rng);
    w_h = UniformMatrix<T>(kNumGates * hid_dim, hid_dim, scale, rng);
    bias = Matrix<T>(1, kNumGates * hid_dim);  // zero
  }

  void InitZero(int in_dim, int hid_dim) {
    SeededRng rng(0);
    Init(in_dim, hid_dim, 0.0, &rng);
  }

  int64_t ParamCount() const { return w_x.size() + w_h.size() + bias.size(); }

  // First row of gate g's block.
  int GateOffset(Gate g) const { return static_cast<int>(g) * hidden_dim; }
};

// Recurrent state for a batch of sequences: h and c are [B x H].
template <typename T>
struct LstmState {
  Matrix<T> h, c;
  LstmState() = default;
  LstmState(int batch, int hidden) : h(batch, hidden), c(batch, hidden) {}
};

// Everything the backward pass needs from one forward step. gates holds the
// post-activation values (i, f, o in (0,1), g in (-1,1)) in the packed
// layout.
template <typename T>
struct LstmStepCache {
  Matrix<T> x;      // [B x D]
  Matrix<T> gates;  // [B x 4H], post-activation
  LstmState<T> prev;
  LstmState<T> out;
};

template <typename T>
inline T Sigmoid(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

// One forward step: i=sig(Wx+Uh+b), f, o likewise, g=tanh(...);
// c = f.c_prev + i.g; h = o.tanh(c).
template <typename T>
void LstmStep(const LstmCellParams<T>& p, const Matrix<T>& x,
              const LstmState<T>& prev, Matrix<T>* gates, LstmState<T>* out) {
  const int batch = x.rows();
  const int hid = p.hidden_dim;
  G2P_CHECK(x.cols() == p.input_dim && prev.h.cols() == hid &&
                prev.h.rows() == batch && prev.c.rows() == batch,
            ErrorKind::kShape,
            "lstm step: input " << x.rows() << "x" << x.cols()
                                << " vs cell " << p.input_dim << "/" << hid);
  kernels::MatMulNT(x, p.w_x, gates, false);
  kernels::MatMulNT(prev.h, p.w_h, gates, true);
  kernels::AddRowVector(gates, p.bias);

  Matrix<T>* g_out = gates;
  const Matrix<T>& c_prev = prev.c;
  Matrix<T>* c_new = &out->c;
  Matrix<T>* h_new = &out->h;
  kernels::ParallelFor(
      static_cast<int64_t>(batch) * hid, 1 << 12, [&](int64_t idx) {
        const int b = static_cast<int>(idx / hid);
        const int j = static_cast<int>(idx % hid);
        T* gr = g_out->row(b);
        const T gi = Sigmoid(gr[j]);
        const T gf = Sigmoid(gr[hid + j]);
        const T go = Sigmoid(gr[2 * hid + j]);
        const T gc = std::tanh(gr[3 * hid + j]);
        gr[j] = gi;
        gr[hid + j] = gf;
        gr[2 * hid + j] = go;
        gr[3 * hid + j] = gc;
        const T c = gf * c_prev.at(b, j) + gi * gc;
        c_new->at(b, j) = c;
        h_new->at(b, j) = go * std::tanh(c);
      });
}

// Convenience wrapper that also fills the cache.
template <typename T>
void LstmStepCached(const LstmCellParams<T>& p, Matrix<T> x,
                    const LstmState<T>& prev, LstmStepCache<T>* cache) {
  const int batch = x.rows();
  cache->x = std::move(x);
  cache->prev = prev;
  cache->gates = Matrix<T>(batch, kNumGates * p.hidden_dim);
  cache->out = LstmState<T>(batch, p.hidden_dim);
  LstmStep(p, cache->x, cache->prev, &cache->gates, &cache->out);
}

// Backward through one step. dh is the total gradient arriving at h (layer
// above + recurrence), dc_carry the cell-state gradient from step t+1.
// Parameter gradients accumulate into dp; dx, dh_prev, dc_prev are written.
template <typename T>
void LstmStepBackward(const LstmCellParams<T>& p, const LstmStepCache<T>& cache,
                      const Matrix<T>& dh, const Matrix<T>& dc_carry,
                      LstmCellParams<T>* dp, Matrix<T>* dx, Matrix<T>* dh_prev,
                      Matrix<T>* dc_prev) {
  const int batch = cache.x.rows();
  const int hid = p.hidden_dim;
  Matrix<T> dgates(batch, kNumGates * hid);

  const Matrix<T>& gates = cache.gates;
  const Matrix<T>& c_prev = cache.prev.c;
  const Matrix<T>& c_new = cache.out.c;
  kernels::ParallelFor(
      static_cast<int64_t>(batch) * hid, 1 << 12, [&](int64_t idx) {
        const int b = static_cast<int>(idx / hid);
        const int j = static_cast<int>(idx % hid);
        const T* gr = gates.row(b);
        const T gi = gr[j];
        const T gf = gr[hid + j];
        const T go = gr[2 * hid + j];
        const T gc = gr[3 * hid + j];
        const T tc = std::tanh(c_new.at(b, j));
        const T dh_bj = dh.at(b, j);
        const T dc_total =
            dc_carry.at(b, j) + dh_bj * go * (T(1) - tc * tc);
        const T d_o = dh_bj * tc;
        const T d_i = dc_total * gc;
        const T d_f = dc_total * c_prev.at(b, j);
        const T d_g = dc_total * gi;
        T* dgr = dgates.row(b);
        dgr[j] = d_i * gi * (T(1) - gi);
        dgr[hid + j] = d_f * gf * (T(1) - gf);
        dgr[2 * hid + j] = d_o * go * (T(1) - go);
        dgr[3 * hid + j] = d_g * (T(1) - gc * gc);
        dc_prev->at(b, j) = dc_total * gf;
      });

  kernels::MatMulTN(dgates, cache.x, &dp->w_x, true);
  kernels::MatMulTN(dgates, cache.prev.h, &dp->w_h, true);
  kernels::ColumnSums(dgates, &dp->bias, true);
  kernels::MatMulNN(dgates, p.w_x, dx, false);
  kernels::MatMulNN(dgates, p.w_h, dh_prev, false);
}

// Numerically stabilized softmax cross-entropy over the rows of logits.
// Per-row loss is -log softmax(logits_b)[targets[b]]; the exp/log sums run
// in double regardless of T. Returns the loss summed over rows in row order.
// dlogits (softmax - onehot) may alias nothing or be null; per_row may be
// null.
template <typename T>
double SoftmaxXentRows(const Matrix<T>& logits, const int* targets,
                       Matrix<T>* dlogits, std::vector<double>* per_row) {
  const int batch = logits.rows();
  const int v = logits.cols();
  for (int b = 0; b < batch; ++b)
    G2P_CHECK(targets[b] >= 0 && targets[b] < v, ErrorKind::kIndex,
              "softmax target " << targets[b] << " out of range " << v);
  std::vector<double> losses(batch);
  kernels::ParallelFor(batch, 8, [&](int64_t b_idx) {
    const int b = static_cast<int>(b_idx);
    const T* l = logits.row(b);
    T mx = l[0];
    for (int j = 1; j < v; ++j) mx = std::max(mx, l[j]);
    double se = 0.0;
    for (int j = 0; j < v; ++j) se += std::exp(static_cast<double>(l[j] - mx));
    const double lse = std::log(se);
    const int t = targets[b];
    losses[b] = lse - static_cast<double>(l[t] - mx);
    if (dlogits != nullptr) {
      T* d = dlogits->row(b);
      for (int j = 0; j < v; ++j) {
        const double pj = std::exp(static_cast<double>(l[j] - mx)) / se;
        d[j] = static_cast<T>(pj) - (j == t ? T(1) : T(0));
      }
    }
  });
  double total = 0.0;
  for (int b = 0; b < batch; ++b) total += losses[b];
  if (per_row != nullptr) *per_row = std::move(losses);
  return total;
}

template <typename T>
double SoftmaxXent(const Matrix<T>& logits, int target, Matrix<T>* dlogits) {
  return SoftmaxXentRows(logits, &target, dlogits, nullptr);
}

// params -= lr * clamp(grads, +-clip); clip <= 0 disables clipping. Gradients
// over a minibatch are summed per sample before this is applied, so lr keeps
// its per-sample meaning.
template <typename T>
void SgdUpdate(Matrix<T>* params, const Matrix<T>& grads, double lr,
               double clip) {
  G2P_CHECK(params->rows() == grads.rows() && params->cols() == grads.cols(),
            ErrorKind::kShape, "sgd shape mismatch");
  T* p = params->data();
  const T* g = grads.data();
  const T step = static_cast<T>(lr);
  const T bound = static_cast<T>(clip);
  kernels::ParallelFor(params->size(), 1 << 14, [&](int64_t i) {
    T gi = g[i];
    if (clip > 0) gi = std::min(std::max(gi, -bound), bound);
    p[i] -= step * gi;
  });
}

// Central-difference check: max over all parameter entries of
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6). The loss closure
// must re-evaluate from the (mutated) parameter matrices. The floor keeps
// entries whose true gradient sits near the difference-quotient noise level
// (|loss| * ulp / epsilon) from reading as large relative errors.
inline double GradCheck(const std::function<double()>& loss,
                        const std::vector<Matrix<double>*>& params,
                        const std::vector<const Matrix<double>*>& analytic,
                        double epsilon) {
  G2P_ASSERT(params.size() == analytic.size(), "grad check operand mismatch");
  double worst = 0.0;
  for (size_t m = 0; m < params.size(); ++m) {
    Matrix<double>* pm = params[m];
    const Matrix<double>* am = analytic[m];
    G2P_ASSERT(pm->rows() == am->rows() && pm->cols() == am->cols(),
               "grad check shape mismatch");
    for (int64_t i = 0; i < pm->size(); ++i) {
      double* slot = pm->data() + i;
      const double saved = *slot;
      *slot = saved + epsilon;
      const double up = loss();
      *slot = saved - epsilon;
      const double down = loss();
      *slot = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double exact = am->data()[i];
      const double denom =
          std::max(std::max(std::fabs(exact), std::fabs(numeric)), 1e-6);
      worst = std::max(worst, std::fabs(exact - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace g2p

#endif  // G2P_NN_H_
