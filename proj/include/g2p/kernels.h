// include/g2p/kernels.h
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
// Data-parallel kernels behind all model math. Two backends, selected at
// runtime: a serial reference and an OpenMP version. Both compute every
// output element with the same fixed reduction tree, so they agree bit for
// bit and results never depend on the thread count. Tests rely on that.

#ifndef G2P_KERNELS_H_
#define G2P_KERNELS_H_

#include <cstdint>

#include "g2p/matrix.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace g2p {
namespace kernels {

enum class Backend { kSerial, kOpenMP };

Backend backend();
void SetBackend(Backend b);
// Caps the OpenMP team size for kernel regions. n <= 0 resets to the
// OpenMP default.
void SetNumThreads(int n);
int NumThreads();

namespace detail {
int TeamSize();
}

// Runs fn(i) for i in [0, n). Iterations must be independent; scheduling is
// static so any split is safe. Work items below min_parallel run serially.
template <typename F>
void ParallelFor(int64_t n, int64_t min_parallel, F&& fn) {
#ifdef _OPENMP
  if (backend() == Backend::kOpenMP && n >= min_parallel) {
    int team = detail::TeamSize();
#pragma omp parallel for schedule(static) num_threads(team)
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#endif
  for (int64_t i = 0; i < n; ++i) fn(i);
}

// Dot product with a fixed 8-lane reduction tree. The lane structure is part
// of the contract: it depends only on n, never on the backend, so results
// are reproducible and the independent lanes vectorize without -ffast-math.
template <typename T>
inline T Dot(const T* a, const T* b, int n) {
  T s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
    s4 += a[i + 4] * b[i + 4];
    s5 += a[i + 5] * b[i + 5];
    s6 += a[i + 6] * b[i + 6];
    s7 += a[i + 7] * b[i + 7];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return (((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7))) + tail;
}

// C (+)= A * B^T. A is [m x k], B is [n x k], C is [m x n]. Both operand
// rows are contiguous, which keeps the inner dot product cache friendly.
template <typename T>
void MatMulNT(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>* c,
              bool accumulate = false) {
  G2P_CHECK(a.cols() == b.cols() && c->rows() == a.rows() &&
                c->cols() == b.rows(),
            ErrorKind::kShape,
            "matmul_nt shapes " << a.rows() << "x" << a.cols() << " * ("
                                << b.rows() << "x" << b.cols() << ")^T -> "
                                << c->rows() << "x" << c->cols());
  const int m = a.rows(), n = b.rows(), k = a.cols();
  Matrix<T>* out = c;
  ParallelFor(static_cast<int64_t>(m) * n, 512, [&, m, n, k](int64_t idx) {
    const int i = static_cast<int>(idx / n);
    const int j = static_cast<int>(idx % n);
    T v = Dot(a.row(i), b.row(j), k);
    T* dst = out->row(i) + j;
    *dst = accumulate ? *dst + v : v;
  });
  (void)m;
}

template <typename T>
void Transpose(const Matrix<T>& a, Matrix<T>* out) {
  G2P_CHECK(out->rows() == a.cols() && out->cols() == a.rows(),
            ErrorKind::kShape, "transpose shape mismatch");
  const int m = a.rows(), n = a.cols();
  ParallelFor(static_cast<int64_t>(n), 64, [&](int64_t j) {
    T* dst = out->row(static_cast<int>(j));
    for (int i = 0; i < m; ++i) dst[i] = a.at(i, static_cast<int>(j));
  });
}

// C (+)= A^T * B. A is [k x m], B is [k x n], C is [m x n]. Used for weight
// gradients (dW = dG^T X); implemented by transposing both operands and
// running the contiguous NT kernel, with the inner sum over k in row order.
template <typename T>
void MatMulTN(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>* c,
              bool accumulate = false) {
  G2P_CHECK(a.rows() == b.rows() && c->rows() == a.cols() &&
                c->cols() == b.cols(),
            ErrorKind::kShape, "matmul_tn shape mismatch");
  Matrix<T> at(a.cols(), a.rows());
  Transpose(a, &at);
  Matrix<T> bt(b.cols(), b.rows());
  Transpose(b, &bt);
  MatMulNT(at, bt, c, accumulate);
}

// C (+)= A * B. A is [m x k], B is [k x n], C is [m x n]. Used for input
// gradients (dX = dG W).
template <typename T>
void MatMulNN(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>* c,
              bool accumulate = false) {
  G2P_CHECK(a.cols() == b.rows() && c->rows() == a.rows() &&
                c->cols() == b.cols(),
            ErrorKind::kShape, "matmul_nn shape mismatch");
  Matrix<T> bt(b.cols(), b.rows());
  Transpose(b, &bt);
  MatMulNT(a, bt, c, accumulate);
}

// Each row of m += v (v has m.cols() entries).
template <typename T>
void AddRowVector(Matrix<T>* m, const Matrix<T>& v) {
  G2P_CHECK(v.rows() == 1 && v.cols() == m->cols(), ErrorKind::kShape,
            "bias shape mismatch");
  const int cols = m->cols();
  const T* vp = v.row(0);
  ParallelFor(m->rows(), 16, [&](int64_t i) {
    T* r = m->row(static_cast<int>(i));
    for (int j = 0; j < cols; ++j) r[j] += vp[j];
  });
}

// out[0][j] (+)= sum_i m[i][j], summed in row order.
template <typename T>
void ColumnSums(const Matrix<T>& m, Matrix<T>* out, bool accumulate = false) {
  G2P_CHECK(out->rows() == 1 && out->cols() == m.cols(), ErrorKind::kShape,
            "column sum shape mismatch");
  const int rows = m.rows();
  ParallelFor(m.cols(), 256, [&](int64_t j) {
    T s = 0;
    for (int i = 0; i < rows; ++i) s += m.at(i, static_cast<int>(j));
    T* dst = out->row(0) + j;
    *dst = accumulate ? *dst + s : s;
  });
}

// out.row(b) = table.row(ids[b]), written at column offset col_off.
template <typename T>
void GatherRows(const Matrix<T>& table, const int* ids, int n, Matrix<T>* out,
                int col_off = 0) {
  G2P_CHECK(out->rows() == n && col_off + table.cols() <= out->cols(),
            ErrorKind::kShape, "gather shape mismatch");
  const int width = table.cols();
  ParallelFor(n, 64, [&](int64_t b) {
    const int id = ids[b];
    G2P_CHECK(id >= 0 && id < table.rows(), ErrorKind::kIndex,
              "row id " << id << " out of range " << table.rows());
    const T* src = table.row(id);
    T* dst = out->row(static_cast<int>(b)) + col_off;
    for (int j = 0; j < width; ++j) dst[j] = src[j];
  });
}

// table_grad.row(ids[b]) += grad.row(b)[col_off, col_off+width). Rows of
// table_grad are independent, so the loop parallelizes over table rows while
// each row accumulates its contributions in batch order.
template <typename T>
void ScatterAddRows(const Matrix<T>& grad, const int* ids, int n, int col_off,
                    Matrix<T>* table_grad) {
  const int width = table_grad->cols();
  const int vocab = table_grad->rows();
  ParallelFor(vocab, 8, [&](int64_t v) {
    T* dst = table_grad->row(static_cast<int>(v));
    for (int b = 0; b < n; ++b) {
      if (ids[b] != static_cast<int>(v)) continue;
      const T* src = grad.row(b) + col_off;
      for (int j = 0; j < width; ++j) dst[j] += src[j];
    }
  });
}

template <typename T>
void AddTo(const Matrix<T>& src, Matrix<T>* dst) {
  G2P_CHECK(src.rows() == dst->rows() && src.cols() == dst->cols(),
            ErrorKind::kShape, "add shape mismatch");
  const T* s = src.data();
  T* d = dst->data();
  ParallelFor(src.size(), 1 << 14, [&](int64_t i) { d[i] += s[i]; });
}

}  // namespace kernels
}  // namespace g2p

#endif  // G2P_KERNELS_H_
