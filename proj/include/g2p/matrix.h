// include/g2p/matrix.h
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

#ifndef G2P_MATRIX_H_
#define G2P_MATRIX_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "g2p/common.h"
#include "g2p/rng.h"

namespace g2p {

// Dense row-major matrix. Vectors are 1 x n matrices. Instantiated for float
// (training, decoding) and double (gradient checks).
template <typename T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    G2P_CHECK(rows > 0 && cols > 0, ErrorKind::kShape,
              "invalid shape " << rows << "x" << cols);
    values_.assign(static_cast<size_t>(rows) * cols, T(0));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int64_t size() const { return static_cast<int64_t>(rows_) * cols_; }
  bool empty() const { return rows_ == 0; }

  T* row(int i) { return values_.data() + static_cast<size_t>(i) * cols_; }
  const T* row(int i) const {
    return values_.data() + static_cast<size_t>(i) * cols_;
  }

  T& at(int i, int j) { return values_[static_cast<size_t>(i) * cols_ + j]; }
  T at(int i, int j) const {
    return values_[static_cast<size_t>(i) * cols_ + j];
  }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }

  void Fill(T v) { values_.assign(values_.size(), v); }

  bool AllFinite() const {
    for (T v : values_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && values_ == o.values_;
  }

 private:
  int rows_, cols_;
  std::vector<T> values_;
};

// Entries i.i.d. uniform on [-scale, +scale], drawn row-major from the seeded
// stream; scale 0 gives the zero matrix.
template <typename T>
Matrix<T> UniformMatrix(int rows, int cols, double scale, SeededRng* rng) {
  G2P_CHECK(scale >= 0, ErrorKind::kConfig,
            "negative init scale " << scale);
  Matrix<T> m(rows, cols);
  T* p = m.data();
  for (int64_t i = 0; i < m.size(); ++i)
    p[i] = static_cast<T>(rng->NextSymmetric(scale));
  return m;
}

}  // namespace g2p

#endif  // G2P_MATRIX_H_
