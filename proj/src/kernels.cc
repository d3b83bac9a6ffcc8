// src/kernels.cc
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

#include "g2p/kernels.h"

namespace g2p {
namespace kernels {

namespace {
#ifdef _OPENMP
Backend g_backend = Backend::kOpenMP;
#else
Backend g_backend = Backend::kSerial;
#endif
int g_num_threads = 0;  // 0 = OpenMP default
}  // namespace

Backend backend() { return g_backend; }

void SetBackend(Backend b) {
#ifndef _OPENMP
  b = Backend::kSerial;
#endif
  g_backend = b;
}

void SetNumThreads(int n) { g_num_threads = n > 0 ? n : 0; }

int NumThreads() { return detail::TeamSize(); }

namespace detail {
int TeamSize() {
#ifdef _OPENMP
  return g_num_threads > 0 ? g_num_threads : omp_get_max_threads();
#else
  return 1;
#endif
}
}  // namespace detail

}  // namespace kernels
}  // namespace g2p
