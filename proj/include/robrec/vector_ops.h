// Copyright 2026 The robust-recourse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ROBREC_VECTOR_OPS_H_
#define ROBREC_VECTOR_OPS_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace robrec {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;

inline double Dot(ConstSpan a, ConstSpan b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double Norm2(ConstSpan a) { return std::sqrt(Dot(a, a)); }

inline double Norm1(ConstSpan a) {
  double sum = 0.0;
  for (double v : a) sum += std::abs(v);
  return sum;
}

// Number of entries with magnitude strictly above `threshold`.
inline size_t Norm0(ConstSpan a, double threshold) {
  size_t count = 0;
  for (double v : a) count += std::abs(v) > threshold ? 1 : 0;
  return count;
}

inline Vector Subtract(ConstSpan a, ConstSpan b) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// a + t * (b - a)
inline Vector Lerp(ConstSpan a, ConstSpan b, double t) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

}  // namespace robrec

#endif  // ROBREC_VECTOR_OPS_H_
