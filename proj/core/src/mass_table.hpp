// Copyright 2026 The carpetlab Authors.
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

#ifndef CARPETLAB_SRC_MASS_TABLE_HPP_
#define CARPETLAB_SRC_MASS_TABLE_HPP_

#include <algorithm>
#include <array>
#include <vector>

#include "carpetlab/measure.hpp"

namespace carpetlab {

// Exact prefix sums over the cells of a grid measure. Boxes whose faces
// sit on breakpoints are answered in O(2^d); anything else falls back to
// the overlap formula.
class MassTable {
 public:
  explicit MassTable(const GridMeasure& mu) : mu_(&mu) {
    const int d = mu.dim();
    for (int k = 0; k < d; ++k) n_[k] = mu.partition().cells(k);
    const std::size_t s0 = n_[0] + 1, s1 = n_[1] + 1, s2 = n_[2] + 1;
    prefix_.assign(s0 * s1 * s2, Scalar(0));
    for (std::size_t k = 1; k < s2; ++k) {
      for (std::size_t j = 1; j < s1; ++j) {
        for (std::size_t i = 1; i < s0; ++i) {
          const std::size_t cell =
              (i - 1) + n_[0] * ((j - 1) + n_[1] * (k - 1));
          Scalar v = mu.weight(cell);
          v += at(i - 1, j, k);
          v += at(i, j - 1, k);
          v += at(i, j, k - 1);
          v -= at(i - 1, j - 1, k);
          v -= at(i - 1, j, k - 1);
          v -= at(i, j - 1, k - 1);
          v += at(i - 1, j - 1, k - 1);
          prefix_[i + s0 * (j + s1 * k)] = std::move(v);
        }
      }
    }
  }

  // Total weight of the cells [lo, hi) per axis.
  Scalar cell_sum(const std::array<std::size_t, kMaxDim>& lo,
                  const std::array<std::size_t, kMaxDim>& hi) const {
    const int d = mu_->dim();
    std::array<std::size_t, kMaxDim> a{0, 0, 0}, b{1, 1, 1};
    for (int k = 0; k < d; ++k) {
      a[k] = lo[k];
      b[k] = hi[k];
    }
    Scalar s = at(b[0], b[1], b[2]);
    s -= at(a[0], b[1], b[2]);
    s -= at(b[0], a[1], b[2]);
    s -= at(b[0], b[1], a[2]);
    s += at(a[0], a[1], b[2]);
    s += at(a[0], b[1], a[2]);
    s += at(b[0], a[1], a[2]);
    s -= at(a[0], a[1], a[2]);
    return s;
  }

  Scalar box_mass(const Box& b) const {
    const int d = mu_->dim();
    std::array<std::size_t, kMaxDim> lo{}, hi{};
    for (int k = 0; k < d; ++k) {
      const auto& bp = mu_->partition().breakpoints(k);
      auto l = std::lower_bound(bp.begin(), bp.end(), b[k].lo);
      auto h = std::lower_bound(bp.begin(), bp.end(), b[k].hi);
      if (l == bp.end() || *l != b[k].lo || h == bp.end() || *h != b[k].hi) {
        return mass(*mu_, b);
      }
      lo[k] = static_cast<std::size_t>(l - bp.begin());
      hi[k] = static_cast<std::size_t>(h - bp.begin());
    }
    return cell_sum(lo, hi);
  }

 private:
  const Scalar& at(std::size_t i, std::size_t j, std::size_t k) const {
    return prefix_[i + (n_[0] + 1) * (j + (n_[1] + 1) * k)];
  }

  const GridMeasure* mu_;
  std::array<std::size_t, kMaxDim> n_{1, 1, 1};
  std::vector<Scalar> prefix_;
};

}  // namespace carpetlab

#endif  // CARPETLAB_SRC_MASS_TABLE_HPP_
