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

#ifndef CARPETLAB_MEASURE_HPP_
#define CARPETLAB_MEASURE_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "carpetlab/geometry.hpp"

namespace carpetlab {

// Nonnegative weights on the cells of a product partition; boxes receive
// mass by overlap weighting. Weights are flattened with axis 0 fastest.
class GridMeasure {
 public:
  GridMeasure() = default;
  GridMeasure(ProductPartition partition, std::vector<Scalar> weights);

  int dim() const { return partition_.dim(); }
  const ProductPartition& partition() const { return partition_; }
  const std::vector<Scalar>& weights() const { return weights_; }
  const Scalar& weight(std::size_t flat) const { return weights_[flat]; }
  const Scalar& weight(const std::vector<std::size_t>& idx) const {
    return weights_[partition_.flat_index(idx)];
  }
  const Scalar& total() const { return total_; }

  // Cells per axis when the partition is uniform on every axis, else 0.
  std::size_t uniform_cells() const { return uniform_; }

  // Per-axis overlap lengths of `iv` with each cell it meets, divided by
  // the cell length; returns the first index touched.
  std::size_t axis_fractions(int axis, const Interval& iv,
                             std::vector<Scalar>& out) const;

  friend bool operator==(const GridMeasure& a, const GridMeasure& b) {
    return a.partition_ == b.partition_ && a.weights_ == b.weights_;
  }

 private:
  ProductPartition partition_;
  std::vector<Scalar> weights_;
  Scalar total_;
  std::size_t uniform_ = 0;
};

// Exact mass of B ∩ [0,1]^d.
Scalar mass(const GridMeasure& mu, const Box& b);

// Mass of a box that may leave the unit cube, with the measure extended to
// [-2,3]^d by even reflection across the faces of [0,1]^d.
Scalar mass_reflected(const GridMeasure& mu, const Box& b);

GridMeasure lebesgue(int dim, int depth = 0);

enum class SplitPolicy { kRandom, kMaxLeft, kAlternating };

std::string to_string(SplitPolicy p);
SplitPolicy parse_split_policy(const std::string& name);

struct SplitParams {
  Scalar tau{1};
  int depth = 0;
  std::uint64_t seed = 0;
  SplitPolicy policy = SplitPolicy::kRandom;
  int grid_steps = 8;  // split fractions are drawn from this many steps
};

GridMeasure gen_split_measure_1d(const SplitParams& params);

GridMeasure product_measure(const std::vector<GridMeasure>& factors);

// Largest adjacent-cell weight ratio along any axis (infinite ratios are
// reported via `zero_neighbor`).
Scalar max_adjacent_ratio(const GridMeasure& mu, bool* zero_neighbor = nullptr);

// Structured text (JSON) with exact fraction strings.
std::string measure_to_json(const GridMeasure& mu);
GridMeasure measure_from_json(const std::string& text);

}  // namespace carpetlab

#endif  // CARPETLAB_MEASURE_HPP_
