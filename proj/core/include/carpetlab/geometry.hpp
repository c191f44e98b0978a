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

#ifndef CARPETLAB_GEOMETRY_HPP_
#define CARPETLAB_GEOMETRY_HPP_

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "carpetlab/scalar.hpp"

namespace carpetlab {

inline constexpr int kMaxDim = 3;

struct Interval {
  Scalar lo;
  Scalar hi;

  Scalar length() const { return hi - lo; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  // Closed intersection is nonempty.
  bool meets(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  // Open intersection is nonempty.
  bool overlaps(const Interval& o) const { return lo < o.hi && o.lo < hi; }
  // Length of the intersection, zero when disjoint.
  Scalar overlap(const Interval& o) const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Closed axis-aligned box in dimension 1..3.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> axes);
  Box(std::initializer_list<Interval> axes)
      : Box(std::vector<Interval>(axes)) {}

  static Box unit(int dim);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Interval& operator[](int k) const { return axes_[k]; }
  const std::vector<Interval>& axes() const { return axes_; }

  Scalar side(int k) const { return axes_[k].length(); }
  Scalar max_side() const;
  Scalar volume() const;
  bool is_cube() const;

  bool contains(const Box& o) const;
  bool meets(const Box& o) const;
  bool interiors_overlap(const Box& o) const;
  std::optional<Box> intersection(const Box& o) const;
  Box translated(const std::vector<Scalar>& offset) const;

  // True when the side vectors agree up to a permutation of axes.
  bool congruent_to(const Box& o) const;
  bool same_shape(const Box& o) const;

  std::string to_string() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<Interval> axes_;
};

// Per-axis breakpoints 0 = t_0 < ... < t_m = 1.
class ProductPartition {
 public:
  ProductPartition() = default;
  explicit ProductPartition(std::vector<std::vector<Scalar>> breakpoints);

  static ProductPartition uniform(int dim, std::size_t cells_per_axis);

  int dim() const { return static_cast<int>(bp_.size()); }
  std::size_t cells(int axis) const { return bp_[axis].size() - 1; }
  std::size_t cell_count() const;
  const std::vector<Scalar>& breakpoints(int axis) const { return bp_[axis]; }

  Interval cell_interval(int axis, std::size_t i) const {
    return {bp_[axis][i], bp_[axis][i + 1]};
  }
  Box cell(const std::vector<std::size_t>& index) const;

  // Index of the cell containing x along `axis` (half-open, last closed).
  std::size_t locate(int axis, const Scalar& x) const;

  // Flattened index with axis 0 varying fastest.
  std::size_t flat_index(const std::vector<std::size_t>& index) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  friend bool operator==(const ProductPartition&,
                         const ProductPartition&) = default;

 private:
  std::vector<std::vector<Scalar>> bp_;
};

using BoxChain = std::vector<Box>;

// vol(box ∩ cell) / vol(cell). A zero-volume cell yields 1 when it lies in
// box and 0 otherwise.
Scalar overlap_fraction(const Box& box, const Box& cell);

// Chain of translates of `a` joining a to b; consecutive members meet and
// every member lies in dilate(region, 4).
BoxChain connect_congruent_boxes(const Box& region, const Box& a, const Box& b);

// Scales about the center, axis-wise.
Box dilate(const Box& box, const Scalar& factor);

// Checks the chain invariants; used by tests and the CLI.
bool is_valid_chain(const BoxChain& chain);

}  // namespace carpetlab

#endif  // CARPETLAB_GEOMETRY_HPP_
