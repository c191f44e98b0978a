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

#ifndef CARPETLAB_SYSTEMS_HPP_
#define CARPETLAB_SYSTEMS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carpetlab/geometry.hpp"
#include "carpetlab/scalar.hpp"

namespace carpetlab {

inline constexpr std::uint64_t kDefaultBudget = 5'000'000;

enum class SystemKind { kInterval, kCarpet, kSponge };

std::string to_string(SystemKind kind);

// Zero-based column/row/layer of a grid cell. Unused axes stay 0.
using Digit = std::array<int, kMaxDim>;
using Word = std::vector<Digit>;

// Diagonal self-affine system on [0,1]^d: per-axis subdivision ratios and
// the retained cells. The constructor checks structure only; `validate`
// additionally requires that at least one cell is excluded.
class SystemSpec {
 public:
  SystemSpec() = default;
  SystemSpec(SystemKind kind, std::vector<std::vector<Scalar>> ratios,
             std::vector<Digit> digits);

  SystemKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(ratios_.size()); }
  std::size_t count(int axis) const { return ratios_[axis].size(); }
  std::size_t grid_size() const;

  const std::vector<Scalar>& ratios(int axis) const { return ratios_[axis]; }
  const Scalar& ratio(int axis, int i) const { return ratios_[axis][i]; }
  // Left end of subdivision interval i along `axis`.
  const Scalar& offset(int axis, int i) const { return offsets_[axis][i]; }
  const Scalar& min_ratio(int axis) const { return min_ratio_[axis]; }
  bool equal_ratios(int axis) const { return equal_[axis]; }

  const std::vector<Digit>& digits() const { return digits_; }
  std::size_t digit_count() const { return digits_.size(); }
  bool contains(const Digit& d) const { return index_of(d) >= 0; }
  // Position of d in the digit list, or -1.
  int index_of(const Digit& d) const;

  // Lebesgue volume retained by one subdivision step.
  Scalar volume_ratio() const;

  // Level-1 box of a digit.
  Box cell_box(const Digit& d) const;

  std::string describe() const;

  friend bool operator==(const SystemSpec& a, const SystemSpec& b) {
    return a.kind_ == b.kind_ && a.ratios_ == b.ratios_ &&
           a.digits_ == b.digits_;
  }

 private:
  SystemKind kind_ = SystemKind::kCarpet;
  std::vector<std::vector<Scalar>> ratios_;
  std::vector<std::vector<Scalar>> offsets_;
  std::vector<Scalar> min_ratio_;
  std::vector<bool> equal_;
  std::vector<Digit> digits_;
  std::vector<int> lookup_;  // flattened grid -> digit position
};

void validate(const SystemSpec& spec);

SystemSpec make_carpet(std::vector<Scalar> widths, std::vector<Scalar> heights,
                       std::vector<Digit> digits);
SystemSpec make_bm_carpet(int p, int q, std::vector<Digit> digits);
SystemSpec make_sponge(int p, int q, int u, std::vector<Digit> digits);
SystemSpec make_interval_system(std::vector<Scalar> lengths,
                                std::vector<int> digits);
// Equal-length subdivision into p pieces.
SystemSpec make_interval_system(int p, std::vector<int> digits);

struct AffineMap {
  std::vector<Scalar> scale;
  std::vector<Scalar> shift;

  Box image(const Box& b) const;
  Box image_of_unit() const;
};

AffineMap apply_word(const SystemSpec& spec, const Word& word);

// Interval of the level-n grid cell `index` (base count(axis), most
// significant digit first).
Interval axis_interval(const SystemSpec& spec, int axis, std::uint64_t index,
                       int n);

struct LevelCell {
  std::array<std::uint64_t, kMaxDim> index{};
  std::uint64_t code = 0;  // word in base |D|, first digit most significant
};

class LevelSet {
 public:
  LevelSet(SystemSpec spec, int level, std::vector<LevelCell> cells);

  const SystemSpec& spec() const { return spec_; }
  int level() const { return level_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<LevelCell>& cells() const { return cells_; }
  // count(axis)^level.
  std::uint64_t grid_cells(int axis) const { return grid_[axis]; }

  Box box(std::size_t i) const;
  Word word(std::size_t i) const;
  std::vector<Box> boxes() const;
  ProductPartition partition() const;

 private:
  SystemSpec spec_;
  int level_;
  std::vector<LevelCell> cells_;
  std::array<std::uint64_t, kMaxDim> grid_{};
};

LevelSet level_set(const SystemSpec& spec, int n,
                   std::uint64_t budget = kDefaultBudget);

// |D|^n, saturating at UINT64_MAX.
std::uint64_t level_count(const SystemSpec& spec, int n);

struct HoleTemplate {
  Box cube;
  Box strip;  // V_Q: vertical strip (carpets), prism (sponges)

  // Q's interval on `axis`, [0,1] elsewhere.
  Box strip_along(int axis) const;
};

HoleTemplate find_hole(const SystemSpec& spec);

struct OschResult {
  bool holds = false;
  std::optional<Box> witness;
};

OschResult osch_check(const SystemSpec& spec);

int sponge_depth(const SystemSpec& spec, int n);

}  // namespace carpetlab

#endif  // CARPETLAB_SYSTEMS_HPP_
