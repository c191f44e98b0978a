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

#ifndef CARPETLAB_MORAN_HPP_
#define CARPETLAB_MORAN_HPP_

#include <vector>

#include "carpetlab/geometry.hpp"
#include "carpetlab/systems.hpp"

namespace carpetlab {

// One interval of a cover along the long axis, expressed relative to the
// covered side: it starts at `lo` and has length `len`, both in units of
// that side.
struct RelativePiece {
  std::vector<int> word;  // subdivision indices below the covered side
  Scalar lo;
  Scalar len;
};

// Width-matched cover of a side of length `long_len` by subdivision
// intervals I with min_ratio*|I| < short_len <= |I|.
std::vector<RelativePiece> relative_cover(const SystemSpec& spec, int axis,
                                          const Scalar& long_len,
                                          const Scalar& short_len);

struct MoranPiece {
  std::vector<int> axis_word;  // full word along the cover axis
  int depth = 0;               // length of the extension below R
  Interval interval;
};

struct MoranCover {
  Box rect;
  int cover_axis = 0;  // 0 when width >= height, 1 otherwise
  Scalar short_side;
  Scalar min_ratio;  // a_min (or b_min when the axes are swapped)
  std::vector<MoranPiece> pieces;

  std::size_t count() const { return pieces.size(); }
  int max_depth() const;
};

MoranCover moran_cover(const SystemSpec& spec, const Word& r_word);

// Checks coverage, the width window and interior disjointness exactly.
bool moran_bullets_hold(const MoranCover& cover);

// G(R): the images of the hole cube in every width-matched sub-rectangle
// of R (carpets) or in every depth-n(R) sub-box of R (sponges).
std::vector<Box> hole_harvest(const SystemSpec& spec, const Word& r_word,
                              const HoleTemplate& hole);

// Number of boxes hole_harvest would return, without building them.
std::uint64_t harvest_size(const SystemSpec& spec, const Word& r_word);

}  // namespace carpetlab

#endif  // CARPETLAB_MORAN_HPP_
