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

#include "carpetlab/moran.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "carpetlab/errors.hpp"

namespace carpetlab {
namespace {

// All subintervals of [lo, lo+len] obtained by `depth` further subdivisions
// along `axis`.
void subdivide(const SystemSpec& spec, int axis, const Interval& iv, int depth,
               std::vector<Interval>& out) {
  if (depth == 0) {
    out.push_back(iv);
    return;
  }
  const Scalar len = iv.length();
  for (std::size_t j = 0; j < spec.count(axis); ++j) {
    const Scalar lo = iv.lo + len * spec.offset(axis, static_cast<int>(j));
    subdivide(spec, axis,
              {lo, lo + len * spec.ratio(axis, static_cast<int>(j))},
              depth - 1, out);
  }
}

void require_carpet(const SystemSpec& spec) {
  if (spec.kind() != SystemKind::kCarpet) {
    throw InvalidParameter("Moran covers are defined for carpets");
  }
}

}  // namespace

std::vector<RelativePiece> relative_cover(const SystemSpec& spec, int axis,
                                          const Scalar& long_len,
                                          const Scalar& short_len) {
  if (short_len > long_len || sgn(short_len) <= 0) {
    throw InvalidParameter("cover needs 0 < short side <= long side");
  }
  const Scalar& amin = spec.min_ratio(axis);
  std::vector<RelativePiece> out;
  std::vector<int> word;
  std::function<void(const Scalar&, const Scalar&)> walk =
      [&](const Scalar& lo, const Scalar& len) {
        const Scalar abs_len = len * long_len;
        if (amin * abs_len < short_len) {
          out.push_back({word, lo, len});
          return;
        }
        for (std::size_t i = 0; i < spec.count(axis); ++i) {
          const int ii = static_cast<int>(i);
          word.push_back(ii);
          walk(lo + len * spec.offset(axis, ii), len * spec.ratio(axis, ii));
          word.pop_back();
        }
      };
  walk(Scalar(0), Scalar(1));
  return out;
}

int MoranCover::max_depth() const {
  int m = 0;
  for (const auto& p : pieces) m = std::max(m, p.depth);
  return m;
}

MoranCover moran_cover(const SystemSpec& spec, const Word& r_word) {
  require_carpet(spec);
  const AffineMap f = apply_word(spec, r_word);
  MoranCover mc;
  mc.rect = f.image_of_unit();
  mc.cover_axis = mc.rect.side(0) >= mc.rect.side(1) ? 0 : 1;
  const int ax = mc.cover_axis;
  const Scalar long_len = mc.rect.side(ax);
  mc.short_side = mc.rect.side(1 - ax);
  mc.min_ratio = spec.min_ratio(ax);

  std::vector<int> base;
  for (const auto& d : r_word) base.push_back(d[ax]);
  for (auto& rp : relative_cover(spec, ax, long_len, mc.short_side)) {
    MoranPiece p;
    p.axis_word = base;
    p.axis_word.insert(p.axis_word.end(), rp.word.begin(), rp.word.end());
    p.depth = static_cast<int>(rp.word.size());
    p.interval = {mc.rect[ax].lo + rp.lo * long_len,
                  mc.rect[ax].lo + (rp.lo + rp.len) * long_len};
    mc.pieces.push_back(std::move(p));
  }
  return mc;
}

bool moran_bullets_hold(const MoranCover& cover) {
  const Interval& side = cover.rect[cover.cover_axis];
  std::vector<Interval> ivs;
  for (const auto& p : cover.pieces) {
    const Scalar len = p.interval.length();
    if (!(cover.min_ratio * len < cover.short_side)) return false;
    if (!(cover.short_side <= len)) return false;
    ivs.push_back(p.interval);
  }
  if (ivs.empty()) return false;
  std::sort(ivs.begin(), ivs.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  // Coverage of the side and pairwise disjoint interiors.
  if (ivs.front().lo > side.lo) return false;
  Scalar reach = ivs.front().hi;
  for (std::size_t i = 1; i < ivs.size(); ++i) {
    if (ivs[i].lo < ivs[i - 1].hi) return false;
    if (ivs[i].lo > reach) return false;
    reach = std::max(reach, ivs[i].hi);
  }
  return reach >= side.hi;
}

std::vector<Box> hole_harvest(const SystemSpec& spec, const Word& r_word,
                              const HoleTemplate& hole) {
  std::vector<Box> out;
  auto place = [&](const std::vector<Interval>& rect) {
    std::vector<Interval> axes;
    for (std::size_t k = 0; k < rect.size(); ++k) {
      const Scalar len = rect[k].length();
      const int a = static_cast<int>(k);
      axes.push_back({rect[k].lo + len * hole.cube[a].lo,
                      rect[k].lo + len * hole.cube[a].hi});
    }
    out.emplace_back(std::move(axes));
  };

  if (spec.kind() == SystemKind::kCarpet) {
    const MoranCover mc = moran_cover(spec, r_word);
    const int ax = mc.cover_axis;
    for (const auto& p : mc.pieces) {
      std::vector<Interval> rows;
      subdivide(spec, 1 - ax, mc.rect[1 - ax], p.depth, rows);
      for (const auto& r : rows) {
        std::vector<Interval> rect(2);
        rect[ax] = p.interval;
        rect[1 - ax] = r;
        place(rect);
      }
    }
    return out;
  }
  if (spec.kind() == SystemKind::kSponge) {
    const Box rect = apply_word(spec, r_word).image_of_unit();
    const int m = sponge_depth(spec, static_cast<int>(r_word.size()));
    std::vector<Interval> xs, ys, zs;
    subdivide(spec, 0, rect[0], m, xs);
    subdivide(spec, 1, rect[1], m, ys);
    subdivide(spec, 2, rect[2], m, zs);
    for (const auto& z : zs) {
      for (const auto& y : ys) {
        for (const auto& x : xs) place({x, y, z});
      }
    }
    return out;
  }
  throw InvalidParameter("hole harvests are defined for carpets and sponges");
}

std::uint64_t harvest_size(const SystemSpec& spec, const Word& r_word) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto sat_pow = [](std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
      if (r > kMax / b) return kMax;
      r *= b;
    }
    return r;
  };
  if (spec.kind() == SystemKind::kCarpet) {
    const MoranCover mc = moran_cover(spec, r_word);
    std::uint64_t n = 0;
    for (const auto& p : mc.pieces) {
      std::uint64_t add = sat_pow(spec.count(1 - mc.cover_axis), p.depth);
      n = add > kMax - n ? kMax : n + add;
    }
    return n;
  }
  if (spec.kind() == SystemKind::kSponge) {
    const int m = sponge_depth(spec, static_cast<int>(r_word.size()));
    return sat_pow(spec.grid_size(), m);
  }
  throw InvalidParameter("hole harvests are defined for carpets and sponges");
}

}  // namespace carpetlab
