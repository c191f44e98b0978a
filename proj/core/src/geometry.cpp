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

#include "carpetlab/geometry.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "carpetlab/errors.hpp"

namespace carpetlab {

Scalar Interval::overlap(const Interval& o) const {
  const Scalar& l = lo > o.lo ? lo : o.lo;
  const Scalar& h = hi < o.hi ? hi : o.hi;
  if (h <= l) return Scalar(0);
  return h - l;
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxDim) {
    throw DimensionMismatch("boxes must have dimension 1, 2 or 3");
  }
  for (const auto& iv : axes_) {
    if (iv.hi < iv.lo) throw InvalidParameter("box with lo > hi");
  }
}

Box Box::unit(int dim) {
  return Box(std::vector<Interval>(static_cast<std::size_t>(dim),
                                   Interval{Scalar(0), Scalar(1)}));
}

Scalar Box::max_side() const {
  Scalar m = side(0);
  for (int k = 1; k < dim(); ++k) m = std::max(m, side(k));
  return m;
}

Scalar Box::volume() const {
  Scalar v(1);
  for (const auto& iv : axes_) v *= iv.length();
  return v;
}

bool Box::is_cube() const {
  for (int k = 1; k < dim(); ++k) {
    if (side(k) != side(0)) return false;
  }
  return true;
}

static void require_same_dim(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("boxes of dimension " + std::to_string(a.dim()) +
                            " and " + std::to_string(b.dim()));
  }
}

bool Box::contains(const Box& o) const {
  require_same_dim(*this, o);
  for (int k = 0; k < dim(); ++k) {
    if (!axes_[k].contains(o.axes_[k])) return false;
  }
  return true;
}

bool Box::meets(const Box& o) const {
  require_same_dim(*this, o);
  for (int k = 0; k < dim(); ++k) {
    if (!axes_[k].meets(o.axes_[k])) return false;
  }
  return true;
}

bool Box::interiors_overlap(const Box& o) const {
  require_same_dim(*this, o);
  for (int k = 0; k < dim(); ++k) {
    if (!axes_[k].overlaps(o.axes_[k])) return false;
  }
  return true;
}

std::optional<Box> Box::intersection(const Box& o) const {
  if (!meets(o)) return std::nullopt;
  std::vector<Interval> out;
  for (int k = 0; k < dim(); ++k) {
    out.push_back({std::max(axes_[k].lo, o.axes_[k].lo),
                   std::min(axes_[k].hi, o.axes_[k].hi)});
  }
  return Box(std::move(out));
}

Box Box::translated(const std::vector<Scalar>& offset) const {
  if (static_cast<int>(offset.size()) != dim()) {
    throw DimensionMismatch("offset dimension differs from box dimension");
  }
  std::vector<Interval> out = axes_;
  for (int k = 0; k < dim(); ++k) {
    out[k].lo += offset[k];
    out[k].hi += offset[k];
  }
  return Box(std::move(out));
}

bool Box::same_shape(const Box& o) const {
  if (dim() != o.dim()) return false;
  for (int k = 0; k < dim(); ++k) {
    if (side(k) != o.side(k)) return false;
  }
  return true;
}

bool Box::congruent_to(const Box& o) const {
  if (dim() != o.dim()) return false;
  std::vector<Scalar> s1, s2;
  for (int k = 0; k < dim(); ++k) {
    s1.push_back(side(k));
    s2.push_back(o.side(k));
  }
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  return s1 == s2;
}

std::string Box::to_string() const {
  std::ostringstream os;
  for (int k = 0; k < dim(); ++k) {
    if (k) os << "x";
    os << "[" << to_fraction_string(axes_[k].lo) << ","
       << to_fraction_string(axes_[k].hi) << "]";
  }
  return os.str();
}

ProductPartition::ProductPartition(std::vector<std::vector<Scalar>> breakpoints)
    : bp_(std::move(breakpoints)) {
  if (bp_.empty() || bp_.size() > kMaxDim) {
    throw DimensionMismatch("partitions must have dimension 1, 2 or 3");
  }
  for (const auto& axis : bp_) {
    if (axis.size() < 2 || axis.front() != 0 || axis.back() != 1) {
      throw InvalidParameter("breakpoints must run from 0 to 1");
    }
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i - 1] < axis[i])) {
        throw InvalidParameter("breakpoints must be strictly increasing");
      }
    }
  }
}

ProductPartition ProductPartition::uniform(int dim, std::size_t cells_per_axis) {
  if (cells_per_axis == 0) throw InvalidParameter("need at least one cell");
  std::vector<Scalar> axis;
  for (std::size_t i = 0; i <= cells_per_axis; ++i) {
    axis.push_back(make_scalar(static_cast<long>(i),
                               static_cast<long>(cells_per_axis)));
  }
  return ProductPartition(
      std::vector<std::vector<Scalar>>(static_cast<std::size_t>(dim), axis));
}

std::size_t ProductPartition::cell_count() const {
  std::size_t n = 1;
  for (int k = 0; k < dim(); ++k) n *= cells(k);
  return n;
}

Box ProductPartition::cell(const std::vector<std::size_t>& index) const {
  if (static_cast<int>(index.size()) != dim()) {
    throw DimensionMismatch("cell index has the wrong dimension");
  }
  std::vector<Interval> axes;
  for (int k = 0; k < dim(); ++k) axes.push_back(cell_interval(k, index[k]));
  return Box(std::move(axes));
}

std::size_t ProductPartition::locate(int axis, const Scalar& x) const {
  const auto& b = bp_[axis];
  auto it = std::upper_bound(b.begin(), b.end(), x);
  if (it == b.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - b.begin()) - 1;
  return std::min(i, cells(axis) - 1);
}

std::size_t ProductPartition::flat_index(
    const std::vector<std::size_t>& index) const {
  std::size_t flat = 0;
  for (int k = dim() - 1; k >= 0; --k) flat = flat * cells(k) + index[k];
  return flat;
}

std::vector<std::size_t> ProductPartition::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim()));
  for (int k = 0; k < dim(); ++k) {
    idx[k] = flat % cells(k);
    flat /= cells(k);
  }
  return idx;
}

Scalar overlap_fraction(const Box& box, const Box& cell) {
  require_same_dim(box, cell);
  Scalar vol = cell.volume();
  if (sgn(vol) == 0) return box.contains(cell) ? Scalar(1) : Scalar(0);
  Scalar inter(1);
  for (int k = 0; k < box.dim(); ++k) {
    inter *= box[k].overlap(cell[k]);
    if (sgn(inter) == 0) return inter;
  }
  return inter / vol;
}

Box dilate(const Box& box, const Scalar& factor) {
  if (sgn(factor) <= 0) {
    throw InvalidFactor("dilation factor must be positive, got " +
                        to_fraction_string(factor));
  }
  std::vector<Interval> out;
  for (const auto& iv : box.axes()) {
    Scalar c = (iv.lo + iv.hi) / 2;
    Scalar h = factor * iv.length() / 2;
    out.push_back({c - h, c + h});
  }
  return Box(std::move(out));
}

BoxChain connect_congruent_boxes(const Box& region, const Box& a, const Box& b) {
  require_same_dim(region, a);
  require_same_dim(a, b);
  if (!a.congruent_to(b)) {
    throw NotCongruent("boxes " + a.to_string() + " and " + b.to_string() +
                       " are not congruent");
  }
  if (!region.contains(a) || !region.contains(b)) {
    throw InvalidParameter("chain endpoints must lie inside the region");
  }
  if (a == b) return {a};
  for (int k = 0; k < a.dim(); ++k) {
    if (sgn(a.side(k)) == 0) {
      throw InvalidParameter("chains need boxes of positive size");
    }
  }

  const int d = a.dim();
  const Box big = dilate(region, Scalar(4));
  // Admissible lattice offsets per axis: a + m*side stays inside `big`.
  std::vector<long> lo(d), span(d);
  for (int k = 0; k < d; ++k) {
    const Scalar s = a.side(k);
    long mlo = ceil((big[k].lo - a[k].lo) / s).get_si();
    long mhi = floor((big[k].hi - a[k].hi) / s).get_si();
    lo[k] = mlo;
    span[k] = mhi - mlo + 1;
  }
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(span[k]);

  auto box_at = [&](const std::vector<long>& m) {
    std::vector<Scalar> off(d);
    for (int k = 0; k < d; ++k) off[k] = a.side(k) * (lo[k] + m[k]);
    return a.translated(off);
  };
  auto encode = [&](const std::vector<long>& m) {
    std::size_t f = 0;
    for (int k = d - 1; k >= 0; --k) f = f * span[k] + m[k];
    return f;
  };
  auto decode = [&](std::size_t f) {
    std::vector<long> m(d);
    for (int k = 0; k < d; ++k) {
      m[k] = static_cast<long>(f % span[k]);
      f /= span[k];
    }
    return m;
  };

  std::vector<long> start(d);
  for (int k = 0; k < d; ++k) start[k] = -lo[k];
  std::vector<std::size_t> parent(total, total);
  std::deque<std::size_t> queue;
  const std::size_t s0 = encode(start);
  parent[s0] = s0;
  queue.push_back(s0);

  std::size_t hit = total;
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    if (box_at(decode(cur)).meets(b)) {
      hit = cur;
      break;
    }
    const std::vector<long> m = decode(cur);
    int steps = 1;
    for (int k = 0; k < d; ++k) steps *= 3;
    for (int t = 0; t < steps; ++t) {
      std::vector<long> nm = m;
      int r = t;
      bool moved = false;
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        int delta = r % 3 - 1;
        r /= 3;
        nm[k] += delta;
        moved = moved || delta != 0;
        ok = ok && nm[k] >= 0 && nm[k] < span[k];
      }
      if (!moved || !ok) continue;
      std::size_t f = encode(nm);
      if (parent[f] != total) continue;
      parent[f] = cur;
      queue.push_back(f);
    }
  }
  if (hit == total) {
    throw InvalidParameter("no chain found inside the enlarged region");
  }

  BoxChain chain;
  for (std::size_t f = hit;; f = parent[f]) {
    chain.push_back(box_at(decode(f)));
    if (parent[f] == f) break;
  }
  std::reverse(chain.begin(), chain.end());
  if (!(chain.back() == b)) chain.push_back(b);
  return chain;
}

bool is_valid_chain(const BoxChain& chain) {
  if (chain.empty()) return false;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!chain[i].congruent_to(chain.front())) return false;
    if (i > 0 && !chain[i - 1].meets(chain[i])) return false;
  }
  return true;
}

}  // namespace carpetlab
