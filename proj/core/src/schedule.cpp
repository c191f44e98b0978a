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

#include "carpetlab/schedule.hpp"

#include <algorithm>
#include <limits>

#include "carpetlab/moran.hpp"

namespace carpetlab {
namespace {

constexpr std::uint64_t kMax64 = std::numeric_limits<std::uint64_t>::max();

std::uint64_t to_u64(const BigInt& v) {
  if (v > BigInt(std::to_string(kMax64), 10)) return kMax64;
  return std::stoull(v.get_str());
}

bool meets_rec(const SystemSpec& spec, const std::vector<Interval>& cur,
               const Box& target, int left) {
  if (left == 0) return true;
  for (const auto& d : spec.digits()) {
    std::vector<Interval> child(cur.size());
    bool hit = true;
    for (int k = 0; k < spec.dim() && hit; ++k) {
      const Scalar len = cur[k].length();
      child[k].lo = cur[k].lo + len * spec.offset(k, d[k]);
      child[k].hi = child[k].lo + len * spec.ratio(k, d[k]);
      hit = child[k].overlaps(target[k]);
    }
    if (hit && meets_rec(spec, child, target, left - 1)) return true;
  }
  return false;
}

struct EpochShape {
  int ntilde = 0;
  int max_depth = 0;
  BigInt holes_per_box;
};

EpochShape analyse_shape(const SystemSpec& spec, const std::vector<Scalar>& s,
                         int level) {
  EpochShape out;
  if (spec.kind() == SystemKind::kSponge) {
    const int m = sponge_depth(spec, level);
    out.ntilde = m;
    out.max_depth = m;
    out.holes_per_box = pow(BigInt(static_cast<unsigned long>(spec.grid_size())),
                            static_cast<unsigned long>(m));
    return out;
  }
  const int ax = s[0] >= s[1] ? 0 : 1;
  const auto cover = relative_cover(spec, ax, s[ax], s[1 - ax]);
  out.ntilde = static_cast<int>(cover.size());
  for (const auto& p : cover) {
    const int depth = static_cast<int>(p.word.size());
    out.max_depth = std::max(out.max_depth, depth);
    out.holes_per_box += pow(BigInt(static_cast<unsigned long>(spec.count(1 - ax))),
                             static_cast<unsigned long>(depth));
  }
  return out;
}

}  // namespace

ShapeCensus shape_census(const SystemSpec& spec, int n) {
  ShapeCensus cur;
  cur[std::vector<Scalar>(static_cast<std::size_t>(spec.dim()), Scalar(1))] = 1;
  for (int t = 0; t < n; ++t) {
    ShapeCensus next;
    for (const auto& [shape, count] : cur) {
      for (const auto& d : spec.digits()) {
        std::vector<Scalar> s = shape;
        for (int k = 0; k < spec.dim(); ++k) s[k] *= spec.ratio(k, d[k]);
        next[s] += count;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<int> HarvestSchedule::levels() const {
  std::vector<int> out;
  for (const auto& e : epochs) out.push_back(e.level);
  return out;
}

bool box_meets_level(const SystemSpec& spec, const Box& box, int m) {
  if (box.dim() != spec.dim()) {
    throw DimensionMismatch("box and system dimensions differ");
  }
  const Box unit = Box::unit(spec.dim());
  if (!unit.interiors_overlap(box)) return false;
  return meets_rec(spec, unit.axes(), box, m);
}

bool interiors_disjoint(const std::vector<Box>& a, const std::vector<Box>& b,
                        std::size_t* comparisons) {
  if (a.empty() || b.empty()) return true;
  std::vector<const Box*> sorted;
  for (const auto& x : b) sorted.push_back(&x);
  std::sort(sorted.begin(), sorted.end(),
            [](const Box* p, const Box* q) { return (*p)[0].lo < (*q)[0].lo; });
  Scalar widest(0);
  for (const auto* p : sorted) widest = std::max(widest, p->side(0));
  std::size_t cmp = 0;
  for (const auto& h : a) {
    const Scalar from = h[0].lo - widest;
    auto it = std::lower_bound(
        sorted.begin(), sorted.end(), from,
        [](const Box* p, const Scalar& v) { return (*p)[0].lo < v; });
    for (; it != sorted.end() && (**it)[0].lo < h[0].hi; ++it) {
      ++cmp;
      if (h.interiors_overlap(**it)) {
        if (comparisons) *comparisons += cmp;
        return false;
      }
    }
  }
  if (comparisons) *comparisons += cmp;
  return true;
}

HarvestSchedule harvest_schedule(const SystemSpec& spec, int K, int n1,
                                 const ScheduleOptions& options) {
  if (K < 1) throw InvalidParameter("need at least one epoch");
  if (n1 < 1) throw InvalidParameter("first epoch level must be >= 1");
  if (spec.kind() == SystemKind::kInterval) {
    throw InvalidParameter("harvest schedules need a carpet or sponge");
  }
  validate(spec);

  HarvestSchedule sched{spec, find_hole(spec), {}, {}};
  int level = n1;
  for (int k = 0; k < K; ++k) {
    EpochHarvest ep;
    ep.level = level;
    for (const auto& [shape, count] : shape_census(spec, level)) {
      EpochShape es = analyse_shape(spec, shape, level);
      ep.ntilde = std::max(ep.ntilde, es.ntilde);
      ep.max_depth = std::max(ep.max_depth, es.max_depth);
      ep.boxes += count;
      ep.holes += count * es.holes_per_box;
    }
    const std::uint64_t boxes = to_u64(ep.boxes);
    const std::uint64_t holes = to_u64(ep.holes);
    if (boxes <= options.budget && holes <= options.budget) {
      const LevelSet ls = level_set(spec, level, options.budget);
      std::vector<Box> g;
      g.reserve(holes);
      for (std::size_t i = 0; i < ls.size(); ++i) {
        auto part = hole_harvest(spec, ls.word(i), sched.hole);
        g.insert(g.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
      }
      ep.harvest = std::move(g);
    } else if (options.require_explicit) {
      throw ScheduleBudgetExceeded(
          "harvest at level " + std::to_string(level) + " too large",
          std::max(boxes, holes), options.budget, sched);
    }
    sched.epochs.push_back(std::move(ep));
    level = level + sched.epochs.back().ntilde + 10;
  }

  DisjointnessReport& rep = sched.disjointness;
  // Q misses every level-1 box, so each hole misses every later level.
  bool hole_clear = true;
  for (const auto& d : spec.digits()) {
    hole_clear = hole_clear && !spec.cell_box(d).interiors_overlap(sched.hole.cube);
  }
  rep.structural = hole_clear;
  for (std::size_t k = 0; k + 1 < sched.epochs.size(); ++k) {
    const auto& e = sched.epochs[k];
    const int slack = sched.epochs[k + 1].level - (e.level + e.max_depth + 1);
    const int constant = e.max_depth + 1 - e.ntilde;
    rep.min_slack = rep.min_slack ? std::min(*rep.min_slack, slack) : slack;
    rep.min_constant =
        rep.min_constant ? std::max(*rep.min_constant, constant) : constant;
    rep.structural = rep.structural && slack >= 0;
  }

  bool all_explicit = true;
  for (std::size_t j = 0; j + 1 < sched.epochs.size(); ++j) {
    const auto& ej = sched.epochs[j];
    if (!ej.harvest) {
      all_explicit = false;
      continue;
    }
    for (std::size_t k = j + 1; k < sched.epochs.size(); ++k) {
      const auto& ek = sched.epochs[k];
      for (const auto& h : *ej.harvest) {
        ++rep.holes_checked;
        if (box_meets_level(spec, h, ek.level)) {
          rep.explicit_ok = false;
          throw DisjointnessViolation("hole " + h.to_string() +
                                      " meets E_" + std::to_string(ek.level));
        }
      }
      if (ek.harvest && ej.harvest->size() * ek.harvest->size() <=
                            options.pairwise_limit) {
        if (!interiors_disjoint(*ej.harvest, *ek.harvest, &rep.pairs_checked)) {
          rep.explicit_ok = false;
          throw DisjointnessViolation("harvests of epochs " +
                                      std::to_string(j + 1) + " and " +
                                      std::to_string(k + 1) + " overlap");
        }
      }
    }
  }
  if (sched.epochs.size() == 1) {
    rep.method = "single epoch";
  } else if (all_explicit) {
    rep.method = rep.structural ? "exact descent + level gap" : "exact descent";
  } else {
    rep.method = "level gap";
  }
  rep.verified = rep.structural || (all_explicit && rep.explicit_ok);
  if (!rep.verified) {
    throw DisjointnessViolation("could not establish cross-epoch disjointness");
  }
  return sched;
}

}  // namespace carpetlab
