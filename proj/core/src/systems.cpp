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

#include "carpetlab/systems.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "carpetlab/errors.hpp"

namespace carpetlab {
namespace {

constexpr std::uint64_t kMax64 = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_pow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && r > kMax64 / base) return kMax64;
    r *= base;
  }
  return r;
}

}  // namespace

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kInterval:
      return "interval";
    case SystemKind::kCarpet:
      return "carpet";
    case SystemKind::kSponge:
      return "sponge";
  }
  return "unknown";
}

SystemSpec::SystemSpec(SystemKind kind, std::vector<std::vector<Scalar>> ratios,
                       std::vector<Digit> digits)
    : kind_(kind), ratios_(std::move(ratios)), digits_(std::move(digits)) {
  const int want = kind == SystemKind::kInterval ? 1
                   : kind == SystemKind::kCarpet ? 2
                                                 : 3;
  if (static_cast<int>(ratios_.size()) != want) {
    throw SpecError(to_string(kind) + " systems need " + std::to_string(want) +
                    " ratio lists");
  }
  for (int k = 0; k < dim(); ++k) {
    const auto& r = ratios_[k];
    if (r.size() < 2) {
      throw SpecError("each axis needs at least two subdivisions");
    }
    Scalar sum(0), acc(0), mn = r.front();
    std::vector<Scalar> off;
    bool eq = true;
    for (const auto& x : r) {
      if (sgn(x) <= 0) throw SpecError("subdivision ratios must be positive");
      off.push_back(acc);
      acc += x;
      mn = std::min(mn, x);
      eq = eq && x == r.front();
    }
    if (acc != 1) {
      throw SpecError("ratios on axis " + std::to_string(k) + " sum to " +
                      to_fraction_string(acc) + ", not 1");
    }
    offsets_.push_back(std::move(off));
    min_ratio_.push_back(mn);
    equal_.push_back(eq);
  }
  lookup_.assign(grid_size(), -1);
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    const Digit& d = digits_[i];
    std::size_t flat = 0;
    for (int k = dim() - 1; k >= 0; --k) {
      if (d[k] < 0 || d[k] >= static_cast<int>(count(k))) {
        throw SpecError("digit outside the subdivision grid");
      }
      flat = flat * count(k) + static_cast<std::size_t>(d[k]);
    }
    for (int k = dim(); k < kMaxDim; ++k) {
      if (d[k] != 0) throw SpecError("digit has entries beyond the dimension");
    }
    if (lookup_[flat] != -1) throw SpecError("duplicate digit");
    lookup_[flat] = static_cast<int>(i);
  }
  if (digits_.empty()) throw SpecError("digit set must not be empty");
}

std::size_t SystemSpec::grid_size() const {
  std::size_t n = 1;
  for (int k = 0; k < dim(); ++k) n *= count(k);
  return n;
}

int SystemSpec::index_of(const Digit& d) const {
  std::size_t flat = 0;
  for (int k = dim() - 1; k >= 0; --k) {
    if (d[k] < 0 || d[k] >= static_cast<int>(count(k))) return -1;
    flat = flat * count(k) + static_cast<std::size_t>(d[k]);
  }
  for (int k = dim(); k < kMaxDim; ++k) {
    if (d[k] != 0) return -1;
  }
  return lookup_[flat];
}

Scalar SystemSpec::volume_ratio() const {
  Scalar rho(0);
  for (const auto& d : digits_) {
    Scalar v(1);
    for (int k = 0; k < dim(); ++k) v *= ratio(k, d[k]);
    rho += v;
  }
  return rho;
}

Box SystemSpec::cell_box(const Digit& d) const {
  std::vector<Interval> axes;
  for (int k = 0; k < dim(); ++k) {
    axes.push_back({offset(k, d[k]), offset(k, d[k]) + ratio(k, d[k])});
  }
  return Box(std::move(axes));
}

std::string SystemSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " ratios=";
  for (int k = 0; k < dim(); ++k) {
    os << (k ? "|" : "");
    for (std::size_t i = 0; i < count(k); ++i) {
      os << (i ? "," : "") << to_fraction_string(ratios_[k][i]);
    }
  }
  os << " digits=";
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    os << (i ? ";" : "");
    for (int k = 0; k < dim(); ++k) os << (k ? "," : "") << digits_[i][k] + 1;
  }
  return os.str();
}

void validate(const SystemSpec& spec) {
  if (spec.digit_count() >= spec.grid_size()) {
    throw SpecError("digit set must exclude at least one cell");
  }
  if (spec.kind() == SystemKind::kSponge) {
    for (int k = 0; k < 3; ++k) {
      if (!spec.equal_ratios(k)) {
        throw SpecError("sponges use equal subdivisions on every axis");
      }
    }
    if (!(spec.count(0) <= spec.count(1) && spec.count(1) <= spec.count(2))) {
      throw SpecError("sponges need p <= q <= u");
    }
  }
}

SystemSpec make_carpet(std::vector<Scalar> widths, std::vector<Scalar> heights,
                       std::vector<Digit> digits) {
  SystemSpec s(SystemKind::kCarpet, {std::move(widths), std::move(heights)},
               std::move(digits));
  validate(s);
  return s;
}

static std::vector<Scalar> equal_parts(int p) {
  if (p < 2) throw SpecError("need at least two subdivisions per axis");
  return std::vector<Scalar>(static_cast<std::size_t>(p), make_scalar(1, p));
}

SystemSpec make_bm_carpet(int p, int q, std::vector<Digit> digits) {
  return make_carpet(equal_parts(p), equal_parts(q), std::move(digits));
}

SystemSpec make_sponge(int p, int q, int u, std::vector<Digit> digits) {
  SystemSpec s(SystemKind::kSponge,
               {equal_parts(p), equal_parts(q), equal_parts(u)},
               std::move(digits));
  validate(s);
  return s;
}

SystemSpec make_interval_system(std::vector<Scalar> lengths,
                                std::vector<int> digits) {
  std::vector<Digit> ds;
  for (int d : digits) ds.push_back({d, 0, 0});
  SystemSpec s(SystemKind::kInterval, {std::move(lengths)}, std::move(ds));
  validate(s);
  return s;
}

SystemSpec make_interval_system(int p, std::vector<int> digits) {
  return make_interval_system(equal_parts(p), std::move(digits));
}

Box AffineMap::image(const Box& b) const {
  if (b.dim() != static_cast<int>(scale.size())) {
    throw DimensionMismatch("map and box dimensions differ");
  }
  std::vector<Interval> axes;
  for (int k = 0; k < b.dim(); ++k) {
    axes.push_back({shift[k] + scale[k] * b[k].lo,
                    shift[k] + scale[k] * b[k].hi});
  }
  return Box(std::move(axes));
}

Box AffineMap::image_of_unit() const {
  return image(Box::unit(static_cast<int>(scale.size())));
}

AffineMap apply_word(const SystemSpec& spec, const Word& word) {
  const auto d = static_cast<std::size_t>(spec.dim());
  AffineMap m{std::vector<Scalar>(d, Scalar(1)), std::vector<Scalar>(d)};
  // f_{i1} o ... o f_{ik}: fold from the innermost map outwards.
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (!spec.contains(*it)) {
      std::string s;
      for (int k = 0; k < spec.dim(); ++k) {
        s += (k ? "," : "") + std::to_string((*it)[k] + 1);
      }
      throw InvalidWord("digit (" + s + ") is not in the digit set");
    }
    for (std::size_t k = 0; k < d; ++k) {
      const int a = static_cast<int>(k);
      m.shift[k] = spec.offset(a, (*it)[k]) + spec.ratio(a, (*it)[k]) * m.shift[k];
      m.scale[k] *= spec.ratio(a, (*it)[k]);
    }
  }
  return m;
}

Interval axis_interval(const SystemSpec& spec, int axis, std::uint64_t index,
                       int n) {
  const std::uint64_t c = spec.count(axis);
  if (spec.equal_ratios(axis)) {
    BigInt den = pow(BigInt(static_cast<unsigned long>(c)),
                     static_cast<unsigned long>(n));
    BigInt lo(std::to_string(index), 10);
    Scalar l(lo, den), h(lo + 1, den);
    l.canonicalize();
    h.canonicalize();
    return {l, h};
  }
  Interval iv{Scalar(0), Scalar(1)};
  for (int t = 0; t < n; ++t) {
    const int digit = static_cast<int>(index % c);
    index /= c;
    const Scalar& r = spec.ratio(axis, digit);
    const Scalar& o = spec.offset(axis, digit);
    iv.lo = o + r * iv.lo;
    iv.hi = o + r * iv.hi;
  }
  return iv;
}

std::uint64_t level_count(const SystemSpec& spec, int n) {
  return saturating_pow(spec.digit_count(), n);
}

LevelSet::LevelSet(SystemSpec spec, int level, std::vector<LevelCell> cells)
    : spec_(std::move(spec)), level_(level), cells_(std::move(cells)) {
  for (int k = 0; k < kMaxDim; ++k) {
    grid_[k] = k < spec_.dim() ? saturating_pow(spec_.count(k), level_) : 1;
  }
}

Box LevelSet::box(std::size_t i) const {
  std::vector<Interval> axes;
  for (int k = 0; k < spec_.dim(); ++k) {
    axes.push_back(axis_interval(spec_, k, cells_[i].index[k], level_));
  }
  return Box(std::move(axes));
}

Word LevelSet::word(std::size_t i) const {
  Word w(static_cast<std::size_t>(level_));
  std::uint64_t code = cells_[i].code;
  for (int t = level_ - 1; t >= 0; --t) {
    w[static_cast<std::size_t>(t)] = spec_.digits()[code % spec_.digit_count()];
    code /= spec_.digit_count();
  }
  return w;
}

std::vector<Box> LevelSet::boxes() const {
  std::vector<Box> out;
  out.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out.push_back(box(i));
  return out;
}

ProductPartition LevelSet::partition() const {
  std::vector<std::vector<Scalar>> bp;
  for (int k = 0; k < spec_.dim(); ++k) {
    if (grid_[k] > 1'000'000) {
      throw EnumerationBudget("level grid too fine to materialize", grid_[k],
                              1'000'000);
    }
    std::vector<Scalar> axis;
    for (std::uint64_t i = 0; i < grid_[k]; ++i) {
      axis.push_back(axis_interval(spec_, k, i, level_).lo);
    }
    axis.push_back(Scalar(1));
    bp.push_back(std::move(axis));
  }
  return ProductPartition(std::move(bp));
}

LevelSet level_set(const SystemSpec& spec, int n, std::uint64_t budget) {
  if (n < 0) throw InvalidParameter("level must be nonnegative");
  const std::uint64_t want = level_count(spec, n);
  if (want > budget) {
    throw EnumerationBudget("level set too large", want, budget);
  }
  for (int k = 0; k < spec.dim(); ++k) {
    if (saturating_pow(spec.count(k), n) > (std::uint64_t{1} << 62)) {
      throw InvalidParameter("level too deep for grid addressing");
    }
  }
  std::vector<LevelCell> cells(1);
  for (int t = 0; t < n; ++t) {
    std::vector<LevelCell> next;
    next.reserve(cells.size() * spec.digit_count());
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < spec.digit_count(); ++i) {
        const Digit& d = spec.digits()[i];
        LevelCell nc;
        for (int k = 0; k < spec.dim(); ++k) {
          nc.index[k] = c.index[k] * spec.count(k) + static_cast<std::uint64_t>(d[k]);
        }
        nc.code = c.code * spec.digit_count() + i;
        next.push_back(nc);
      }
    }
    cells = std::move(next);
  }
  return LevelSet(spec, n, std::move(cells));
}

Box HoleTemplate::strip_along(int axis) const {
  std::vector<Interval> axes;
  for (int k = 0; k < cube.dim(); ++k) {
    axes.push_back(k == axis ? cube[k] : Interval{Scalar(0), Scalar(1)});
  }
  return Box(std::move(axes));
}

HoleTemplate find_hole(const SystemSpec& spec) {
  const int d = spec.dim();
  std::vector<Box> kept;
  for (const auto& dg : spec.digits()) kept.push_back(spec.cell_box(dg));

  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Scalar best(0);
  std::vector<Scalar> best_corner;
  // Later axes are more significant in the tie-break.
  auto corner_less = [d](const std::vector<Scalar>& a,
                         const std::vector<Scalar>& b) {
    for (int k = d - 1; k >= 0; --k) {
      if (a[k] != b[k]) return a[k] < b[k];
    }
    return false;
  };
  while (true) {
    std::vector<Scalar> c(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) c[k] = spec.offset(k, static_cast<int>(idx[k]));
    Scalar s = Scalar(1) - c[0];
    for (int k = 1; k < d; ++k) s = std::min(s, Scalar(Scalar(1) - c[k]));
    for (const auto& b : kept) {
      bool ahead = true;
      for (int k = 0; k < d && ahead; ++k) ahead = b[k].hi > c[k];
      if (!ahead) continue;
      Scalar t = b[0].lo - c[0];
      for (int k = 1; k < d; ++k) t = std::max(t, Scalar(b[k].lo - c[k]));
      if (sgn(t) <= 0) {
        s = 0;
        break;
      }
      s = std::min(s, t);
    }
    if (s > best || (s == best && sgn(s) > 0 && corner_less(c, best_corner))) {
      best = s;
      best_corner = c;
    }
    int k = 0;
    while (k < d && ++idx[k] == spec.count(k)) idx[k++] = 0;
    if (k == d) break;
  }
  if (sgn(best) == 0) {
    throw SpecError("no hole: every grid cell is retained");
  }
  std::vector<Interval> axes;
  for (int k = 0; k < d; ++k) {
    axes.push_back({best_corner[k], best_corner[k] + best});
  }
  HoleTemplate h{Box(axes), Box(axes)};
  if (spec.kind() == SystemKind::kCarpet) {
    h.strip = h.strip_along(0);
  } else if (spec.kind() == SystemKind::kSponge) {
    axes[2] = {Scalar(0), Scalar(1)};
    h.strip = Box(axes);
  }
  return h;
}

OschResult osch_check(const SystemSpec& spec) {
  if (spec.digit_count() >= spec.grid_size()) return {false, std::nullopt};
  return {true, find_hole(spec).cube};
}

int sponge_depth(const SystemSpec& spec, int n) {
  if (spec.kind() != SystemKind::kSponge) {
    throw InvalidParameter("sponge_depth needs a sponge");
  }
  if (n < 1) throw InvalidParameter("sponge_depth needs n >= 1");
  const BigInt p(static_cast<unsigned long>(spec.count(0)));
  const BigInt u(static_cast<unsigned long>(spec.count(2)));
  const auto un = static_cast<unsigned long>(n);
  const BigInt upper = pow(u, un);      // p^{n+m} <= u^n
  const BigInt lower = pow(u, un - 1);  // p^{n+m} >  u^{n-1}
  // Several m can qualify when p < u; take the largest, whose cells are
  // closest in size to the level-n layers.
  int found = -1;
  BigInt pw = pow(p, un);
  for (int m = 0; pw <= upper; ++m, pw *= p) {
    if (pw > lower) found = m;
  }
  if (found < 0) throw InvalidParameter("no admissible sponge depth");
  return found;
}

}  // namespace carpetlab
