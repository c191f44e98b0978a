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

#include "carpetlab/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>

#include "carpetlab/errors.hpp"
#include "mass_table.hpp"

namespace carpetlab {
namespace {

constexpr std::size_t kExhaustiveLimit = 100000;

long exact_inverse(const Scalar& r) {
  if (sgn(r) <= 0 || r > 1) throw InvalidParameter("scale must lie in (0,1]");
  const Scalar inv = Scalar(1) / r;
  if (!is_integer(inv) || !inv.get_num().fits_slong_p()) {
    throw InvalidParameter("scale " + to_fraction_string(r) +
                           " is not the reciprocal of an integer");
  }
  return inv.get_num().get_si();
}

// Iterates all index vectors in [0, n)^d (axis 0 fastest).
template <typename F>
void for_each_index(int d, std::size_t n, F&& fn) {
  std::array<std::size_t, kMaxDim> idx{};
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= n;
  for (std::size_t t = 0; t < total; ++t) {
    fn(idx);
    for (int k = 0; k < d; ++k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
}

Box cube_at(int d, const std::array<std::size_t, kMaxDim>& idx, const Scalar& r) {
  std::vector<Interval> axes;
  for (int k = 0; k < d; ++k) {
    const Scalar lo = r * static_cast<unsigned long>(idx[k]);
    axes.push_back({lo, lo + r});
  }
  return Box(std::move(axes));
}

Box clip_unit(const Box& b) {
  std::vector<Interval> axes;
  for (const auto& iv : b.axes()) {
    axes.push_back({std::max(iv.lo, Scalar(0)), std::min(iv.hi, Scalar(1))});
  }
  return Box(std::move(axes));
}

double ln(const Scalar& x) { return log2(x) * std::log(2.0); }

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - sx / n) * (x[i] - sx / n);
    sxy += (x[i] - sx / n) * (y[i] - sy / n);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// Grid of box masses for one shape: positions per axis are breakpoints p
// with p + side <= 1.
struct ShapeGrid {
  std::vector<Scalar> sides;
  std::array<std::vector<Scalar>, kMaxDim> pos;
  std::array<std::size_t, kMaxDim> dims{1, 1, 1};
  std::vector<Scalar> mass;  // axis 0 fastest

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  Box box(std::size_t flat) const {
    std::vector<Interval> axes;
    for (std::size_t k = 0; k < sides.size(); ++k) {
      const Scalar& p = pos[k][flat % dims[k]];
      flat /= dims[k];
      axes.push_back({p, p + sides[k]});
    }
    return Box(std::move(axes));
  }
};

std::vector<Scalar> shape_positions(const GridMeasure& mu, int axis,
                                    const Scalar& side) {
  std::vector<Scalar> out;
  for (const auto& b : mu.partition().breakpoints(axis)) {
    if (b + side <= 1) out.push_back(b);
  }
  return out;
}

ShapeGrid shape_grid(const GridMeasure& mu, const MassTable& table,
                     const std::vector<Scalar>& sides, bool fill) {
  ShapeGrid g;
  g.sides = sides;
  for (int k = 0; k < mu.dim(); ++k) {
    g.pos[k] = shape_positions(mu, k, sides[k]);
    g.dims[k] = g.pos[k].size();
    if (g.dims[k] == 0) throw InvalidParameter("shape does not fit in [0,1]^d");
  }
  if (!fill) return g;
  g.mass.resize(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) {
    g.mass[f] = table.box_mass(g.box(f));
    if (sgn(g.mass[f]) == 0) {
      throw DegenerateMass("box " + g.box(f).to_string() + " has zero mass");
    }
  }
  return g;
}

// For every position p of shape g1, the minimal mass of a g2 box meeting
// the g1 box at p, via one sliding-window pass per axis.
std::vector<Scalar> window_minimum(const ShapeGrid& g1, const ShapeGrid& g2,
                                   int d) {
  std::vector<Scalar> cur = g2.mass;
  std::array<std::size_t, kMaxDim> dims = g2.dims;
  for (int k = 0; k < d; ++k) {
    std::array<std::size_t, kMaxDim> out_dims = dims;
    out_dims[k] = g1.dims[k];
    std::vector<Scalar> out(out_dims[0] * out_dims[1] * out_dims[2]);
    std::size_t stride = 1;
    for (int j = 0; j < k; ++j) stride *= dims[j];
    std::size_t ostride = 1;
    for (int j = 0; j < k; ++j) ostride *= out_dims[j];
    const std::size_t outer = cur.size() / (stride * dims[k]);
    const auto& p1 = g1.pos[k];
    const auto& p2 = g2.pos[k];
    const Scalar& s1 = g1.sides[k];
    const Scalar& s2 = g2.sides[k];
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < stride; ++in) {
        const std::size_t base = o * stride * dims[k] + in;
        const std::size_t obase = o * ostride * out_dims[k] + in;
        std::deque<std::size_t> dq;
        std::size_t next = 0;
        for (std::size_t i = 0; i < p1.size(); ++i) {
          // Window: p - s2 <= q <= p + s1.
          const Scalar hi = p1[i] + s1;
          while (next < p2.size() && p2[next] <= hi) {
            const Scalar& v = cur[base + next * stride];
            while (!dq.empty() && cur[base + dq.back() * stride] >= v) {
              dq.pop_back();
            }
            dq.push_back(next++);
          }
          const Scalar lo = p1[i] - s2;
          while (!dq.empty() && p2[dq.front()] < lo) dq.pop_front();
          out[obase + i * ostride] = cur[base + dq.front() * stride];
        }
      }
    }
    cur = std::move(out);
    dims = out_dims;
  }
  return cur;
}

std::vector<std::vector<Scalar>> permutations_of(std::vector<Scalar> sides) {
  std::sort(sides.begin(), sides.end());
  std::vector<std::vector<Scalar>> out;
  do {
    out.push_back(sides);
  } while (std::next_permutation(sides.begin(), sides.end()));
  return out;
}

void isotropy_exhaustive(const GridMeasure& mu, const MassTable& table,
                         const std::vector<Scalar>& sides,
                         IsotropyProfile& prof) {
  const int d = mu.dim();
  const auto perms = permutations_of(sides);
  std::vector<ShapeGrid> grids;
  for (const auto& s : perms) {
    grids.push_back(shape_grid(mu, table, s, true));
    prof.shapes.push_back(s);
  }
  for (const auto& g1 : grids) {
    for (const auto& g2 : grids) {
      const std::vector<Scalar> mins = window_minimum(g1, g2, d);
      for (std::size_t f = 0; f < g1.size(); ++f) {
        const Scalar r = g1.mass[f] / mins[f];
        if (r > prof.A) {
          prof.A = r;
          const Box b1 = g1.box(f);
          for (std::size_t h = 0; h < g2.size(); ++h) {
            if (g2.mass[h] == mins[f] && g2.box(h).meets(b1)) {
              prof.worst = std::make_pair(b1, g2.box(h));
              break;
            }
          }
        }
      }
      // Every p is paired with its whole window.
      for (std::size_t f = 0; f < g1.size(); ++f) {
        std::uint64_t w = 1;
        std::size_t ff = f;
        for (int k = 0; k < d; ++k) {
          const Scalar& p = g1.pos[k][ff % g1.dims[k]];
          ff /= g1.dims[k];
          std::uint64_t c = 0;
          for (const auto& q : g2.pos[k]) {
            if (q >= p - g2.sides[k] && q <= p + g1.sides[k]) ++c;
          }
          w *= c;
        }
        prof.pairs += w;
      }
    }
  }
}

void isotropy_sampled(const GridMeasure& mu, const MassTable& table,
                      const std::vector<Scalar>& sides, std::size_t samples,
                      std::uint64_t seed, IsotropyProfile& prof) {
  const int d = mu.dim();
  const auto perms = permutations_of(sides);
  std::vector<ShapeGrid> grids;
  for (const auto& s : perms) {
    grids.push_back(shape_grid(mu, table, s, false));
    prof.shapes.push_back(s);
  }
  std::mt19937_64 rng(seed);
  prof.exhaustive = false;
  for (const auto& g1 : grids) {
    for (const auto& g2 : grids) {
      for (std::size_t t = 0; t < samples; ++t) {
        std::vector<Interval> a1, a2;
        for (int k = 0; k < d; ++k) {
          const Scalar& p = g1.pos[k][rng() % g1.dims[k]];
          std::vector<const Scalar*> window;
          for (const auto& q : g2.pos[k]) {
            if (q >= p - g2.sides[k] && q <= p + g1.sides[k]) window.push_back(&q);
          }
          const Scalar& q = *window[rng() % window.size()];
          a1.push_back({p, p + g1.sides[k]});
          a2.push_back({q, q + g2.sides[k]});
        }
        const Box b1(a1), b2(a2);
        const Scalar m1 = table.box_mass(b1), m2 = table.box_mass(b2);
        if (sgn(m1) == 0 || sgn(m2) == 0) {
          throw DegenerateMass("sampled box has zero mass");
        }
        ++prof.pairs;
        if (m1 / m2 > prof.A) {
          prof.A = m1 / m2;
          prof.worst = std::make_pair(b1, b2);
        }
      }
    }
  }
}

long chain_m(const Scalar& dist2, const Scalar& diam2) {
  // Largest t >= 0 with t^2 * diam^2 <= dist^2, plus one.
  const BigInt q = floor(dist2 / diam2);
  BigInt t;
  mpz_sqrt(t.get_mpz_t(), q.get_mpz_t());
  return t.get_si() + 1;
}

long isqrt_ratio(long num, long den) {
  // floor(sqrt(num / den)) for small nonnegative integers.
  const long q = num / den;
  long t = static_cast<long>(std::sqrt(static_cast<double>(q)));
  while (t * t > q) --t;
  while ((t + 1) * (t + 1) <= q) ++t;
  return t;
}

}  // namespace

Scalar doubling_constant(const GridMeasure& mu, const Scalar& r) {
  const long m = exact_inverse(r);
  const MassTable table(mu);
  const int d = mu.dim();
  Scalar best(0);
  for_each_index(d, static_cast<std::size_t>(m), [&](const auto& idx) {
    const Box q = cube_at(d, idx, r);
    const Scalar mq = table.box_mass(q);
    if (sgn(mq) == 0) {
      throw DegenerateMass("cube " + q.to_string() + " has zero mass");
    }
    const Scalar big = table.box_mass(clip_unit(dilate(q, Scalar(2))));
    best = std::max(best, Scalar(big / mq));
  });
  return best;
}

DoublingProfile empirical_exponents(const GridMeasure& mu, int octaves) {
  const int d = mu.dim();
  int cap = 0;
  while ((std::size_t{1} << (d * (cap + 1))) <= kExhaustiveLimit) ++cap;
  int L = octaves;
  if (L <= 0) {
    L = std::min(6, cap);
    const std::size_t n = mu.uniform_cells();
    if (n >= 8 && (n & (n - 1)) == 0) {
      int g = 0;
      while ((std::size_t{1} << g) < n) ++g;
      L = std::min(g, cap);
    }
    L = std::max(L, 3);
  }
  const MassTable table(mu);

  // masses[l]: level-l dyadic cubes, axis 0 fastest.
  std::vector<std::vector<Scalar>> masses(static_cast<std::size_t>(L) + 1);
  {
    const std::size_t side = std::size_t{1} << L;
    const Scalar r = Scalar(1) / static_cast<unsigned long>(side);
    auto& fine = masses[static_cast<std::size_t>(L)];
    fine.reserve(static_cast<std::size_t>(std::pow(side, d)));
    for_each_index(d, side, [&](const auto& idx) {
      fine.push_back(table.box_mass(cube_at(d, idx, r)));
      if (sgn(fine.back()) == 0) {
        throw DegenerateMass("dyadic cube " + cube_at(d, idx, r).to_string() +
                             " has zero mass");
      }
    });
  }
  // Child of coarse index c (level l) at offset bits.
  auto child_index = [d](const std::array<std::size_t, kMaxDim>& idx,
                         std::size_t side, int bits) {
    std::size_t f = 0;
    for (int k = d - 1; k >= 0; --k) {
      f = f * (2 * side) + 2 * idx[k] + static_cast<std::size_t>((bits >> k) & 1);
    }
    return f;
  };
  for (int l = L - 1; l >= 0; --l) {
    const std::size_t side = std::size_t{1} << l;
    auto& cur = masses[static_cast<std::size_t>(l)];
    const auto& fine = masses[static_cast<std::size_t>(l) + 1];
    for_each_index(d, side, [&](const auto& idx) {
      Scalar s(0);
      for (int b = 0; b < (1 << d); ++b) s += fine[child_index(idx, side, b)];
      cur.push_back(s);
    });
  }

  DoublingProfile prof;
  // Doubling constants at r = 2^-i.
  for (int i = 1; i <= L; ++i) {
    const Scalar r = Scalar(1) / static_cast<unsigned long>(std::size_t{1} << i);
    prof.scales.push_back(r);
    prof.constants.push_back(doubling_constant(mu, r));
    prof.C = i == 1 ? prof.constants.back() : std::max(prof.C, prof.constants.back());
  }

  // mind/maxd[l]: extreme descendant mass `gap` generations below.
  std::vector<std::vector<Scalar>> mind = masses, maxd = masses;
  std::vector<double> xs, ymax, ymin;
  prof.certified_direction = true;
  for (int gap = 1; gap <= L; ++gap) {
    OctaveStats st;
    st.gap = gap;
    bool first = true;
    std::vector<std::vector<Scalar>> nmin(static_cast<std::size_t>(L - gap) + 1),
        nmax(static_cast<std::size_t>(L - gap) + 1);
    for (int l = 0; l + gap <= L; ++l) {
      const std::size_t side = std::size_t{1} << l;
      const auto& fmin = mind[static_cast<std::size_t>(l) + 1];
      const auto& fmax = maxd[static_cast<std::size_t>(l) + 1];
      auto& omin = nmin[static_cast<std::size_t>(l)];
      auto& omax = nmax[static_cast<std::size_t>(l)];
      std::size_t f = 0;
      for_each_index(d, side, [&](const auto& idx) {
        Scalar lo = fmin[child_index(idx, side, 0)];
        Scalar hi = fmax[child_index(idx, side, 0)];
        for (int b = 1; b < (1 << d); ++b) {
          lo = std::min(lo, fmin[child_index(idx, side, b)]);
          hi = std::max(hi, fmax[child_index(idx, side, b)]);
        }
        const Scalar& m2 = masses[static_cast<std::size_t>(l)][f++];
        const Scalar rmin = lo / m2, rmax = hi / m2;
        if (first) {
          st.min_ratio = rmin;
          st.max_ratio = rmax;
          first = false;
        } else {
          st.min_ratio = std::min(st.min_ratio, rmin);
          st.max_ratio = std::max(st.max_ratio, rmax);
        }
        omin.push_back(std::move(lo));
        omax.push_back(std::move(hi));
      });
      prof.pairs += static_cast<std::uint64_t>(std::pow(2.0, d * (l + gap)));
    }
    mind = std::move(nmin);
    maxd = std::move(nmax);
    xs.push_back(-gap * std::log(2.0));
    ymax.push_back(ln(st.max_ratio));
    ymin.push_back(ln(st.min_ratio));
    if (st.min_ratio < pow(prof.C, -2L * gap)) prof.certified_direction = false;
    prof.octaves.push_back(std::move(st));
  }
  prof.alpha = slope(xs, ymax);
  prof.beta = slope(xs, ymin);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    prof.c_upper = std::max(prof.c_upper, std::exp(ymax[i] - prof.alpha * xs[i]));
    prof.c_lower = std::max(prof.c_lower, std::exp(prof.beta * xs[i] - ymin[i]));
  }
  prof.beta_cert = 2.0 * log2(prof.C);
  prof.converged = xs.size() >= 3 && prof.alpha > 0 && prof.alpha <= prof.beta + 1e-9;
  return prof;
}

IsotropyProfile isotropy_constant(const GridMeasure& mu,
                                  const std::vector<Scalar>& sides,
                                  std::size_t samples, std::uint64_t seed) {
  if (static_cast<int>(sides.size()) != mu.dim()) {
    throw DimensionMismatch("shape dimension differs from the measure");
  }
  for (const auto& s : sides) {
    if (sgn(s) <= 0 || s > 1) throw InvalidParameter("shape sides must lie in (0,1]");
  }
  const MassTable table(mu);
  std::size_t positions = 1;
  for (int k = 0; k < mu.dim(); ++k) {
    positions *= shape_positions(mu, k, sides[static_cast<std::size_t>(k)]).size();
  }
  IsotropyProfile prof;
  if (positions <= kExhaustiveLimit) {
    isotropy_exhaustive(mu, table, sides, prof);
  } else {
    isotropy_sampled(mu, table, sides, samples, seed, prof);
  }
  return prof;
}

IsotropyProfile isotropy_constant_all(const GridMeasure& mu) {
  const std::size_t n = mu.uniform_cells();
  if (n == 0) throw InvalidParameter("all-shape isotropy needs a uniform grid");
  const int d = mu.dim();
  const MassTable table(mu);
  IsotropyProfile total;
  std::vector<std::size_t> w(static_cast<std::size_t>(d), 1);
  while (true) {
    std::vector<Scalar> sides;
    for (auto x : w) sides.push_back(make_scalar(static_cast<long>(x), static_cast<long>(n)));
    IsotropyProfile p;
    isotropy_exhaustive(mu, table, sides, p);
    total.pairs += p.pairs;
    total.shapes.push_back(sides);
    if (p.A > total.A) {
      total.A = p.A;
      total.worst = p.worst;
    }
    // Next nondecreasing side tuple.
    int k = d - 1;
    while (k >= 0 && w[static_cast<std::size_t>(k)] == n) --k;
    if (k < 0) break;
    ++w[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < d; ++j) w[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(k)];
  }
  return total;
}

ChainVerdict chain_ratio_bound(const GridMeasure& mu, const Box& r1,
                               const Box& r2, const Scalar& A) {
  if (!r1.congruent_to(r2)) throw NotCongruent("chain bound needs congruent boxes");
  if (A < 1) throw InvalidParameter("isotropy constant must be >= 1");
  Scalar dist2(0), diam2(0);
  for (int k = 0; k < r1.dim(); ++k) {
    Scalar gap = std::max({Scalar(0), Scalar(r2[k].lo - r1[k].hi),
                           Scalar(r1[k].lo - r2[k].hi)});
    dist2 += gap * gap;
    diam2 += r1.side(k) * r1.side(k);
  }
  if (sgn(diam2) == 0) throw InvalidParameter("degenerate boxes");
  ChainVerdict v;
  v.m = chain_m(dist2, diam2);
  const Scalar m1 = mass(mu, r1), m2 = mass(mu, r2);
  if (sgn(m1) == 0 || sgn(m2) == 0) throw DegenerateMass("box with zero mass");
  v.ratio = m1 / m2;
  const Scalar bound = pow(A, v.m);
  v.pass = v.ratio <= bound && v.ratio * bound >= 1;
  return v;
}

ChainSweep chain_bound_sweep(const GridMeasure& mu, const Scalar& A) {
  const std::size_t n = mu.uniform_cells();
  if (n == 0) throw InvalidParameter("chain sweep needs a uniform grid");
  if (A < 1) throw InvalidParameter("isotropy constant must be >= 1");
  const int d = mu.dim();
  const MassTable table(mu);
  const double logA = ln(A);

  // All shapes in cell units.
  std::vector<std::array<long, kMaxDim>> shapes;
  for_each_index(d, n, [&](const auto& idx) {
    std::array<long, kMaxDim> s{1, 1, 1};
    for (int k = 0; k < d; ++k) s[k] = static_cast<long>(idx[k]) + 1;
    shapes.push_back(s);
  });
  struct Masses {
    std::array<long, kMaxDim> dims{1, 1, 1};
    std::vector<Scalar> exact;
    std::vector<double> approx;
  };
  auto build = [&](const std::array<long, kMaxDim>& s) {
    Masses m;
    for (int k = 0; k < d; ++k) m.dims[k] = static_cast<long>(n) - s[k] + 1;
    const std::size_t total = static_cast<std::size_t>(m.dims[0] * m.dims[1] * m.dims[2]);
    for (std::size_t f = 0; f < total; ++f) {
      std::array<std::size_t, kMaxDim> lo{}, hi{};
      std::size_t ff = f;
      for (int k = 0; k < d; ++k) {
        lo[k] = ff % static_cast<std::size_t>(m.dims[k]);
        ff /= static_cast<std::size_t>(m.dims[k]);
        hi[k] = lo[k] + static_cast<std::size_t>(s[k]);
      }
      m.exact.push_back(table.cell_sum(lo, hi));
      if (sgn(m.exact.back()) == 0) throw DegenerateMass("box with zero mass");
      m.approx.push_back(to_double(m.exact.back()));
    }
    return m;
  };
  std::vector<Masses> cache(shapes.size());
  std::vector<bool> built(shapes.size(), false);
  auto shape_index = [&](const std::array<long, kMaxDim>& s) {
    std::size_t f = 0;
    for (int k = d - 1; k >= 0; --k) f = f * n + static_cast<std::size_t>(s[k] - 1);
    return f;
  };
  auto get = [&](std::size_t i) -> const Masses& {
    if (!built[i]) {
      cache[i] = build(shapes[i]);
      built[i] = true;
    }
    return cache[i];
  };

  ChainSweep out;
  std::vector<double> apow{1.0};
  std::vector<Scalar> apow_exact{Scalar(1)};
  auto bound = [&](long m) {
    while (static_cast<long>(apow.size()) <= m) {
      apow.push_back(apow.back() * to_double(A));
      apow_exact.push_back(apow_exact.back() * A);
    }
    return apow[static_cast<std::size_t>(m)];
  };

  for (std::size_t si = 0; si < shapes.size(); ++si) {
    const auto& s1 = shapes[si];
    std::array<long, kMaxDim> perm = s1;
    std::sort(perm.begin(), perm.begin() + d);
    std::set<std::size_t> partners;
    do {
      partners.insert(shape_index(perm));
    } while (std::next_permutation(perm.begin(), perm.begin() + d));
    long diam2 = 0;
    for (int k = 0; k < d; ++k) diam2 += s1[k] * s1[k];
    const Masses& m1 = get(si);
    for (std::size_t sj : partners) {
      const auto& s2 = shapes[sj];
      const Masses& m2 = get(sj);
      const bool same = sj == si;
      const std::size_t n1 = m1.approx.size(), n2 = m2.approx.size();
      for (std::size_t a = 0; a < n1; ++a) {
        std::array<long, kMaxDim> p{};
        std::size_t fa = a;
        for (int k = 0; k < d; ++k) {
          p[k] = static_cast<long>(fa % static_cast<std::size_t>(m1.dims[k]));
          fa /= static_cast<std::size_t>(m1.dims[k]);
        }
        const double va = m1.approx[a];
        std::array<long, kMaxDim> q{};
        for (std::size_t b = 0; b < n2; ++b) {
          long dist2 = 0;
          long lattice = 0;
          for (int k = 0; k < d; ++k) {
            const long gap = std::max({0L, q[k] - (p[k] + s1[k]), p[k] - (q[k] + s2[k])});
            dist2 += gap * gap;
            if (same) {
              const long t = std::abs(q[k] - p[k]);
              lattice = std::max(lattice, (t + s1[k] - 1) / s1[k]);
            }
          }
          const long m = isqrt_ratio(dist2, diam2) + 1;
          const double ratio = va / m2.approx[b];
          const double lim = bound(m);
          ++out.pairs;
          if (ratio > 1.0) {
            const double e = std::log(ratio) / (static_cast<double>(m) * logA);
            if (e > out.worst_exponent) {
              out.worst_exponent = e;
            }
          }
          if (ratio > lim * (1.0 - 1e-9)) {
            ++out.exact_checks;
            if (m1.exact[a] > apow_exact[static_cast<std::size_t>(m)] * m2.exact[b]) {
              ++out.failures;
              if (same) ++out.translate_failures;
              if (!out.worst || ratio / lim > 1.0) {
                std::vector<Interval> b1, b2;
                for (int k = 0; k < d; ++k) {
                  b1.push_back({make_scalar(p[k], static_cast<long>(n)),
                                make_scalar(p[k] + s1[k], static_cast<long>(n))});
                  b2.push_back({make_scalar(q[k], static_cast<long>(n)),
                                make_scalar(q[k] + s2[k], static_cast<long>(n))});
                }
                out.worst = std::make_pair(Box(b1), Box(b2));
              }
            }
          }
          if (same && lattice > 0 && ratio > bound(lattice) * (1.0 - 1e-9)) {
            if (m1.exact[a] > apow_exact[static_cast<std::size_t>(lattice)] * m2.exact[b]) {
              ++out.lattice_failures;
            }
          }
          for (int k = 0; k < d; ++k) {
            if (++q[k] < m2.dims[k]) break;
            q[k] = 0;
          }
        }
      }
    }
  }
  return out;
}

std::pair<Scalar, Scalar> face_projection_ratio(const GridMeasure& mu, int axis) {
  const int d = mu.dim();
  if (d < 2) throw InvalidParameter("face projection needs d >= 2");
  if (axis < 0 || axis >= d) throw InvalidParameter("axis out of range");
  const auto& part = mu.partition();
  std::vector<int> face_axes;
  for (int k = 0; k < d; ++k) {
    if (k != axis) face_axes.push_back(k);
  }
  std::size_t face_cells = 1;
  for (int k : face_axes) face_cells *= part.cells(k);
  std::vector<Scalar> face(face_cells);
  for (std::size_t flat = 0; flat < part.cell_count(); ++flat) {
    const auto idx = part.unflatten(flat);
    std::size_t f = 0;
    for (auto it = face_axes.rbegin(); it != face_axes.rend(); ++it) {
      f = f * part.cells(*it) + idx[static_cast<std::size_t>(*it)];
    }
    face[f] += mu.weight(flat);
  }
  Scalar lo, hi;
  for (std::size_t f = 0; f < face_cells; ++f) {
    std::size_t ff = f;
    Scalar vol(1);
    for (int k : face_axes) {
      vol *= part.cell_interval(k, ff % part.cells(k)).length();
      ff /= part.cells(k);
    }
    const Scalar density = face[f] / mu.total() / vol;
    if (f == 0) {
      lo = hi = density;
    } else {
      lo = std::min(lo, density);
      hi = std::max(hi, density);
    }
  }
  return {lo, hi};
}

SlabStats slab_ratio_stats(const GridMeasure& mu, double alpha, double beta) {
  const int d = mu.dim();
  if (d < 2) throw InvalidParameter("slab statistics need d >= 2");
  const std::size_t n = mu.uniform_cells();
  if (n == 0) throw InvalidParameter("slab statistics need a uniform grid");
  const MassTable table(mu);
  const bool exact = std::floor(alpha) == alpha && std::floor(beta) == beta &&
                     std::abs(alpha) < 64 && std::abs(beta) < 64;
  const Scalar cell = make_scalar(1, static_cast<long>(n));
  SlabStats st;
  bool first = true;

  // Cubes in the first d-1 axes: side w cells, lower corner c.
  for (std::size_t w = 1; w <= n; ++w) {
    const Scalar side = cell * static_cast<unsigned long>(w);
    const Scalar side_pow = pow(side, d - 1);
    const double side_pow_d = to_double(side_pow);
    for_each_index(d - 1, n - w + 1, [&](const auto& corner) {
      for (std::size_t j0 = 0; j0 < n; ++j0) {
        for (std::size_t j1 = j0 + 1; j1 <= n; ++j1) {
          std::array<std::size_t, kMaxDim> lo{}, hi{};
          for (int k = 0; k < d - 1; ++k) {
            lo[k] = corner[k];
            hi[k] = corner[k] + w;
          }
          lo[d - 1] = j0;
          hi[d - 1] = j1;
          const Scalar m = table.cell_sum(lo, hi);
          if (sgn(m) == 0) throw DegenerateMass("slab with zero mass");
          const long jc = static_cast<long>(j1 - j0);
          ++st.pairs;
          if (exact) {
            const Scalar J = cell * jc;
            const Scalar up = m / (side_pow * pow(J, static_cast<long>(alpha)));
            const Scalar dn = m / (side_pow * pow(J, static_cast<long>(beta)));
            if (first) {
              st.upper_exact = up;
              st.lower_exact = dn;
            } else {
              st.upper_exact = std::max(*st.upper_exact, up);
              st.lower_exact = std::min(*st.lower_exact, dn);
            }
          }
          const double md = to_double(m);
          const double J = static_cast<double>(jc) / static_cast<double>(n);
          const double up = md / (side_pow_d * std::pow(J, alpha));
          const double dn = md / (side_pow_d * std::pow(J, beta));
          st.upper = first ? up : std::max(st.upper, up);
          st.lower = first ? dn : std::min(st.lower, dn);
          first = false;
        }
      }
    });
  }
  if (st.upper_exact) {
    st.upper = to_double(*st.upper_exact);
    st.lower = to_double(*st.lower_exact);
  }
  return st;
}

void PiecewiseLinear::check() const {
  if (points.size() < 2) throw InvalidParameter("need at least two breakpoints");
  if (points.front().first != 0 || points.back().first != 1) {
    throw InvalidParameter("breakpoints must span [0,1]");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i && !(points[i - 1].first < points[i].first)) {
      throw InvalidParameter("breakpoints must increase");
    }
    if (points[i].second < 0 || points[i].second > 1) {
      throw InvalidParameter("function values must lie in [0,1]");
    }
  }
}

Scalar PiecewiseLinear::operator()(const Scalar& x) const {
  auto it = std::upper_bound(points.begin(), points.end(), x,
                             [](const Scalar& v, const auto& p) { return v < p.first; });
  if (it == points.begin()) return points.front().second;
  if (it == points.end()) return points.back().second;
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

Interval PiecewiseLinear::range(const Interval& x) const {
  Scalar lo = (*this)(x.lo), hi = lo;
  const Scalar e = (*this)(x.hi);
  lo = std::min(lo, e);
  hi = std::max(hi, e);
  for (const auto& [px, py] : points) {
    if (px > x.lo && px < x.hi) {
      lo = std::min(lo, py);
      hi = std::max(hi, py);
    }
  }
  return {lo, hi};
}

Scalar graph_cover_mass(const GridMeasure& mu, const PiecewiseLinear& f, int n,
                        std::uint64_t budget) {
  const int d = mu.dim();
  if (d < 2) throw InvalidParameter("graph covers need a measure on [0,1]^{d+1}");
  if (n < 0 || n > 62) throw InvalidParameter("level out of range");
  f.check();
  const std::uint64_t cols = std::uint64_t{1} << n;
  if (cols > budget) throw EnumerationBudget("graph cover too fine", cols, budget);
  const Scalar h = Scalar(1) / static_cast<unsigned long>(cols);
  const BigInt top(static_cast<unsigned long>(cols));
  Scalar total(0);
  for (std::uint64_t i = 0; i < cols; ++i) {
    const Interval x{h * static_cast<unsigned long>(i), h * static_cast<unsigned long>(i + 1)};
    const Interval y = f.range(x);
    BigInt a = floor(y.lo * top);
    BigInt b = floor(y.hi * top) + 1;
    if (b > top) b = top;
    if (a >= b) a = b - 1;
    std::vector<Interval> axes(static_cast<std::size_t>(d), Interval{Scalar(0), Scalar(1)});
    axes[0] = x;
    axes[static_cast<std::size_t>(d) - 1] = {Scalar(a) * h, Scalar(b) * h};
    total += mass(mu, Box(std::move(axes)));
  }
  return total;
}

HomogeneityProfile homogeneity_constant(const GridMeasure& mu, const Scalar& s,
                                        const std::vector<Scalar>& scales) {
  if (sgn(s) <= 0) throw InvalidParameter("homogeneity exponent must be positive");
  if (scales.empty()) throw InvalidParameter("need at least one scale");
  const int d = mu.dim();
  const MassTable table(mu);
  const bool exact = is_integer(s) && s < 64;
  HomogeneityProfile prof;
  prof.s = s;
  bool first = true;
  for (const auto& r : scales) {
    const long m = exact_inverse(r);
    for (long lam : {2L, 4L, 8L}) {
      const Scalar lam_s = exact ? pow(Scalar(lam), s.get_num().get_si()) : Scalar(0);
      const double lam_s_d = std::pow(static_cast<double>(lam), to_double(s));
      for_each_index(d, static_cast<std::size_t>(m), [&](const auto& idx) {
        const Box q = cube_at(d, idx, r);
        const Scalar mq = table.box_mass(q);
        if (sgn(mq) == 0) throw DegenerateMass("cube " + q.to_string() + " has zero mass");
        const Scalar big = table.box_mass(clip_unit(dilate(q, Scalar(lam))));
        if (exact) {
          const Scalar v = big / (lam_s * mq);
          prof.C_exact = first ? v : std::max(*prof.C_exact, v);
        }
        const double v = to_double(big / mq) / lam_s_d;
        prof.C = first ? v : std::max(prof.C, v);
        first = false;
      });
    }
  }
  if (prof.C_exact) prof.C = to_double(*prof.C_exact);
  return prof;
}

}  // namespace carpetlab
