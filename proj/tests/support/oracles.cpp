#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <cmath>
#include <set>

namespace oracle {

using carpetlab::Digit;
using carpetlab::Interval;
using carpetlab::SystemSpec;

namespace {

Scalar clip_overlap(const Scalar& a0, const Scalar& a1, const Scalar& b0,
                    const Scalar& b1) {
  Scalar lo = a0 > b0 ? a0 : b0;
  Scalar hi = a1 < b1 ? a1 : b1;
  if (lo < 0) lo = 0;
  if (hi > 1) hi = 1;
  return hi > lo ? Scalar(hi - lo) : Scalar(0);
}

// Gaussian elimination over the rationals; nullopt when singular.
std::optional<std::vector<Scalar>> solve(std::vector<std::vector<Scalar>> a,
                                         std::vector<Scalar> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Scalar f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

}  // namespace

Scalar mass(const GridMeasure& mu, const Box& b) {
  const auto& part = mu.partition();
  Scalar total(0);
  for (std::size_t f = 0; f < part.cell_count(); ++f) {
    const auto idx = part.unflatten(f);
    Scalar frac(1);
    for (int k = 0; k < mu.dim() && frac != 0; ++k) {
      const Interval c = part.cell_interval(k, idx[k]);
      frac *= clip_overlap(b[k].lo, b[k].hi, c.lo, c.hi) / c.length();
    }
    total += frac * mu.weight(f);
  }
  return total;
}

double raster_overlap(const Box& box, const Box& cell, int steps) {
  const int d = box.dim();
  long inside = 0, all = 0;
  std::vector<int> i(static_cast<std::size_t>(d), 0);
  while (true) {
    bool in = true;
    for (int k = 0; k < d; ++k) {
      const Scalar x = cell[k].lo + cell[k].length() * Scalar(2 * i[k] + 1, 2 * steps);
      if (x < box[k].lo || x > box[k].hi) in = false;
    }
    inside += in;
    ++all;
    int k = 0;
    while (k < d && ++i[k] == steps) i[k++] = 0;
    if (k == d) break;
  }
  return static_cast<double>(inside) / static_cast<double>(all);
}

Scalar doubling(const GridMeasure& mu, const Scalar& r) {
  const int d = mu.dim();
  const long n = carpetlab::floor(Scalar(1) / r).get_si();
  Scalar best(0);
  std::vector<long> i(static_cast<std::size_t>(d), 0);
  while (true) {
    std::vector<Interval> qa, da;
    for (int k = 0; k < d; ++k) {
      const Scalar lo = r * i[k];
      qa.push_back({lo, lo + r});
      da.push_back({lo - r / 2, lo + r + r / 2});
    }
    const Scalar m = carpetlab::mass(mu, Box(qa));
    const Scalar ratio = carpetlab::mass(mu, Box(da)) / m;
    if (ratio > best) best = ratio;
    int k = 0;
    while (k < d && ++i[k] == n) i[k++] = 0;
    if (k == d) break;
  }
  return best;
}

std::vector<Box> level_boxes(const SystemSpec& spec, int n) {
  std::vector<Box> cur{Box::unit(spec.dim())};
  for (int step = 0; step < n; ++step) {
    std::vector<Box> next;
    for (const auto& b : cur) {
      for (const Digit& dg : spec.digits()) {
        std::vector<Interval> axes;
        for (int k = 0; k < spec.dim(); ++k) {
          Scalar off(0);
          for (int j = 0; j < dg[k]; ++j) off += spec.ratio(k, j);
          const Scalar lo = b[k].lo + b[k].length() * off;
          axes.push_back({lo, lo + b[k].length() * spec.ratio(k, dg[k])});
        }
        next.emplace_back(axes);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

int sponge_depth(int p, int u, int n) {
  // The admissible m form a run; the deepest one is wanted.
  int found = -1;
  for (int m = 0;; ++m) {
    const Scalar lhs = carpetlab::pow(Scalar(u), -n);
    const Scalar mid = carpetlab::pow(Scalar(p), -(n + m));
    const Scalar rhs = carpetlab::pow(Scalar(u), -n + 1);
    if (mid < lhs) return found;
    if (mid < rhs) found = m;
  }
}

std::vector<Scalar> cover_lengths(const std::vector<Scalar>& ratios,
                                  const Scalar& long_len, const Scalar& short_len) {
  Scalar amin = ratios.front();
  for (const auto& r : ratios) amin = r < amin ? r : amin;
  std::vector<Scalar> out;
  std::vector<Scalar> todo{long_len};
  while (!todo.empty()) {
    const Scalar len = todo.back();
    todo.pop_back();
    if (amin * len < short_len && short_len <= len) {
      out.push_back(len / long_len);
      continue;
    }
    for (const auto& r : ratios) todo.push_back(len * r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Scalar lp_vertex_max(const carpetlab::RatioProgram& p) {
  const std::size_t n = p.cells;
  // Rows: each ratio constraint as w_i - tau w_j <= 0.
  const auto& cons = p.constraints;
  const std::size_t m = cons.size();
  std::optional<Scalar> best;
  // Choose n-1 tight constraints; normalization is always tight.
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(std::min(m, n - 1)), true);
  std::sort(pick.begin(), pick.end(), std::greater<>());
  do {
    std::vector<std::vector<Scalar>> a;
    std::vector<Scalar> b;
    for (std::size_t c = 0; c < m; ++c) {
      if (!pick[c]) continue;
      std::vector<Scalar> row(n, Scalar(0));
      row[cons[c].first] += 1;
      row[cons[c].second] -= p.tau;
      a.push_back(row);
      b.push_back(0);
    }
    a.emplace_back(n, Scalar(1));
    b.push_back(1);
    auto w = solve(a, b);
    if (!w) continue;
    bool ok = true;
    for (const auto& x : *w) ok = ok && x >= 0;
    for (const auto& [i, j] : cons) ok = ok && (*w)[i] <= p.tau * (*w)[j];
    if (!ok) continue;
    Scalar v(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (p.target[i]) v += (*w)[i];
    }
    if (!best || v > *best) best = v;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return *best;
}

double random_feasible_value(const carpetlab::RatioProgram& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tau = carpetlab::to_double(p.tau);
  std::vector<double> w(p.cells);
  for (auto& x : w) x = std::exp(8.0 * u(rng));
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [i, j] : p.constraints) {
      if (w[i] > tau * w[j] * (1 + 1e-15)) {
        w[i] = tau * w[j];
        changed = true;
      }
    }
  }
  double tot = 0, tgt = 0;
  for (std::size_t i = 0; i < p.cells; ++i) {
    tot += w[i];
    if (p.target[i]) tgt += w[i];
  }
  return tgt / tot;
}

std::optional<std::size_t> lattice_chain_length(const Box& region, const Box& a,
                                                const Box& b) {
  const int d = a.dim();
  using Key = std::vector<long>;
  auto at = [&](const Key& k) {
    std::vector<Interval> ax;
    for (int i = 0; i < d; ++i) {
      const Scalar lo = a[i].lo + a.side(i) * k[static_cast<std::size_t>(i)];
      ax.push_back({lo, lo + a.side(i)});
    }
    return Box(ax);
  };
  Key goal(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const Scalar t = (b[i].lo - a[i].lo) / a.side(i);
    if (!carpetlab::is_integer(t)) return std::nullopt;
    goal[static_cast<std::size_t>(i)] = carpetlab::floor(t).get_si();
  }
  const Box big = carpetlab::dilate(region, Scalar(4));
  std::map<Key, std::size_t> dist{{Key(static_cast<std::size_t>(d), 0), 1}};
  std::deque<Key> todo{Key(static_cast<std::size_t>(d), 0)};
  while (!todo.empty()) {
    Key k = todo.front();
    todo.pop_front();
    if (k == goal) return dist[k];
    // Neighbours: translates that meet (king moves).
    Key step(static_cast<std::size_t>(d), -1);
    while (true) {
      Key nk = k;
      bool zero = true;
      for (int i = 0; i < d; ++i) {
        nk[static_cast<std::size_t>(i)] += step[static_cast<std::size_t>(i)];
        zero = zero && step[static_cast<std::size_t>(i)] == 0;
      }
      if (!zero && !dist.count(nk) && big.contains(at(nk))) {
        dist[nk] = dist[k] + 1;
        todo.push_back(nk);
      }
      int i = 0;
      while (i < d && ++step[static_cast<std::size_t>(i)] == 2) step[static_cast<std::size_t>(i++)] = -1;
      if (i == d) break;
    }
  }
  return std::nullopt;
}

SystemSpec random_baranski(std::uint64_t seed, int max_count) {
  std::mt19937_64 rng(seed);
  auto ratios = [&](int count) {
    // Split 1 into `count` positive parts with a common denominator <= 12.
    std::uniform_int_distribution<int> den_d(count, 12);
    const int den = den_d(rng);
    std::vector<int> cuts;
    std::vector<int> pool;
    for (int i = 1; i < den; ++i) pool.push_back(i);
    std::shuffle(pool.begin(), pool.end(), rng);
    cuts.assign(pool.begin(), pool.begin() + (count - 1));
    cuts.push_back(0);
    cuts.push_back(den);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Scalar> out;
    for (int i = 0; i < count; ++i) out.push_back(q(cuts[i + 1] - cuts[i], den));
    return out;
  };
  std::uniform_int_distribution<int> cnt(2, max_count);
  const int p = cnt(rng), qn = cnt(rng);
  std::vector<Scalar> a = ratios(p), b = ratios(qn);
  std::vector<Digit> digits;
  std::bernoulli_distribution keep(0.6);
  for (int j = 0; j < qn; ++j) {
    for (int i = 0; i < p; ++i) {
      if (keep(rng)) digits.push_back({i, j, 0});
    }
  }
  if (digits.empty()) digits.push_back({0, 0, 0});
  if (static_cast<int>(digits.size()) == p * qn) digits.pop_back();
  return carpetlab::make_carpet(a, b, digits);
}

}  // namespace oracle
