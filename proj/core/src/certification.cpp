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


#include "carpetlab/certification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <utility>

#include "carpetlab/diagnostics.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab/moran.hpp"
#include "json.hpp"

namespace carpetlab {
namespace {

using Json = nlohmann::json;

constexpr long kMaxExpand = 1'000'000;

// Per-axis sums over the cells a box meets.
struct Window {
  std::size_t c0 = 0;
  std::vector<Scalar> v;
};

// Exact masses of E_n, G_n and the strip unions, by descent through the
// construction tree. A box inside one cell of the measure is settled by
// self-similarity; level-n boxes that straddle cells are summed cell by
// cell, using that the harvest is a product set along each axis.
class MassEngine {
 public:
  MassEngine(const SystemSpec& spec, const GridMeasure& mu,
             const HoleTemplate& hole)
      : spec_(spec), mu_(mu), part_(mu.partition()), hole_(hole) {
    if (spec.kind() != SystemKind::kCarpet && spec.kind() != SystemKind::kSponge) {
      throw InvalidParameter("certificates are defined for carpets and sponges");
    }
    if (spec.dim() != mu.dim()) {
      throw DimensionMismatch("system and measure dimensions differ");
    }
    rho_ = spec.volume_ratio();
    vol_q_ = hole.cube.volume();
    vol_v_ = hole.strip.volume();
  }

  LevelMasses level(int n, std::uint64_t budget) {
    if (n < 0) throw InvalidParameter("level must be nonnegative");
    std::vector<Scalar> rho_pow{Scalar(1)};
    for (int i = 1; i <= n; ++i) rho_pow.push_back(rho_pow.back() * rho_);
    LevelMasses out;
    struct Node {
      Box box;
      int m;
    };
    std::vector<Node> stack{{Box::unit(spec_.dim()), 0}};
    const int d = spec_.dim();
    while (!stack.empty()) {
      Node node = std::move(stack.back());
      stack.pop_back();
      if (++out.nodes > budget) {
        throw EnumerationBudget("mass descent", out.nodes, budget);
      }
      if (auto c = single_cell(node.box)) {
        const Scalar e = density(*c) * node.box.volume() *
                         rho_pow[static_cast<std::size_t>(n - node.m)];
        out.G += e * vol_q_;
        out.V += e * vol_v_;
        out.E += e;
        continue;
      }
      if (node.m == n) {
        ++out.leaves;
        out.E += mass(mu_, node.box);
        leaf(node.box, n, out.G, out.V);
        continue;
      }
      for (const auto& dg : spec_.digits()) {
        std::vector<Interval> axes;
        for (int k = 0; k < d; ++k) {
          const Interval& iv = node.box[k];
          const Scalar len = iv.length();
          const Scalar lo = iv.lo + len * spec_.offset(k, dg[k]);
          axes.push_back({lo, lo + len * spec_.ratio(k, dg[k])});
        }
        stack.push_back({Box(std::move(axes)), node.m + 1});
      }
    }
    const Scalar& t = mu_.total();
    out.E /= t;
    out.G /= t;
    out.V /= t;
    return out;
  }

  // Adds the raw masses of G(R) and of the strips over R.
  void leaf(const Box& R, int n, Scalar& G, Scalar& V) {
    if (spec_.kind() == SystemKind::kCarpet) {
      carpet_leaf(R, G, V);
    } else {
      sponge_leaf(R, n, G, V);
    }
  }

 private:
  Scalar density(const std::vector<std::size_t>& idx) const {
    return mu_.weight(idx) / part_.cell(idx).volume();
  }

  std::optional<std::size_t> single_cell(int k, const Interval& iv) const {
    const std::size_t c = part_.locate(k, iv.lo);
    if (iv.hi <= part_.breakpoints(k)[c + 1]) return c;
    return std::nullopt;
  }

  std::optional<std::vector<std::size_t>> single_cell(const Box& b) const {
    std::vector<std::size_t> idx;
    for (int k = 0; k < b.dim(); ++k) {
      auto c = single_cell(k, b[k]);
      if (!c) return std::nullopt;
      idx.push_back(*c);
    }
    return idx;
  }

  Window window(int k, const Interval& iv) const {
    Window w;
    w.c0 = part_.locate(k, iv.lo);
    std::size_t c1 = part_.locate(k, iv.hi);
    if (c1 > w.c0 && part_.breakpoints(k)[c1] == iv.hi) --c1;
    w.v.assign(c1 - w.c0 + 1, Scalar(0));
    return w;
  }

  void add_interval(int k, const Interval& h, Window& w) {
    const std::size_t first = mu_.axis_fractions(k, h, tmp_);
    for (std::size_t i = 0; i < tmp_.size(); ++i) w.v[first + i - w.c0] += tmp_[i];
  }

  void add_bulk(int k, std::size_t c, const Scalar& len, Window& w) {
    w.v[c - w.c0] += len / part_.cell_interval(k, c).length();
  }

  static Interval place(const Interval& iv, const Interval& t) {
    const Scalar len = iv.length();
    return {iv.lo + len * t.lo, iv.lo + len * t.hi};
  }

  // Holes `t` placed in every depth-r subinterval of `iv` along axis k.
  void subdivided(int k, const Interval& iv, int r, const Interval& t, Window& w) {
    if (r == 0) {
      add_interval(k, place(iv, t), w);
      return;
    }
    if (auto c = single_cell(k, iv)) {
      add_bulk(k, *c, iv.length() * t.length(), w);
      return;
    }
    const Scalar len = iv.length();
    for (std::size_t j = 0; j < spec_.count(k); ++j) {
      const int jj = static_cast<int>(j);
      const Scalar lo = iv.lo + len * spec_.offset(k, jj);
      subdivided(k, {lo, lo + len * spec_.ratio(k, jj)}, r - 1, t, w);
    }
  }

  // Lengths of the cover pieces below an interval of length `len`, by depth.
  const std::vector<Scalar>& depth_lengths(int k, const Scalar& len,
                                           const Scalar& short_len) {
    auto key = std::make_pair(len, short_len);
    auto& memo = hist_[k];
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Scalar> h;
    if (spec_.min_ratio(k) * len < short_len) {
      h.push_back(len);
    } else {
      for (std::size_t j = 0; j < spec_.count(k); ++j) {
        const auto sub =
            depth_lengths(k, len * spec_.ratio(k, static_cast<int>(j)), short_len);
        if (h.size() < sub.size() + 1) h.resize(sub.size() + 1);
        for (std::size_t t = 0; t < sub.size(); ++t) h[t + 1] += sub[t];
      }
    }
    return memo.emplace(std::move(key), std::move(h)).first->second;
  }

  // Walks the width-matched cover of iv along the cover axis k, grouping
  // hole fractions by piece depth.
  void cover_walk(int k, const Interval& iv, int depth, const Scalar& short_len,
                  const Interval& t, const Interval& side,
                  std::map<int, Window>& groups) {
    auto group = [&](int g) -> Window& {
      auto it = groups.find(g);
      if (it == groups.end()) it = groups.emplace(g, window(k, side)).first;
      return it->second;
    };
    const Scalar len = iv.length();
    if (spec_.min_ratio(k) * len < short_len) {
      add_interval(k, place(iv, t), group(depth));
      return;
    }
    if (auto c = single_cell(k, iv)) {
      const auto& h = depth_lengths(k, len, short_len);
      for (std::size_t r = 0; r < h.size(); ++r) {
        if (sgn(h[r]) == 0) continue;
        add_bulk(k, *c, h[r] * t.length(), group(depth + static_cast<int>(r)));
      }
      return;
    }
    for (std::size_t j = 0; j < spec_.count(k); ++j) {
      const int jj = static_cast<int>(j);
      const Scalar lo = iv.lo + len * spec_.offset(k, jj);
      cover_walk(k, {lo, lo + len * spec_.ratio(k, jj)}, depth + 1, short_len, t,
                 side, groups);
    }
  }

  Scalar bilinear(const Window& x, const Window& y) const {
    const std::size_t n0 = part_.cells(0);
    Scalar total(0);
    for (std::size_t j = 0; j < y.v.size(); ++j) {
      if (sgn(y.v[j]) == 0) continue;
      Scalar row(0);
      const std::size_t base = (y.c0 + j) * n0 + x.c0;
      for (std::size_t i = 0; i < x.v.size(); ++i) {
        if (sgn(x.v[i]) == 0) continue;
        row += mu_.weight(base + i) * x.v[i];
      }
      total += row * y.v[j];
    }
    return total;
  }

  Scalar trilinear(const Window& x, const Window& y, const Window& z) const {
    const std::size_t n0 = part_.cells(0), n1 = part_.cells(1);
    Scalar total(0);
    for (std::size_t l = 0; l < z.v.size(); ++l) {
      if (sgn(z.v[l]) == 0) continue;
      Scalar layer(0);
      for (std::size_t j = 0; j < y.v.size(); ++j) {
        if (sgn(y.v[j]) == 0) continue;
        Scalar row(0);
        const std::size_t base = ((z.c0 + l) * n1 + y.c0 + j) * n0 + x.c0;
        for (std::size_t i = 0; i < x.v.size(); ++i) {
          if (sgn(x.v[i]) == 0) continue;
          row += mu_.weight(base + i) * x.v[i];
        }
        layer += row * y.v[j];
      }
      total += layer * z.v[l];
    }
    return total;
  }

  void carpet_leaf(const Box& R, Scalar& G, Scalar& V) {
    const int ax = R.side(0) >= R.side(1) ? 0 : 1;
    const int s = 1 - ax;
    const Scalar short_len = R.side(s);
    std::map<int, Window> groups;
    cover_walk(ax, R[ax], 0, short_len, hole_.cube[ax], R[ax], groups);
    Window full = window(s, R[s]);
    add_interval(s, R[s], full);
    for (const auto& [depth, wx] : groups) {
      Window wy = window(s, R[s]);
      subdivided(s, R[s], depth, hole_.cube[s], wy);
      if (ax == 0) {
        G += bilinear(wx, wy);
        V += bilinear(wx, full);
      } else {
        G += bilinear(wy, wx);
        V += bilinear(full, wx);
      }
    }
  }

  void sponge_leaf(const Box& R, int n, Scalar& G, Scalar& V) {
    const int m = sponge_depth(spec_, n);
    std::array<Window, 3> w;
    for (int k = 0; k < 3; ++k) {
      w[k] = window(k, R[k]);
      subdivided(k, R[k], m, hole_.cube[k], w[k]);
    }
    G += trilinear(w[0], w[1], w[2]);
    Window wz = window(2, R[2]);
    subdivided(2, R[2], m, hole_.strip[2], wz);
    V += trilinear(w[0], w[1], wz);
  }

  const SystemSpec& spec_;
  const GridMeasure& mu_;
  const ProductPartition& part_;
  HoleTemplate hole_;
  Scalar rho_, vol_q_, vol_v_;
  std::vector<Scalar> tmp_;
  std::array<std::map<std::pair<Scalar, Scalar>, std::vector<Scalar>>, 3> hist_;
};

Json scalar_json(const Scalar& x) {
  return Json{{"exact", to_fraction_string(x)}, {"decimal", to_decimal_string(x, 12)}};
}

}  // namespace

std::optional<Scalar> ExactPower::exact() const {
  if (!is_integer(exponent)) return std::nullopt;
  const BigInt e = floor(exponent);
  if (!e.fits_slong_p() || std::abs(e.get_si()) > kMaxExpand) return std::nullopt;
  return coefficient * pow(base, e.get_si());
}

double ExactPower::log2() const {
  return carpetlab::log2(coefficient) + to_double(exponent) * carpetlab::log2(base);
}

std::string ExactPower::to_string() const {
  if (auto v = exact()) return to_fraction_string(*v);
  return to_fraction_string(coefficient) + " * (" + to_fraction_string(base) +
         ")^(" + to_fraction_string(exponent) + ")";
}

bool at_most(const ExactPower& p, const Scalar& x) {
  if (auto v = p.exact()) return *v <= x;
  if (sgn(x) <= 0) return false;
  return p.log2() <= log2(x);
}

ExactPower lemma32_constant(const Scalar& a, int d, const Scalar& A) {
  if (sgn(a) <= 0 || a > 1) throw InvalidParameter("need 0 < a <= 1");
  if (A < 1) throw InvalidParameter("need A >= 1");
  if (d < 1 || d > kMaxDim) throw InvalidParameter("dimension must be 1, 2 or 3");
  ExactPower p;
  p.coefficient = pow(Scalar(a / 4), d);
  p.base = A;
  p.exponent = -pow(Scalar(Scalar(4) / a), d);
  return p;
}

Scalar strip_constant(const Scalar& a, const Scalar& D_ball) {
  if (sgn(a) <= 0 || a > 1) throw InvalidParameter("need 0 < a <= 1");
  if (D_ball < 1) throw InvalidParameter("ball-doubling constant must be >= 1");
  return pow(D_ball, ceil_log2(Scalar(Scalar(2) / a)));
}

BallLayout ball_count(const Scalar& lambda1, const Scalar& lambda2) {
  if (sgn(lambda2) <= 0 || lambda1 < lambda2) {
    throw InvalidParameter("need lambda1 >= lambda2 > 0");
  }
  BallLayout b;
  const BigInt c = floor(lambda1 / lambda2);
  if (!c.fits_slong_p() || c > 10'000'000) {
    throw InvalidParameter("too many balls to lay out");
  }
  b.count = c.get_si();
  b.radius = lambda2 / 2;
  for (long i = 0; i < b.count; ++i) b.centers.push_back(lambda2 * i + b.radius);
  return b;
}

Scalar ball_doubling_constant(const GridMeasure& mu, int levels) {
  int L = levels;
  if (L <= 0) {
    L = 8;
    const std::size_t n = mu.uniform_cells();
    if (n >= 2 && (n & (n - 1)) == 0) {
      int g = 0;
      while ((std::size_t{1} << g) < n) ++g;
      L = std::min(L, g);
    } else {
      L = 4;
    }
    while (L > 1 && std::pow(2.0, mu.dim() * L) > 1e5) --L;
  }
  Scalar best(1);
  for (int i = 1; i <= L; ++i) {
    best = std::max(best, doubling_constant(mu, make_scalar(1, 1L << i)));
  }
  return best;
}

LevelMasses level_masses(const SystemSpec& spec, const GridMeasure& mu,
                         const HoleTemplate& hole, int n, std::uint64_t budget) {
  MassEngine engine(spec, mu, hole);
  return engine.level(n, budget);
}

HoleInequality verify_hole_inequality(const SystemSpec& spec,
                                      const GridMeasure& mu, const Word& r_word,
                                      const HoleTemplate& hole,
                                      std::optional<Scalar> D_ball) {
  const Box R = apply_word(spec, r_word).image_of_unit();
  const Scalar mr = mass(mu, R);
  if (sgn(mr) == 0) throw DegenerateMass("R = " + R.to_string() + " has zero mass");
  MassEngine engine(spec, mu, hole);
  Scalar G(0), V(0);
  engine.leaf(R, static_cast<int>(r_word.size()), G, V);
  HoleInequality h;
  h.ratio = G / mr;
  h.c2 = V / mr;
  h.pass = sgn(h.ratio) > 0;
  if (D_ball) {
    h.floor = h.c2 / strip_constant(hole.cube.side(0), *D_ball);
    h.floor_ok = *h.floor <= h.ratio;
  }
  return h;
}

ThinnessCertificate thinness_certificate(const SystemSpec& spec,
                                         const GridMeasure& mu, int K, int n1,
                                         const CertificateOptions& options) {
  if (K < 1) throw InvalidParameter("need at least one epoch");
  const HarvestSchedule sched = harvest_schedule(spec, K, n1, options.schedule);
  MassEngine engine(spec, mu, sched.hole);

  ThinnessCertificate cert;
  cert.spec_id = spec.describe();
  cert.measure_id = options.measure_id;
  cert.K = K;
  cert.levels = sched.levels();
  cert.disjointness = sched.disjointness;
  cert.disjoint = sched.disjointness.verified;
  cert.hole_side = sched.hole.cube.side(0);
  cert.D_ball = options.D_ball;
  if (options.D_ball) cert.strip_A = strip_constant(cert.hole_side, *options.D_ball);

  bool positive = true;
  for (int level : cert.levels) {
    const LevelMasses lm = engine.level(level, options.budget);
    if (sgn(lm.E) == 0) {
      throw DegenerateMass("E_" + std::to_string(level) + " has zero mass");
    }
    EpochCertificate ep;
    ep.level = level;
    ep.mass_E = lm.E;
    ep.mass_G = lm.G;
    ep.c = lm.G / lm.E;
    ep.c2 = lm.V / lm.E;
    if (cert.strip_A) {
      ep.floor = ep.c2 / *cert.strip_A;
      ep.floor_ok = *ep.floor <= ep.c;
    }
    positive = positive && sgn(ep.c) > 0;
    cert.harvest_total += lm.G;
    cert.epochs.push_back(std::move(ep));
  }
  cert.c_min = cert.epochs.front().c;
  for (const auto& ep : cert.epochs) cert.c_min = std::min(cert.c_min, ep.c);
  cert.mass_final = cert.epochs.back().mass_E;
  cert.sum_ok = cert.harvest_total <= 1;
  if (sgn(cert.c_min) > 0) {
    cert.bound = Scalar(1) / (cert.c_min * K);
    cert.bound_ok = cert.mass_final <= cert.bound;
  }
  if (options.isotropy_A) {
    cert.hole_bound_c1 = lemma32_constant(cert.hole_side, spec.dim(), *options.isotropy_A);
    cert.hole_bound_c1_ok = at_most(*cert.hole_bound_c1, cert.c_min);
  }
  cert.valid = cert.disjoint && positive && cert.sum_ok && cert.bound_ok;
  return cert;
}

std::string certificate_to_json(const ThinnessCertificate& cert) {
  Json j;
  j["spec"] = cert.spec_id;
  j["measure"] = cert.measure_id;
  j["epochs_used"] = cert.K;
  j["levels"] = cert.levels;
  Json eps = Json::array();
  for (const auto& ep : cert.epochs) {
    Json e{{"level", ep.level},
           {"mass_E", scalar_json(ep.mass_E)},
           {"mass_G", scalar_json(ep.mass_G)},
           {"c", scalar_json(ep.c)},
           {"c2", scalar_json(ep.c2)}};
    if (ep.floor) {
      e["floor"] = scalar_json(*ep.floor);
      e["floor_ok"] = ep.floor_ok;
    }
    eps.push_back(std::move(e));
  }
  j["epochs"] = std::move(eps);
  j["c_min"] = scalar_json(cert.c_min);
  j["bound"] = scalar_json(cert.bound);
  j["mass_final"] = scalar_json(cert.mass_final);
  j["harvest_total"] = scalar_json(cert.harvest_total);
  j["disjoint"] = cert.disjoint;
  j["disjointness_method"] = cert.disjointness.method;
  j["sum_ok"] = cert.sum_ok;
  j["bound_ok"] = cert.bound_ok;
  j["valid"] = cert.valid;
  j["hole_side"] = scalar_json(cert.hole_side);
  if (cert.D_ball) j["D_ball"] = scalar_json(*cert.D_ball);
  if (cert.strip_A) j["strip_constant"] = scalar_json(*cert.strip_A);
  if (cert.hole_bound_c1) {
    j["hole_bound_c1"] = {{"form", cert.hole_bound_c1->to_string()},
                     {"log2", cert.hole_bound_c1->log2()},
                     {"below_c_min", cert.hole_bound_c1_ok}};
  }
  return j.dump(2);
}

StripSoundness strip_soundness(const GridMeasure& mu, const Scalar& a,
                               const Scalar& D_ball, std::size_t samples,
                               std::uint64_t seed) {
  const int d = mu.dim();
  if (d < 2) throw InvalidParameter("strips need d >= 2");
  StripSoundness out;
  out.bound = strip_constant(a, D_ball);
  constexpr long kGrid = 64;
  std::mt19937_64 rng(seed);
  auto grid_point = [&](const Scalar& hi) {
    // Uniform multiple of 1/kGrid in [0, hi].
    const long top = floor(hi * kGrid).get_si();
    return make_scalar(static_cast<long>(rng() % static_cast<std::uint64_t>(top + 1)), kGrid);
  };
  for (std::size_t t = 0; t < samples; ++t) {
    std::vector<Scalar> lam;
    for (int k = 0; k < d; ++k) {
      lam.push_back(make_scalar(1 + static_cast<long>(rng() % kGrid), kGrid));
    }
    std::sort(lam.begin(), lam.end(), std::greater<>());
    std::vector<Interval> q, fq, fv;
    for (int k = 0; k < d; ++k) {
      const Scalar shift = grid_point(Scalar(1) - lam[k]);
      const Scalar lo = grid_point(Scalar(1) - a);
      q.push_back({lo, lo + a});
      fq.push_back({shift + lam[k] * lo, shift + lam[k] * (lo + a)});
      fv.push_back(k == 0 ? fq.back() : Interval{shift, shift + lam[k]});
    }
    const Scalar mq = mass(mu, Box(fq)), mv = mass(mu, Box(fv));
    ++out.samples;
    if (sgn(mq) == 0) {
      if (sgn(mv) > 0) ++out.failures;
      continue;
    }
    const Scalar r = mv / mq;
    out.worst_ratio = std::max(out.worst_ratio, r);
    if (r > out.bound) ++out.failures;
  }
  return out;
}

}  // namespace carpetlab
