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

#include "carpetlab/measure.hpp"

#include <algorithm>
#include <random>

#include "carpetlab/errors.hpp"
#include "json.hpp"

namespace carpetlab {
namespace {

using Json = nlohmann::json;

// Sum over the index box described by per-axis fraction vectors.
Scalar weighted_sum(const GridMeasure& mu,
                    const std::vector<std::vector<Scalar>>& frac,
                    const std::vector<std::size_t>& first) {
  const int d = mu.dim();
  for (int k = 0; k < d; ++k) {
    if (frac[k].empty()) return Scalar(0);
  }
  const auto& part = mu.partition();
  Scalar total(0);
  if (d == 1) {
    for (std::size_t i = 0; i < frac[0].size(); ++i) {
      total += mu.weight(first[0] + i) * frac[0][i];
    }
    return total;
  }
  const std::size_t n0 = part.cells(0);
  if (d == 2) {
    for (std::size_t j = 0; j < frac[1].size(); ++j) {
      Scalar row(0);
      const std::size_t base = (first[1] + j) * n0 + first[0];
      for (std::size_t i = 0; i < frac[0].size(); ++i) {
        row += mu.weight(base + i) * frac[0][i];
      }
      total += row * frac[1][j];
    }
    return total;
  }
  const std::size_t n1 = part.cells(1);
  for (std::size_t l = 0; l < frac[2].size(); ++l) {
    Scalar layer(0);
    for (std::size_t j = 0; j < frac[1].size(); ++j) {
      Scalar row(0);
      const std::size_t base = ((first[2] + l) * n1 + first[1] + j) * n0 + first[0];
      for (std::size_t i = 0; i < frac[0].size(); ++i) {
        row += mu.weight(base + i) * frac[0][i];
      }
      layer += row * frac[1][j];
    }
    total += layer * frac[2][l];
  }
  return total;
}

}  // namespace

GridMeasure::GridMeasure(ProductPartition partition, std::vector<Scalar> weights)
    : partition_(std::move(partition)), weights_(std::move(weights)) {
  if (weights_.size() != partition_.cell_count()) {
    throw DimensionMismatch("weight table size differs from the cell count");
  }
  total_ = 0;
  for (const auto& w : weights_) {
    if (sgn(w) < 0) throw InvalidParameter("weights must be nonnegative");
    total_ += w;
  }
  if (sgn(total_) <= 0) throw DegenerateMass("measure has zero total mass");
  uniform_ = partition_.cells(0);
  for (int k = 0; k < dim() && uniform_; ++k) {
    const std::size_t n = partition_.cells(k);
    if (n != uniform_) uniform_ = 0;
    for (std::size_t i = 0; i <= n && uniform_; ++i) {
      if (partition_.breakpoints(k)[i] !=
          make_scalar(static_cast<long>(i), static_cast<long>(n))) {
        uniform_ = 0;
      }
    }
  }
}

std::size_t GridMeasure::axis_fractions(int axis, const Interval& iv,
                                        std::vector<Scalar>& out) const {
  out.clear();
  const Scalar lo = std::max(iv.lo, Scalar(0));
  const Scalar hi = std::min(iv.hi, Scalar(1));
  if (!(lo < hi)) return 0;
  const std::size_t first = partition_.locate(axis, lo);
  const std::size_t n = partition_.cells(axis);
  for (std::size_t i = first; i < n; ++i) {
    const Interval cell = partition_.cell_interval(axis, i);
    if (!(cell.lo < hi)) break;
    const Scalar len = cell.length();
    const Scalar ov = Interval{lo, hi}.overlap(cell);
    out.push_back(ov == len ? Scalar(1) : Scalar(ov / len));
  }
  return first;
}

Scalar mass(const GridMeasure& mu, const Box& b) {
  if (b.dim() != mu.dim()) {
    throw DimensionMismatch("box dimension " + std::to_string(b.dim()) +
                            " vs measure dimension " + std::to_string(mu.dim()));
  }
  const int d = mu.dim();
  std::vector<std::vector<Scalar>> frac(static_cast<std::size_t>(d));
  std::vector<std::size_t> first(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    first[k] = mu.axis_fractions(k, b[k], frac[k]);
    if (frac[k].empty()) return Scalar(0);
  }
  return weighted_sum(mu, frac, first);
}

Scalar mass_reflected(const GridMeasure& mu, const Box& b) {
  if (b.dim() != mu.dim()) {
    throw DimensionMismatch("box and measure dimensions differ");
  }
  const int d = mu.dim();
  std::vector<std::vector<Scalar>> frac(static_cast<std::size_t>(d));
  std::vector<std::size_t> first(static_cast<std::size_t>(d), 0);
  for (int k = 0; k < d; ++k) {
    if (b[k].lo < -2 || b[k].hi > 3) {
      throw InvalidParameter("reflected extension covers [-2,3] only");
    }
    const std::size_t n = mu.partition().cells(k);
    frac[k].assign(n, Scalar(0));
    for (long m = -2; m < 3; ++m) {
      Interval piece{std::max(b[k].lo, Scalar(m)), std::min(b[k].hi, Scalar(m + 1))};
      if (!(piece.lo < piece.hi)) continue;
      Interval folded = (m % 2 == 0)
                            ? Interval{piece.lo - m, piece.hi - m}
                            : Interval{Scalar(m + 1) - piece.hi, Scalar(m + 1) - piece.lo};
      std::vector<Scalar> part;
      const std::size_t f = mu.axis_fractions(k, folded, part);
      for (std::size_t i = 0; i < part.size(); ++i) frac[k][f + i] += part[i];
    }
  }
  return weighted_sum(mu, frac, first);
}

GridMeasure lebesgue(int dim, int depth) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("dimension must be 1..3");
  if (depth < 0 || depth > 12) throw InvalidParameter("depth must be 0..12");
  const std::size_t n = std::size_t{1} << depth;
  ProductPartition part = ProductPartition::uniform(dim, n);
  const Scalar cell_vol = pow(Scalar(1, static_cast<unsigned long>(n)), dim);
  std::vector<Scalar> w(part.cell_count(), cell_vol);
  return GridMeasure(std::move(part), std::move(w));
}

std::string to_string(SplitPolicy p) {
  switch (p) {
    case SplitPolicy::kRandom:
      return "random";
    case SplitPolicy::kMaxLeft:
      return "max-left";
    case SplitPolicy::kAlternating:
      return "alternating";
  }
  return "unknown";
}

SplitPolicy parse_split_policy(const std::string& name) {
  if (name == "random") return SplitPolicy::kRandom;
  if (name == "max-left") return SplitPolicy::kMaxLeft;
  if (name == "alternating") return SplitPolicy::kAlternating;
  throw InvalidParameter("unknown split policy '" + name + "'");
}

GridMeasure gen_split_measure_1d(const SplitParams& params) {
  if (params.tau < 1) throw InvalidParameter("tau must be >= 1");
  if (params.depth < 0 || params.depth > 20) {
    throw InvalidParameter("depth must be 0..20");
  }
  if (params.grid_steps < 1) throw InvalidParameter("grid_steps must be >= 1");
  const Scalar lo = Scalar(1) / (1 + params.tau);
  const Scalar hi = params.tau / (1 + params.tau);
  std::mt19937_64 rng(params.seed);

  std::vector<Scalar> w{Scalar(1)};
  for (int level = 0; level < params.depth; ++level) {
    std::vector<Scalar> next;
    next.reserve(w.size() * 2);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Scalar t;
      switch (params.policy) {
        case SplitPolicy::kMaxLeft:
          t = hi;
          break;
        case SplitPolicy::kAlternating:
          t = ((static_cast<std::size_t>(level) + i) % 2 == 0) ? hi : lo;
          break;
        case SplitPolicy::kRandom: {
          const auto steps = static_cast<std::uint64_t>(params.grid_steps);
          const auto k = static_cast<long>(rng() % (steps + 1));
          t = lo + (hi - lo) * make_scalar(k, params.grid_steps);
          break;
        }
      }
      next.push_back(w[i] * t);
      next.push_back(w[i] * (1 - t));
    }
    w = std::move(next);
  }

  // Mix with the uniform weights just enough to bring every adjacent ratio
  // under tau; mixing preserves the child/parent fraction bounds.
  const Scalar u = Scalar(1) / static_cast<unsigned long>(w.size());
  Scalar theta(0);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      const Scalar& a = dir ? w[i + 1] : w[i];
      const Scalar& b = dir ? w[i] : w[i + 1];
      const Scalar g = a - params.tau * b;
      if (sgn(g) <= 0) continue;
      const Scalar h = (params.tau - 1) * u;
      theta = std::max(theta, Scalar(g / (g + h)));
    }
  }
  if (sgn(theta) > 0) {
    for (auto& x : w) x = (1 - theta) * x + theta * u;
  }
  ProductPartition part = ProductPartition::uniform(1, w.size());
  return GridMeasure(std::move(part), std::move(w));
}

GridMeasure product_measure(const std::vector<GridMeasure>& factors) {
  if (factors.empty() || factors.size() > kMaxDim) {
    throw InvalidFactorDimension("need 1 to 3 factors");
  }
  std::vector<std::vector<Scalar>> bp;
  for (const auto& f : factors) {
    if (f.dim() != 1) {
      throw InvalidFactorDimension("product factors must be one-dimensional");
    }
    bp.push_back(f.partition().breakpoints(0));
  }
  ProductPartition part(std::move(bp));
  std::vector<Scalar> w(part.cell_count());
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    const auto idx = part.unflatten(flat);
    Scalar v(1);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      v *= factors[k].weight(idx[k]);
    }
    w[flat] = v;
  }
  return GridMeasure(std::move(part), std::move(w));
}

Scalar max_adjacent_ratio(const GridMeasure& mu, bool* zero_neighbor) {
  const auto& part = mu.partition();
  Scalar best(1);
  bool zero = false;
  for (std::size_t flat = 0; flat < part.cell_count(); ++flat) {
    const auto idx = part.unflatten(flat);
    for (int k = 0; k < mu.dim(); ++k) {
      if (idx[k] + 1 >= part.cells(k)) continue;
      auto nidx = idx;
      ++nidx[k];
      const Scalar& a = mu.weight(flat);
      const Scalar& b = mu.weight(nidx);
      if (sgn(a) == 0 && sgn(b) == 0) continue;
      if (sgn(a) == 0 || sgn(b) == 0) {
        zero = true;
        continue;
      }
      best = std::max(best, std::max(Scalar(a / b), Scalar(b / a)));
    }
  }
  if (zero_neighbor) *zero_neighbor = zero;
  return best;
}

std::string measure_to_json(const GridMeasure& mu) {
  Json j;
  j["format"] = "carpetlab-measure";
  j["version"] = 1;
  j["dimension"] = mu.dim();
  Json bp = Json::array();
  for (int k = 0; k < mu.dim(); ++k) {
    Json axis = Json::array();
    for (const auto& x : mu.partition().breakpoints(k)) {
      axis.push_back(to_fraction_string(x));
    }
    bp.push_back(axis);
  }
  j["breakpoints"] = bp;
  Json w = Json::array();
  for (const auto& x : mu.weights()) w.push_back(to_fraction_string(x));
  j["weights"] = w;
  return j.dump(1);
}

GridMeasure measure_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("measure file is not valid JSON: ") + e.what());
  }
  try {
    for (const auto& [key, _] : j.items()) {
      if (key != "format" && key != "version" && key != "dimension" &&
          key != "breakpoints" && key != "weights") {
        throw ConfigError("unknown field '" + key + "' in measure file");
      }
    }
    if (j.at("format").get<std::string>() != "carpetlab-measure") {
      throw ConfigError("not a carpetlab measure file");
    }
    const int dim = j.at("dimension").get<int>();
    std::vector<std::vector<Scalar>> bp;
    for (const auto& axis : j.at("breakpoints")) {
      std::vector<Scalar> v;
      for (const auto& x : axis) v.push_back(parse_scalar(x.get<std::string>()));
      bp.push_back(std::move(v));
    }
    if (static_cast<int>(bp.size()) != dim) {
      throw ConfigError("breakpoint axes do not match the dimension");
    }
    std::vector<Scalar> w;
    for (const auto& x : j.at("weights")) w.push_back(parse_scalar(x.get<std::string>()));
    return GridMeasure(ProductPartition(std::move(bp)), std::move(w));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed measure file: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid measure file: ") + e.what());
  }
}

}  // namespace carpetlab
