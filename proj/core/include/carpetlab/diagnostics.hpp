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

#ifndef CARPETLAB_DIAGNOSTICS_HPP_
#define CARPETLAB_DIAGNOSTICS_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "carpetlab/measure.hpp"

namespace carpetlab {

// max over aligned cubes Q of side r of mass(2Q ∩ [0,1]^d) / mass(Q).
Scalar doubling_constant(const GridMeasure& mu, const Scalar& r);

struct OctaveStats {
  int gap = 0;       // Q1 is `gap` dyadic generations below Q2
  Scalar min_ratio;  // exact extremes of mass(Q1)/mass(Q2)
  Scalar max_ratio;
};

struct DoublingProfile {
  std::vector<Scalar> scales;     // r = 2^-i
  std::vector<Scalar> constants;  // doubling_constant at each scale
  Scalar C;                       // max of `constants`
  std::vector<OctaveStats> octaves;
  double alpha = 0;    // upper envelope exponent
  double beta = 0;     // lower envelope exponent
  double c_upper = 0;  // ratio <= c_upper * (side ratio)^alpha
  double c_lower = 0;  // ratio >= (side ratio)^beta / c_lower
  double beta_cert = 0;  // log2(C^2)
  bool converged = false;
  // min ratio at gap k is >= C^{-2k} for every k, checked exactly.
  bool certified_direction = false;
  std::uint64_t pairs = 0;
};

// Nested aligned dyadic cube pairs over `octaves` generations (0 picks
// the finest dyadic level the grid supports, capped so the finest level
// has at most 1e5 cubes, and at least 3).
DoublingProfile empirical_exponents(const GridMeasure& mu, int octaves = 0);

struct IsotropyProfile {
  Scalar A{1};
  std::vector<std::vector<Scalar>> shapes;  // shapes examined
  std::uint64_t pairs = 0;
  bool exhaustive = true;
  std::optional<std::pair<Box, Box>> worst;
};

// Congruent pairs: translates of `sides` and of its axis permutations with
// nonempty intersection. Positions run over partition breakpoints.
IsotropyProfile isotropy_constant(const GridMeasure& mu,
                                  const std::vector<Scalar>& sides,
                                  std::size_t samples = 100000,
                                  std::uint64_t seed = 0);

// Maximum over every cell-aligned shape of a uniform grid.
IsotropyProfile isotropy_constant_all(const GridMeasure& mu);

struct ChainVerdict {
  long m = 0;
  Scalar ratio;
  bool pass = false;
};

// m = floor(dist / diam) + 1 computed exactly; checks A^-m <= ratio <= A^m.
ChainVerdict chain_ratio_bound(const GridMeasure& mu, const Box& r1,
                               const Box& r2, const Scalar& A);

struct ChainSweep {
  std::uint64_t pairs = 0;
  std::uint64_t exact_checks = 0;
  std::uint64_t failures = 0;
  std::uint64_t translate_failures = 0;  // failures among same-shape pairs
  double worst_exponent = 0;  // max log(ratio) / (m log A)
  std::optional<std::pair<Box, Box>> worst;
  // Same sweep with m replaced by the translate-chain length
  // max_k ceil(|offset_k| / side_k) (same-shape pairs only).
  std::uint64_t lattice_failures = 0;
};

// Every ordered pair of cell-aligned congruent boxes on a uniform grid.
ChainSweep chain_bound_sweep(const GridMeasure& mu, const Scalar& A);

// Pushforward onto the face orthogonal to `axis`, divided by the uniform
// density; returns (min, max) at cell granularity.
std::pair<Scalar, Scalar> face_projection_ratio(const GridMeasure& mu,
                                                int axis);

struct SlabStats {
  double upper = 0;  // max mass(I×J) / (|I|^{d-1} |J|^alpha)
  double lower = 0;  // min mass(I×J) / (|I|^{d-1} |J|^beta)
  std::optional<Scalar> upper_exact;  // when both exponents are integers
  std::optional<Scalar> lower_exact;
  std::uint64_t pairs = 0;
};

// I runs over cell-aligned cubes of the first d-1 axes, J over cell-aligned
// intervals of the last axis.
SlabStats slab_ratio_stats(const GridMeasure& mu, double alpha, double beta);

// Continuous piecewise-linear function of the first coordinate.
struct PiecewiseLinear {
  std::vector<std::pair<Scalar, Scalar>> points;  // (x, f(x)), x from 0 to 1

  Scalar operator()(const Scalar& x) const;
  // Range of f over [lo, hi].
  Interval range(const Interval& x) const;
  void check() const;
};

inline constexpr std::uint64_t kGraphBudget = 1u << 22;

// Total mass of the dyadic level-n cover of the graph of f by I × I'.
Scalar graph_cover_mass(const GridMeasure& mu, const PiecewiseLinear& f, int n,
                        std::uint64_t budget = kGraphBudget);

struct HomogeneityProfile {
  Scalar s;
  double C = 0;
  std::optional<Scalar> C_exact;  // when s is an integer
};

HomogeneityProfile homogeneity_constant(const GridMeasure& mu, const Scalar& s,
                                        const std::vector<Scalar>& scales);

}  // namespace carpetlab

#endif  // CARPETLAB_DIAGNOSTICS_HPP_
