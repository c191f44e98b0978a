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


#ifndef CARPETLAB_CERTIFICATION_HPP_
#define CARPETLAB_CERTIFICATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carpetlab/measure.hpp"
#include "carpetlab/schedule.hpp"
#include "carpetlab/systems.hpp"

namespace carpetlab {

// coefficient * base^exponent, kept symbolic when the exponent is not an
// integer or is too large to expand.
struct ExactPower {
  Scalar coefficient{1};
  Scalar base{1};
  Scalar exponent{0};

  std::optional<Scalar> exact() const;
  double log2() const;
  std::string to_string() const;
};

// Numeric comparison; exact whenever `p` expands.
bool at_most(const ExactPower& p, const Scalar& x);

// (a/4)^d * A^{-(4/a)^d}.
ExactPower lemma32_constant(const Scalar& a, int d, const Scalar& A);

// D_ball^{ceil(log2(2/a))}.
Scalar strip_constant(const Scalar& a, const Scalar& D_ball);

struct BallLayout {
  long count = 0;
  std::vector<Scalar> centers;  // along the long side, from its left end
  Scalar radius;
};

BallLayout ball_count(const Scalar& lambda1, const Scalar& lambda2);

// Largest aligned-cube doubling constant over the dyadic scales 2^-1 ..
// 2^-levels (0: down to the grid resolution, at most 2^-8). Used as the
// ball-doubling constant, balls being realized as cubes.
Scalar ball_doubling_constant(const GridMeasure& mu, int levels = 0);

// Masses of E_n, of the harvest G_n and of the strip union over E_n.
struct LevelMasses {
  Scalar E;
  Scalar G;
  Scalar V;
  std::uint64_t nodes = 0;   // tree nodes visited
  std::uint64_t leaves = 0;  // level-n boxes evaluated cell by cell
};

// Normalized by the total mass of the measure.
LevelMasses level_masses(const SystemSpec& spec, const GridMeasure& mu,
                         const HoleTemplate& hole, int n,
                         std::uint64_t budget = kDefaultBudget);

struct HoleInequality {
  Scalar ratio;  // mass(G(R)) / mass(R)
  bool pass = false;
  Scalar c2;     // mass of the strips over R / mass(R)
  std::optional<Scalar> floor;  // c2 / strip_constant(side(Q), D_ball)
  bool floor_ok = true;
};

HoleInequality verify_hole_inequality(const SystemSpec& spec,
                                      const GridMeasure& mu, const Word& r_word,
                                      const HoleTemplate& hole,
                                      std::optional<Scalar> D_ball = {});

struct EpochCertificate {
  int level = 0;
  Scalar mass_E;
  Scalar mass_G;
  Scalar c;   // mass_G / mass_E
  Scalar c2;  // strip mass / mass_E
  std::optional<Scalar> floor;
  bool floor_ok = true;
};

struct ThinnessCertificate {
  std::string spec_id;
  std::string measure_id;
  int K = 0;
  std::vector<int> levels;
  std::vector<EpochCertificate> epochs;
  Scalar c_min;
  Scalar bound;       // 1 / (c_min K)
  Scalar mass_final;  // mass(E_{n_K})
  Scalar harvest_total;  // sum of mass(G_{n_k})
  bool disjoint = false;
  bool sum_ok = false;    // harvest_total <= 1
  bool bound_ok = false;  // mass_final <= bound
  bool valid = false;
  Scalar hole_side;
  std::optional<Scalar> D_ball;
  std::optional<Scalar> strip_A;  // strip_constant(hole_side, D_ball)
  std::optional<ExactPower> hole_bound_c1;
  bool hole_bound_c1_ok = true;  // hole_bound_c1 <= c_min
  DisjointnessReport disjointness;
};

struct CertificateOptions {
  ScheduleOptions schedule;
  std::string measure_id = "measure";
  std::optional<Scalar> D_ball;
  std::optional<Scalar> isotropy_A;  // enables the closed-form hole constant
  std::uint64_t budget = kDefaultBudget;  // tree nodes per epoch
};

ThinnessCertificate thinness_certificate(const SystemSpec& spec,
                                         const GridMeasure& mu, int K,
                                         int n1 = 1,
                                         const CertificateOptions& options = {});

std::string certificate_to_json(const ThinnessCertificate& cert);

struct StripSoundness {
  std::size_t samples = 0;
  std::size_t failures = 0;
  Scalar bound;
  Scalar worst_ratio;  // max mass(f(V_Q)) / mass(f(Q))
};

// Random diagonal maps f with decreasing scalings and random cubes Q of
// side a; checks mass(f(V_Q)) <= strip_constant(a, D_ball) mass(f(Q)).
StripSoundness strip_soundness(const GridMeasure& mu, const Scalar& a,
                               const Scalar& D_ball, std::size_t samples,
                               std::uint64_t seed);

}  // namespace carpetlab

#endif  // CARPETLAB_CERTIFICATION_HPP_
