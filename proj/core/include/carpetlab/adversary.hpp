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


#ifndef CARPETLAB_ADVERSARY_HPP_
#define CARPETLAB_ADVERSARY_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "carpetlab/systems.hpp"

namespace carpetlab {

// Maximize the weight on the target cells over normalized cell weights of
// the full level-n grid with w_i <= tau * w_j for face-adjacent cells.
struct RatioProgram {
  int level = 0;
  int dim = 1;
  std::array<std::size_t, kMaxDim> shape{1, 1, 1};  // cells per axis
  std::size_t cells = 0;
  std::vector<bool> target;
  Scalar tau{1};
  std::vector<std::pair<std::size_t, std::size_t>> constraints;  // w_i <= tau w_j

  std::size_t target_count() const;
  std::size_t flat(const std::array<std::size_t, kMaxDim>& idx) const;
};

RatioProgram build_program(const LevelSet& level_set, const Scalar& tau,
                           std::uint64_t budget = kDefaultBudget);

// Program on an explicit grid, target given by flat indices.
RatioProgram grid_program(const std::vector<std::size_t>& shape,
                          const std::vector<std::size_t>& target,
                          const Scalar& tau);

enum class SolverKind { kExact, kIterative };
std::string to_string(SolverKind k);

struct AdversarySolution {
  SolverKind kind = SolverKind::kExact;
  Scalar value;
  double value_approx = 0;
  // Optimal weights are tau^potential / total.
  std::vector<long> potentials;
  std::vector<Scalar> weights;
  std::size_t iterations = 0;
  double residual = 0;      // worst relative violation of a ratio constraint
  double gap_estimate = 0;  // unsaturated supply share at the last step
  bool converged = true;
};

inline constexpr std::size_t kExactCellBudget = 5000;

AdversarySolution solve_exact(const RatioProgram& program,
                              std::size_t cell_budget = kExactCellBudget);

AdversarySolution solve_iterative(const RatioProgram& program,
                                  std::size_t max_iters = 10000,
                                  double tolerance = 1e-9);

struct DecayPoint {
  int level = 0;
  Scalar value;
  double value_approx = 0;
  SolverKind kind = SolverKind::kExact;
  std::size_t cells = 0;
  bool converged = true;
  // Versus the previous level in the list:
  bool non_increasing = true;
  bool coarsening_feasible = false;  // coarsened optimum obeys the coarse constraints
  Scalar induced_doubling;  // aligned doubling constant of the optimum, 2 cells
};

struct DecayCurve {
  std::vector<DecayPoint> points;
  double rate = 0;  // exp of the fitted slope of log v against n
  bool strictly_decreasing = false;
};

struct DecayOptions {
  std::size_t exact_budget = kExactCellBudget;
  std::size_t max_iters = 10000;
  double tolerance = 1e-9;
  std::uint64_t budget = kDefaultBudget;
  bool force_iterative = false;
};

DecayCurve decay_curve(const SystemSpec& spec, const Scalar& tau,
                       const std::vector<int>& levels,
                       const DecayOptions& options = {});

// CPLEX LP text; tau = P/Q enters as Q w_i - P w_j <= 0.
std::string export_lp(const RatioProgram& program);

// Lines "<variable> <value>" with variables w0, w1, ...; '#' and '\'
// start comments.
std::vector<Scalar> import_solution(const RatioProgram& program,
                                    const std::string& text);

struct SolutionCheck {
  bool feasible = false;
  Scalar value;
  Scalar total;
  double residual = 0;
};

SolutionCheck verify_solution(const RatioProgram& program,
                              const std::vector<Scalar>& weights,
                              double tolerance = 0);

}  // namespace carpetlab

#endif  // CARPETLAB_ADVERSARY_HPP_
