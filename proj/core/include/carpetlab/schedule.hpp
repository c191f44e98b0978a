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

#ifndef CARPETLAB_SCHEDULE_HPP_
#define CARPETLAB_SCHEDULE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carpetlab/errors.hpp"
#include "carpetlab/geometry.hpp"
#include "carpetlab/systems.hpp"

namespace carpetlab {

// Distinct box shapes of E_n with multiplicities.
using ShapeCensus = std::map<std::vector<Scalar>, BigInt>;
ShapeCensus shape_census(const SystemSpec& spec, int n);

struct EpochHarvest {
  int level = 0;
  int ntilde = 0;     // max N(R) over R in E_level (n(R) for sponges)
  int max_depth = 0;  // deepest sub-rectangle below R used by a hole
  BigInt boxes;       // |E_level|
  BigInt holes;       // |G_level|
  std::optional<std::vector<Box>> harvest;  // present when within budget
};

struct DisjointnessReport {
  bool verified = false;
  bool structural = false;    // level-gap argument holds for every epoch
  bool explicit_ok = true;    // every exact check run came back clean
  std::size_t holes_checked = 0;   // materialized holes tested against E_n
  std::size_t pairs_checked = 0;   // hole pairs compared directly
  std::optional<int> min_slack;    // min_k n_{k+1} - (n_k + max_depth_k + 1)
  std::optional<int> min_constant; // smallest c keeping n_k + ntilde_k + c safe
  std::string method;
};

struct HarvestSchedule {
  SystemSpec spec;
  HoleTemplate hole;
  std::vector<EpochHarvest> epochs;
  DisjointnessReport disjointness;

  std::vector<int> levels() const;
};

struct ScheduleOptions {
  std::uint64_t budget = kDefaultBudget;
  // Throw instead of recording counts when an epoch cannot be materialized.
  bool require_explicit = false;
  // Compare materialized harvests box against box when the pair count is
  // at most this.
  std::uint64_t pairwise_limit = 20'000'000;
};

class ScheduleBudgetExceeded : public EnumerationBudget {
 public:
  ScheduleBudgetExceeded(const std::string& what, std::uint64_t requested,
                         std::uint64_t budget, HarvestSchedule partial)
      : EnumerationBudget(what, requested, budget),
        partial_(std::make_shared<HarvestSchedule>(std::move(partial))) {}

  const HarvestSchedule& partial() const { return *partial_; }

 private:
  std::shared_ptr<const HarvestSchedule> partial_;
};

HarvestSchedule harvest_schedule(const SystemSpec& spec, int K, int n1 = 1,
                                 const ScheduleOptions& options = {});

// True when some box of E_m has interior meeting the interior of `box`.
bool box_meets_level(const SystemSpec& spec, const Box& box, int m);

// True when no box of `a` has interior meeting a box of `b`.
bool interiors_disjoint(const std::vector<Box>& a, const std::vector<Box>& b,
                        std::size_t* comparisons = nullptr);

}  // namespace carpetlab

#endif  // CARPETLAB_SCHEDULE_HPP_
