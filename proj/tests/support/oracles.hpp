// Slow reference implementations used to cross-check the library. They
// share no code with it beyond the value types.

#ifndef CARPETLAB_TESTS_ORACLES_HPP_
#define CARPETLAB_TESTS_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "carpetlab/adversary.hpp"
#include "carpetlab/geometry.hpp"
#include "carpetlab/measure.hpp"
#include "carpetlab/systems.hpp"

namespace oracle {

using carpetlab::Box;
using carpetlab::GridMeasure;
using carpetlab::Scalar;

inline Scalar q(long n, long d = 1) { return carpetlab::make_scalar(n, d); }

// Cell-by-cell overlap sum, clipped to the unit cube. Raw weights.
Scalar mass(const GridMeasure& mu, const Box& b);

// Fraction of a fine raster of `cell` covered by `box`.
double raster_overlap(const Box& box, const Box& cell, int steps);

// max over cubes [k r, (k+1) r]^d of mass(clip(2Q)) / mass(Q).
Scalar doubling(const GridMeasure& mu, const Scalar& r);

// Level-n boxes by direct recursion over the digit set.
std::vector<Box> level_boxes(const carpetlab::SystemSpec& spec, int n);

// Largest m >= 0 with u^-n <= p^-(n+m) < u^-(n-1), or -1.
int sponge_depth(int p, int u, int n);

// N(R) for a level-n carpet rectangle given by its sides: subdivide the long
// side until a_min |I| < short <= |I|. Returns the covering intervals'
// lengths relative to the long side.
std::vector<Scalar> cover_lengths(const std::vector<Scalar>& ratios,
                                  const Scalar& long_len, const Scalar& short_len);

// Optimum of a small ratio program by enumerating every vertex of the
// feasible polytope (cells <= 7 or so).
Scalar lp_vertex_max(const carpetlab::RatioProgram& p);

// Random feasible point: random positive weights pushed down until every
// ratio constraint holds. Returns target share.
double random_feasible_value(const carpetlab::RatioProgram& p, std::uint64_t seed);

// Breadth-first search over the lattice of translates of a (step = side)
// inside `region`; returns the number of boxes on a shortest chain.
std::optional<std::size_t> lattice_chain_length(const Box& region, const Box& a,
                                                const Box& b);

// Seeded random Baránski spec with at most `max_count` columns and rows and
// ratio denominators at most 12; at least one cell excluded.
carpetlab::SystemSpec random_baranski(std::uint64_t seed, int max_count = 4);

}  // namespace oracle

#endif  // CARPETLAB_TESTS_ORACLES_HPP_
