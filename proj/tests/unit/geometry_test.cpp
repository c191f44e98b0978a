#include <gtest/gtest.h>

#include <random>

#include "carpetlab/errors.hpp"
#include "carpetlab/geometry.hpp"
#include "oracles.hpp"

namespace carpetlab {
namespace {

using oracle::q;

Box sq(const Scalar& a, const Scalar& b) { return Box{{a, b}, {a, b}}; }

TEST(OverlapFraction, Examples) {
  EXPECT_EQ(overlap_fraction(Box::unit(2), Box::unit(2)), 1);
  EXPECT_EQ(overlap_fraction(Box{{q(0), q(1, 2)}, {q(0), q(1)}}, Box::unit(2)), q(1, 2));
  EXPECT_EQ(overlap_fraction(sq(q(1, 4), q(3, 4)), sq(q(0), q(1, 2))), q(1, 4));
  EXPECT_THROW(overlap_fraction(Box::unit(2), Box::unit(3)), DimensionMismatch);
}

TEST(OverlapFraction, AgreesWithRaster) {
  // 1/4 with a 64-step raster hits no sample boundary.
  const double r = oracle::raster_overlap(sq(q(1, 4), q(3, 4)), sq(q(0), q(1, 2)), 64);
  EXPECT_NEAR(r, 0.25, 1e-12);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(0, 16);
  for (int t = 0; t < 50; ++t) {
    int a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a == b || c == d) continue;
    Box box{{q(std::min(a, b), 16), q(std::max(a, b), 16)},
            {q(std::min(c, d), 16), q(std::max(c, d), 16)}};
    Box cell = sq(q(1, 8), q(5, 8));
    EXPECT_NEAR(to_double(overlap_fraction(box, cell)),
                oracle::raster_overlap(box, cell, 256), 0.02);
  }
}

TEST(OverlapFraction, SymmetryAndRange) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> u(0, 12);
  auto rnd = [&] {
    std::vector<Interval> ax;
    for (int k = 0; k < 2; ++k) {
      int a = u(rng), b = u(rng);
      if (a == b) ++b;
      ax.push_back({q(std::min(a, b), 12), q(std::max(a, b), 12)});
    }
    return Box(ax);
  };
  for (int t = 0; t < 200; ++t) {
    const Box a = rnd(), b = rnd();
    const Scalar fab = overlap_fraction(a, b), fba = overlap_fraction(b, a);
    EXPECT_EQ(b.volume() * fab, a.volume() * fba);
    EXPECT_GE(fab, 0);
    EXPECT_LE(fab, 1);
    EXPECT_EQ(fab == 1, a.contains(b));
  }
}

TEST(Dilate, Examples) {
  EXPECT_EQ(dilate(Box::unit(2), q(1)), Box::unit(2));
  EXPECT_EQ(dilate(Box::unit(2), q(2)), sq(q(-1, 2), q(3, 2)));
  EXPECT_EQ(dilate(Box{{q(0), q(1, 4)}, {q(0), q(1, 8)}}, q(4)),
            (Box{{q(-3, 8), q(5, 8)}, {q(-3, 16), q(5, 16)}}));
  EXPECT_THROW(dilate(Box::unit(1), q(0)), InvalidFactor);
  EXPECT_THROW(dilate(Box::unit(1), q(-1)), InvalidFactor);
}

TEST(Dilate, Inverts) {
  const Box b{{q(1, 7), q(2, 3)}, {q(0), q(1, 5)}, {q(1, 2), q(1)}};
  for (const Scalar& s : {q(3), q(1, 4), q(5, 2)}) {
    EXPECT_EQ(dilate(dilate(b, s), 1 / s), b);
  }
}

TEST(Chain, StepsRight) {
  const Box region{{q(0), q(3)}, {q(0), q(1)}};
  const Box a = Box::unit(2), b{{q(2), q(3)}, {q(0), q(1)}};
  const BoxChain c = connect_congruent_boxes(region, a, b);
  ASSERT_EQ(c.size(), 3u);
  // The middle box may sit a row above or below; the search runs in the 4x dilate.
  EXPECT_EQ(c[1][0], (Interval{q(1), q(2)}));
  EXPECT_TRUE(is_valid_chain(c));
}

TEST(Chain, Identity) {
  const Box a = sq(q(0), q(1, 2));
  EXPECT_EQ(connect_congruent_boxes(Box::unit(2), a, a).size(), 1u);
}

TEST(Chain, DiagonalWithinBoundAndShortest) {
  const Box a = sq(q(0), q(1, 2)), b = sq(q(1, 2), q(1));
  const BoxChain c = connect_congruent_boxes(Box::unit(2), a, b);
  EXPECT_TRUE(is_valid_chain(c));
  EXPECT_LE(c.size(), 64u);
  EXPECT_EQ(c.front(), a);
  EXPECT_EQ(c.back(), b);
  EXPECT_EQ(c.size(), *oracle::lattice_chain_length(Box::unit(2), a, b));
}

TEST(Chain, RandomPairsSatisfyInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 7);
  const Box region = Box::unit(2);
  for (int t = 0; t < 100; ++t) {
    const int w = 1 + u(rng) % 3, h = 1 + u(rng) % 3;
    const int x1 = u(rng) % (9 - w), y1 = u(rng) % (9 - h);
    const int x2 = u(rng) % (9 - w), y2 = u(rng) % (9 - h);
    const Box a{{q(x1, 8), q(x1 + w, 8)}, {q(y1, 8), q(y1 + h, 8)}};
    const Box b{{q(x2, 8), q(x2 + w, 8)}, {q(y2, 8), q(y2 + h, 8)}};
    const BoxChain c = connect_congruent_boxes(region, a, b);
    EXPECT_TRUE(is_valid_chain(c));
    const Scalar bound = pow(4 * region.max_side() / a.max_side(), 2);
    EXPECT_LE(Scalar(static_cast<long>(c.size())), bound);
    const Box big = dilate(region, q(4));
    for (const auto& m : c) {
      EXPECT_TRUE(big.contains(m));
      EXPECT_TRUE(m.same_shape(a));
    }
  }
}

TEST(Chain, Errors) {
  EXPECT_THROW(connect_congruent_boxes(Box::unit(2), sq(q(0), q(1, 2)), sq(q(0), q(1, 4))),
               NotCongruent);
  EXPECT_THROW(connect_congruent_boxes(Box::unit(2), Box::unit(2), Box::unit(3)),
               DimensionMismatch);
}

TEST(Box, Relations) {
  const Box a{{q(0), q(1, 2)}, {q(0), q(1)}}, b{{q(1, 2), q(1)}, {q(0), q(1)}};
  EXPECT_TRUE(a.meets(b));
  EXPECT_FALSE(a.interiors_overlap(b));
  EXPECT_TRUE(a.congruent_to(Box{{q(0), q(1)}, {q(0), q(1, 2)}}));
  EXPECT_FALSE(a.same_shape(Box{{q(0), q(1)}, {q(0), q(1, 2)}}));
  EXPECT_EQ(a.volume(), q(1, 2));
  EXPECT_THROW(Box({Interval{q(1), q(0)}}), InvalidParameter);
}

TEST(Partition, LocateAndFlatten) {
  const ProductPartition p({{q(0), q(1, 3), q(1)}, {q(0), q(1, 4), q(1, 2), q(1)}});
  EXPECT_EQ(p.cell_count(), 6u);
  EXPECT_EQ(p.locate(0, q(1, 3)), 1u);
  EXPECT_EQ(p.locate(1, q(1)), 2u);
  EXPECT_EQ(p.flat_index({1, 2}), 5u);
  EXPECT_EQ(p.unflatten(5), (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(ProductPartition({{q(0), q(1, 2)}}), InvalidParameter);
}

}  // namespace
}  // namespace carpetlab
