#include <gtest/gtest.h>

#include <cmath>

#include "carpetlab/diagnostics.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab/measure.hpp"
#include "oracles.hpp"

namespace carpetlab {
namespace {

using oracle::q;

GridMeasure split(std::uint64_t seed, int depth = 6) {
  SplitParams p;
  p.tau = 2;
  p.depth = depth;
  p.seed = seed;
  return gen_split_measure_1d(p);
}

TEST(Doubling, LebesgueExamples) {
  EXPECT_EQ(doubling_constant(lebesgue(2, 3), q(1, 8)), 4);
  EXPECT_EQ(oracle::doubling(lebesgue(2, 3), q(1, 8)), 4);
  EXPECT_EQ(doubling_constant(lebesgue(1, 2), q(1, 4)), 2);
  // The corner cube at the coarsest scale only gains 9/4.
  EXPECT_EQ(doubling_constant(lebesgue(2), q(1, 2)), q(9, 4));
}

TEST(Doubling, MatchesOracle) {
  const GridMeasure mu = product_measure({split(1, 4), split(2, 4)});
  for (const Scalar& r : {q(1, 2), q(1, 4), q(1, 8), q(1, 16), q(1, 3)}) {
    EXPECT_EQ(doubling_constant(mu, r), oracle::doubling(mu, r)) << r;
  }
}

TEST(Doubling, Degenerate) {
  std::vector<Scalar> w(4, Scalar(0));
  w[0] = 1;
  const GridMeasure point(ProductPartition::uniform(2, 2), w);
  EXPECT_THROW(doubling_constant(point, q(1, 2)), DegenerateMass);
  EXPECT_THROW(doubling_constant(lebesgue(2), q(2, 5)), InvalidParameter);
}

TEST(Exponents, Lebesgue) {
  const DoublingProfile p = empirical_exponents(lebesgue(2, 4));
  EXPECT_NEAR(p.alpha, 2.0, 0.05);
  EXPECT_NEAR(p.beta, 2.0, 0.05);
  EXPECT_TRUE(p.certified_direction);
  EXPECT_EQ(p.C, 4);
}

TEST(Exponents, SplitRespectsCertifiedBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DoublingProfile p = empirical_exponents(split(seed, 8));
    EXPECT_LE(p.beta, p.beta_cert);
    EXPECT_TRUE(p.certified_direction);
    for (const auto& o : p.octaves) {
      EXPECT_GE(o.min_ratio, pow(p.C, -2 * o.gap));
      EXPECT_LE(o.min_ratio, o.max_ratio);
    }
  }
}

TEST(Exponents, EnvelopesContainSamples) {
  const GridMeasure mu = product_measure({split(3, 5), split(4, 5)});
  const DoublingProfile p = empirical_exponents(mu);
  for (const auto& o : p.octaves) {
    const double side = std::pow(2.0, -o.gap);
    EXPECT_LE(to_double(o.max_ratio), p.c_upper * std::pow(side, p.alpha) * 1.05);
    EXPECT_GE(to_double(o.min_ratio) * 1.05, std::pow(side, p.beta) / p.c_lower);
  }
}

TEST(Exponents, ZeroMassCube) {
  std::vector<Scalar> w(4, Scalar(1));
  w[3] = 0;
  const GridMeasure holed(ProductPartition::uniform(2, 2), w);
  EXPECT_THROW(empirical_exponents(holed), DegenerateMass);
}

TEST(Isotropy, LebesgueIsOne) {
  EXPECT_EQ(isotropy_constant(lebesgue(2, 3), {q(1, 4), q(1, 8)}).A, 1);
  EXPECT_EQ(isotropy_constant_all(lebesgue(2, 3)).A, 1);
}

TEST(Isotropy, SplitProduct) {
  const GridMeasure mu = product_measure({split(5), split(6)});
  const IsotropyProfile p = isotropy_constant(mu, {q(1, 4), q(1, 16)});
  EXPECT_GE(p.A, 1);
  EXPECT_TRUE(p.exhaustive);
  ASSERT_TRUE(p.worst);
  EXPECT_EQ(mass(mu, p.worst->first) / mass(mu, p.worst->second), p.A);
  EXPECT_TRUE(p.worst->first.congruent_to(p.worst->second));
}

TEST(Isotropy, HeavyCell) {
  std::vector<Scalar> w(16, Scalar(1));
  w[5] = 1000;
  const GridMeasure mu(ProductPartition::uniform(2, 4), w);
  const IsotropyProfile p = isotropy_constant(mu, {q(1, 4), q(1, 2)});
  EXPECT_GT(p.A, 100);
}

TEST(Isotropy, SampledAgreesWithinExhaustive) {
  const GridMeasure mu = product_measure({split(7), split(8)});
  const IsotropyProfile ex = isotropy_constant(mu, {q(1, 8), q(1, 8)});
  const IsotropyProfile sm = isotropy_constant(mu, {q(1, 8), q(1, 8)}, 500, 1);
  EXPECT_LE(sm.A, ex.A);
}

TEST(Chain, Identity) {
  const Box b{{q(0), q(1, 4)}, {q(0), q(1, 4)}};
  const ChainVerdict v = chain_ratio_bound(lebesgue(2), b, b, q(1));
  EXPECT_EQ(v.m, 1);
  EXPECT_EQ(v.ratio, 1);
  EXPECT_TRUE(v.pass);
}

TEST(Chain, ThreeCellsApart) {
  const GridMeasure mu = product_measure({split(11, 4), split(12, 4)});
  const Scalar A = isotropy_constant_all(mu).A;
  const Box a{{q(0), q(1, 16)}, {q(0), q(1, 16)}};
  const Box b{{q(3, 16), q(4, 16)}, {q(0), q(1, 16)}};
  const ChainVerdict v = chain_ratio_bound(mu, a, b, A);
  EXPECT_EQ(v.m, 2);  // gap 2 cells, diameter sqrt(2) cells
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.ratio, mass(mu, a) / mass(mu, b));
}

TEST(Projection, Examples) {
  EXPECT_EQ(face_projection_ratio(lebesgue(2, 2), 0), std::make_pair(q(1), q(1)));
  const GridMeasure s = split(13, 4);
  const auto a = face_projection_ratio(product_measure({lebesgue(1, 2), s}), 1);
  EXPECT_EQ(a, std::make_pair(q(1), q(1)));
  const auto b = face_projection_ratio(product_measure({s, lebesgue(1, 2)}), 1);
  Scalar lo = s.weights().front(), hi = lo;
  for (const auto& w : s.weights()) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  const Scalar width = q(1, 16);
  EXPECT_EQ(b.first, lo / s.total() / width);
  EXPECT_EQ(b.second, hi / s.total() / width);
}

TEST(Slab, LebesgueIsExact) {
  const SlabStats st = slab_ratio_stats(lebesgue(2, 3), 1, 1);
  ASSERT_TRUE(st.upper_exact && st.lower_exact);
  EXPECT_EQ(*st.upper_exact, 1);
  EXPECT_EQ(*st.lower_exact, 1);
}

TEST(Slab, SplitEnvelopesFinite) {
  const GridMeasure mu = product_measure({lebesgue(1, 6), split(14, 6)});
  const SlabStats st = slab_ratio_stats(mu, 0.8, 1.2);
  EXPECT_TRUE(std::isfinite(st.upper));
  EXPECT_GT(st.lower, 0);
  const GridMeasure mu3 = product_measure({lebesgue(1, 3), lebesgue(1, 3), split(15, 3)});
  const SlabStats s3 = slab_ratio_stats(mu3, 1, 1);
  EXPECT_TRUE(std::isfinite(s3.upper));
  EXPECT_GT(s3.lower, 0);
}

TEST(Graph, Examples) {
  const PiecewiseLinear half{{{q(0), q(1, 2)}, {q(1), q(1, 2)}}};
  EXPECT_EQ(graph_cover_mass(lebesgue(2), half, 4), q(1, 16));
  const PiecewiseLinear diag{{{q(0), q(0)}, {q(1), q(1)}}};
  for (int n = 1; n <= 8; ++n) {
    // Two cells per column, one in the top column where the cover is clipped.
    const Scalar cell = pow(q(1, 2), n);
    EXPECT_EQ(graph_cover_mass(lebesgue(2), diag, n), 2 * cell - cell * cell);
  }
}

TEST(Graph, NonIncreasing) {
  const PiecewiseLinear f{{{q(0), q(1, 3)}, {q(1, 2), q(1)}, {q(1), q(0)}}};
  const GridMeasure mu = product_measure({split(16), split(17)});
  Scalar prev = graph_cover_mass(mu, f, 1);
  for (int n = 2; n <= 10; ++n) {
    const Scalar m = graph_cover_mass(mu, f, n);
    EXPECT_LE(m, prev) << n;
    prev = m;
  }
  EXPECT_THROW(graph_cover_mass(mu, f, 30, 1000), EnumerationBudget);
}

TEST(Graph, FunctionValidation) {
  EXPECT_THROW((PiecewiseLinear{{{q(0), q(0)}}}.check()), InvalidParameter);
  EXPECT_THROW((PiecewiseLinear{{{q(0), q(0)}, {q(1), q(2)}}}.check()), InvalidParameter);
  const PiecewiseLinear f{{{q(0), q(0)}, {q(1, 2), q(1)}, {q(1), q(0)}}};
  EXPECT_EQ(f(q(1, 4)), q(1, 2));
  EXPECT_EQ(f.range({q(1, 4), q(3, 4)}), (Interval{q(1, 2), q(1)}));
}

TEST(Homogeneity, Lebesgue) {
  const HomogeneityProfile two = homogeneity_constant(lebesgue(2, 4), q(2), {q(1, 8), q(1, 16)});
  ASSERT_TRUE(two.C_exact);
  EXPECT_EQ(*two.C_exact, 1);
  const HomogeneityProfile one = homogeneity_constant(lebesgue(2, 4), q(1), {q(1, 16)});
  EXPECT_GT(one.C, 1);
  const HomogeneityProfile s1 = homogeneity_constant(split(18), q(1), {q(1, 8)});
  EXPECT_TRUE(std::isfinite(s1.C));
}

}  // namespace
}  // namespace carpetlab
