#include <gtest/gtest.h>

#include "json.hpp"
#include "carpetlab/certification.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab/moran.hpp"
#include "oracles.hpp"

namespace carpetlab {
namespace {

using oracle::q;

SystemSpec bm24() { return make_bm_carpet(2, 4, {{0, 0, 0}, {1, 1, 0}, {0, 2, 0}}); }

SystemSpec baranski() {
  std::vector<Digit> d;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 2; ++i) {
      if (!(i == 1 && j == 1)) d.push_back({i, j, 0});
    }
  }
  return make_carpet({q(1, 2), q(1, 2)}, {q(1, 3), q(1, 3), q(1, 3)}, d);
}

GridMeasure split2(std::uint64_t seed, int depth = 6) {
  SplitParams p;
  p.tau = 2;
  p.depth = depth;
  p.seed = seed;
  GridMeasure x = gen_split_measure_1d(p);
  p.seed = seed + 1000;
  return product_measure({x, gen_split_measure_1d(p)});
}

// E, G and strip masses by brute force over the level set.
LevelMasses brute_level(const SystemSpec& spec, const GridMeasure& mu,
                        const HoleTemplate& hole, int n) {
  LevelMasses out;
  const LevelSet ls = level_set(spec, n);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const Box R = ls.box(i);
    out.E += oracle::mass(mu, R);
    const auto holes = hole_harvest(spec, ls.word(i), hole);
    for (const auto& h : holes) out.G += oracle::mass(mu, h);
    if (spec.kind() == SystemKind::kCarpet) {
      const MoranCover mc = moran_cover(spec, ls.word(i));
      const int ax = mc.cover_axis;
      for (const auto& p : mc.pieces) {
        std::vector<Interval> axes(2);
        const Scalar len = p.interval.length();
        axes[ax] = {p.interval.lo + len * hole.cube[ax].lo,
                    p.interval.lo + len * hole.cube[ax].hi};
        axes[1 - ax] = R[1 - ax];
        out.V += oracle::mass(mu, Box(axes));
      }
    } else {
      for (const auto& h : holes) {
        std::vector<Interval> axes = h.axes();
        const Scalar len = h.side(2) / hole.cube.side(2);
        const Scalar lo = h[2].lo - len * hole.cube[2].lo;
        axes[2] = {lo, lo + len};
        out.V += oracle::mass(mu, Box(axes));
      }
    }
  }
  out.E /= mu.total();
  out.G /= mu.total();
  out.V /= mu.total();
  return out;
}

TEST(Constants, HoleConstantExact) {
  const ExactPower c = lemma32_constant(q(1, 2), 2, q(2));
  ASSERT_TRUE(c.exact());
  EXPECT_EQ(*c.exact(), pow(q(2), -70));
  EXPECT_EQ(*lemma32_constant(q(1), 2, q(2)).exact(), pow(q(2), -20));
  EXPECT_EQ(*lemma32_constant(q(1, 2), 1, q(4)).exact(), pow(q(2), -19));
  EXPECT_NEAR(c.log2(), -70.0, 1e-9);
  EXPECT_THROW(lemma32_constant(q(0), 2, q(2)), InvalidParameter);
  EXPECT_THROW(lemma32_constant(q(1, 2), 2, q(1, 2)), InvalidParameter);
  EXPECT_THROW(lemma32_constant(q(1, 2), 4, q(2)), InvalidParameter);
}

TEST(Constants, HoleConstantSymbolic) {
  // (4/a)^d far too large to expand: stays symbolic, compares numerically.
  const ExactPower c = lemma32_constant(q(1, 1000), 3, q(3));
  EXPECT_FALSE(c.exact());
  EXPECT_TRUE(at_most(c, q(1, 1000000)));
  EXPECT_LT(c.log2(), -1e9);
}

TEST(Constants, Strip) {
  EXPECT_EQ(strip_constant(q(1, 2), q(4)), 16);
  EXPECT_EQ(strip_constant(q(1), q(7)), 7);
  EXPECT_EQ(strip_constant(q(1, 4), q(2)), 8);
  EXPECT_THROW(strip_constant(q(2), q(2)), InvalidParameter);
  EXPECT_THROW(strip_constant(q(1, 2), q(1, 2)), InvalidParameter);
}

TEST(Constants, BallCount) {
  EXPECT_EQ(ball_count(q(1, 3), q(1, 3)).count, 1);
  EXPECT_EQ(ball_count(q(1), q(1, 3)).count, 3);
  const BallLayout b = ball_count(q(7, 10), q(1, 5));
  EXPECT_EQ(b.count, 3);
  EXPECT_EQ(b.radius, q(1, 10));
  EXPECT_EQ(b.centers.back(), q(1, 2));
  EXPECT_THROW(ball_count(q(1, 5), q(7, 10)), InvalidParameter);
}

TEST(StripSoundness, LebesgueAndSplit) {
  const StripSoundness leb = strip_soundness(lebesgue(2, 3), q(1, 2), q(4), 100, 1);
  EXPECT_EQ(leb.samples, 100u);
  EXPECT_EQ(leb.failures, 0u);
  EXPECT_LE(leb.worst_ratio, 16);
  const GridMeasure mu = split2(3, 5);
  const Scalar D = ball_doubling_constant(mu);
  const StripSoundness s = strip_soundness(mu, q(1, 2), D, 100, 2);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_LE(s.worst_ratio, s.bound);
}

TEST(LevelMasses, MatchBruteForce) {
  struct Case {
    SystemSpec spec;
    GridMeasure mu;
    int n;
  };
  const std::vector<Case> cases = {
      {bm24(), lebesgue(2), 3},
      {bm24(), split2(1, 4), 3},
      {baranski(), split2(2, 4), 3},
      {baranski(), split2(3, 3), 2},
      {oracle::random_baranski(5, 3), split2(4, 4), 2},
      {make_bm_carpet(4, 2, {{0, 0, 0}, {1, 1, 0}, {3, 0, 0}}), split2(6, 4), 3},
      {make_sponge(2, 2, 4, {{0, 0, 0}, {1, 1, 2}, {0, 1, 3}}), lebesgue(3, 2), 2},
      {make_sponge(2, 3, 4, {{0, 0, 0}, {1, 2, 3}}),
       product_measure({lebesgue(1, 2), lebesgue(1, 3),
                        gen_split_measure_1d({q(2), 3, 9})}),
       2},
  };
  for (const auto& c : cases) {
    const HoleTemplate hole = find_hole(c.spec);
    for (int n = 1; n <= c.n; ++n) {
      const LevelMasses got = level_masses(c.spec, c.mu, hole, n);
      const LevelMasses want = brute_level(c.spec, c.mu, hole, n);
      EXPECT_EQ(got.E, want.E) << c.spec.describe() << " n=" << n;
      EXPECT_EQ(got.G, want.G) << c.spec.describe() << " n=" << n;
      EXPECT_EQ(got.V, want.V) << c.spec.describe() << " n=" << n;
    }
  }
}

TEST(LevelMasses, Monotone) {
  const GridMeasure mu = split2(8);
  const HoleTemplate hole = find_hole(baranski());
  Scalar prev(1);
  for (int n = 1; n <= 8; ++n) {
    const LevelMasses m = level_masses(baranski(), mu, hole, n);
    EXPECT_LE(m.E, prev);
    EXPECT_LE(m.G, m.E);
    prev = m.E;
  }
}

TEST(HoleInequality, LebesgueArea) {
  const SystemSpec s = baranski();
  const HoleTemplate hole = find_hole(s);
  const Word w{{0, 2, 0}};
  const Box R = apply_word(s, w).image_of_unit();
  Scalar area(0);
  for (const auto& h : hole_harvest(s, w, hole)) area += h.volume();
  const HoleInequality hi = verify_hole_inequality(s, lebesgue(2), w, hole);
  EXPECT_EQ(hi.ratio, area / R.volume());
  EXPECT_GT(hi.ratio, 0);
  EXPECT_TRUE(hi.pass);
}

TEST(HoleInequality, SupportedOffR) {
  const SystemSpec s = baranski();
  std::vector<Scalar> w(4, Scalar(0));
  w[3] = 1;  // all mass in [1/2,1]^2
  const GridMeasure mu(ProductPartition::uniform(2, 2), w);
  EXPECT_THROW(verify_hole_inequality(s, mu, {{0, 0, 0}}, find_hole(s)), DegenerateMass);
}

TEST(HoleInequality, AboveCertifiedFloor) {
  const SystemSpec s = bm24();
  const GridMeasure mu = split2(9);
  const Scalar D = ball_doubling_constant(mu);
  const HoleTemplate hole = find_hole(s);
  const LevelSet ls = level_set(s, 2);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const HoleInequality h = verify_hole_inequality(s, mu, ls.word(i), hole, D);
    EXPECT_GT(h.ratio, 0);
    ASSERT_TRUE(h.floor);
    EXPECT_TRUE(h.floor_ok);
    EXPECT_GE(h.ratio, *h.floor);
  }
}

TEST(Certificate, BmLebesgueClosedForm) {
  const ThinnessCertificate c = thinness_certificate(bm24(), lebesgue(2), 2, 1);
  EXPECT_EQ(c.levels, (std::vector<int>{1, 13}));
  EXPECT_EQ(c.mass_final, pow(q(3, 8), 13));
  EXPECT_EQ(c.epochs[0].mass_E, q(3, 8));
  EXPECT_TRUE(c.bound_ok);
  EXPECT_LE(c.mass_final, 1 / (c.c_min * 2));
  EXPECT_TRUE(c.valid);
}

TEST(Certificate, SingleEpoch) {
  const ThinnessCertificate c = thinness_certificate(bm24(), lebesgue(2), 1, 2);
  ASSERT_EQ(c.epochs.size(), 1u);
  EXPECT_EQ(c.bound, 1 / c.epochs[0].c);
  EXPECT_GE(c.bound, c.mass_final);
}

TEST(Certificate, GeneratedMeasuresOnBaranski) {
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    const GridMeasure mu = split2(seed);
    CertificateOptions opt;
    opt.D_ball = ball_doubling_constant(mu);
    const ThinnessCertificate c = thinness_certificate(baranski(), mu, 2, 1, opt);
    EXPECT_TRUE(c.valid);
    EXPECT_TRUE(c.disjoint);
    for (const auto& ep : c.epochs) {
      EXPECT_GT(ep.c, 0);
      EXPECT_TRUE(ep.floor_ok);
    }
    // Disjoint harvests cannot carry more than the whole mass.
    Scalar sum(0);
    for (const auto& ep : c.epochs) sum += ep.c * ep.mass_E;
    EXPECT_LE(sum, 1);
    EXPECT_EQ(sum, c.harvest_total);
    EXPECT_LE(c.epochs[1].mass_E, c.epochs[0].mass_E);
  }
}

TEST(Certificate, ClosedFormConstantIsLowerBound) {
  CertificateOptions opt;
  opt.isotropy_A = 1;
  opt.D_ball = 4;
  const ThinnessCertificate c = thinness_certificate(bm24(), lebesgue(2), 2, 1, opt);
  ASSERT_TRUE(c.hole_bound_c1);
  EXPECT_TRUE(c.hole_bound_c1_ok);
  EXPECT_TRUE(at_most(*c.hole_bound_c1, c.c_min));
}

TEST(Certificate, Json) {
  const ThinnessCertificate c = thinness_certificate(bm24(), lebesgue(2), 2, 1);
  const auto j = nlohmann::json::parse(certificate_to_json(c));
  EXPECT_EQ(j["mass_final"]["exact"], to_fraction_string(pow(q(3, 8), 13)));
  EXPECT_EQ(parse_scalar(j["c_min"]["exact"].get<std::string>()), c.c_min);
  EXPECT_EQ(j["valid"], true);
  EXPECT_EQ(j["levels"], nlohmann::json::array({1, 13}));
}

TEST(Certificate, Errors) {
  EXPECT_THROW(thinness_certificate(bm24(), lebesgue(2), 0), InvalidParameter);
  EXPECT_THROW(thinness_certificate(bm24(), lebesgue(3), 1), DimensionMismatch);
  EXPECT_THROW(thinness_certificate(make_interval_system(3, {0, 2}), lebesgue(1), 1),
               InvalidParameter);
}

}  // namespace
}  // namespace carpetlab
