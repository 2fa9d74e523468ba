#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "instances.hpp"
#include "oracles.hpp"
#include "rcurves/collection.hpp"
#include "rcurves/crossings.hpp"
#include "rcurves/geometry.hpp"

using namespace rcurves;

namespace {

Polyline zigzag() { return Polyline{{0, 0}, {3, 0}, {0, 0}, {3, 0}}; }
const Annulus kUnitAnnulus(Point{0, 0}, 1.0, 2.0);

Polyline with_midpoints(const Polyline& c) {
  std::vector<Point> v;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    v.push_back(c.vertex(i));
    v.push_back(lerp(c.vertex(i), c.vertex(i + 1), 0.5));
  }
  v.push_back(c.back());
  return Polyline(std::move(v));
}

}  // namespace

TEST(Polyline, RejectsInvalidInput) {
  EXPECT_THROW(Polyline(std::vector<Point>{}), Error);
  EXPECT_THROW((Polyline{{0, 0}, {1, 0, 0}}), Error);
  EXPECT_THROW((Polyline{{0, NAN}}), Error);
}

TEST(Polyline, CollapsesRepeatedVertices) {
  const Polyline c{{0, 0}, {0, 0}, {1, 0}, {1, 0}};
  EXPECT_EQ(c.size(), 2u);
  const Polyline p{{2, 2}, {2, 2}};
  EXPECT_TRUE(p.single_point());
}

TEST(Polyline, ArcLengthTimes) {
  const Polyline c{{0, 0}, {1, 0}, {1, 3}};
  ASSERT_EQ(c.times().size(), 3u);
  EXPECT_DOUBLE_EQ(c.times()[1], 0.25);
  EXPECT_EQ(c.times()[2], 1.0);
  const Point mid = c.at(0.5);
  EXPECT_NEAR(mid[0], 1.0, 1e-15);
  EXPECT_NEAR(mid[1], 1.0, 1e-15);
  const Polyline s = c.slice(0.125, 0.5);
  EXPECT_NEAR(s.front()[0], 0.5, 1e-15);
  EXPECT_NEAR(s.back()[1], 1.0, 1e-15);
  EXPECT_EQ(s.size(), 3u);
}

TEST(Diameter, Examples) {
  EXPECT_EQ(diameter(Polyline{{2, 2}}), 0.0);
  EXPECT_DOUBLE_EQ(diameter(Polyline{{0, 0}, {3, 4}}), 5.0);
  EXPECT_DOUBLE_EQ(diameter(Polyline{{0, 0}, {1, 1}, {2, 0}}), 2.0);
}

TEST(Diameter, InvariantUnderMidpointsAndMatchesDenseSampling) {
  inst::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Polyline c = inst::random_polyline(rng, 2 + trial % 2, inst::pick(rng, 2, 12));
    const double d = diameter(c);
    EXPECT_DOUBLE_EQ(diameter(with_midpoints(c)), d);
    double dense = 0.0;
    const auto pts = oracle::resample(c, 8);
    for (const auto& a : pts)
      for (const auto& b : pts) dense = std::max(dense, oracle::dist(a, b));
    EXPECT_LE(std::abs(dense - d), 1e-12 * d);
  }
}

TEST(SegmentSphereHits, Examples) {
  const Point o{0, 0};
  auto h = segment_sphere_hits({0, 0}, {4, 0}, o, 2.0);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h[0], 0.5);
  h = segment_sphere_hits({-3, 0}, {3, 0}, o, 2.0);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_NEAR(h[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(h[1], 5.0 / 6.0, 1e-15);
  h = segment_sphere_hits({-1, 2}, {1, 2}, o, 2.0);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h[0], 0.5);
  EXPECT_THROW(segment_sphere_hits({1, 1}, {1, 1}, o, 1.0), Error);
}

TEST(SegmentSphereHits, RootsSatisfyTheSphereEquation) {
  inst::Rng rng(5);
  int hits = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const Point p = inst::random_point(rng, d), q = inst::random_point(rng, d), c = inst::random_point(rng, d);
    const double radius = inst::uniform(rng, 0.05, 1.5);
    for (double t : segment_sphere_hits(p, q, c, radius)) {
      ++hits;
      EXPECT_GE(t, 0.0);
      EXPECT_LE(t, 1.0);
      EXPECT_LE(std::abs(distance(lerp(p, q, t), c) - radius), 1e-12 * radius * 10);
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(SegmentFace, Examples) {
  const AlignedFace face(3, 2, 0.0, {{0.0, 1.0}, {0.0, 1.0}});
  EXPECT_TRUE(segment_face_intersects({0.5, 0.5, -1}, {0.5, 0.5, 1}, face));
  EXPECT_FALSE(segment_face_intersects({2, 2, -1}, {2, 2, 1}, face));
  EXPECT_FALSE(segment_face_intersects({0.5, 0.5, 0.5}, {0.5, 0.5, 1}, face));
}

TEST(AlignedFace, SubdivisionTilesTheParent) {
  const AlignedFace face(3, 0, 1.0, {{0.0, 2.0}, {-1.0, 1.0}});
  const auto kids = face.subdivide();
  ASSERT_EQ(kids.size(), 4u);
  for (const auto& k : kids) {
    EXPECT_TRUE(face.contains(k));
    EXPECT_DOUBLE_EQ(k.diameter(), 0.5 * face.diameter());
  }
  EXPECT_EQ(AlignedFace(2, 1, 0.0, {{0.0, 1.0}}).subdivide().size(), 2u);
}

TEST(Annulus, Validation) {
  EXPECT_THROW(Annulus(Point{0, 0}, 2.0, 1.0), Error);
  EXPECT_THROW(Annulus(Point{0, 0}, 0.0, 1.0), Error);
}

TEST(FindCrossings, RadialSegment) {
  const auto rep = find_crossings(Polyline{{0, 0}, {3, 0}}, kUnitAnnulus);
  ASSERT_EQ(rep.count(), 1u);
  EXPECT_NEAR(rep.intervals[0].a, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rep.intervals[0].b, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(rep.intervals[0].direction, Direction::outward);
  EXPECT_FALSE(rep.non_generic);
}

TEST(FindCrossings, ZigZag) {
  const auto rep = find_crossings(zigzag(), kUnitAnnulus);
  ASSERT_EQ(rep.count(), 3u);
  EXPECT_EQ(rep.intervals[0].direction, Direction::outward);
  EXPECT_EQ(rep.intervals[1].direction, Direction::inward);
  EXPECT_EQ(rep.intervals[2].direction, Direction::outward);
  EXPECT_EQ(oracle::crossing_count(zigzag(), Point{0, 0}, 1.0, 2.0, 100000), 3u);
}

TEST(FindCrossings, SmallCurveHasNone) {
  EXPECT_EQ(find_crossings(Polyline{{0, 0}, {0.5, 0}}, kUnitAnnulus).count(), 0u);
  EXPECT_EQ(find_crossings(Polyline{{1.5, 0}}, kUnitAnnulus).count(), 0u);
}

TEST(FindCrossings, EndpointsOnTheSpheres) {
  // Starts exactly on the inner sphere and ends exactly on the outer one.
  const auto rep = find_crossings(Polyline{{1, 0}, {2, 0}}, kUnitAnnulus);
  EXPECT_EQ(rep.count(), 1u);
  EXPECT_TRUE(rep.non_generic);
}

TEST(FindCrossings, TangentTouchEndsACrossing) {
  // The line y = 1 touches the inner sphere at (0, 1) from the annulus side:
  // the touch point ends an inward crossing and starts an outward one.
  const auto rep = find_crossings(Polyline{{-3, 1}, {3, 1}}, kUnitAnnulus);
  EXPECT_TRUE(rep.non_generic);
  ASSERT_EQ(rep.count(), 2u);
  EXPECT_EQ(rep.intervals[0].direction, Direction::inward);
  EXPECT_NEAR(rep.intervals[0].b, 0.5, 1e-12);
  EXPECT_EQ(rep.intervals[1].direction, Direction::outward);
}

TEST(FindCrossings, DimensionMismatchThrows) {
  EXPECT_THROW(find_crossings(Polyline{{0, 0, 0}, {3, 0, 0}}, kUnitAnnulus), Error);
}

TEST(FindCrossings, MatchesOracleAndIsDisjoint) {
  inst::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Polyline c = inst::random_polyline(rng, 2 + trial % 2, inst::pick(rng, 2, 40));
    const Annulus ann = inst::random_annulus(rng, c);
    const auto rep = find_crossings(c, ann);
    EXPECT_EQ(rep.count(), oracle::crossing_count(c, ann.center(), ann.inner(), ann.outer()));
    for (std::size_t i = 0; i + 1 < rep.intervals.size(); ++i) EXPECT_LE(rep.intervals[i].b, rep.intervals[i + 1].a);
    for (const auto& iv : rep.intervals) {
      EXPECT_LT(iv.a, iv.b);
      const double rho = distance(c.at(0.5 * (iv.a + iv.b)), ann.center());
      EXPECT_GT(rho, ann.inner());
      EXPECT_LT(rho, ann.outer());
    }
    EXPECT_EQ(find_crossings(with_midpoints(c), ann).count(), rep.count());
  }
}

TEST(CountCrossingsCollection, Examples) {
  CurveCollection empty;
  EXPECT_EQ(count_crossings_collection(empty, kUnitAnnulus), 0u);
  CurveCollection two;
  two.add(Polyline{{0, 0}, {3, 0}}, 2);
  EXPECT_EQ(count_crossings_collection(two, kUnitAnnulus), 2u);
  CurveCollection mixed;
  mixed.add(Polyline{{0, 0}, {3, 0}});
  mixed.add(zigzag());
  EXPECT_EQ(count_crossings_collection(mixed, kUnitAnnulus), 4u);
}

TEST(CrossingsHitting, Examples) {
  const AlignedFace through(2, 0, 1.5, {{-1.0, 1.0}});
  const AlignedFace away(2, 0, 1.5, {{5.0, 6.0}});
  const Polyline seg{{0, 0}, {3, 0}};
  EXPECT_EQ(crossings_hitting(seg, kUnitAnnulus, std::vector<AlignedFace>{through}), 1u);
  EXPECT_EQ(crossings_hitting(seg, kUnitAnnulus, std::vector<AlignedFace>{away}), 0u);
  EXPECT_EQ(crossings_hitting(zigzag(), kUnitAnnulus, std::vector<AlignedFace>{through}), 3u);
}

TEST(SeparatingTimes, Examples) {
  const Polyline seg{{0, 0}, {3, 0}};
  const auto t = separating_times(seg, kUnitAnnulus);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[1], 0.5);
  EXPECT_TRUE(verify_separating(seg, kUnitAnnulus, t));
  EXPECT_EQ(separating_times(Polyline{{0, 0}, {0.5, 0}}, kUnitAnnulus), (std::vector<double>{0.0, 1.0}));

  const auto z = separating_times(zigzag(), kUnitAnnulus);
  ASSERT_EQ(z.size(), 5u);
  const auto rep = find_crossings(zigzag(), kUnitAnnulus);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_GT(z[j + 1], rep.intervals[j].a);
    EXPECT_LT(z[j + 1], rep.intervals[j].b);
  }
  EXPECT_TRUE(verify_separating(zigzag(), kUnitAnnulus, z));
  EXPECT_FALSE(verify_separating(zigzag(), kUnitAnnulus, std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(StabilityRadius, Examples) {
  EXPECT_NEAR(stability_radius(Polyline{{0, 0}, {3, 0}}, kUnitAnnulus), 0.5, 1e-12);
  // Entirely inside the inner ball.
  EXPECT_NEAR(stability_radius(Polyline{{0, 0}, {0.3, 0.4}}, kUnitAnnulus), 0.5, 1e-12);
}

TEST(StabilityRadius, PerturbationsBelowItNeverAddCrossings) {
  inst::Rng rng(77);
  const Polyline seg{{0, 0}, {3, 0}};
  for (int trial = 0; trial < 1000; ++trial) {
    const Polyline p = inst::perturbed(rng, seg, 0.5 * (1 - 1e-9));
    EXPECT_LE(find_crossings(p, kUnitAnnulus).count(), 1u);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Polyline c = inst::random_polyline(rng, 2, inst::pick(rng, 2, 30));
    const Annulus ann = inst::random_annulus(rng, c);
    const double delta = stability_radius(c, ann);
    EXPECT_GT(delta, 0.0);
    const std::size_t n = find_crossings(c, ann).count();
    for (int k = 0; k < 5; ++k) EXPECT_LE(find_crossings(inst::perturbed(rng, c, delta), ann).count(), n);
  }
}
