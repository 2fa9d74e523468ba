#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "instances.hpp"
#include "rcurves/collection_metric.hpp"
#include "rcurves/coupling.hpp"
#include "rcurves/nets.hpp"
#include "rcurves/random.hpp"
#include "rcurves/skeleton.hpp"

using namespace rcurves;

namespace {

std::set<Point> as_set(const Net& n) { return {n.points.begin(), n.points.end()}; }

bool subset(const Net& a, const Net& b) {
  const auto sb = as_set(b);
  return std::all_of(a.points.begin(), a.points.end(), [&](const Point& p) { return sb.count(p) > 0; });
}

Net grid_net(double lo, double hi, double spacing) { return Net{grid_points(2, lo, hi, spacing), spacing}; }

/// Net that covers the curve's bounding box (padded) at density 1/k.
Net covering_grid(const Polyline& c, int k) {
  double lo = INFINITY, hi = -INFINITY;
  for (const Point& p : c.vertices())
    for (std::size_t i = 0; i < p.dim(); ++i) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
  const double pad = 1.0 / k;
  return Net{grid_points(c.dim(), lo - pad, hi + 2 * pad, 1.0 / (k * std::sqrt(static_cast<double>(c.dim())))),
             1.0 / k};
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  using B = std::array<std::uint32_t, 4>;
  EXPECT_EQ(Philox::block({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
    EXPECT_NE(va, d.next_u64());
  }
  Philox e(7, 3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = e.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ASSERT_LT(e.below(7), 7u);
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(ArgminCell, Examples) {
  const Net net{{{1, 0}, {5, 5}, {7, 7}, {-1, 0}}, 1.0};
  EXPECT_EQ(argmin_cell(Point{0, 0}, net), 0u);
  EXPECT_EQ(argmin_cell(Point{6.9, 7}, net), 2u);
  EXPECT_EQ(argmin_cell(Point{100, 100}, Net{{{0, 0}}, 1.0}), 0u);
  EXPECT_THROW(argmin_cell(Point{0, 0}, Net{}), Error);
}

TEST(GreedyNet, Examples) {
  const std::vector<Point> cloud{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const Net one = greedy_net(cloud, 2.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.points[0], (Point{0, 0}));
  const std::vector<Point> lone{{3, 4}};
  EXPECT_EQ(greedy_net(lone, 0.1).points, lone);
  EXPECT_THROW(greedy_net(std::vector<Point>{}, 0.5), Error);

  const std::vector<Point> grid = grid_points(2, 0.0, 3.0, 1.0);
  ASSERT_EQ(grid.size(), 16u);
  const Net net = greedy_net(grid, 0.5);
  for (const Point& s : grid) {
    double best = INFINITY;
    for (const Point& p : net.points) best = std::min(best, distance(s, p));
    EXPECT_LE(best, 0.5);
  }
}

TEST(GreedyNet, CoversRandomCloudsAndIsDeterministic) {
  inst::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> cloud;
    const std::size_t n = inst::pick(rng, 1, 200);
    for (std::size_t i = 0; i < n; ++i) cloud.push_back(inst::random_point(rng, 2 + trial % 2));
    const double delta = inst::uniform(rng, 0.05, 0.8);
    const Net net = greedy_net(cloud, delta);
    EXPECT_LE(covering_radius(cloud, net.points), delta);
    EXPECT_EQ(net.points, greedy_net(cloud, delta).points);
    EXPECT_EQ(net.points.front(), cloud.front());
  }
}

TEST(NestedFamily, MembershipIsTheUnionOfBaseNets) {
  inst::Rng rng(4);
  std::vector<std::vector<std::vector<Point>>> sets(3, std::vector<std::vector<Point>>(3));
  for (auto& row : sets)
    for (auto& s : row)
      for (std::size_t i = 0, n = inst::pick(rng, 1, 40); i < n; ++i) s.push_back(inst::random_point(rng, 2));
  const NetFamily fam = nested_family(sets);
  EXPECT_EQ(fam.at(1.0, 1.0).points, fam.base(1, 1).points);
  for (std::size_t j = 1; j <= 3; ++j)
    for (std::size_t k = 1; k <= 3; ++k) {
      EXPECT_LE(covering_radius(sets[j - 1][k - 1], fam.base(j, k).points), 1.0 / (2.0 * k));
      std::set<Point> expect;
      for (std::size_t a = 1; a <= j; ++a)
        for (std::size_t b = 1; b <= k; ++b) {
          const auto s = as_set(fam.base(a, b));
          expect.insert(s.begin(), s.end());
        }
      const Net u = fam.union_up_to(j, k);
      EXPECT_EQ(as_set(u), expect);
      EXPECT_EQ(u.size(), expect.size());  // no duplicates
      if (j < 3) {
        EXPECT_TRUE(subset(u, fam.union_up_to(j + 1, k)));
      }
      if (k < 3) {
        EXPECT_TRUE(subset(u, fam.union_up_to(j, k + 1)));
      }
    }
  EXPECT_TRUE(subset(fam.at(0.5, 0.5), fam.at(1.0 / 3.0, 1.0 / 3.0)));
  EXPECT_EQ(as_set(fam.at(0.4, 0.9)), as_set(fam.union_up_to(3, 2)));
  EXPECT_THROW(fam.union_up_to(4, 1), Error);
}

TEST(Skeletonize, CurveInsideTheFirstBall) {
  const Net net = grid_net(-1.0, 1.0, 0.1);
  const auto res = skeletonize(Polyline{{0.01, 0.0}, {0.1, 0.05}}, net, 10);
  EXPECT_EQ(res.skeleton.m(), 1u);
  EXPECT_EQ(res.skeleton.times, (std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(res.coarse.single_point());
}

TEST(Skeletonize, UnitSegment) {
  const Polyline seg{{0, 0}, {1, 0}};
  const auto res = skeletonize(seg, grid_net(-1.0, 2.0, 0.1), 10);
  EXPECT_LE(curve_distance(seg, res.coarse, 1e-9).value, 1.1);
  EXPECT_GT(res.skeleton.m(), 1u);
  for (double g : anchor_gaps(res.skeleton)) EXPECT_LE(g, 0.3 + 1e-12);
}

TEST(Skeletonize, DensityViolationNamesTheTime) {
  const Net sparse{{{0, 0}}, 0.1};
  try {
    skeletonize(Polyline{{0, 0}, {1, 0}}, sparse, 10);
    FAIL() << "expected a density violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::density_violation);
    EXPECT_NE(std::string(e.what()).find("time"), std::string::npos);
  }
}

TEST(Skeletonize, BoundsGapsBudgetAndDeterminism) {
  inst::Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Polyline c = inst::random_polyline(rng, 2, inst::pick(rng, 2, 20));
    const int k = 2 << (trial % 4);
    const Net net = covering_grid(c, k);
    const auto res = skeletonize(c, net, k);
    const Skeleton& sk = res.skeleton;
    ASSERT_EQ(sk.times.size(), sk.m() + 1);
    EXPECT_EQ(sk.times.front(), 0.0);
    EXPECT_EQ(sk.times.back(), 1.0);
    for (std::size_t j = 0; j + 1 < sk.times.size(); ++j) EXPECT_LT(sk.times[j], sk.times[j + 1]);
    for (double g : anchor_gaps(sk)) EXPECT_LE(g, 3.0 / k + 1e-12);
    EXPECT_LE(curve_distance(c, res.coarse, 1e-9).value, 11.0 / k + 1e-9);
    const auto again = skeletonize(c, net, k);
    EXPECT_EQ(again.skeleton.anchor_indices, sk.anchor_indices);
    EXPECT_EQ(again.skeleton.times, sk.times);
    if (trial % 4 < 2) {
      const AnchorBudget b = anchor_budget(c, net, k);
      EXPECT_EQ(b.anchors, sk.m());
      // With no crossing anywhere the curve never leaves its first ball.
      if (b.max_crossings == 0) {
        EXPECT_EQ(b.anchors, 1u);
      } else {
        EXPECT_TRUE(b.holds()) << b.anchors << " vs " << b.bound();
      }
    }
  }
}

TEST(CoarsenCollection, Examples) {
  const Net net = grid_net(-2.0, 3.0, 0.125);
  CurveCollection small;
  small.add(Polyline{{0, 0}, {0.3, 0}});
  small.add(Polyline{{1, 1}, {1, 1.5}}, 2);
  EXPECT_TRUE(coarsen_collection(small, net, 8).empty());
  EXPECT_LE(collection_distance(small, CurveCollection{}, 1e-9).value, 4.0 / 8);

  const Polyline seg{{0, 0}, {2, 1}};
  CurveCollection one;
  one.add(seg, 3, "s");
  const auto out = coarsen_collection(one, net, 8);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].curve, skeletonize(seg, net, 8).coarse);
  EXPECT_EQ(out[0].multiplicity, 3u);
  EXPECT_EQ(out[0].id, "s");

  inst::Rng rng(9);
  CurveCollection ten;
  for (int i = 0; i < 10; ++i) ten.add(inst::random_polyline(rng, 2, inst::pick(rng, 2, 15)));
  const auto coarse = coarsen_collection(ten, grid_net(-3.0, 3.0, 0.125), 8, 2);
  EXPECT_LE(collection_distance(ten, coarse, 1e-9).value, 11.0 / 8);
  EXPECT_EQ(coarse, coarsen_collection(ten, grid_net(-3.0, 3.0, 0.125), 8, 1));
}

TEST(DiscreteMeasure, Validation) {
  EXPECT_THROW(DiscreteMeasure({{0, 0}, {1, 0}}, {0.5, 0.6}), Error);
  EXPECT_THROW(DiscreteMeasure({{0, 0}, {0, 0}}, {0.5, 0.5}), Error);
  EXPECT_THROW(DiscreteMeasure({{0, 0}, {1, 0}}, {1.5, -0.5}), Error);
  EXPECT_THROW(DiscreteMeasure({}, {}), Error);
  EXPECT_NO_THROW(DiscreteMeasure({{0, 0}, {1, 0}}, {1.0, 0.0}));
}

TEST(Coding, OneCellAndTwoCells) {
  const DiscreteMeasure mu({{0, 0}, {1, 0}}, {0.3, 0.7});
  const Coding whole({mu, mu}, {Net{{{0.5, 0}}, 1.0}});
  EXPECT_EQ(whole.level(1).labels.size(), 1u);
  EXPECT_EQ(whole.lower(1, 1, 0), 0.0);
  EXPECT_EQ(whole.upper(1, 1, 0), 1.0);

  const Coding split({mu, mu}, {Net{{{0, 0}, {1, 0}}, 1.0}});
  ASSERT_EQ(split.level(1).labels.size(), 2u);
  EXPECT_EQ(split.lower(1, 1, 0), 0.0);
  EXPECT_DOUBLE_EQ(split.upper(1, 1, 0), 0.3);
  EXPECT_DOUBLE_EQ(split.lower(1, 1, 1), 0.3);
  EXPECT_EQ(split.upper(1, 1, 1), 1.0);
  EXPECT_EQ(split.locate(1, 1, 0.29), 0u);
  EXPECT_EQ(split.locate(1, 1, 0.3), 1u);
  EXPECT_THROW(split.locate(1, 1, 1.0), Error);
}

TEST(Coding, PointMassIgnoresXi) {
  const Coding c({DiscreteMeasure::point_mass({2, 3})}, {Net{{{0, 0}, {5, 5}}, 1.0}});
  for (double xi : {0.0, 0.25, 0.999})
    for (std::uint64_t seed : {1u, 2u}) EXPECT_EQ(sample_coupled(c, xi, 0, seed), (Point{2, 3}));
}

TEST(Coding, ZeroMassCellsResolveToTheRight) {
  const DiscreteMeasure mu({{0, 0}, {1, 0}, {2, 0}}, {0.5, 0.0, 0.5});
  const Coding c({mu, mu}, {Net{{{0, 0}, {1, 0}, {2, 0}}, 0.5}});
  EXPECT_EQ(c.lower(1, 1, 1), c.upper(1, 1, 1));
  EXPECT_EQ(c.locate(1, 1, 0.5), 2u);
}

TEST(Coding, RandomInstancesTileExactly) {
  inst::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_atoms = inst::pick(rng, 1, 12);
    std::vector<Point> atoms;
    for (std::size_t i = 0; i < n_atoms; ++i) atoms.push_back(inst::random_point(rng, 2, 0.0, 1.0));
    std::vector<DiscreteMeasure> measures;
    for (int j = 0; j < 5; ++j) {
      std::vector<double> w(n_atoms);
      double total = 0.0;
      for (double& x : w) total += x = (inst::uniform(rng, 0, 1) < 0.25 ? 0.0 : inst::uniform(rng, 0, 1));
      if (total == 0.0) w[0] = total = 1.0;
      for (double& x : w) x /= total;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < n_atoms; ++i) s += w[i];
      w.back() = std::max(0.0, 1.0 - s);
      measures.emplace_back(atoms, w);
    }
    std::vector<Net> nets;
    for (std::size_t k = 1; k <= 3; ++k) {
      Net n{{}, 1.0 / k};
      for (std::size_t i = 0, m = 2 * k; i < m; ++i) n.points.push_back(inst::random_point(rng, 2, 0.0, 1.0));
      nets.push_back(n);
    }
    const Coding c = build_coding(measures, nets);

    for (std::size_t j = 0; j < measures.size(); ++j) {
      for (std::size_t k = 0; k <= 3; ++k) {
        const CellLevel& lvl = c.level(k);
        double len = 0.0;
        std::set<std::size_t> seen;
        for (std::size_t cell = 0; cell < lvl.labels.size(); ++cell) {
          EXPECT_LE(c.lower(j, k, cell), c.upper(j, k, cell));
          if (cell > 0) {
            EXPECT_EQ(c.lower(j, k, cell), c.upper(j, k, cell - 1));
            EXPECT_LT(lvl.labels[cell - 1], lvl.labels[cell]);
          }
          len += c.upper(j, k, cell) - c.lower(j, k, cell);
          for (std::size_t s : lvl.members[cell]) EXPECT_TRUE(seen.insert(s).second);
          if (k > 0) {
            // Children tile the parent's interval exactly.
            const std::size_t parent = c.cell_of(k - 1, lvl.members[cell].front());
            std::vector<std::size_t> kids;
            for (std::size_t s : c.level(k - 1).members[parent]) kids.push_back(c.cell_of(k, s));
            std::sort(kids.begin(), kids.end());
            kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
            for (std::size_t s : lvl.members[cell]) EXPECT_EQ(c.cell_of(k - 1, s), parent);
            EXPECT_EQ(c.lower(j, k, kids.front()), c.lower(j, k - 1, parent));
            EXPECT_EQ(c.upper(j, k, kids.back()), c.upper(j, k - 1, parent));
            for (std::size_t i = 0; i + 1 < kids.size(); ++i) EXPECT_EQ(kids[i] + 1, kids[i + 1]);
          }
          EXPECT_NEAR(c.upper(j, k, cell) - c.lower(j, k, cell), c.cell_mass(j, k, cell), 1e-12);
        }
        EXPECT_EQ(seen.size(), c.support().size());
        EXPECT_NEAR(len, 1.0, 1e-12);
      }
      // Exact marginal: the coded law equals the measure.
      const auto law = c.marginal(j);
      for (std::size_t s = 0; s < law.size(); ++s) EXPECT_NEAR(law[s], c.weights(j)[s], 1e-12);

      // Cell determinism: xi in I_k(A) with k <= j puts X_j in A.
      const std::size_t kj = c.coding_level(j);
      for (std::size_t k = 0; k <= kj; ++k)
        for (std::size_t cell = 0; cell < c.level(k).labels.size(); ++cell) {
          const double lo = c.lower(j, k, cell), hi = c.upper(j, k, cell);
          if (!(hi > lo)) continue;
          for (double xi : {lo, 0.5 * (lo + hi), std::nextafter(hi, lo)}) {
            if (xi >= 1.0) continue;
            for (double u : {0.0, 0.5, 0.999}) EXPECT_EQ(c.cell_of(k, c.sample_index(j, xi, u)), cell);
          }
        }
    }
  }
}

TEST(Coding, EmpiricalCellFrequencies) {
  const DiscreteMeasure mu({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {0.1, 0.2, 0.3, 0.4});
  const Coding c({mu, mu}, {Net{{{0, 0}, {1, 1}}, 1.0}, Net{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 0.5}});
  constexpr int draws = 100000;
  std::vector<int> hits(c.support().size(), 0);
  for (int d = 0; d < draws; ++d) {
    const Point x = sample_coupled(c, coupling_xi(5, d), 1, 5, d);
    ++hits[static_cast<std::size_t>(std::find(c.support().begin(), c.support().end(), x) - c.support().begin())];
  }
  for (std::size_t s = 0; s < hits.size(); ++s) {
    const double p = c.weights(1)[s];
    EXPECT_NEAR(static_cast<double>(hits[s]) / draws, p, 3.0 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST(ConvergenceDiagnostic, ConstantSequenceIsStable) {
  const DiscreteMeasure mu({{0, 0}, {1, 0}, {3, 0}}, {0.2, 0.5, 0.3});
  const Coding c(std::vector<DiscreteMeasure>(9, mu),
                 {Net{{{0, 0}, {3, 0}}, 2.0}, Net{{{0, 0}, {1, 0}, {3, 0}}, 1.0}});
  const auto rep = convergence_diagnostic(c, 500, 8, 11);
  ASSERT_EQ(rep.levels.size(), 2u);
  for (const auto& l : rep.levels) {
    EXPECT_EQ(l.fraction, 1.0);
    EXPECT_FALSE(l.flagged);
  }
  EXPECT_EQ(rep.levels.front().level, 1u);
  EXPECT_THROW(convergence_diagnostic(c, 10, 9, 0), Error);
  const auto threaded = convergence_diagnostic(c, 500, 8, 11, 3);
  EXPECT_EQ(threaded.levels[1].fraction, rep.levels[1].fraction);
}
