#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace haarlab;

namespace {

IndexSet set_of(std::initializer_list<HaarIndex> members) {
  IndexSet s;
  for (const auto& m : members) s.insert(m);
  return s;
}

HaarCombination scalar_family(std::initializer_list<std::pair<HaarIndex, double>> entries) {
  HaarCombination f(1);
  for (const auto& [idx, v] : entries) f.set(idx, {v});
  return f;
}

}  // namespace

TEST(LocalHeight, SpecExamples) {
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(local_height(tree_band(1, n)), n);
  EXPECT_EQ(local_height(set_of({{1, 1}, {2, 2}, {3, 1}})), 2);
  EXPECT_EQ(local_height(set_of({{3, 1}})), 1);
  EXPECT_EQ(local_height(IndexSet{}), 0);
}

TEST(LocalHeight, AgreesWithBruteForceOnAllSubsetsOfD14) {
  const auto items = oracle::tree_items(4);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << items.size()); ++mask) {
    const IndexSet set = oracle::subset(items, mask);
    ASSERT_EQ(local_height(set), oracle::local_height(set)) << set.str();
  }
}

TEST(ExactLocalHeight, SpecExamples) {
  EXPECT_TRUE(exact_local_height(tree_band(1, 3), 3));
  EXPECT_TRUE(exact_local_height(tree_band(2, 4), 3));
  EXPECT_FALSE(exact_local_height(set_of({{1, 1}, {3, 1}}), 2));
  EXPECT_FALSE(exact_local_height(tree_band(1, 3), 2));
}

TEST(ExactLocalHeight, AgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    IndexSet set;
    const int height = 1 + static_cast<int>(rng() % 5);
    oracle::exact_height_set(1, 1, height, 6, rng, set);
    EXPECT_TRUE(exact_local_height(set, height)) << set.str();
    EXPECT_TRUE(oracle::exact_height(set, height, set.max_level()));
    const IndexSet other = random_index_set(5, rng);
    const int lh = oracle::local_height(other);
    EXPECT_EQ(exact_local_height(other, lh), oracle::exact_height(other, lh, other.max_level())) << other.str();
  }
}

TEST(SubtreeIdentification, BijectionPreservingSuccessors) {
  for (SubtreeSide side : {SubtreeSide::Left, SubtreeSide::Right}) {
    IndexSet image;
    for (const auto& idx : tree_band(2, 6)) {
      if (subtree_side(idx) != side) continue;
      const HaarIndex down = to_subtree_frame(idx, side);
      EXPECT_EQ(from_subtree_frame(down, side), idx);
      EXPECT_TRUE(image.insert(down));
      if (idx.level < 6) EXPECT_EQ(to_subtree_frame(left_child(idx), side), left_child(down));
    }
    EXPECT_EQ(image, tree_band(1, 5));
  }
  EXPECT_EQ(to_subtree_frame({3, 4}, SubtreeSide::Right), (HaarIndex{2, 2}));
  EXPECT_FALSE(subtree_side({1, 1}).has_value());
}

TEST(FillOne, SpecExamples) {
  EXPECT_EQ(fill_one(IndexSet{}, 1, 3), (HaarIndex{1, 1}));
  EXPECT_EQ(fill_one(set_of({{1, 1}}), 2, 2), (HaarIndex{2, 1}));
  const HaarIndex pick = fill_one(set_of({{1, 1}, {2, 1}}), 2, 3);
  EXPECT_EQ(pick, (HaarIndex{2, 2}));
  EXPECT_EQ(local_height(set_of({{1, 1}, {2, 1}, pick})), 2);
}

TEST(FillOne, PreconditionViolationsAreDomainErrors) {
  EXPECT_THROW(fill_one(tree_band(1, 2), 2, 3), DomainError);              // |F| = 3 = 2^2 - 1
  EXPECT_THROW(fill_one(set_of({{1, 1}, {2, 1}}), 1, 3), DomainError);     // lh 2 > l
  EXPECT_THROW(fill_one(set_of({{4, 1}}), 2, 3), DomainError);             // not in D_1^3
  EXPECT_THROW(fill_one(IndexSet{}, 4, 3), DomainError);                   // l > n
  EXPECT_THROW(fill_one(IndexSet{}, 0, 3), DomainError);
}

TEST(FillToHeight, SpecExamples) {
  EXPECT_EQ(fill_to_height(IndexSet{}, 2, 2), tree_band(1, 2));
  const IndexSet a = fill_to_height(set_of({{1, 1}}), 2, 3);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_LE(oracle::local_height(set_union(a, set_of({{1, 1}})), 3), 2);
  const IndexSet b = fill_to_height(set_of({{2, 1}}), 2, 4);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_LE(oracle::local_height(set_union(b, set_of({{2, 1}})), 4), 2);
}

TEST(FillToHeight, ExhaustiveUpToDepth4) {
  for (int n = 1; n <= 4; ++n) {
    const auto items = oracle::tree_items(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << items.size()); ++mask) {
      const IndexSet set = oracle::subset(items, mask);
      const int height = oracle::local_height(set);
      for (int l = std::max(1, height); l <= n; ++l) {
        if (static_cast<std::int64_t>(set.size()) >= pow2(l) - 1) continue;
        const HaarIndex one = fill_one(set, l, n);
        IndexSet grown = set;
        ASSERT_TRUE(grown.insert(one));
        ASSERT_LE(one.level, n);
        ASSERT_LE(oracle::local_height(grown, n), l);
        const IndexSet extra = fill_to_height(set, l, n);
        ASSERT_EQ(static_cast<std::int64_t>(extra.size()), pow2(l) - 1 - static_cast<std::int64_t>(set.size()));
        ASSERT_TRUE(set_difference(extra, set) == extra);
        ASSERT_LE(oracle::local_height(set_union(set, extra), n), l);
      }
    }
  }
}

TEST(ThresholdBase, SpecExamples) {
  EXPECT_DOUBLE_EQ(threshold_base(scalar_family({{{1, 1}, 1.0}}), 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(threshold_base(scalar_family({{{1, 1}, 1.0}}), 3, 1.7), 1.0);
  EXPECT_NEAR(threshold_base(scalar_family({{{1, 1}, 1.0}, {{2, 1}, 1.0}}), 2, 2.0), std::sqrt(3.0), 1e-15);
  EXPECT_EQ(threshold_base(scalar_family({{{1, 1}, 0.0}, {{3, 2}, 0.0}}), 3, 1.5), 0.0);
  EXPECT_THROW(threshold_base(scalar_family({{{1, 1}, 1.0}}), 1, 2.5), DomainError);
}

TEST(ThresholdBase, AgreesWithBranchMaximum) {
  std::mt19937_64 rng(11);
  const NormedSpaceSpec space = NormedSpaceSpec::make(2, NormKind::L1);
  for (int trial = 0; trial < 100; ++trial) {
    const HaarCombination f = random_family(random_index_set(5, rng), 2, rng);
    for (double r : {1.0, 1.3, 2.0}) {
      double best = 0;
      for (const auto& t : dyadic_grid(5)) {
        double acc = 0;
        for (const auto& idx : branch(t, 5))
          if (const Vector* x = f.find(idx)) acc += std::pow(haar_amplitude(idx.level) * space.norm_of(*x), r);
        best = std::max(best, std::pow(acc, 1 / r));
      }
      EXPECT_NEAR(threshold_base(f, 5, r, space), best, 1e-12 * best);
    }
  }
}

TEST(LevelSetPartition, SpecExamples) {
  const PartitionFamily single = level_set_partition(scalar_family({{{1, 1}, 1.0}}), 1, 1.5);
  ASSERT_EQ(single.pieces.size(), 1u);
  EXPECT_EQ(single.pieces[0], set_of({{1, 1}}));

  // S_2 = sqrt(1 + 0.02); (1,1) has weight 1 in band 1, (2,1) has weight
  // 0.1 sqrt 2 = 0.1414, between S/2^3 and S/2^2.5, so band 6.
  const HaarCombination f = scalar_family({{{1, 1}, 1.0}, {{2, 1}, 0.1}});
  const PartitionFamily two = level_set_partition(f, 2, 2.0);
  EXPECT_NEAR(two.threshold_base, std::sqrt(1.02), 1e-15);
  ASSERT_EQ(two.pieces.size(), 6u);
  EXPECT_EQ(two.pieces[0], set_of({{1, 1}}));
  EXPECT_EQ(two.pieces[5], set_of({{2, 1}}));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_TRUE(two.pieces[i].empty());
  const double w = 0.1 * std::sqrt(2.0);
  EXPECT_TRUE(two.threshold(6) < w && w <= two.threshold(5));

  EXPECT_TRUE(level_set_partition(scalar_family({{{2, 1}, 0.0}}), 2, 1.0).pieces.empty());
}

TEST(LevelSetPartition, ZeroCoefficientsAreDropped) {
  const PartitionFamily fam = level_set_partition(scalar_family({{{1, 1}, 2.0}, {{2, 2}, 0.0}}), 2, 1.0);
  std::size_t members = 0;
  for (const auto& p : fam.pieces) members += p.size();
  EXPECT_EQ(members, 1u);
}

TEST(LevelSetPartition, RandomFamiliesProperties) {
  std::mt19937_64 rng(5);
  const NormedSpaceSpec space = NormedSpaceSpec::make(2, NormKind::Linf);
  for (int trial = 0; trial < 300; ++trial) {
    const HaarCombination f = random_family(tree_band(1, 6), 2, rng);
    for (double r : {1.0, 1.5, 2.0}) {
      const PartitionFamily fam = level_set_partition(f, 6, r, space);
      IndexSet seen;
      for (std::size_t i = 0; i < fam.pieces.size(); ++i) {
        const int l = static_cast<int>(i) + 1;
        for (const auto& idx : fam.pieces[i]) {
          ASSERT_TRUE(seen.insert(idx));
          const double w = haar_amplitude(idx.level) * space.norm_of(f.at(idx));
          ASSERT_TRUE(fam.threshold(l) < w && w <= fam.threshold(l - 1));
        }
        ASSERT_LT(oracle::local_height(fam.pieces[i], 6), 1 << l);
      }
      ASSERT_EQ(seen, f.support());
    }
  }
}

TEST(GreedyFamily, SpecExamples) {
  const HaarCombination single = scalar_family({{{1, 1}, 1.0}});
  const GreedyFamily g = greedy_family(single, 2, 4.0 / 3.0);
  EXPECT_EQ(g.m, 1);
  ASSERT_EQ(g.pieces.size(), 2u);
  EXPECT_TRUE(g.padded[0]);
  EXPECT_GE(g.pieces[0].size(), 3u);
  EXPECT_EQ(g.pieces[0], tree_band(1, 2));
  EXPECT_TRUE(g.pieces[1].empty());

  const GreedyFamily zero = greedy_family(HaarCombination::zeros(tree_band(1, 4), 1), 4, 1.5);
  EXPECT_EQ(zero.m, 2);
  ASSERT_EQ(zero.pieces.size(), 3u);
  EXPECT_TRUE(zero.pieces[0].empty());
  EXPECT_TRUE(zero.pieces[1].empty());
  EXPECT_EQ(zero.pieces[2], tree_band(1, 4));

  EXPECT_THROW(greedy_family(single, 2, 2.0), DomainError);
  EXPECT_THROW(greedy_family(single, 0, 1.5), DomainError);
}

TEST(GreedyFamily, RandomFamiliesOnD15) {
  std::mt19937_64 rng(17);
  const NormedSpaceSpec space = NormedSpaceSpec::make(3, NormKind::L1);
  for (int trial = 0; trial < 200; ++trial) {
    const HaarCombination f = random_family(tree_band(1, 5), 3, rng);
    for (double p : {1.2, 4.0 / 3.0, 1.5}) {
      const GreedyFamily g = greedy_family(f, 5, p, space);
      ASSERT_EQ(g.m, 2);
      ASSERT_EQ(g.pieces.size(), 3u);
      IndexSet seen;
      std::size_t cumulative = 0;
      for (std::size_t i = 0; i < g.pieces.size(); ++i) {
        const int l = static_cast<int>(i) + 1;
        for (const auto& idx : g.pieces[i]) {
          ASSERT_TRUE(seen.insert(idx));
          const double w = haar_amplitude(idx.level) * space.norm_of(f.at(idx));
          ASSERT_LE(w, g.threshold_base / std::pow(2.0, (l - 1) / p));
        }
        ASSERT_LE(oracle::local_height(g.pieces[i], 5), l <= g.m ? (1 << l) : 5);
        cumulative += g.pieces[i].size();
        if (l <= g.m && g.padded[i]) ASSERT_GE(static_cast<std::int64_t>(cumulative), pow2(1 << l) - 1);
      }
      ASSERT_EQ(seen, tree_band(1, 5));
    }
  }
}

TEST(FloorLog2, Values) {
  EXPECT_EQ(floor_log2(1), 0);
  EXPECT_EQ(floor_log2(2), 1);
  EXPECT_EQ(floor_log2(7), 2);
  EXPECT_EQ(floor_log2(8), 3);
}
