#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ftr/leafrank.hpp"
#include "ftr/random.hpp"

namespace {

using namespace ftr;

struct Data {
  FeatureMatrix x;
  std::vector<Label> y;
};

Data random_data(std::size_t n, std::size_t d, std::uint64_t seed, bool discrete = false) {
  auto rng = make_rng(seed, {9});
  Data out{FeatureMatrix(d), {}};
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = discrete ? static_cast<double>(uniform_index(rng, 0, 4)) : normal(rng, 0, 1);
    const double signal = row[0] + 0.5 * (d > 1 ? row[1] : 0.0);
    out.x.add_row(row);
    out.y.push_back(bernoulli(rng, 1.0 / (1.0 + std::exp(-2.0 * signal))) ? Label::Positive : Label::Negative);
  }
  return out;
}

// Risk of the locally optimal label on one side, (2/m) times the cost mass.
double side_risk(double p, double q, double omega, double m) {
  const double plus = omega * q, minus = (1.0 - omega) * p;
  return 2.0 / m * std::min(plus, minus);
}

TEST(LeafRank, StumpMatchesExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto d = random_data(40, 3, seed, seed % 2 == 0);
    for (double omega : {0.3, 0.5, 0.7}) {
      LeafRankParams p;
      p.max_leaves = 2;
      p.min_node = 1;
      const auto tree = train_leafrank(d.x, d.y, omega, p);
      const double m = static_cast<double>(d.y.size());
      double P = 0, Q = 0;
      for (Label l : d.y) (l == Label::Positive ? P : Q) += 1;
      double best = side_risk(P, Q, omega, m);
      for (std::size_t f = 0; f < d.x.cols(); ++f) {
        std::set<double> values;
        for (std::size_t i = 0; i < d.x.rows(); ++i) values.insert(d.x(i, f));
        for (double thr : values) {
          double pl = 0, ql = 0;
          for (std::size_t i = 0; i < d.x.rows(); ++i)
            if (d.x(i, f) <= thr) (d.y[i] == Label::Positive ? pl : ql) += 1;
          best = std::min(best, side_risk(pl, ql, omega, m) + side_risk(P - pl, Q - ql, omega, m));
        }
      }
      EXPECT_NEAR(tree_risk(tree, d.x, d.y, omega), best, 1e-12) << "seed " << seed << " omega " << omega;
    }
  }
}

TEST(LeafRank, WeightedRiskHandCase) {
  const std::vector<Label> truth{Label::Positive, Label::Positive, Label::Negative, Label::Negative};
  const std::vector<Label> pred{Label::Negative, Label::Positive, Label::Positive, Label::Positive};
  // one FN, two FP: (2/4)(0.75)(1) + (2/4)(0.25)(2)
  EXPECT_DOUBLE_EQ(weighted_risk(pred, truth, 0.25), 0.375 + 0.25);
}

TEST(LeafRank, FourPointXorNeedsThreeSplits) {
  FeatureMatrix x(2);
  x.add_row(std::vector<double>{0.0, 0.0});
  x.add_row(std::vector<double>{1.0, 1.0});
  x.add_row(std::vector<double>{0.0, 1.0});
  x.add_row(std::vector<double>{1.0, 0.0});
  const std::vector<Label> y{Label::Positive, Label::Positive, Label::Negative, Label::Negative};
  LeafRankParams p;
  p.min_node = 1;
  p.max_leaves = 4;
  const auto full = train_leafrank(x, y, 0.5, p);
  EXPECT_EQ(full.leaf_count(), 4u);
  EXPECT_EQ(tree_risk(full, x, y, 0.5), 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(full.predict(x.row(i)), y[i]);
  p.max_leaves = 2;
  EXPECT_DOUBLE_EQ(tree_risk(train_leafrank(x, y, 0.5, p), x, y, 0.5), 0.5);
}

TEST(LeafRank, SeparableLineSplitsBetweenClasses) {
  FeatureMatrix x(1);
  for (double v : {1.0, 2.0, 3.0, 4.0}) x.add_row(std::vector<double>{v});
  const std::vector<Label> y{Label::Negative, Label::Negative, Label::Positive, Label::Positive};
  LeafRankParams p;
  p.max_leaves = 2;
  p.min_node = 1;
  const auto tree = train_leafrank(x, y, 0.5, p);
  ASSERT_EQ(tree.leaf_count(), 2u);
  EXPECT_GT(tree.nodes()[0].threshold, 2.0);
  EXPECT_LT(tree.nodes()[0].threshold, 3.0);
  EXPECT_EQ(tree_risk(tree, x, y, 0.5), 0.0);
}

TEST(LeafRank, BoundaryValueGoesLeft) {
  using Node = CostSensitiveTree::Node;
  std::vector<Node> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 2.5;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].label = Label::Positive;
  nodes[2].label = Label::Negative;
  const CostSensitiveTree stump(1, nodes);
  EXPECT_EQ(stump.predict(std::vector<double>{1.0}), Label::Positive);
  EXPECT_EQ(stump.predict(std::vector<double>{2.5}), Label::Positive);
  EXPECT_EQ(stump.predict(std::vector<double>{2.6}), Label::Negative);
}

TEST(LeafRank, PureSampleIsOneLeaf) {
  const auto d = random_data(30, 2, 8);
  const std::vector<Label> all_pos(30, Label::Positive);
  const auto tree = train_leafrank(d.x, all_pos, 0.5);
  EXPECT_EQ(tree.leaf_count(), 1u);
  EXPECT_EQ(tree.nodes()[0].label, Label::Positive);
  EXPECT_EQ(tree_risk(tree, d.x, all_pos, 0.5), 0.0);
}

TEST(LeafRank, RespectsLeafBudgetAndMinimumNodeSize) {
  const auto d = random_data(300, 4, 17);
  for (std::size_t budget : {1u, 2u, 5u, 8u, 20u}) {
    LeafRankParams p;
    p.max_leaves = budget;
    p.min_node = 7;
    const auto tree = train_leafrank(d.x, d.y, 0.5, p);
    EXPECT_LE(tree.leaf_count(), budget);
    // count training rows reaching each leaf
    std::vector<std::size_t> hits(tree.nodes().size(), 0);
    for (std::size_t i = 0; i < d.x.rows(); ++i) {
      int n = 0;
      while (!tree.nodes()[static_cast<std::size_t>(n)].is_leaf()) {
        const auto& nd = tree.nodes()[static_cast<std::size_t>(n)];
        n = d.x(i, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left : nd.right;
      }
      ++hits[static_cast<std::size_t>(n)];
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (tree.nodes()[i].is_leaf()) {
        EXPECT_GE(hits[i], 7u);
      }
    }
  }
}

TEST(LeafRank, RiskIsNonincreasingInLeafBudget) {
  const auto d = random_data(200, 3, 23);
  double prev = INFINITY;
  for (std::size_t budget = 1; budget <= 12; ++budget) {
    LeafRankParams p;
    p.max_leaves = budget;
    p.min_node = 3;
    const double r = tree_risk(train_leafrank(d.x, d.y, 0.4, p), d.x, d.y, 0.4);
    EXPECT_LE(r, prev + 1e-12);
    prev = r;
  }
}

TEST(LeafRank, LeafLabelThresholdAtCostRatio) {
  FeatureMatrix x(1);
  std::vector<Label> y;
  for (int i = 0; i < 6; ++i) {
    x.add_row(std::vector<double>{1.0});
    y.push_back(i < 2 ? Label::Positive : Label::Negative);
  }
  const std::vector<double> probe{1.0};
  // P = 2, Q = 4: plus-cost 4 omega, minus-cost 2 (1 - omega); + iff omega < 1/3
  EXPECT_EQ(train_leafrank(x, y, 0.30).predict(probe), Label::Positive);
  EXPECT_EQ(train_leafrank(x, y, 1.0 / 3.0).predict(probe), Label::Negative);
  EXPECT_EQ(train_leafrank(x, y, 0.40).predict(probe), Label::Negative);
}

TEST(LeafRank, ConstantFeaturesGiveSingleLeaf) {
  FeatureMatrix x(2);
  std::vector<Label> y;
  for (int i = 0; i < 20; ++i) {
    x.add_row(std::vector<double>{3.0, -1.0});
    y.push_back(i % 2 ? Label::Positive : Label::Negative);
  }
  EXPECT_EQ(train_leafrank(x, y, 0.5).leaf_count(), 1u);
}

TEST(LeafRank, DuplicateRowsActAsWeights) {
  const auto d = random_data(60, 2, 31);
  std::vector<std::size_t> doubled;
  for (std::size_t i = 0; i < 60; ++i) {
    doubled.push_back(i);
    doubled.push_back(i);
  }
  LeafRankParams p;
  p.min_node = 2;
  LeafRankParams q;
  q.min_node = 1;
  EXPECT_EQ(train_leafrank(d.x, d.y, doubled, 0.5, p), train_leafrank(d.x, d.y, 0.5, q));
}

TEST(LeafRank, Errors) {
  const auto d = random_data(10, 2, 1);
  const std::vector<std::size_t> none;
  try {
    train_leafrank(d.x, d.y, none, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyEnsemble);
  }
  try {
    train_leafrank(d.x, d.y, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DataError);
  }
  FeatureMatrix empty(0);
  empty.add_row(std::vector<double>{});
  try {
    train_leafrank(empty, std::vector<Label>{Label::Positive}, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidFeatures);
  }
  const auto tree = train_leafrank(d.x, d.y, 0.5);
  try {
    tree.predict(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IndexMismatch);
  }
}

}  // namespace
