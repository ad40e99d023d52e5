#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "assoc_clt/blocking.hpp"
#include "oracles.hpp"

using namespace assoc_clt;

namespace {
CovarianceModel ma1() { return CovarianceModel::finite(1, {{MultiIndex{0}, 2.0}, {MultiIndex{1}, 1.0}}); }
}  // namespace

TEST(ChooseP, GeometricMean) {
  EXPECT_EQ(choose_p(MultiIndex{100}, MultiIndex{1}), MultiIndex{10});
  EXPECT_EQ(choose_p(MultiIndex{1000000}, MultiIndex{100}), MultiIndex{10000});
  EXPECT_EQ(choose_p(MultiIndex{37, 12}, MultiIndex{37, 12}), (MultiIndex{37, 12}));
}

TEST(Partition, OneDimensionalExample) {
  const auto plan = partition(MultiIndex{10}, MultiIndex{3}, MultiIndex{1});
  ASSERT_EQ(plan.blocks.size(), 2u);
  EXPECT_EQ(enumerate_box(plan.blocks[0]), (std::vector<MultiIndex>{{1}, {2}, {3}}));
  EXPECT_EQ(enumerate_box(plan.blocks[1]), (std::vector<MultiIndex>{{5}, {6}, {7}}));
  EXPECT_EQ(plan.block_count, 2);
  EXPECT_EQ(plan.m_counts, MultiIndex{2});
  EXPECT_EQ(plan.corridor_cardinality, 4);
  EXPECT_EQ(corridor_points(plan), (std::vector<MultiIndex>{{4}, {8}, {9}, {10}}));
  EXPECT_LE(plan.m_lower(), plan.block_count);
  EXPECT_LE(plan.block_count, plan.m_upper());
}

TEST(Partition, TwoDimensionalExample) {
  const auto plan = partition(MultiIndex{10, 10}, MultiIndex{3, 3}, MultiIndex{1, 1});
  EXPECT_EQ(plan.block_count, 4);
  EXPECT_EQ(plan.corridor_cardinality, 64);
}

TEST(Partition, SingleBlockFillsBox) {
  const auto plan = partition(MultiIndex{5}, MultiIndex{5}, MultiIndex{1});
  EXPECT_EQ(plan.block_count, 1);
  EXPECT_EQ(plan.corridor_cardinality, 0);
  EXPECT_EQ(plan.blocks.front(), Box::from_extent(MultiIndex{5}));
}

TEST(Partition, Preconditions) {
  EXPECT_THROW((void)partition(MultiIndex{10}, MultiIndex{11}, MultiIndex{1}), std::invalid_argument);
  EXPECT_THROW((void)partition(MultiIndex{10}, MultiIndex{3}, MultiIndex{4}), std::invalid_argument);
  EXPECT_THROW((void)partition(MultiIndex{10}, MultiIndex{3}, MultiIndex{0}), std::invalid_argument);
}

TEST(Corridor, MovingAverageExample) {
  const auto cb = corridor_variance_bound(partition(MultiIndex{10}, MultiIndex{3}, MultiIndex{1}), ma1());
  EXPECT_DOUBLE_EQ(cb.bound, 16.0);
  EXPECT_DOUBLE_EQ(cb.exact, 12.0);
  EXPECT_TRUE(cb.holds);
}

TEST(Corridor, EmptyAndIid) {
  const auto empty = corridor_variance_bound(partition(MultiIndex{5}, MultiIndex{5}, MultiIndex{1}), ma1());
  EXPECT_EQ(empty.bound, 0.0);
  EXPECT_EQ(empty.exact, 0.0);
  const auto plan = partition(MultiIndex{9, 11}, MultiIndex{3, 2}, MultiIndex{1, 2});
  const auto iid = corridor_variance_bound(plan, CovarianceModel::iid(2, 1.5));
  EXPECT_DOUBLE_EQ(iid.exact, 1.5 * static_cast<double>(plan.corridor_cardinality));
  EXPECT_DOUBLE_EQ(iid.exact, iid.bound);
}

TEST(Corridor, StructuredMatchesPairSum) {
  const auto model = CovarianceModel::radial_power(2, 1.0, 1.0);
  const auto plan = partition(MultiIndex{23, 17}, MultiIndex{5, 4}, MultiIndex{2, 3});
  std::vector<std::vector<std::int64_t>> pts;
  for (const auto& p : corridor_points(plan)) pts.push_back({p[0], p[1]});
  long double s = 0.0L;
  for (const auto& a : pts) {
    for (const auto& b : pts) s += oracle::radial_power({a[0] - b[0], a[1] - b[1]}, 1.0);
  }
  EXPECT_NEAR(corridor_variance_structured(plan, model), static_cast<double>(s), 1e-9 * static_cast<double>(s));
}

TEST(Schedule, ConstantFunction) {
  const auto L = SlowVaryFn::lattice(1, [](const MultiIndex&) { return 1.0; });
  ScheduleOptions opts;
  opts.cap_log2 = 20;
  const auto s = build_schedule(L, opts);
  for (const auto& n0 : s.n0_seq()) EXPECT_EQ(n0, MultiIndex{1});
  for (int j = 1; j <= 20; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    const auto logn = static_cast<std::int64_t>(std::floor(std::log(static_cast<double>(n))));
    EXPECT_EQ(s.q_of(MultiIndex{n}), MultiIndex{std::max<std::int64_t>(logn, 1)});
  }
}

TEST(Schedule, LogFunction) {
  const auto L = SlowVaryFn::lattice(1, [](const MultiIndex& n) { return std::log(std::max<double>(n[0], 2.0)); });
  ScheduleOptions opts;
  opts.cap_log2 = 24;
  const auto s = build_schedule(L, opts);
  std::int64_t prev = 0;
  for (int j = 1; j <= 20; ++j) {
    const MultiIndex n{std::int64_t{1} << j};
    const auto q = s.q_of(n);
    EXPECT_LE(q[0], n[0]);
    EXPECT_GE(q[0], prev);
    prev = q[0];
  }
  const MultiIndex n{std::int64_t{1} << 20};
  const auto q = s.q_of(n);
  // the schedule reaches R = 4 by 2^20: q = 2^18 and the ratio is 20/18
  EXPECT_EQ(q, MultiIndex{std::int64_t{1} << 18});
  EXPECT_NEAR(L(n) / L(q), 20.0 / 18.0, 1e-12);
}

TEST(Schedule, RejectsNonMonotone) {
  const auto L = SlowVaryFn::lattice(1, [](const MultiIndex& n) { return std::sin(static_cast<double>(n[0])) + 2.0; });
  EXPECT_THROW((void)build_schedule(L), std::domain_error);
}

TEST(Schedule, FailsWhenNotSlowlyVarying) {
  const auto L = SlowVaryFn::lattice(1, [](const MultiIndex& n) { return static_cast<double>(n[0]); });
  ScheduleOptions opts;
  opts.cap_log2 = 16;
  EXPECT_THROW((void)build_schedule(L, opts), std::runtime_error);
}
