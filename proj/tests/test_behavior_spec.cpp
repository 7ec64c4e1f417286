#include <gtest/gtest.h>

#include <random>

#include "regait/behavior_spec.hpp"
#include "regait/error.hpp"

using namespace regait;

namespace {

ConstraintStack one_row_stack() {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Physical, Mat{{1.0, 0.0}}, Vec{{0.0}}, "p"));
  return s;
}

Mat random_mat(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST(Evaluate, SinglePhysicalRow) {
  Evaluation ev = evaluate(one_row_stack(), 0.3, Vec{{4.0, -1.0}});
  EXPECT_EQ(ev.omega, (Mat{{1.0, 0.0}}));
  EXPECT_EQ(ev.gamma, (Vec{{0.0}}));
  ASSERT_EQ(ev.row_class.size(), 1u);
  EXPECT_EQ(ev.row_class[0], Priority::Physical);
}

TEST(Evaluate, EmptyLearnedBlockIsNeutral) {
  ConstraintStack s = one_row_stack();
  s.add(ConstraintBlock::constant(Priority::Learned, Mat(0, 2), Vec(0), "empty"));
  EXPECT_EQ(evaluate(s, 0.0, Vec::Zero(2)).omega.rows(), 1);
}

TEST(Evaluate, BlocksSortedByPriority) {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Learned, Mat{{0.0, 1.0}}, Vec{{2.0}}));
  s.add(ConstraintBlock::constant(Priority::Physical, Mat{{1.0, 0.0}}, Vec{{1.0}}));
  Evaluation ev = evaluate(s, 0.0, Vec::Zero(2));
  EXPECT_EQ(ev.row_class[0], Priority::Physical);
  EXPECT_EQ(ev.gamma(0), 1.0);
}

TEST(Evaluate, DimensionMismatchNamesBlock) {
  ConstraintStack s(3);
  s.add(ConstraintBlock::constant(Priority::Designed, Mat{{1.0, 0.0}}, Vec{{0.0}}, "bad_block"));
  try {
    evaluate(s, 0.0, Vec::Zero(3));
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("bad_block"), std::string::npos);
  }
  EXPECT_THROW(evaluate(one_row_stack(), 0.0, Vec::Zero(3)), DimensionError);
}

TEST(Residual, Examples) {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Designed, Mat::Identity(2, 2), Vec{{3.0, 4.0}}));
  EXPECT_LT(residual(s, 0.0, Vec::Zero(2), Vec{{3.0, 4.0}}).norm(), 1e-15);

  ConstraintStack t(2);
  t.add(ConstraintBlock::constant(Priority::Designed, Mat{{1.0, 0.0}}, Vec{{1.0}}));
  Vec r = residual(t, 0.0, Vec::Zero(2), Vec{{0.0, 5.0}});
  ASSERT_EQ(r.size(), 1);
  EXPECT_DOUBLE_EQ(r(0), -1.0);
  // Physical rows are excluded by default.
  EXPECT_EQ(residual(one_row_stack(), 0.0, Vec::Zero(2), Vec{{7.0, 0.0}}).size(), 0);
}

TEST(SelectActiveRows, DuplicateRejected) {
  ConstraintStack s(3);
  s.add(ConstraintBlock::constant(Priority::Physical, Mat{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}}, Vec::Zero(2)));
  EXPECT_EQ(select_active_rows(s, 0.0, Vec::Zero(3)), std::vector<int>{0});
}

TEST(SelectActiveRows, FullRankPhysicalRejectsLearned) {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Learned, Mat{{1.0, 1.0}}, Vec{{0.0}}));
  s.add(ConstraintBlock::constant(Priority::Physical, Mat::Identity(2, 2), Vec::Zero(2)));
  EXPECT_EQ(select_active_rows(s, 0.0, Vec::Zero(2)), (std::vector<int>{0, 1}));
}

TEST(SelectActiveRows, NeverMoreThanN) {
  std::mt19937_64 rng(4);
  ConstraintStack s(3);
  s.add(ConstraintBlock::constant(Priority::Designed, random_mat(6, 3, rng), Vec::Zero(6)));
  EXPECT_EQ(select_active_rows(s, 0.0, Vec::Zero(3)).size(), 3u);
}

TEST(SolveVelocity, IdentityAndDiagonal) {
  ConstraintStack s(3);
  s.add(ConstraintBlock::constant(Priority::Physical, Mat::Identity(3, 3), Vec{{1.0, 2.0, 3.0}}));
  VelocitySolution v = solve_velocity(s, 0.0, Vec::Zero(3));
  EXPECT_LT((v.v - Vec{{1.0, 2.0, 3.0}}).norm(), 1e-14);
  EXPECT_FALSE(v.underdetermined);

  ConstraintStack d(2);
  d.add(ConstraintBlock::constant(Priority::Physical, Mat{{2.0, 0.0}, {0.0, 4.0}}, Vec{{2.0, 4.0}}));
  EXPECT_LT((solve_velocity(d, 0.0, Vec::Zero(2)).v - Vec{{1.0, 1.0}}).norm(), 1e-14);
}

TEST(SolveVelocity, RankDeficientThrowsUnlessAllowed) {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Physical, Mat{{1.0, 0.0}}, Vec{{2.0}}));
  EXPECT_THROW(solve_velocity(s, 0.0, Vec::Zero(2)), RankDeficientError);
  try {
    solve_velocity(s, 0.0, Vec::Zero(2));
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.report.rank_physical, 1);
  }
  VelocitySolution v = solve_velocity(s, 0.0, Vec::Zero(2), kDefaultTol, true);
  EXPECT_TRUE(v.underdetermined);
  EXPECT_LT((v.v - Vec{{2.0, 0.0}}).norm(), 1e-14);
}

TEST(SolveVelocity, ActiveRowsSatisfied) {
  std::mt19937_64 rng(9);
  ConstraintStack s(4);
  s.add(ConstraintBlock::constant(Priority::Physical, random_mat(2, 4, rng), random_mat(2, 1, rng).col(0)));
  s.add(ConstraintBlock::constant(Priority::Designed, random_mat(3, 4, rng), random_mat(3, 1, rng).col(0)));
  VelocitySolution v = solve_velocity(s, 0.0, Vec::Zero(4));
  Evaluation ev = evaluate(s, 0.0, Vec::Zero(4));
  for (int i : v.active) EXPECT_LT(std::abs(ev.omega.row(i).dot(v.v) - ev.gamma(i)), 1e-10 * (1 + ev.gamma.norm()));
  EXPECT_EQ(v.active.size(), 4u);
}

TEST(CompletionCheck, Examples) {
  EXPECT_TRUE(completion_check(9, 5, 3, 2));
  EXPECT_FALSE(completion_check(9, 7, 3, 2));
  EXPECT_FALSE(completion_check(9, 5, 3, 0));
}

TEST(ControlAffine, Examples) {
  BlockValue b = control_affine_to_spec(Vec{{1.0, 2.0}}, Mat{{1.0}, {0.0}});
  EXPECT_LT((b.omega - Mat{{0.0, 0.0}, {0.0, 1.0}}).norm(), 1e-14);
  EXPECT_LT((b.gamma - Vec{{0.0, 2.0}}).norm(), 1e-14);

  BlockValue full = control_affine_to_spec(Vec{{1.0, 2.0}}, Mat{{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_LT(full.omega.norm(), 1e-12);
  EXPECT_LT(full.gamma.norm(), 1e-12);
}

TEST(ControlAffine, ProjectorIdentitiesAndDriftAgreement) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Mat g = random_mat(5, 2, rng);
    Vec f = random_mat(5, 1, rng).col(0), u = random_mat(2, 1, rng).col(0);
    BlockValue b = control_affine_to_spec(f, g);
    EXPECT_LT((b.omega * g).norm(), 1e-10);
    EXPECT_LT((b.omega * b.omega - b.omega).norm(), 1e-10);
    EXPECT_LT((b.omega * (f + g * u) - b.gamma).norm(), 1e-9);
  }
}

TEST(RankAugmentation, VacuousBase) {
  auto empty = [](const Vec&) { return Mat(0, 3); };
  std::vector<Vec> samples{Vec{{0.1, 0.2, 0.3}}, Vec{{-1.0, 0.5, 2.0}}};
  EXPECT_DOUBLE_EQ(augment_random_rank(empty, samples, 1, 3), 1.0);
}

TEST(RankAugmentation, BasisRowsOverSeeds) {
  const int n = 5, k = 3, count = (n + (n - k) - 1) / (n - k) + 1;
  auto base = [](const Vec&) {
    Mat a = Mat::Zero(3, 5);
    a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
    return a;
  };
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  int hits = 0;
  for (int seed = 0; seed < 1000; ++seed) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = nd(rng);
    hits += augment_random_rank(base, {x}, count, static_cast<std::uint64_t>(seed)) >= 1.0;
  }
  EXPECT_GE(hits, 999);
}

TEST(RankAugmentation, DuplicateRowsNeverHelp) {
  auto base = [](const Vec&) { return Mat{{1.0, 0.0, 0.0}}; };
  auto dup = [](const Vec&) { return Mat{{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}; };
  std::vector<Vec> samples(10, Vec::Zero(3));
  EXPECT_DOUBLE_EQ(rank_gain_rate(base, samples, dup), 0.0);
}

TEST(RankAugmentation, FullRankBaseIsAnError) {
  auto base = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
  EXPECT_THROW(augment_random_rank(base, {Vec::Zero(2)}, 1, 0), Error);
}

TEST(Transversality, BoundAndStudy) {
  EXPECT_EQ(transversality_bound(3, 1), 2);
  EXPECT_EQ(transversality_bound(5, 3), 3);
  EXPECT_EQ(transversality_bound(9, 5), 3);
  EXPECT_EQ(transversality_bound(4, 2), 3);  // strict inequality
  TransversalityStudy st = transversality_study(5, 3, 3, 200, 1);
  EXPECT_GE(st.success_rate(), 0.999);
  TransversalityStudy again = transversality_study(5, 3, 3, 200, 1);
  EXPECT_EQ(st.successes, again.successes);
}

TEST(StackJson, RoundTrip) {
  ConstraintStack s(2);
  s.add(ConstraintBlock::constant(Priority::Physical, Mat{{1.0, 0.0}}, Vec{{0.5}}, "p"));
  FourierSeries f;
  f.order = 1;
  f.a0 = 0.25;
  f.a = Vec{{1.0}};
  f.b = Vec{{0.0}};
  s.add(ConstraintBlock::fourier_in_time(Priority::Learned, Mat{{0.0, 1.0}}, {f}, 2.0, "l"));
  ConstraintStack back = ConstraintStack::from_json(s.to_json());
  EXPECT_EQ(back.ambient_dim(), 2);
  for (double t : {0.0, 0.3, 1.7}) {
    Evaluation a = evaluate(s, t, Vec::Zero(2)), b = evaluate(back, t, Vec::Zero(2));
    EXPECT_EQ(a.omega, b.omega);
    EXPECT_NEAR((a.gamma - b.gamma).norm(), 0.0, 1e-15);
  }
  EXPECT_THROW(ConstraintStack::from_json("{\"ambient_dim\": 2, \"blocks\": [{\"class\": \"bogus\"}]}"), Error);
}
