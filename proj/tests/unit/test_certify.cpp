#include <cmath>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <gilbert/certify.hpp>
#include <gilbert/flows.hpp>
#include <gilbert/optimizer.hpp>

#include "suite.hpp"

using namespace gilbert;
using gilbert::testing::v2;

namespace {

const SteinerTopology kStar3{3, 1, {{0, 3}, {1, 3}, {2, 3}}};

Instance symmetric() {
  Instance inst;
  inst.weight = {1, 1};
  inst.sources = {{v2(-1, 1), 1.0}, {v2(1, 1), 1.0}};
  inst.sink = v2(0, -1);
  return inst;
}

LocalStar manual_star(const std::vector<Vector>& incoming, const std::vector<double>& flows, const Vector& out) {
  LocalStar s;
  s.center = v2(0, 0);
  double total = 0.0;
  for (size_t i = 0; i < incoming.size(); ++i) {
    s.incoming.push_back({static_cast<int>(i), incoming[i], flows[i]});
    total += flows[i];
  }
  s.outgoing = {static_cast<int>(incoming.size()), out, total};
  return s;
}

Vector unit_at(double degrees) {
  const double r = degrees * M_PI / 180.0;
  return v2(std::cos(r), std::sin(r));
}

// Three sources on the +x ray (aligned duals), sink on the -x ray, centre at
// the origin. All incoming slacks of the full subset equal -2d.
struct AlignedFour {
  Instance inst;
  EmbeddedArborescence arb;
};

AlignedFour aligned_four(double d, double h, double p) {
  AlignedFour a;
  a.inst.space = NormSpace::lp(p);
  a.inst.weight = {d, h};
  a.inst.sources = {{v2(1, 0), 1.0}, {v2(2, 0), 0.5}, {v2(3, 0), 2.0}};
  a.inst.sink = v2(-1.5, 0);
  a.arb = embed(a.inst, SteinerTopology{4, 1, {{0, 4}, {1, 4}, {2, 4}, {4, 3}}}, std::vector<Vector>{v2(0, 0)});
  return a;
}

}  // namespace

TEST(LocalStar, SymmetricInstanceStar) {
  const EmbeddedArborescence a = embed(symmetric(), kStar3, std::vector<Vector>{v2(0, -0.1)});
  const LocalStar s = local_star(a, 3);
  ASSERT_EQ(s.incoming.size(), 2u);
  EXPECT_EQ(s.incoming[0].flow, 1.0);
  EXPECT_EQ(s.incoming[1].flow, 1.0);
  EXPECT_EQ(s.outgoing.flow, 2.0);
  EXPECT_EQ(s.outgoing.neighbor, 2);
  // Sink-adjacent: outgoing direction is sink minus centre.
  EXPECT_EQ(s.outgoing.direction, v2(0, -1) - v2(0, -0.1));
}

TEST(LocalStar, ChainSteinerPointAggregatesFlow) {
  Instance inst;
  inst.sources = {{v2(0, 0), 1.0}, {v2(1, 0), 2.0}, {v2(1, 1), 4.0}};
  inst.sink = v2(0, 1);
  const SteinerTopology t{4, 2, {{0, 4}, {1, 4}, {4, 5}, {2, 5}, {5, 3}}};
  const EmbeddedArborescence a = embed(inst, t, std::vector<Vector>{v2(0.4, 0.3), v2(0.6, 0.7)});
  const LocalStar s = local_star(a, 5);
  ASSERT_EQ(s.incoming.size(), 2u);
  double from_steiner = 0.0;
  for (const StarArm& arm : s.incoming) {
    if (arm.neighbor == 4) from_steiner = arm.flow;
  }
  EXPECT_EQ(from_steiner, 1.0 + 2.0);  // sources 0 and 1 sit behind vertex 4
  EXPECT_EQ(s.outgoing.flow, 7.0);
}

TEST(LocalStar, Errors) {
  const EmbeddedArborescence a = embed(symmetric(), kStar3, std::vector<Vector>{v2(0, 0)});
  EXPECT_THROW(local_star(a, 0), InvalidInput);
  EXPECT_THROW(local_star(a, 9), InvalidInput);
}

TEST(CheckBalancing, ThreeUnitDirectionsAt120Degrees) {
  const LocalStar s = manual_star({unit_at(90), unit_at(210)}, {1, 1}, unit_at(330));
  EXPECT_LT(check_balancing(s, {1, 0}, NormSpace::euclidean()), 1e-15);
}

TEST(CheckBalancing, AlignedDirectionsAreMaximallyUnbalanced) {
  const WeightFunction w{1, 1};
  const LocalStar s = manual_star({v2(1, 0), v2(2, 0)}, {1, 2}, v2(3, 0));
  EXPECT_NEAR(check_balancing(s, w, NormSpace::euclidean()), w(1) + w(2) + w(3), 1e-14);
}

// Independent reference: grid value from the fixture, then bisection on the
// sign of the analytic derivative of the cost along the symmetry axis.
TEST(CheckBalancing, SymmetricInstanceAtRefinedOracleOptimum) {
  std::ifstream in(GILBERT_FIXTURE_DIR "/symmetric_golden.json");
  ASSERT_TRUE(in);
  const nlohmann::json golden = nlohmann::json::parse(in);
  const double y0 = golden.at("steiner").at(1).get<double>();
  const double h = golden.at("spacing").get<double>();
  const auto derivative = [](double y) {
    const double r = std::hypot(1.0, 1.0 - y);
    return 2.0 * (y - 1.0) / r * 2.0 + 3.0 * (y + 1.0) / std::abs(y + 1.0);
  };
  double lo = y0 - 2 * h, hi = y0 + 2 * h;
  ASSERT_LT(derivative(lo), 0.0);
  ASSERT_GT(derivative(hi), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) < 0.0 ? lo : hi) = mid;
  }
  const EmbeddedArborescence a = embed(symmetric(), kStar3, std::vector<Vector>{v2(0, 0.5 * (lo + hi))});
  EXPECT_LE(check_balancing(local_star(a, 3), {1, 1}, NormSpace::euclidean()), 1e-8);
}

TEST(CheckCollapsing, SingletonsAreZero) {
  for (double p : {1.5, 2.0, 3.0}) {
    const LocalStar s = manual_star({v2(1, 0.3), v2(-0.2, 1), v2(-1, -0.4)}, {1, 2, 0.5}, v2(0.3, -1));
    for (const SubsetSlack& sl : check_collapsing(s, {0.7, 1.3}, NormSpace::lp(p))) {
      if (sl.subset.size() == 1) EXPECT_NEAR(sl.slack, 0.0, 1e-12);
    }
  }
}

TEST(CheckCollapsing, EqualDirectionsViolate) {
  const LocalStar s = manual_star({v2(1, 0), v2(2, 0)}, {1, 1}, v2(-1, 0));
  const auto slacks = check_collapsing(s, {1, 1}, NormSpace::euclidean());
  ASSERT_EQ(slacks.size(), 3u);
  EXPECT_EQ(slacks[2].subset, (std::vector<int>{0, 1}));
  EXPECT_NEAR(slacks[2].slack, 3.0 - 4.0, 1e-14);
}

TEST(CheckCollapsing, Directions120DegreesApartSatisfy) {
  const LocalStar s = manual_star({unit_at(90), unit_at(210)}, {1, 1}, unit_at(330));
  const auto slacks = check_collapsing(s, {1, 1}, NormSpace::euclidean());
  EXPECT_NEAR(slacks[2].slack, 3.0 - 2.0, 1e-14);
}

TEST(CheckCollapsing, EnumeratesEveryNonEmptySubset) {
  for (int n = 1; n <= 6; ++n) {
    std::vector<Vector> dirs;
    std::vector<double> flows;
    for (int i = 0; i < n; ++i) {
      dirs.push_back(unit_at(20.0 + 40.0 * i));
      flows.push_back(1.0 + i);
    }
    const auto slacks = check_collapsing(manual_star(dirs, flows, unit_at(-90)), {1, 1}, NormSpace::euclidean());
    EXPECT_EQ(slacks.size(), (size_t{1} << n) - 1);
  }
  std::vector<Vector> many(17, v2(1, 0));
  EXPECT_THROW(check_collapsing(manual_star(many, std::vector<double>(17, 1.0), v2(-1, 0)), {1, 1},
                                NormSpace::euclidean()),
               SizeLimitExceeded);
}

TEST(Certify, EquilateralSolverOutputPasses) {
  Instance inst;
  inst.sources = {{v2(0, 0), 1.0}, {v2(1, 0), 1.0}};
  inst.sink = v2(0.5, std::sqrt(3.0) / 2);
  const SolveResult r = solve(inst);
  const Certificate c = certify(r.arborescence, inst);
  EXPECT_TRUE(c.pass);
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].degree, 3);
  EXPECT_LE(c.max_balancing_residual(), 1e-8);
}

TEST(Certify, DegreeFourStarBalancedButSplittable) {
  // Two sources on the +x ray, one source and the sink on the -x ray, h = 0:
  // the dual vectors cancel in pairs, yet the two +x arms want to merge.
  Instance inst;
  inst.weight = {1, 0};
  inst.sources = {{v2(1, 0), 1.0}, {v2(2, 0), 1.0}, {v2(-2, 0), 1.0}};
  inst.sink = v2(-1, 0);
  const EmbeddedArborescence a =
      embed(inst, SteinerTopology{4, 1, {{0, 4}, {1, 4}, {2, 4}, {4, 3}}}, std::vector<Vector>{v2(0, 0)});
  const Certificate c = certify(a, inst);
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].degree, 4);
  EXPECT_LE(c.points[0].balancing_residual, 1e-15);
  EXPECT_NEAR(c.min_collapsing_slack(), -inst.weight.d, 1e-14);
  EXPECT_FALSE(c.pass);
}

TEST(Certify, AlignedDegreeFourSlackIsMinusTwoD) {
  for (double d : {0.5, 1.0}) {
    for (double h : {0.0, 0.5, 2.0}) {
      const AlignedFour a = aligned_four(d, h, 3.0);
      const Certificate c = certify(a.arb, a.inst);
      EXPECT_NEAR(c.points[0].collapsing_slacks.back().slack, -2 * d, 1e-12);
      EXPECT_FALSE(c.pass);
    }
  }
}

TEST(Certify, PerturbedOptimumFails) {
  const Instance inst = symmetric();
  SolveResult r = solve(inst);
  ASSERT_TRUE(r.certified());
  EmbeddedArborescence moved = r.arborescence;
  const int s = moved.steiner_ids().front();
  relocate(moved, s, moved.vertices[static_cast<size_t>(s)].position + v2(1e-2 * diameter(inst), 0));
  const Certificate c = certify(moved, inst);
  EXPECT_GT(c.max_balancing_residual(), 1e-8);
  EXPECT_FALSE(c.pass);
}

TEST(Certify, RejectsMismatchedInstance) {
  const Instance inst = symmetric();
  const SolveResult r = solve(inst);
  Instance other = inst;
  other.weight.h = 2;
  EXPECT_THROW(certify(r.arborescence, other), InvalidInput);
}

TEST(SplitImprove, AlignedPairDecreasesCost) {
  Instance inst;
  inst.weight = {1, 1};
  inst.sources = {{v2(1, 0), 1.0}, {v2(2, 0), 1.0}};
  inst.sink = v2(-1, 0);
  const EmbeddedArborescence a = embed(inst, kStar3, std::vector<Vector>{v2(0, 0)});
  const std::vector<int> both{0, 1};
  const SplitResult r = split_improve(a, 3, both, inst);
  EXPECT_LT(r.split_delta, 0.0);
  EXPECT_LT(r.cost_delta, 0.0);
  EXPECT_NEAR(total_cost(r.arborescence), total_cost(a) + r.cost_delta, 1e-12);
  EXPECT_NO_THROW(validate_arborescence(r.arborescence));
}

TEST(SplitImprove, ProofGeometryMatchesMinusDTimesDistance) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double h : {0.0, 0.5, 2.0}) {
      const AlignedFour a = aligned_four(0.75, h, p);
      const std::vector<int> pair{0, 1};
      const SplitResult r = split_improve(a.arb, 4, pair, a.inst);
      EXPECT_NEAR(r.split_delta, -0.75 * norm(a.inst.space, r.split_point), 1e-12);
      EXPECT_LE(r.cost_delta, r.split_delta);
      const std::vector<int> all{0, 1, 2};
      EXPECT_LT(split_improve(a.arb, 4, all, a.inst).cost_delta, 0.0);
    }
  }
}

TEST(SplitImprove, RefusesWhenCollapsingHolds) {
  Instance inst;
  inst.sources = {{v2(0, 0), 1.0}, {v2(1, 0), 1.0}};
  inst.sink = v2(0.5, std::sqrt(3.0) / 2);
  const EmbeddedArborescence a = embed(inst, kStar3, std::vector<Vector>{v2(0.5, std::sqrt(3.0) / 6)});
  const std::vector<int> both{0, 1};
  EXPECT_THROW(split_improve(a, 3, both, inst), PreconditionViolated);
  const std::vector<int> bad{0, 0};
  EXPECT_THROW(split_improve(a, 3, bad, inst), InvalidInput);
  const std::vector<int> out_of_range{5};
  EXPECT_THROW(split_improve(a, 3, out_of_range, inst), InvalidInput);
}
