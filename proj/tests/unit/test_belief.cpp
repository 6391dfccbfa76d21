#include "panoworld/belief/policy.hpp"
#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/world/render.hpp"
#include "patterns.hpp"

#include <gtest/gtest.h>

#include <random>

namespace panoworld::belief {
namespace {

using explore::ExplorationConfig;

constexpr int kW = 128;
constexpr int kH = 64;

// A wall at x = 4 hides the slot region around (8, 2) from the origin; a
// point at (6, -2) sees it.
std::shared_ptr<const HypothesisSpace> occluded_space(double ax = 8.0, double az = 2.0) {
  world::Scene base = testing::empty_scene();
  base.ground.tile_size = 2.0;
  base.primitives.push_back({world::PrimitiveKind::Box, {4.0, 1.5, 2.25}, {0.5, 3.0, 5.5}, {0.6f, 0.55f, 0.5f}, "wall"});
  const world::Primitive ambulance{world::PrimitiveKind::Box, {ax, 1.0, az}, {3.0, 2.0, 2.0}, {0.95f, 0.95f, 0.95f},
                                   "ambulance"};
  world::Primitive siren{world::PrimitiveKind::Box, {ax - 1.2, 2.2, az}, {0.4, 0.4, 0.6}, {0.9f, 0.1f, 0.1f}, {}};
  world::Primitive siren_away = siren;
  siren_away.center.x() = ax + 1.2;
  Slot slot{"ambulance", {{"absent", {}}, {"toward", {ambulance, siren}}, {"away", {ambulance, siren_away}}}};
  return std::make_shared<const HypothesisSpace>(base, std::vector<Slot>{slot});
}

const world::Pose kOrigin{{0.0, 1.6, 0.0}, 0.0};
const world::Pose kTaxi{{6.0, 1.6, -2.0}, geo::kHalfPi};

explore::ExplorationSession oracle_session(const world::Scene& truth, const world::Pose& pose,
                                           explore::GeneratorSpec spec = {}) {
  auto scene = std::make_shared<const world::Scene>(truth);
  auto gen = explore::make_generator(spec, scene);
  return explore::ExplorationSession(gen, world::render_panorama(truth, pose, kW, kH), pose);
}

TEST(HypothesisSpace, ProductStructure) {
  world::Scene base = testing::empty_scene();
  Slot a{"a", {{"x", {}}, {"y", {}}}};
  Slot b{"b", {{"p", {}}, {"q", {}}, {"r", {}}}};
  const HypothesisSpace space(base, {a, b});
  EXPECT_EQ(space.size(), 6u);
  for (std::size_t h = 0; h < 6; ++h) {
    EXPECT_EQ(space.index_of({space.value_of(h, 0), space.value_of(h, 1)}), h);
  }
  EXPECT_EQ(space.id(space.find({{"a", "y"}, {"b", "r"}})), "a=y,b=r");
  EXPECT_THROW(space.find({{"a", "z"}, {"b", "r"}}), Error);
  EXPECT_THROW(HypothesisSpace(base, {Slot{"c", {{"x", {}}, {"x", {}}}}}), Error);
}

TEST(HypothesisSpace, RealizeAndJson) {
  const auto space = occluded_space();
  EXPECT_EQ(space->realize(0).primitives.size(), 1u);
  EXPECT_EQ(space->realize(1).primitives.size(), 3u);
  const HypothesisSpace back = HypothesisSpace::from_json(space->to_json());
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(world::serialize(back.realize(2)), world::serialize(space->realize(2)));
}

TEST(Belief, NormalizationAndDumps) {
  const Belief b = Belief::from_weights({1.0, 2.0, 7.0});
  EXPECT_NEAR(b[0] + b[1] + b[2], 1.0, 1e-15);
  EXPECT_THROW(Belief::from_weights({-1.0, 2.0}), Error);
  EXPECT_THROW(Belief::from_weights({0.0, 0.0}), Error);
  EXPECT_NEAR(Belief::uniform(4).entropy(), std::log(4.0), 1e-15);
  EXPECT_EQ(Belief::point(3, 1).entropy(), 0.0);
  const auto space = occluded_space();
  const Belief odd = Belief::from_weights({0.1, 0.7, 0.2});
  const nlohmann::json d = dump(*space, odd);
  EXPECT_EQ(d["hypotheses"][1]["id"], "ambulance=toward");
  EXPECT_EQ(belief_from_dump(*space, nlohmann::json::parse(d.dump())), odd);
}

TEST(BayesUpdate, HandComputedCases) {
  const Belief u = Belief::uniform(3);
  const Belief post = bayes_update(u, {0.5, 0.25, 0.25});
  EXPECT_NEAR(post[0], 0.5, 1e-15);
  EXPECT_NEAR(post[1], 0.25, 1e-15);
  EXPECT_NEAR(post[2], 0.25, 1e-15);
  const Belief prior = Belief::from_weights({0.2, 0.3, 0.5});
  const Belief same = bayes_update(prior, {0.4, 0.4, 0.4});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(same[i], prior[i], 1e-15);
  // (0.2*0.9, 0.3*0.1, 0.5*0.5) / 0.46
  const Belief mixed = bayes_update(prior, {0.9, 0.1, 0.5});
  EXPECT_NEAR(mixed[0], 0.18 / 0.46, 1e-15);
  EXPECT_NEAR(mixed[2], 0.25 / 0.46, 1e-15);
}

TEST(BayesUpdate, ContradictionIsTyped) {
  try {
    bayes_update(Belief::from_weights({1.0, 0.0}), {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Contradiction);
  }
  EXPECT_THROW(bayes_update(Belief::uniform(2), {1.5, 0.0}), Error);
}

TEST(BayesUpdate, SequentialEqualsJoint) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> l1(5), l2(5), joint(5);
    for (int i = 0; i < 5; ++i) {
      l1[i] = u(rng);
      l2[i] = u(rng);
      joint[i] = l1[i] * l2[i];
    }
    const Belief prior = Belief::from_weights({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const Belief a = bayes_update(bayes_update(prior, l1), l2);
    const Belief b = bayes_update(prior, joint);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(OraclePerception, OccludedSlotIsUninformativeUntilSeen) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  const world::Scene truth = space->realize(1);
  const Observation here{world::render_panorama(truth, kOrigin, kW, kH), kOrigin};
  const Belief at_origin = physical_update(Belief::uniform(3), here, model);
  EXPECT_EQ(at_origin, Belief::uniform(3));
  const ExplorationUpdate walk = physical_exploration(Belief::uniform(3), truth, kOrigin,
                                                      belief::path_to_pose(kOrigin, kTaxi), model, kW, kH);
  EXPECT_EQ(walk.belief[1], 1.0);
  EXPECT_EQ(walk.belief[0], 0.0);
  EXPECT_LE(walk.belief.entropy(), Belief::uniform(3).entropy());
}

TEST(OraclePerception, LikelihoodsAreBinary) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  const world::Scene truth = space->realize(2);
  for (const world::Pose& p : {kOrigin, kTaxi}) {
    for (double l : model.likelihoods({world::render_panorama(truth, p, kW, kH), p})) {
      EXPECT_TRUE(l == 0.0 || l == 1.0);
    }
  }
}

TEST(ImaginativeUpdate, MatchesPhysicalWeightForWeight) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(6.5, 10.0), side(1.5, 4.0);
  for (int trial = 0; trial < 6; ++trial) {
    const auto space = occluded_space(pos(rng), side(rng));
    const OraclePerception model(space);
    const std::size_t truth_index = static_cast<std::size_t>(trial % 3);
    const world::Scene truth = space->realize(truth_index);
    std::vector<ExplorationConfig> configs = belief::path_to_pose(kOrigin, kTaxi);
    configs.push_back({0.4, 0.8, 2, 0.0});
    const ExplorationUpdate phys = physical_exploration(Belief::uniform(3), truth, kOrigin, configs, model, kW, kH);
    const ExplorationUpdate imag = imaginative_update(Belief::uniform(3), oracle_session(truth, kOrigin), configs, model);
    ASSERT_EQ(phys.trace.size(), imag.trace.size());
    for (std::size_t i = 0; i < phys.trace.size(); ++i) {
      for (std::size_t h = 0; h < 3; ++h) EXPECT_NEAR(phys.trace[i][h], imag.trace[i][h], 1e-12);
    }
    EXPECT_EQ(imag.belief.argmax(), truth_index);
  }
}

TEST(ImaginativeUpdate, EmptyPathAndFrozenSession) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  const explore::ExplorationSession s = oracle_session(space->realize(1), kOrigin);
  const Belief prior = Belief::from_weights({0.2, 0.5, 0.3});
  EXPECT_EQ(imaginative_update(prior, s, {}, model).belief, prior);
  imaginative_update(prior, s, belief::path_to_pose(kOrigin, kTaxi), model);
  EXPECT_EQ(s.step_count(), 0);
  EXPECT_EQ(s.imagined_pose().position, kOrigin.position);
}

TEST(ImaginativeUpdate, NoisyViewsContradictExactPerception) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  explore::GeneratorSpec noisy;
  noisy.kind = "noisy-oracle";
  noisy.sigma = 0.05;
  const explore::ExplorationSession s = oracle_session(space->realize(1), kOrigin, noisy);
  try {
    imaginative_update(Belief::uniform(3), s, belief::path_to_pose(kOrigin, kTaxi), model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Contradiction);
  }
}

TEST(ImaginativeUpdate, LowFidelityImaginationLeavesMoreUncertainty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(6.5, 10.0), side(1.5, 4.0);
  explore::GeneratorSpec noisy;
  noisy.kind = "noisy-oracle";
  noisy.sigma = 0.2;
  double exact_entropy = 0.0, noisy_entropy = 0.0;
  const int n = 12;
  for (int trial = 0; trial < n; ++trial) {
    const auto space = occluded_space(pos(rng), side(rng));
    const ProbabilisticPerception model(space);
    const world::Scene truth = space->realize(static_cast<std::size_t>(trial % 3));
    const auto path = belief::path_to_pose(kOrigin, kTaxi);
    exact_entropy += imaginative_update(Belief::uniform(3), oracle_session(truth, kOrigin), path, model).belief.entropy();
    noisy_entropy += imaginative_update(Belief::uniform(3), oracle_session(truth, kOrigin, noisy), path, model)
                         .belief.entropy();
  }
  EXPECT_GE(noisy_entropy / n, exact_entropy / n);
}

TEST(PathToPose, ReachesTarget) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10.0, 10.0), a(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const world::Pose from{{u(rng), 1.6, u(rng)}, a(rng)};
    const world::Pose to{{u(rng), 1.6, u(rng)}, a(rng)};
    world::Pose p = from;
    for (const ExplorationConfig& c : belief::path_to_pose(from, to)) p = explore::advance(p, c);
    EXPECT_LT((p.position - to.position).norm(), 1e-9);
    EXPECT_LT(std::abs(geo::wrap_pi(p.yaw - to.yaw)), 1e-12);
  }
  EXPECT_TRUE(belief::path_to_pose(kOrigin, kOrigin).empty());
}

TEST(InferOtherAgent, DegenerateDisplacement) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  const explore::ExplorationSession s = oracle_session(space->realize(1), kOrigin);
  const OtherAgentInference r = infer_other_agent(Belief::uniform(3), s, kOrigin, model);
  EXPECT_TRUE(r.path.empty());
  EXPECT_EQ(r.imagined.view, s.current_view());
  EXPECT_EQ(r.belief, physical_update(Belief::uniform(3), {s.current_view(), kOrigin}, model));
}

TEST(InferOtherAgent, TaxiSeesTheAmbulance) {
  const auto space = occluded_space();
  const OraclePerception model(space);
  const world::Scene truth = space->realize(1);
  const explore::ExplorationSession s = oracle_session(truth, kOrigin);
  const OtherAgentInference r = infer_other_agent(Belief::uniform(3), s, kTaxi, model);
  EXPECT_EQ(r.imagined.view, world::render_panorama(truth, kTaxi, kW, kH));
  EXPECT_EQ(r.belief[1], 1.0);
  // The self agent cannot see it from where it stands.
  const Belief own = physical_update(Belief::uniform(3), {s.current_view(), kOrigin}, model);
  EXPECT_EQ(own, Belief::uniform(3));

  const YieldPolicy policy(*space, 0, {1});
  const Goal goal{"cross the intersection"};
  EXPECT_EQ(multi_agent_decide({own}, goal, policy).action, "proceed");
  EXPECT_EQ(multi_agent_decide({own, r.belief}, goal, policy).action, "yield");
}

TEST(Policy, SingleAgentDegenerationAndSymmetry) {
  const auto space = occluded_space();
  const DecisionTablePolicy table({"proceed", "yield"}, {0, 1, 0});
  const YieldPolicy yield(*space, 0, {1});
  const Goal goal{"g"};
  const Belief b = Belief::from_weights({0.3, 0.45, 0.25});
  for (const Policy* p : std::vector<const Policy*>{&table, &yield}) {
    const Decision one = multi_agent_decide({b}, goal, *p);
    EXPECT_EQ(one.distribution.probabilities, p->decide({b}, goal).probabilities);
    EXPECT_EQ(multi_agent_decide({b, b, b}, goal, *p).action, one.action);
  }
  EXPECT_NEAR(table.decide({b}, goal).probability("yield"), 0.45, 1e-15);
  EXPECT_THROW(multi_agent_decide({}, goal, table), Error);
}

TEST(Policy, ProductAggregation) {
  const Belief a = Belief::from_weights({0.5, 0.5, 0.0});
  const Belief b = Belief::from_weights({0.0, 0.5, 0.5});
  EXPECT_EQ(aggregate_beliefs({a, b}), Belief::point(3, 1));
  EXPECT_THROW(aggregate_beliefs({Belief::point(3, 0), Belief::point(3, 2)}), Error);
}

class BrokenPolicy : public Policy {
 public:
  ActionDistribution decide(const std::vector<Belief>&, const Goal&) const override { return {{"a", "b"}, {0.7, 0.7}}; }
  std::string name() const override { return "broken"; }
};

TEST(Policy, ProtocolViolationIsPolicyError) {
  try {
    multi_agent_decide({Belief::uniform(2)}, {"g"}, BrokenPolicy());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Policy);
  }
}

TEST(HttpPerception, JudgmentLikelihoods) {
  const auto space = occluded_space();
  const nlohmann::json reply = {{"judgments", {{{"slot", "ambulance"}, {"value", "toward"}, {"confidence", 0.8}}}}};
  const auto l = HttpPerception::from_judgments(*space, reply);
  EXPECT_NEAR(l[0], 0.1, 1e-15);
  EXPECT_NEAR(l[1], 0.8, 1e-15);
  EXPECT_NEAR(l[2], 0.1, 1e-15);
  EXPECT_THROW(HttpPerception::from_judgments(*space, {{"judgments", {{{"slot", "cat"}, {"value", "x"}, {"confidence", 1}}}}}),
               Error);
}

}  // namespace
}  // namespace panoworld::belief
