#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "olapsim/errors.hpp"
#include "olapsim/routing.hpp"
#include "olapsim/simulation.hpp"

namespace olapsim {
namespace {

const std::vector<double> kEven8(8, 0.125);
const std::vector<std::size_t> kAll8{0, 1, 2, 3, 4, 5, 6, 7};

constexpr PolicyKind kAllPolicies[] = {PolicyKind::FlowWeighted, PolicyKind::RoundRobin,
                                       PolicyKind::LeastOutstanding, PolicyKind::ResponseTimeWeighted};

TEST(Pick, SingleEligibleServerIsAlwaysChosen) {
    RandomStream rng(1, "test.routing");
    for (PolicyKind kind : kAllPolicies) {
        PolicyState state(8);
        const std::vector<std::size_t> only{5};
        for (int i = 0; i < 50; ++i) EXPECT_EQ(pick(PolicyConfig{kind}, state, only, kEven8, rng), 5u);
    }
}

class FlowSplitShares : public ::testing::TestWithParam<FlowSplit> {};

TEST_P(FlowSplitShares, EvenWeightsGiveEqualSharesOverTenToTheFivePicks) {
    RandomStream rng(3, "test.routing");
    PolicyConfig policy;
    policy.flow_split = GetParam();
    PolicyState state(8);
    std::vector<int> counts(8, 0);
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[pick(policy, state, kAll8, kEven8, rng)];
    for (int c : counts) EXPECT_NEAR(c / double(n), 0.125, 0.01);
}

INSTANTIATE_TEST_SUITE_P(Splits, FlowSplitShares, ::testing::Values(FlowSplit::Random, FlowSplit::Deterministic));

TEST(Pick, FlowWeightsAreRenormalizedOverEligibleServers) {
    RandomStream rng(4, "test.routing");
    const std::vector<double> row{0.1, 0.2, 0.3, 0.4};
    const std::vector<std::size_t> eligible{1, 3};
    PolicyState state(4);
    int to_three = 0;
    constexpr int n = 60000;
    for (int i = 0; i < n; ++i) {
        const auto s = pick(PolicyConfig{}, state, eligible, row, rng);
        ASSERT_TRUE(s == 1 || s == 3);
        to_three += s == 3;
    }
    EXPECT_NEAR(to_three / double(n), 0.4 / 0.6, 0.01);
}

TEST(Pick, DeterministicSplitMatchesWeightsInEveryCycle) {
    RandomStream rng(4, "test.routing");
    PolicyConfig policy;
    policy.flow_split = FlowSplit::Deterministic;
    const std::vector<double> row{0.5, 0.25, 0.25};
    const std::vector<std::size_t> eligible{0, 1, 2};
    PolicyState state(3);
    for (int cycle = 0; cycle < 100; ++cycle) {
        std::vector<int> counts(3, 0);
        for (int i = 0; i < 4; ++i) ++counts[pick(policy, state, eligible, row, rng)];
        EXPECT_EQ(counts, (std::vector<int>{2, 1, 1}));
    }
}

TEST(Pick, ZeroWeightOnEveryEligibleServerThrows) {
    RandomStream rng(1, "test.routing");
    PolicyState state(3);
    const std::vector<double> row{1.0, 0.0, 0.0};
    const std::vector<std::size_t> eligible{1, 2};
    EXPECT_THROW((void)pick(PolicyConfig{}, state, eligible, row, rng), NoEligibleServer);
}

TEST(Pick, LeastOutstandingTakesTheMinimum) {
    RandomStream rng(1, "test.routing");
    PolicyState state(3);
    state.outstanding = {3, 1, 2};
    const std::vector<std::size_t> eligible{0, 1, 2};
    EXPECT_EQ(pick(PolicyConfig{PolicyKind::LeastOutstanding}, state, eligible, kEven8, rng), 1u);
}

TEST(Pick, LeastOutstandingBreaksTiesByLowestId) {
    RandomStream rng(1, "test.routing");
    PolicyState state(4);
    state.outstanding = {2, 1, 5, 1};
    const std::vector<std::size_t> eligible{0, 1, 2, 3};
    EXPECT_EQ(pick(PolicyConfig{PolicyKind::LeastOutstanding}, state, eligible, kEven8, rng), 1u);
    const std::vector<std::size_t> upper{2, 3};
    EXPECT_EQ(pick(PolicyConfig{PolicyKind::LeastOutstanding}, state, upper, kEven8, rng), 3u);
}

TEST(Pick, RoundRobinIsExactlyFairOverWholeCycles) {
    RandomStream rng(1, "test.routing");
    const std::vector<std::size_t> eligible{1, 2, 4, 6};
    PolicyState state(8);
    constexpr int k = 25;
    std::vector<int> counts(8, 0);
    for (std::size_t i = 0; i < k * eligible.size(); ++i) {
        ++counts[pick(PolicyConfig{PolicyKind::RoundRobin}, state, eligible, kEven8, rng)];
    }
    for (std::size_t s : eligible) EXPECT_EQ(counts[s], k);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), 0), int(k * eligible.size()));
}

TEST(Pick, RoundRobinContinuesAfterTheLastPick) {
    RandomStream rng(1, "test.routing");
    PolicyState state(8);
    state.last_pick = 3;
    const std::vector<std::size_t> eligible{0, 2, 5};
    EXPECT_EQ(pick(PolicyConfig{PolicyKind::RoundRobin}, state, eligible, kEven8, rng), 5u);
    EXPECT_EQ(pick(PolicyConfig{PolicyKind::RoundRobin}, state, eligible, kEven8, rng), 0u);
}

TEST(Pick, ResponseTimeWeightedFavoursFasterServers) {
    RandomStream rng(8, "test.routing");
    PolicyConfig policy{PolicyKind::ResponseTimeWeighted};
    PolicyState state(2);
    state.observed = {1, 1};
    state.ewma = {0.02, 0.01};
    const std::vector<std::size_t> eligible{0, 1};
    int fast = 0;
    constexpr int n = 60000;
    for (int i = 0; i < n; ++i) fast += pick(policy, state, eligible, kEven8, rng) == 1;
    EXPECT_NEAR(fast / double(n), 2.0 / 3.0, 0.01);
}

TEST(Pick, ResponseTimeWeightedGivesUnobservedServersTheMeanWeight) {
    RandomStream rng(8, "test.routing");
    PolicyConfig policy{PolicyKind::ResponseTimeWeighted};
    PolicyState state(3);
    state.observed = {1, 1, 0};
    state.ewma = {0.02, 0.01, 0.0};
    const std::vector<std::size_t> eligible{0, 1, 2};
    std::vector<int> counts(3, 0);
    constexpr int n = 90000;
    for (int i = 0; i < n; ++i) ++counts[pick(policy, state, eligible, kEven8, rng)];
    // Weights 50, 100 and the mean 75.
    EXPECT_NEAR(counts[0] / double(n), 50.0 / 225.0, 0.01);
    EXPECT_NEAR(counts[2] / double(n), 75.0 / 225.0, 0.01);
}

// Property: whatever the policy, state and eligible list, the pick is eligible.
TEST(Pick, NeverLeavesTheEligibleList) {
    RandomStream rng(99, "test.routing.property");
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t servers = 1 + rng.below(12);
        std::vector<std::size_t> eligible;
        for (std::size_t s = 0; s < servers; ++s) {
            if (rng.below(2) == 0) eligible.push_back(s);
        }
        if (eligible.empty()) eligible.push_back(rng.below(servers));
        std::vector<double> row(servers);
        for (double& w : row) w = 0.01 + rng.uniform01();
        PolicyState state(servers);
        for (std::size_t s = 0; s < servers; ++s) {
            state.outstanding[s] = rng.below(5);
            if (rng.below(2)) {
                state.observed[s] = 1;
                state.ewma[s] = 0.001 + rng.uniform01();
            }
        }
        if (rng.below(2)) state.last_pick = rng.below(servers);
        PolicyConfig policy{kAllPolicies[rng.below(4)]};
        policy.flow_split = rng.below(2) ? FlowSplit::Random : FlowSplit::Deterministic;
        for (int i = 0; i < 5; ++i) {
            const auto s = pick(policy, state, eligible, row, rng);
            ASSERT_TRUE(std::binary_search(eligible.begin(), eligible.end(), s))
                << to_string(policy.kind) << " picked " << s;
        }
    }
}

TEST(ObserveCompletion, FirstObservationInitializesTheAverage) {
    PolicyState state(2);
    observe_dispatch(state, 0);
    observe_completion(PolicyConfig{}, state, 0, 0.02);
    EXPECT_EQ(state.ewma[0], 0.02);
    EXPECT_EQ(state.outstanding[0], 0u);
}

TEST(ObserveCompletion, AlphaOneTracksTheLastObservation) {
    PolicyConfig policy;
    policy.ewma_alpha = 1.0;
    PolicyState state(1);
    for (double x : {0.02, 0.5, 0.013, 0.07}) {
        observe_dispatch(state, 0);
        observe_completion(policy, state, 0, x);
        EXPECT_EQ(state.ewma[0], x);
    }
}

TEST(ObserveCompletion, BlendsWithAlphaPointOne) {
    PolicyState state(1);
    observe_dispatch(state, 0);
    observe_dispatch(state, 0);
    observe_completion(PolicyConfig{}, state, 0, 0.02);
    observe_completion(PolicyConfig{}, state, 0, 0.04);
    EXPECT_NEAR(state.ewma[0], 0.022, 1e-15);
}

TEST(ObserveCompletion, CompletionWithoutDispatchIsAnInvariantBreach) {
    PolicyState state(2);
    EXPECT_THROW(observe_completion(PolicyConfig{}, state, 1, 0.02), InvariantViolation);
}

TEST(SteadyShare, EqualSpeedsShareEqually) {
    const std::vector<double> speeds(8, 1.0);
    for (double load : {0.0, 320.0}) {
        const auto share = steady_share(PolicyConfig{PolicyKind::ResponseTimeWeighted}, speeds, kEven8, 0.02, load);
        for (double s : share) EXPECT_NEAR(s, 0.125, 1e-9);
    }
}

TEST(SteadyShare, LightLoadSharesFollowSpeed) {
    const std::vector<double> speeds{1.0, 2.0};
    const std::vector<double> row{0.5, 0.5};
    const auto share = steady_share(PolicyConfig{PolicyKind::ResponseTimeWeighted}, speeds, row, 0.02);
    EXPECT_NEAR(share[0], 1.0 / 3.0, 1e-6);
    EXPECT_NEAR(share[1], 2.0 / 3.0, 1e-6);
}

TEST(SteadyShare, FlowWeightedReturnsTheNormalizedRow) {
    const std::vector<double> speeds{1.0, 2.0};
    const std::vector<double> row{0.5, 0.5};
    EXPECT_EQ(steady_share(PolicyConfig{}, speeds, row, 0.02), (std::vector<double>{0.5, 0.5}));
    const std::vector<double> raw{1.0, 3.0};
    EXPECT_EQ(steady_share(PolicyConfig{}, speeds, raw, 0.02), (std::vector<double>{0.25, 0.75}));
}

TEST(SteadyShare, QueueingPushesLoadFurtherTowardsFastServers) {
    const std::vector<double> speeds{1.0, 2.0};
    const std::vector<double> row{0.5, 0.5};
    const auto light = steady_share(PolicyConfig{PolicyKind::ResponseTimeWeighted}, speeds, row, 0.02);
    const auto heavy = steady_share(PolicyConfig{PolicyKind::ResponseTimeWeighted}, speeds, row, 0.02, 100.0);
    EXPECT_LT(heavy[0], light[0]);
    EXPECT_NEAR(heavy[0] + heavy[1], 1.0, 1e-12);
}

ScenarioConfig two_server_scenario(double target) {
    ScenarioConfig c;
    c.topology.params.lans = 1;
    c.topology.params.users_per_lan = 1000;
    c.topology.params.lans_per_gateway = 1;
    c.topology.params.olap_servers = 1;
    c.topology.params.rdbms_servers = 2;
    c.servers.speed_factors = {1.0, 2.0};
    c.routing.kind = PolicyKind::ResponseTimeWeighted;
    c.workload.target_aggregate = target;
    c.workload.transactions.interarrival = Exponential{1.0};
    c.run.end_time = 3000.0;
    return c;
}

TEST(SteadyShare, AgreesWithSimulationAtLowUtilization) {
    const ScenarioConfig c = two_server_scenario(10.0);  // utilization well under 0.3
    Simulation sim(c);
    const auto result = sim.run();
    const double total = double(result.completions_per_server[0] + result.completions_per_server[1]);
    const std::vector<double> row{0.5, 0.5};
    const auto predicted =
        steady_share(PolicyConfig{PolicyKind::ResponseTimeWeighted}, c.servers.speed_factors, row, 0.02, 10.0);
    EXPECT_NEAR(result.completions_per_server[0] / total, predicted[0], 0.02);
    EXPECT_NEAR(result.completions_per_server[1] / total, predicted[1], 0.02);
}

TEST(ResponseTimeWeighted, FasterServerCompletesMoreAtModerateLoad) {
    Simulation sim(two_server_scenario(60.0));
    const auto result = sim.run();
    EXPECT_GT(result.completions_per_server[1], result.completions_per_server[0]);
}

TEST(PolicyNames, RoundTrip) {
    for (PolicyKind kind : kAllPolicies) EXPECT_EQ(parse_policy(to_string(kind)), kind);
    EXPECT_FALSE(parse_policy("random"));
    EXPECT_EQ(to_string(FlowSplit::Deterministic), "deterministic");
}

}  // namespace
}  // namespace olapsim
