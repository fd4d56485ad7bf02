#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "olapsim/errors.hpp"
#include "olapsim/scenario.hpp"

namespace olapsim {
namespace {

std::string golden() {
    std::ifstream in(std::string(OLAPSIM_TEST_DATA) + "/reference_scenario.ini", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

template <typename Error>
Error capture(std::string_view text) {
    try {
        (void)parse_scenario(text);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected an exception for:\n" << text;
    return Error({}, "none");
}

TEST(ParseScenario, EmptyTextIsTheReferenceScenario) {
    const ScenarioConfig c = parse_scenario("");
    EXPECT_EQ(c, ScenarioConfig{});
    const Topology t = make_topology(c);
    EXPECT_EQ(t.nodes().size(), 25u);
    EXPECT_EQ(t.total_users(), 3000u);
    EXPECT_EQ(t, build_reference_topology());
    EXPECT_EQ(c.run.max_events, 50'000'000u);
    EXPECT_EQ(c.workload.profile.start_time, DistributionSpec(Uniform{50.0, 55.0}));
    EXPECT_EQ(c.workload.transactions.interarrival, DistributionSpec(Constant{1.0}));
    EXPECT_EQ(c.workload.transactions.size, DistributionSpec(Constant{10240.0}));
    EXPECT_EQ(c.workload.page.page_refresh, 10.0);
}

TEST(ParseScenario, CommentsAndBlankLinesAreIgnored) {
    EXPECT_EQ(parse_scenario("# nothing here\n\n   \n  # indented comment\n"), ScenarioConfig{});
}

TEST(ParseScenario, EmptyScenarioMatchesTheGoldenDump) { EXPECT_EQ(dump(parse_scenario("")), golden()); }

TEST(ParseScenario, GoldenFileParsesBackToTheReferenceScenario) {
    const ScenarioConfig explicit_config = parse_scenario(golden());
    EXPECT_EQ(dump(explicit_config), golden());
    EXPECT_EQ(make_topology(explicit_config), build_reference_topology());
    EXPECT_EQ(config_hash(explicit_config), config_hash(ScenarioConfig{}));
}

TEST(ParseScenario, InterarrivalOverrideIsAccepted) {
    const ScenarioConfig c = parse_scenario("[workload]\ninterarrival = constant(0.5)\n");
    EXPECT_EQ(c.workload.transactions.interarrival, DistributionSpec(Constant{0.5}));
}

TEST(ParseScenario, ReadsEverySection) {
    const ScenarioConfig c = parse_scenario(R"(
[run]
scenario_id = hetero
seed = 9
end_time = 600
warmup = 50
[topology]
extranet_latency = 0.002
flow_weights.olap_2 = [0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0]
[workload]
session_mode = on_off
on_duration = exponential(120)
repetitions = 3
partition_skew = zipf(1.2)
[servers]
speed_factors = [1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5]
service_noise = uniform(0.9, 1.1)
[routing]
policy = response_time_weighted
ewma_alpha = 0.2
)");
    EXPECT_EQ(c.run.scenario_id, "hetero");
    EXPECT_EQ(c.run.seed, 9u);
    EXPECT_EQ(c.run.end_time, 600.0);
    EXPECT_EQ(c.topology.params.extranet_link.latency, 0.002);
    EXPECT_EQ(make_topology(c).flows.weights[1][4], 0.0);
    EXPECT_EQ(make_topology(c).flows.weights[0][4], 0.125);
    EXPECT_EQ(c.workload.profile.mode, SessionMode::OnOff);
    EXPECT_FALSE(c.workload.profile.unlimited_repetitions);
    EXPECT_EQ(c.workload.profile.max_repetitions, 3u);
    EXPECT_EQ(c.workload.skew.kind, PartitionSkew::Kind::Zipf);
    EXPECT_EQ(c.workload.skew.exponent, 1.2);
    EXPECT_EQ(c.servers.speed_factors[7], 0.5);
    EXPECT_EQ(c.routing.kind, PolicyKind::ResponseTimeWeighted);
    EXPECT_EQ(c.routing.ewma_alpha, 0.2);
    // Round trip through the canonical dump.
    EXPECT_EQ(dump(parse_scenario(dump(c))), dump(c));
}

TEST(ParseScenario, SpeedFactorLengthMustMatchServerCount) {
    const auto e = capture<ValidationError>("[servers]\nspeed_factors = [1,1,1]\n");
    EXPECT_EQ(e.field(), "servers.speed_factors");
}

TEST(ParseScenario, ParseErrorsCarryTheLineNumber) {
    EXPECT_EQ(capture<ParseError>("[run]\nseed = 2\n[nowhere]\n").line(), 3u);
    EXPECT_EQ(capture<ParseError>("\n\n[run\n").line(), 3u);
    EXPECT_EQ(capture<ParseError>("[run]\nseed 2\n").line(), 2u);
    EXPECT_EQ(capture<ParseError>("seed = 2\n").line(), 1u);
    EXPECT_EQ(capture<ParseError>("[servers]\n\nspeed_factors = [1, 1\n").line(), 3u);
    EXPECT_EQ(capture<ParseError>("[run]\nseed =\n").line(), 2u);
}

TEST(ParseScenario, ValidationErrorsNameTheField) {
    const std::pair<const char*, const char*> cases[] = {
        {"[workload]\nduty_cycle = 0\n", "workload.duty_cycle"},
        {"[workload]\nduty_cycle = 1.5\n", "workload.duty_cycle"},
        {"[workload]\ntarget_aggregate = 3200\n", "workload.target_aggregate"},
        {"[workload]\nstart_time = uniform(55, 50)\n", "workload.start_time"},
        {"[workload]\ninterarrival = exponential(-1)\n", "workload.interarrival"},
        {"[workload]\nsession_mode = sometimes\n", "workload.session_mode"},
        {"[workload]\nobject_refresh = 3\n", "workload.object_refresh"},
        {"[run]\nseed = -1\n", "run.seed"},
        {"[run]\nmystery = 1\n", "run.mystery"},
        {"[run]\nseed = 1\nseed = 2\n", "run.seed"},
        {"[topology]\nflow_weights = [0.5, 0.5]\n", "topology.flow_weights"},
        {"[topology]\nflow_weights.olap_9 = [1, 0, 0, 0, 0, 0, 0, 0]\n", "topology.flow_weights"},
        {"[servers]\nplacement = one_per_server\npartitions = 6\n", "servers.placement"},
        {"[servers]\nbase_service_time = 0\n", "servers.base_service_time"},
        {"[routing]\npolicy = fastest\n", "routing.policy"},
        {"[routing]\newma_alpha = 0\n", "routing.ewma_alpha"},
    };
    for (const auto& [text, field] : cases) EXPECT_EQ(capture<ValidationError>(text).field(), field) << text;
}

TEST(ParseScenario, FlowRowsMustSumToOne) {
    const auto e = capture<ValidationError>("[topology]\nflow_weights = [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2]\n");
    EXPECT_NE(std::string(e.what()).find("olap_1"), std::string::npos) << e.what();
}

TEST(ParseScenario, FlowRowOverridesKeepRowSumsAtOne) {
    const ScenarioConfig c =
        parse_scenario("[topology]\nflow_weights.olap_3 = [0.5, 0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05]\n");
    for (const auto& row : make_topology(c).flows.weights) {
        double sum = 0.0;
        for (double w : row) sum += w;
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(ApplyOverride, SetsOneField) {
    ScenarioConfig c;
    apply_override(c, "routing.policy", "least_outstanding");
    apply_override(c, "run.end_time", "600");
    apply_override(c, "servers.speed_factors", "[1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5]");
    EXPECT_EQ(c.routing.kind, PolicyKind::LeastOutstanding);
    EXPECT_EQ(c.run.end_time, 600.0);
    EXPECT_EQ(c.servers.speed_factors.size(), 8u);
    validate(c);
    EXPECT_THROW(apply_override(c, "nosection", "1"), ValidationError);
    EXPECT_THROW(apply_override(c, "run.bogus", "1"), ValidationError);
}

TEST(ConfigHash, StableAcrossWhitespaceAndComments) {
    const auto a = parse_scenario("[run]\nseed = 5\n[workload]\ninterarrival = constant(0.5)\n");
    const auto b = parse_scenario("# tweaked\n\n[run]\n   seed=5   \n\n[workload]\n  interarrival =  constant( 0.5 )\n");
    EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(ConfigHash, IgnoresOutputDirButNotOtherFields) {
    ScenarioConfig a;
    ScenarioConfig b;
    b.run.output_dir = "/tmp/elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.run.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ResolvedPartitions, DefaultsToOnePerServer) {
    ScenarioConfig c;
    EXPECT_EQ(resolved_partitions(c), 8u);
    c.servers.partitions = 3;
    EXPECT_EQ(resolved_partitions(c), 3u);
    EXPECT_EQ(make_partition_map(c).partitions(), 3u);
}

}  // namespace
}  // namespace olapsim
