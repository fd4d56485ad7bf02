#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "olapsim/errors.hpp"
#include "olapsim/workload.hpp"

namespace olapsim {
namespace {

struct Tally {
    std::uint64_t queries = 0;
    std::vector<Seconds> query_times;
    std::vector<double> sizes;
};

// Drives one session through the event loop up to (but excluding) `until`.
Tally drive(const WorkloadConfig& config, Seconds until, std::uint64_t seed = 1) {
    SessionDriver driver(config, 8, seed);
    Session s;
    EventQueue q;
    q.schedule(0.0, EventKind::SessionStart, 0);
    RunLimits limits;
    limits.end_time = std::nextafter(until, 0.0);
    Tally tally;
    run(q, limits, [&](const Event& e, EventQueue& queue) {
        switch (e.kind) {
            case EventKind::SessionStart: driver.on_start(s, queue); break;
            case EventKind::SessionRepetition: driver.on_repetition(s, queue); break;
            case EventKind::PageRefresh: driver.on_page_refresh(s, queue); break;
            case EventKind::ObjectRefresh:
                if (auto d = driver.on_object_refresh(s, queue)) {
                    ++tally.queries;
                    tally.query_times.push_back(e.time);
                    tally.sizes.push_back(d->size);
                }
                break;
            default: break;
        }
    });
    return tally;
}

Session drive_session(const WorkloadConfig& config, Seconds until) {
    SessionDriver driver(config, 8, 1);
    Session s;
    EventQueue q;
    q.schedule(0.0, EventKind::SessionStart, 0);
    RunLimits limits;
    limits.end_time = std::nextafter(until, 0.0);
    run(q, limits, [&](const Event& e, EventQueue& queue) {
        if (e.kind == EventKind::SessionStart) driver.on_start(s, queue);
        if (e.kind == EventKind::PageRefresh) driver.on_page_refresh(s, queue);
        if (e.kind == EventKind::ObjectRefresh) (void)driver.on_object_refresh(s, queue);
    });
    return s;
}

TEST(Calibration, ReferenceTargetGivesOneFifteenthOfUsersActive) {
    const double duty = calibrate_duty_cycle(320.0, 3000, TransactionModel{});
    EXPECT_NEAR(duty, 0.10667, 5e-6);
    EXPECT_DOUBLE_EQ(duty, 320.0 / 3000.0);
}

TEST(Calibration, FullLoadIsExactlyOne) { EXPECT_EQ(calibrate_duty_cycle(3000.0, 3000, TransactionModel{}), 1.0); }

TEST(Calibration, TargetAboveCapacityIsInfeasible) {
    EXPECT_THROW((void)calibrate_duty_cycle(3200.0, 3000, TransactionModel{}), Infeasible);
}

TEST(Calibration, RejectsDegenerateInputs) {
    EXPECT_THROW((void)calibrate_duty_cycle(0.0, 3000, TransactionModel{}), std::invalid_argument);
    EXPECT_THROW((void)calibrate_duty_cycle(320.0, 0, TransactionModel{}), std::invalid_argument);
}

TEST(Calibration, AccountsForQueryMixAndInterarrival) {
    TransactionModel t;
    t.query_mix = 0.5;
    EXPECT_DOUBLE_EQ(calibrate_duty_cycle(300.0, 3000, t), 0.2);
    t.query_mix = 1.0;
    t.interarrival = Exponential{2.0};
    EXPECT_DOUBLE_EQ(calibrate_duty_cycle(300.0, 3000, t), 0.2);
}

TEST(SpawnSessions, FullDutyCycleStartsEveryUserBetween55And65) {
    const Topology t = build_reference_topology();
    RandomStream starts(1, "workload.session_starts");
    const auto sessions = spawn_sessions(WorkloadConfig{}, 1.0, t, starts);
    ASSERT_EQ(sessions.size(), 3000u);
    std::map<std::uint32_t, int> per_lan;
    for (const auto& s : sessions) {
        ++per_lan[s.lan];
        EXPECT_GE(s.start_time, 55.0);
        EXPECT_LT(s.start_time, 65.0);
    }
    for (const auto& [lan, n] : per_lan) EXPECT_EQ(n, 500) << lan;
}

TEST(SpawnSessions, CalibratedCountRoundsHalfUpPerLan) {
    const Topology t = build_reference_topology();
    const double duty = 320.0 / 3000.0;
    // Independent oracle: 500 users x duty per LAN, rounded half up.
    const auto per_lan = static_cast<std::size_t>(std::floor(500.0 * duty + 0.5));
    ASSERT_EQ(per_lan, 53u);
    RandomStream starts(1, "workload.session_starts");
    const auto sessions = spawn_sessions(WorkloadConfig{}, duty, t, starts);
    EXPECT_EQ(sessions.size(), 6 * per_lan);
    EXPECT_EQ(sessions.size(), 318u);
}

TEST(SpawnSessions, ExactHalvesRoundUp) {
    TopologyParams p;
    p.lans = 2;
    p.users_per_lan = 3;
    p.lans_per_gateway = 1;
    const Topology t = build_topology(p);
    RandomStream starts(1, "workload.session_starts");
    EXPECT_EQ(spawn_sessions(WorkloadConfig{}, 0.5, t, starts).size(), 4u);
}

TEST(SpawnSessions, AssignsOlapServersRoundRobinOverPreferences) {
    Topology t = build_reference_topology();
    t.preferences[0] = {2, 0};
    RandomStream starts(1, "workload.session_starts");
    const auto sessions = spawn_sessions(WorkloadConfig{}, 0.01, t, starts);
    std::vector<std::uint32_t> lan0;
    for (const auto& s : sessions) {
        if (s.lan == 0) lan0.push_back(s.olap);
    }
    EXPECT_EQ(lan0, (std::vector<std::uint32_t>{2, 0, 2, 0, 2}));
    std::vector<std::uint32_t> lan1;
    for (const auto& s : sessions) {
        if (s.lan == 1) lan1.push_back(s.olap);
    }
    EXPECT_EQ(lan1, (std::vector<std::uint32_t>{0, 1, 2, 3, 0}));
}

TEST(SessionDriver, SixtySecondsGiveSixtyQueriesOfReferenceSize) {
    const Tally t = drive(WorkloadConfig{}, 60.0);
    EXPECT_EQ(t.queries, 60u);
    for (double size : t.sizes) EXPECT_EQ(size, 10240.0);
    for (std::size_t i = 0; i < t.query_times.size(); ++i) EXPECT_DOUBLE_EQ(t.query_times[i], double(i));
}

TEST(SessionDriver, PageIsRedrawnEveryTenSeconds) {
    const Session s = drive_session(WorkloadConfig{}, 60.0);
    EXPECT_EQ(s.page_redraws, 6u);
    EXPECT_GE(s.objects_on_page, 7u);
    EXPECT_LE(s.objects_on_page, 10u);
    EXPECT_GE(s.page_bytes, 7 * 5120.0);
    EXPECT_LT(s.page_bytes, 10 * 10240.0);
}

TEST(SessionDriver, LargerQueryVariantStaysInBounds) {
    WorkloadConfig c;
    c.transactions.size = Uniform{10240.0, 12288.0};
    const Tally t = drive(c, 2000.0);
    ASSERT_EQ(t.sizes.size(), 2000u);
    for (double size : t.sizes) {
        EXPECT_GE(size, 10240.0);
        EXPECT_LT(size, 12288.0);
    }
}

TEST(SessionDriver, QueryMixThinsTransactions) {
    WorkloadConfig c;
    c.transactions.query_mix = 0.25;
    const Tally t = drive(c, 20000.0);
    EXPECT_NEAR(t.queries / 20000.0, 0.25, 0.015);
}

TEST(SessionDriver, OnOffSessionIdlesAndIsRevivedByRepetition) {
    WorkloadConfig c;
    c.profile.mode = SessionMode::OnOff;
    c.profile.on_duration = Constant{5.0};
    c.profile.inter_repetition = Constant{20.0};
    c.profile.unlimited_repetitions = false;
    c.profile.max_repetitions = 1;
    const Tally t = drive(c, 100.0);
    // Active in [0, 5) and again in [20, 25).
    EXPECT_EQ(t.query_times, (std::vector<Seconds>{0, 1, 2, 3, 4, 20, 21, 22, 23, 24}));
}

TEST(SessionDriver, ConcurrentRepetitionExtendsTheActivePeriod) {
    WorkloadConfig c;
    c.profile.mode = SessionMode::OnOff;
    c.profile.on_duration = Constant{5.0};
    c.profile.inter_repetition = Constant{3.0};
    c.profile.unlimited_repetitions = false;
    c.profile.max_repetitions = 2;
    const Tally t = drive(c, 100.0);
    // Repetitions at 3 and 6 push the end to 8 and then 11; no second activation is started.
    EXPECT_EQ(t.queries, 11u);
    EXPECT_DOUBLE_EQ(t.query_times.back(), 10.0);
}

TEST(PartitionSelector, SinglePartitionIsAlwaysZero) {
    PartitionSelector sel(1, PartitionSkew{});
    RandomStream s(1, "test.partitions");
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(assign_partition(sel, s), 0u);
}

TEST(PartitionSelector, UniformSharesOverAMillionQueries) {
    PartitionSelector sel(8, PartitionSkew{});
    RandomStream s(1, "test.partitions");
    std::vector<int> counts(8, 0);
    constexpr int n = 1'000'000;
    for (int i = 0; i < n; ++i) ++counts[assign_partition(sel, s)];
    for (int c : counts) EXPECT_NEAR(c / double(n), 0.125, 0.005);
}

TEST(PartitionSelector, ZipfFavoursTheFirstPartition) {
    PartitionSkew skew;
    skew.kind = PartitionSkew::Kind::Zipf;
    skew.exponent = 1.0;
    PartitionSelector sel(8, skew);
    RandomStream s(2, "test.partitions");
    std::vector<int> counts(8, 0);
    constexpr int n = 400000;
    for (int i = 0; i < n; ++i) ++counts[assign_partition(sel, s)];
    double harmonic = 0.0;
    for (int k = 1; k <= 8; ++k) harmonic += 1.0 / k;
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(counts[k] / double(n), 1.0 / ((k + 1) * harmonic), 0.005) << k;
    EXPECT_EQ(std::max_element(counts.begin(), counts.end()) - counts.begin(), 0);
}

TEST(PartitionSelector, RejectsZeroPartitions) {
    EXPECT_THROW(PartitionSelector(0, PartitionSkew{}), std::invalid_argument);
}

}  // namespace
}  // namespace olapsim
