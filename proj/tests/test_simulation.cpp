#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rehearse/error.hpp"
#include "rehearse/simulation.hpp"
#include "support.hpp"

using namespace rehearse;

namespace {

const SimEnvironment& env() {
    static const SimEnvironment e{testing::default_schema(), testing::default_bank()};
    return e;
}

GameConfig with_quota(int quota) {
    GameConfig c;
    c.label = "q" + std::to_string(quota);
    c.progression.daily_quota = quota;
    return c;
}

void check_rows_equal(const SweepRow& a, const SweepRow& b) {
    CHECK(a.mean_final_recall == b.mean_final_recall);
    CHECK(a.mean_checkpoints == b.mean_checkpoints);
    CHECK(a.mean_sessions_played == b.mean_sessions_played);
    CHECK(a.mean_reminders_sent == b.mean_reminders_sent);
}

}  // namespace

TEST_CASE("recall decays by half each half-life") {
    const MemoryParams params;
    const FieldMemory fresh{24.0, kSimulationEpoch, 0.0};
    CHECK(recall_probability(fresh, kSimulationEpoch, AvatarMode::Recall, params) == 1.0);
    CHECK(recall_probability(fresh, kSimulationEpoch + kDay, AvatarMode::Recall, params) == doctest::Approx(0.5));
    CHECK(recall_probability(fresh, kSimulationEpoch + 2 * kDay, AvatarMode::Recall, params) == doctest::Approx(0.25));
    CHECK(recall_probability(fresh, kSimulationEpoch + 2 * kDay, AvatarMode::Recognition, params) ==
          doctest::Approx(0.5));
    CHECK(recall_probability(fresh, kSimulationEpoch + kHour, AvatarMode::Recognition, params) == 1.0);
}

TEST_CASE("a rehearsal leaves recall continuous at its instant") {
    const MemoryParams params;
    for (bool success : {true, false}) {
        FieldMemory m{24.0, kSimulationEpoch, 0.0};
        const Timestamp at = kSimulationEpoch + 30 * kHour;
        const double before = recall_probability(m, at, AvatarMode::Recall, params);
        rehearse_field(m, success, at, params);
        const double after = recall_probability(m, at, AvatarMode::Recall, params);
        if (success) {
            CHECK(after > before);
            CHECK(after == doctest::Approx(std::pow(before, 1.0 / params.growth_factor)));
            CHECK(m.half_life_hours == doctest::Approx(48.0));
        } else {
            CHECK(after == doctest::Approx(before));
            CHECK(m.half_life_hours == doctest::Approx(12.0));
        }
    }
}

TEST_CASE("neutral factors reduce to pure decay") {
    MemoryParams neutral;
    neutral.growth_factor = 1.0;
    neutral.failure_factor = 1.0;
    SessionPolicy policy;
    policy.adherence = 1.0;
    const auto out = simulate_player(env(), with_quota(6), neutral, 30, policy, 4);
    CHECK(out.sessions_played > 0);
    REQUIRE(out.checkpoints.size() == 2);
    CHECK(out.checkpoints[0].first == 7);
    CHECK(out.checkpoints[0].second == doctest::Approx(std::exp2(-7.0)).epsilon(1e-9));
    CHECK(out.checkpoints[1].second == doctest::Approx(std::exp2(-30.0)).epsilon(1e-9));
    CHECK(out.final_recall == doctest::Approx(std::exp2(-30.0)).epsilon(1e-9));
}

TEST_CASE("simulation is deterministic per seed") {
    const SessionPolicy policy;
    const auto a = simulate_player(env(), with_quota(6), {}, 20, policy, 11);
    const auto b = simulate_player(env(), with_quota(6), {}, 20, policy, 11);
    const auto c = simulate_player(env(), with_quota(6), {}, 20, policy, 12);
    CHECK(a == b);
    CHECK(to_json(a) == to_json(b));
    CHECK_FALSE(a == c);
}

TEST_CASE("no attendance means monotone decay and no sessions") {
    SessionPolicy policy;
    policy.adherence = 0.0;
    const auto out = simulate_player(env(), with_quota(6), {}, 90, policy, 1);
    CHECK(out.sessions_played == 0);
    CHECK(out.badges_awarded == 0);
    double last = out.initial_recall;
    for (const auto& [day, p] : out.checkpoints) {
        CHECK(p < last);
        last = p;
    }
    CHECK(out.reminders_sent > 0);
    CHECK(out.reminders_sent <= 90);
}

TEST_CASE("playing the quota beats skipping avatar items") {
    SessionPolicy policy;
    const auto q6 = simulate_player(env(), with_quota(6), {}, 30, policy, 3);
    const auto q0 = simulate_player(env(), with_quota(0), {}, 30, policy, 3);
    CHECK(q6.final_recall > q0.final_recall);
    CHECK(q6.badges_awarded > 0);
    CHECK(q0.badges_awarded == 0);
}

TEST_CASE("config validation") {
    MemoryParams m;
    m.growth_factor = 0.5;
    CHECK_THROWS_AS(m.validate(), Error);
    SessionPolicy p;
    p.adherence = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK(memory_params_from_json(to_json(MemoryParams{})).initial_half_life_hours == 24.0);
    CHECK_THROWS_AS(session_policy_from_json({{"cadence", 1}}), Error);
}

TEST_CASE("zipf tuples follow the brute-force order") {
    const std::vector<std::uint64_t> pools = {3, 4, 2};
    const double s = 1.0;
    std::vector<std::vector<std::uint32_t>> all;
    for (std::uint32_t a = 0; a < 3; ++a)
        for (std::uint32_t b = 0; b < 4; ++b)
            for (std::uint32_t c = 0; c < 2; ++c) all.push_back({a, b, c});
    auto score = [&](const std::vector<std::uint32_t>& t) {
        double x = 0;
        for (auto r : t) x -= s * std::log(r + 1.0);
        return x;
    };
    std::stable_sort(all.begin(), all.end(), [&](const auto& x, const auto& y) {
        const double sx = score(x), sy = score(y);
        if (std::abs(sx - sy) > 1e-12) return sx > sy;
        return x < y;
    });
    CHECK(zipf_top_tuples(pools, s, all.size()) == all);
    CHECK(zipf_top_tuples(pools, s, 5) == std::vector(all.begin(), all.begin() + 5));
    CHECK(zipf_top_tuples(pools, s, 1000).size() == all.size());
}

TEST_CASE("uniform attacker matches the analytic probability") {
    const std::vector<std::uint64_t> pools = {4, 4, 4};
    for (int k : {1, 2, 3}) {
        for (std::uint64_t budget : {1ull, 5ull, 20ull}) {
            const auto r = simulate_guessing_attack(pools, k, {}, budget, 200'000, 17);
            const double p = guess_success_probability(pools, k, budget);
            const double se = std::max(std::sqrt(p * (1 - p) / 200'000.0), 1e-9);
            CHECK_MESSAGE(std::abs(r.success_rate - p) <= 4 * se, "k=" << k << " budget=" << budget);
            CHECK(r.trials == 200'000);
        }
    }
    CHECK(simulate_guessing_attack(pools, 2, {}, 0, 1000, 1).success_rate == 0.0);
    CHECK(simulate_guessing_attack(pools, 3, {}, 64, 1000, 1).success_rate == 1.0);
}

TEST_CASE("zipf attacker beats uniform on skewed victims") {
    const std::vector<std::uint64_t> pools = {16, 16, 16};
    const AttackSpec zipf{AttackerModel::Zipf, 1.0};
    const auto z = simulate_guessing_attack(pools, 3, zipf, 10, 100'000, 5);
    const auto u = simulate_guessing_attack(pools, 3, {}, 10, 100'000, 5);
    CHECK(z.success_rate > u.success_rate + 5 * (z.standard_error + u.standard_error));
}

TEST_CASE("oversized joint spaces are refused") {
    const std::vector<std::uint64_t> pools(8, 1ull << 10);
    CHECK_THROWS_AS(simulate_guessing_attack(pools, 8, {}, 10, 10, 1), Error);
}

TEST_CASE("sweeps are independent of thread count") {
    std::vector<GameConfig> grid = {with_quota(0), with_quota(6), with_quota(6), with_quota(2)};
    grid[2].label = "q6-copy";
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
    const auto one = sweep_configs(env(), grid, {}, seeds, 30, {}, 1);
    const auto many = sweep_configs(env(), grid, {}, seeds, 30, {}, 4);
    REQUIRE(one.size() == 4);
    REQUIRE(many.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(one[i].config_index == many[i].config_index);
        CHECK(one[i].rank == static_cast<int>(i) + 1);
        check_rows_equal(one[i], many[i]);
    }
    auto by_index = [&](std::size_t idx) {
        return *std::find_if(one.begin(), one.end(), [&](const SweepRow& r) { return r.config_index == idx; });
    };
    check_rows_equal(by_index(1), by_index(2));
    CHECK(by_index(1).rank < by_index(2).rank);
    CHECK(by_index(1).rank < by_index(0).rank);

    std::ostringstream csv;
    write_sweep_csv(one, csv);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    const auto doc = sweep_to_json(one, {}, {}, 30);
    CHECK(doc["rows"].size() == 4);
}
