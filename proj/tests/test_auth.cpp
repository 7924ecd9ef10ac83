#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "rehearse/auth.hpp"
#include "rehearse/error.hpp"
#include "rehearse/rng.hpp"
#include "support.hpp"

using namespace rehearse;

namespace {

constexpr Timestamp t0 = kSimulationEpoch + 9 * kHour;

// Every joint tuple of `pools`, as mixed-radix digits.
std::vector<std::vector<int>> all_tuples(const std::vector<std::uint64_t>& pools) {
    std::vector<std::vector<int>> out{{}};
    for (auto n : pools) {
        std::vector<std::vector<int>> next;
        for (const auto& t : out) {
            for (int v = 0; v < static_cast<int>(n); ++v) {
                auto u = t;
                u.push_back(v);
                next.push_back(u);
            }
        }
        out = next;
    }
    return out;
}

int agreement(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i] ? 1 : 0;
    return n;
}

// Exhaustive: fraction of B-subsets of the joint space that contain a tuple
// agreeing with the all-zero victim on >= k coordinates. By symmetry the
// victim choice does not matter.
double subset_oracle(const std::vector<std::uint64_t>& pools, int k, int budget) {
    const auto tuples = all_tuples(pools);
    const std::vector<int> victim(pools.size(), 0);
    const int n = static_cast<int>(tuples.size());
    long long hit = 0;
    long long total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != budget) continue;
        ++total;
        for (int i = 0; i < n; ++i) {
            if ((mask >> i & 1u) && agreement(tuples[static_cast<std::size_t>(i)], victim) >= k) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

ResetSession session_for(const std::vector<std::string>& qs, Timestamp at = t0) {
    return {"tok", "p-test", qs, at};
}

std::vector<std::string> right_answers(const AvatarProfile& p, const std::vector<std::string>& qs) {
    std::vector<std::string> out;
    for (const auto& q : qs) out.push_back(p.assignments.at(q));
    return out;
}

}  // namespace

TEST_CASE("near-match count agrees with enumeration") {
    for (const auto& pools : std::vector<std::vector<std::uint64_t>>{{2, 3, 4}, {5, 5}, {3, 2, 2, 4}, {7}}) {
        const auto tuples = all_tuples(pools);
        const std::vector<int> victim(pools.size(), 0);
        for (int k = 0; k <= static_cast<int>(pools.size()); ++k) {
            long long count = 0;
            for (const auto& t : tuples) count += agreement(t, victim) >= k ? 1 : 0;
            CHECK(near_match_count(pools, k) == doctest::Approx(static_cast<double>(count)));
        }
    }
}

TEST_CASE("guessing probability agrees with exhaustive subsets") {
    const std::vector<std::pair<std::vector<std::uint64_t>, int>> cases = {
        {{2, 3}, 1}, {{2, 3}, 2}, {{3, 3}, 1}, {{3, 3}, 2}, {{2, 2, 2}, 2}, {{2, 2, 3}, 3}};
    for (const auto& [pools, k] : cases) {
        long long space = 1;
        for (auto n : pools) space *= static_cast<long long>(n);
        for (int b = 0; b <= space; ++b) {
            CHECK_MESSAGE(guess_success_probability(pools, k, static_cast<std::uint64_t>(b)) ==
                              doctest::Approx(subset_oracle(pools, k, b)).epsilon(1e-12),
                          "k=" << k << " b=" << b);
        }
    }
}

TEST_CASE("closed forms") {
    const std::vector<std::uint64_t> one = {16};
    CHECK(guess_success_probability(one, 1, 3) == doctest::Approx(3.0 / 16).epsilon(1e-12));
    const std::vector<std::uint64_t> two = {8, 8};
    CHECK(guess_success_probability(two, 2, 1) == doctest::Approx(1.0 / 64).epsilon(1e-12));
    // k = m: min(1, B / prod).
    const std::vector<std::uint64_t> three = {64, 366, 16};
    for (std::uint64_t b : {1ull, 10ull, 1000ull, 374784ull, 400000ull}) {
        CHECK(guess_success_probability(three, 3, b) ==
              doctest::Approx(std::min(1.0, double(b) / (64.0 * 366 * 16))).epsilon(1e-9));
    }
    CHECK(guess_success_probability(three, 3, 0) == 0.0);
}

TEST_CASE("monotone in budget, pool size and k") {
    const std::vector<std::uint64_t> pools = {8, 8, 8};
    double last = 0;
    for (std::uint64_t b = 0; b <= 512; b += 7) {
        const double p = guess_success_probability(pools, 2, b);
        CHECK(p >= last);
        last = p;
    }
    for (int k = 1; k < 3; ++k) {
        CHECK(guess_success_probability(pools, k, 20) >= guess_success_probability(pools, k + 1, 20));
    }
    const std::vector<std::uint64_t> bigger = {8, 16, 8};
    CHECK(guess_success_probability(bigger, 2, 20) <= guess_success_probability(pools, 2, 20));
}

TEST_CASE("question selection honours the entropy gate uniformly") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 1);
    AuthPolicy policy;
    // Oracle: every qualifying 3-subset by exhaustive enumeration.
    std::set<std::vector<std::string>> qualifying;
    const auto& f = schema.fields;
    for (std::size_t a = 0; a < f.size(); ++a) {
        for (std::size_t b = a + 1; b < f.size(); ++b) {
            for (std::size_t c = b + 1; c < f.size(); ++c) {
                const double bits = std::log2(double(f[a].answer_pool.size())) +
                                    std::log2(double(f[b].answer_pool.size())) +
                                    std::log2(double(f[c].answer_pool.size()));
                if (bits >= 15.0 - 1e-9) qualifying.insert({f[a].field_id, f[b].field_id, f[c].field_id});
            }
        }
    }
    REQUIRE(!qualifying.empty());
    std::map<std::vector<std::string>, int> seen;
    const int draws = 40000;
    for (int seed = 0; seed < draws; ++seed) {
        const auto qs = select_questions(profile, schema, policy, static_cast<std::uint64_t>(seed));
        REQUIRE(qs.size() == 3);
        CHECK(qualifying.contains(qs));
        CHECK(question_set_entropy(schema, qs) >= 15.0 - 1e-9);
        ++seen[qs];
    }
    CHECK(seen.size() == qualifying.size());
    const double expected = double(draws) / double(qualifying.size());
    for (const auto& [qs, n] : seen) CHECK(std::abs(n - expected) < 6 * std::sqrt(expected));

    policy.min_entropy_bits = 40;
    try {
        select_questions(profile, schema, policy, 1);
        FAIL("expected EntropyUnattainable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EntropyUnattainable);
    }
}

TEST_CASE("policy validation") {
    AuthPolicy p;
    CHECK_NOTHROW(p.validate(10));
    p.k = 4;
    CHECK_THROWS_AS(p.validate(10), Error);
    p = {};
    p.m = 11;
    CHECK_THROWS_AS(p.validate(10), Error);
    CHECK(auth_policy_from_json(to_json(AuthPolicy{})) == AuthPolicy{});
    CHECK_THROWS_AS(auth_policy_from_json({{"n", 3}}), Error);
}

TEST_CASE("reset verification") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 1);
    const AuthPolicy policy;
    const std::vector<std::string> qs = {"first_name", "birth_date", "favorite_color"};
    const auto good = right_answers(profile, qs);
    std::vector<AuthAttempt> history;

    SUBCASE("granted with case and space differences") {
        auto answers = good;
        answers[0] = "  " + answers[0] + " ";
        for (auto& c : answers[1]) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const auto s = session_for(qs);
        const auto d = verify_reset(profile, &s, answers, policy, history, t0);
        CHECK(d.outcome == AuthOutcome::Granted);
        CHECK(d.matched == 3);
        REQUIRE(history.size() == 1);
        CHECK(history[0].answers_matched == std::vector<bool>{true, true, true});
    }
    SUBCASE("one wrong answer is denied at k = m") {
        auto answers = good;
        answers[2] = "not a colour";
        const auto s = session_for(qs);
        const auto d = verify_reset(profile, &s, answers, policy, history, t0);
        CHECK(d.outcome == AuthOutcome::Denied);
        CHECK(d.matched == 2);
        // The audit record keeps match flags only.
        CHECK(to_json(testing::enrolled()).dump().find("not a colour") == std::string::npos);
    }
    SUBCASE("k of m") {
        AuthPolicy lax = policy;
        lax.k = 2;
        auto answers = good;
        answers[0] = "x";
        const auto s = session_for(qs);
        CHECK(verify_reset(profile, &s, answers, lax, history, t0).outcome == AuthOutcome::Granted);
    }
    SUBCASE("missing or expired session appends nothing") {
        CHECK_THROWS_AS(verify_reset(profile, nullptr, good, policy, history, t0), Error);
        const auto old = session_for(qs, t0 - kResetSessionTtl);
        try {
            verify_reset(profile, &old, good, policy, history, t0);
            FAIL("expected SessionUnknown");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SessionUnknown);
        }
        CHECK(history.empty());
    }
    SUBCASE("daily throttle locks the fourth attempt") {
        const std::vector<std::string> wrong = {"a", "b", "c"};
        const auto s = session_for(qs);
        for (int i = 0; i < 3; ++i) {
            CHECK(verify_reset(profile, &s, wrong, policy, history, t0 + i).outcome == AuthOutcome::Denied);
        }
        CHECK(verify_reset(profile, &s, good, policy, history, t0 + 3).outcome == AuthOutcome::Locked);
        CHECK(history.size() == 4);
        const auto tomorrow = session_for(qs, t0 + kDay);
        CHECK(verify_reset(profile, &tomorrow, good, policy, history, t0 + kDay).outcome == AuthOutcome::Granted);
    }
    SUBCASE("lockout after consecutive denials") {
        const std::vector<std::string> wrong = {"a", "b", "c"};
        for (int i = 0; i < 10; ++i) {
            const Timestamp at = t0 + (i / 3) * kDay + i;
            const auto s = session_for(qs, at);
            CHECK(verify_reset(profile, &s, wrong, policy, history, at).outcome == AuthOutcome::Denied);
        }
        const auto s = session_for(qs, t0 + 10 * kDay);
        CHECK(verify_reset(profile, &s, good, policy, history, t0 + 10 * kDay).outcome == AuthOutcome::Locked);
        CHECK(trailing_denials(history) == 10);
    }
}

TEST_CASE("throttle soundness over random traces") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 2);
    AuthPolicy policy;
    policy.lockout_after = 1000;
    const std::vector<std::string> qs = {"first_name", "birth_date", "favorite_color"};
    const auto good = right_answers(profile, qs);
    SplitMix64 rng(9);
    std::vector<AuthAttempt> history;
    Timestamp now = t0;
    for (int i = 0; i < 2000; ++i) {
        now += static_cast<Timestamp>(rng.below(6 * kHour));
        const auto s = session_for(qs, now);
        const std::vector<std::string> wrong = {"x", "y", "z"};
        verify_reset(profile, &s, rng.chance(0.3) ? good : wrong, policy, history, now);
    }
    CHECK(history.size() == 2000);
    std::map<DayNumber, int> judged;
    for (const auto& a : history) {
        if (a.outcome != AuthOutcome::Locked) ++judged[local_day(a.timestamp, "UTC")];
    }
    for (const auto& [_, n] : judged) CHECK(n <= policy.max_attempts_per_day);
}
