#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rehearse/error.hpp"
#include "rehearse/progression.hpp"
#include "rehearse/scheduler.hpp"
#include "support.hpp"

using namespace rehearse;

namespace {

constexpr Timestamp t0 = kSimulationEpoch + 9 * kHour;

ChallengeDescriptor item(ChallengeKind kind, const std::string& id, const std::string& field = "first_name") {
    ChallengeDescriptor d;
    d.kind = kind;
    d.challenge_id = id;
    if (kind == ChallengeKind::Standard) d.entry_id = "germany";
    else d.field_id = field;
    return d;
}

Verdict verdict(ChallengeKind kind, bool correct) {
    Verdict v;
    v.kind = kind;
    v.correct = correct;
    return v;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error");
    return ErrorCode::ParseError;
}

// Opens one challenge the way an issued session does.
void open(PlayerState& s, const ChallengeDescriptor& d, Timestamp at = t0) {
    SessionPlan plan;
    plan.session_id = "s-" + d.challenge_id;
    plan.player_id = s.player_id;
    plan.created_at = at;
    plan.items = {d};
    issue_session(s, plan);
}

}  // namespace

TEST_CASE("score table") {
    CHECK(reward_for(ChallengeKind::Standard) == 10);
    CHECK(reward_for(ChallengeKind::AvatarRecognition) == 15);
    CHECK(reward_for(ChallengeKind::AvatarRecall) == 20);
    CHECK(hint_cost(Stage::Early) == 30);
    CHECK(hint_cost(Stage::Late) == 50);
}

TEST_CASE("verdicts move the balance, floored at zero") {
    auto s = testing::enrolled();
    auto e = apply_verdict(s, item(ChallengeKind::AvatarRecall, "a"), verdict(ChallengeKind::AvatarRecall, true), t0);
    CHECK(e.delta == 20);
    CHECK(s.balance == 20);
    e = apply_verdict(s, item(ChallengeKind::AvatarRecognition, "b"), verdict(ChallengeKind::AvatarRecognition, false), t0);
    CHECK(e.delta == -15);
    CHECK(e.balance_after == 5);
    e = apply_verdict(s, item(ChallengeKind::Standard, "c"), verdict(ChallengeKind::Standard, false), t0);
    CHECK(e.delta == -5);
    CHECK(s.balance == 0);
    e = apply_verdict(s, item(ChallengeKind::Standard, "d"), verdict(ChallengeKind::Standard, false), t0);
    CHECK(e.delta == 0);
    CHECK(s.balance == 0);
}

TEST_CASE("verdicts update ledger, day stats and the recognition window") {
    auto s = testing::enrolled();
    apply_verdict(s, item(ChallengeKind::AvatarRecognition, "a", "surname"), verdict(ChallengeKind::AvatarRecognition, true), t0);
    apply_verdict(s, item(ChallengeKind::AvatarRecall, "b", "surname"), verdict(ChallengeKind::AvatarRecall, false), t0 + kHour);
    apply_verdict(s, item(ChallengeKind::Standard, "c"), verdict(ChallengeKind::Standard, true), t0);
    const auto& l = s.ledger.at("surname");
    CHECK(l.successes == 1);
    CHECK(l.failures == 1);
    CHECK(l.last_success == t0);
    CHECK(l.last_failure == t0 + kHour);
    const auto& d = s.days.at(local_day(t0, "UTC"));
    CHECK(d.avatar_correct == 1);
    CHECK(d.avatar_total == 2);
    CHECK(d.standard_correct == 1);
    CHECK(s.recent_recognition.size() == 1);
    CHECK(s.last_played == t0);  // stamped by the latest verdict
}

TEST_CASE("hint purchase") {
    auto s = testing::enrolled();
    const auto d = item(ChallengeKind::AvatarRecall, "rcl-1");
    open(s, d);
    CHECK(code_of([&] { purchase_hint(s, "rcl-1", t0); }) == ErrorCode::InsufficientPoints);
    CHECK(code_of([&] { purchase_hint(s, "nope", t0); }) == ErrorCode::UnknownChallenge);
    s.balance = 45;
    const auto before = s;
    const auto g = purchase_hint(s, "rcl-1", t0);
    CHECK(g.cost == 30);
    CHECK(s.balance == 15);
    // A failed purchase leaves the state as it was.
    const auto after = s;
    CHECK(code_of([&] { purchase_hint(s, "rcl-1", t0); }) == ErrorCode::DuplicateGrant);
    CHECK(s == after);
    CHECK(before != after);

    s.stage = Stage::Late;
    s.balance = 49;
    open(s, item(ChallengeKind::AvatarRecall, "rcl-2"));
    CHECK(code_of([&] { purchase_hint(s, "rcl-2", t0); }) == ErrorCode::InsufficientPoints);
    s.balance = 50;
    CHECK(purchase_hint(s, "rcl-2", t0).cost == 50);
    CHECK(s.balance == 0);
}

TEST_CASE("free letter only when stuck") {
    auto s = testing::enrolled();
    const auto d = item(ChallengeKind::AvatarRecall, "rcl-1");
    open(s, d);
    CHECK(code_of([&] { claim_stuck_hint(s, "rcl-1", t0 + kDay - 1); }) == ErrorCode::NotStuck);
    CHECK(claim_stuck_hint(s, "rcl-1", t0 + kDay).cost == 0);
    CHECK(code_of([&] { claim_stuck_hint(s, "rcl-1", t0 + kDay); }) == ErrorCode::DuplicateGrant);

    open(s, item(ChallengeKind::AvatarRecall, "rcl-2"));
    for (int i = 0; i < 2; ++i) {
        apply_verdict(s, item(ChallengeKind::AvatarRecall, "rcl-2"), verdict(ChallengeKind::AvatarRecall, false), t0);
    }
    CHECK_FALSE(is_stuck(s.open_challenges.at("rcl-2"), t0));
    apply_verdict(s, item(ChallengeKind::AvatarRecall, "rcl-2"), verdict(ChallengeKind::AvatarRecall, false), t0);
    CHECK(is_stuck(s.open_challenges.at("rcl-2"), t0));
    CHECK(claim_stuck_hint(s, "rcl-2", t0).kind == HintKind::LetterReveal);
}

TEST_CASE("a correct answer closes the challenge") {
    auto s = testing::enrolled();
    open(s, item(ChallengeKind::Standard, "std-1"));
    apply_verdict(s, item(ChallengeKind::Standard, "std-1"), verdict(ChallengeKind::Standard, false), t0);
    CHECK(s.open_challenges.at("std-1").failed_attempts == 1);
    apply_verdict(s, item(ChallengeKind::Standard, "std-1"), verdict(ChallengeKind::Standard, true), t0);
    CHECK_FALSE(s.open_challenges.contains("std-1"));
}

TEST_CASE("badges by daily solves") {
    auto s = testing::enrolled();
    CHECK(award_badges(s, 6, t0).empty());
    auto solve = [&](int n, Timestamp at) {
        for (int i = 0; i < n; ++i) {
            apply_verdict(s, item(ChallengeKind::AvatarRecall, "x"), verdict(ChallengeKind::AvatarRecall, true), at);
        }
    };
    solve(1, t0);
    auto b = award_badges(s, 6, t0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].kind == BadgeKind::Smiley);
    grant_badges(s, b);
    CHECK(award_badges(s, 6, t0).empty());
    solve(2, t0);
    b = award_badges(s, 6, t0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].kind == BadgeKind::Cake);
    grant_badges(s, b);
    solve(3, t0);
    b = award_badges(s, 6, t0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].kind == BadgeKind::Trophy);
    grant_badges(s, b);
    // Next day starts over.
    solve(6, t0 + kDay);
    CHECK(award_badges(s, 6, t0 + kDay).size() == 3);
    CHECK(award_badges(s, 0, t0 + kDay).empty());
}

TEST_CASE("stage by distinct days played") {
    auto s = testing::enrolled();
    for (int day = 0; day < 6; ++day) {
        apply_verdict(s, item(ChallengeKind::Standard, "x"), verdict(ChallengeKind::Standard, true), t0 + day * kDay);
        CHECK(s.stage == Stage::Early);
    }
    // Repeat play on a day already counted changes nothing.
    apply_verdict(s, item(ChallengeKind::Standard, "x"), verdict(ChallengeKind::Standard, true), t0 + 5 * kDay);
    CHECK(distinct_days_played(s) == 6);
    CHECK(s.stage == Stage::Early);
    apply_verdict(s, item(ChallengeKind::Standard, "x"), verdict(ChallengeKind::Standard, true), t0 + 6 * kDay);
    CHECK(s.stage == Stage::Late);
}

TEST_CASE("stage by windowed recognition accuracy") {
    auto s = testing::enrolled();
    auto answer = [&](bool ok) {
        apply_verdict(s, item(ChallengeKind::AvatarRecognition, "r"), verdict(ChallengeKind::AvatarRecognition, ok), t0);
    };
    // 15 of the first 19 right: window not yet full.
    for (int i = 0; i < 19; ++i) answer(i % 5 != 0);
    CHECK(s.recent_recognition.size() == 19);
    CHECK(s.stage == Stage::Early);
    answer(true);  // 16/20 = 0.8 exactly
    CHECK(s.stage == Stage::Late);
    // Late latches even when accuracy later drops.
    for (int i = 0; i < 40; ++i) answer(false);
    CHECK(s.stage == Stage::Late);
}

TEST_CASE("windowed accuracy below the threshold stays early") {
    auto s = testing::enrolled();
    for (int i = 0; i < 100; ++i) {
        // 15/20 in every window: the oracle ratio is 0.75.
        apply_verdict(s, item(ChallengeKind::AvatarRecognition, "r"),
                      verdict(ChallengeKind::AvatarRecognition, i % 4 != 0), t0);
    }
    CHECK(s.stage == Stage::Early);
}

TEST_CASE("rules validation and parsing") {
    ProgressionRules r;
    CHECK_NOTHROW(r.validate());
    r.skill_window = 0;
    CHECK_THROWS_AS(r.validate(), Error);
    const auto parsed = rules_from_json({{"daily_quota", 4}});
    CHECK(parsed.daily_quota == 4);
    CHECK(parsed.days_threshold == 7);
    CHECK_THROWS_AS(rules_from_json({{"daily_quotas", 4}}), Error);
}
