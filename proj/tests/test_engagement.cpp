#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regex>

#include "rehearse/engagement.hpp"
#include "rehearse/error.hpp"
#include "rehearse/rng.hpp"
#include "support.hpp"

using namespace rehearse;

namespace {

constexpr Timestamp t0 = kSimulationEpoch;

ChallengeDescriptor recall_item(const std::string& field, int n) {
    return {ChallengeKind::AvatarRecall, field, "", 0, "c-" + std::to_string(n)};
}

struct Stream {
    std::vector<Event> events{profile_created("p-test", t0, testing::default_schema().schema_id, 7, {})};
    int next = 0;

    void answer(Timestamp at, bool correct, ChallengeKind kind = ChallengeKind::AvatarRecall) {
        auto item = recall_item("first_name", next++);
        item.kind = kind;
        if (kind == ChallengeKind::Standard) {
            item.field_id.clear();
            item.entry_id = "std-001";
        }
        events.push_back(answer_judged("p-test", at, "s-1", item, {correct, kind, false, false}));
    }
};

// Anything in these would be player data leaking into a cue.
bool mentions_player(const std::string& text, const AvatarProfile& profile) {
    for (const auto& [_, answer] : profile.assignments) {
        if (answer.size() >= 3 && text.find(answer) != std::string::npos) return true;
    }
    return text.find("p-test") != std::string::npos;
}

}  // namespace

TEST_CASE("cue templates carry an emoticon and no player data") {
    const std::regex emoticon(R"((:\)|:D|;\)|:\(|:/|\\o/))");
    const auto profile = generate_profile(testing::default_schema(), 7);
    auto state = testing::enrolled();
    for (auto trigger : {CueTrigger::DailyReturn, CueTrigger::Milestone, CueTrigger::IncorrectAnswer, CueTrigger::Lapse}) {
        const auto templates = cue_templates(trigger);
        REQUIRE(!templates.empty());
        for (const auto& tpl : templates) CHECK(std::regex_search(std::string(tpl), emoticon));
        for (int day = 0; day < 6; ++day) {
            state.days[day].avatar_total = 1;
            const auto msg = social_cue({trigger, trigger == CueTrigger::Lapse ? 3 : 0}, state);
            CHECK(msg.trigger == trigger);
            CHECK(std::regex_search(msg.text, emoticon));
            CHECK_FALSE(mentions_player(msg.text, profile));
            if (trigger == CueTrigger::Lapse) {
                CHECK(msg.severity == Severity::Negative);
                CHECK(msg.text.find("3 days") != std::string::npos);
                CHECK(to_json(msg)["lapse_days"] == 3);
            } else {
                CHECK(msg.severity != Severity::Negative);
                CHECK(msg.text.find("{days}") == std::string::npos);
            }
        }
    }
}

TEST_CASE("cue choice rotates with days played") {
    auto state = testing::enrolled();
    std::set<std::string> texts;
    for (int day = 0; day < 3; ++day) {
        state.days[day].avatar_total = 1;
        texts.insert(social_cue({CueTrigger::DailyReturn, 0}, state).text);
    }
    CHECK(texts.size() == 3);
    CHECK(social_cue({CueTrigger::DailyReturn, 0}, state) == social_cue({CueTrigger::DailyReturn, 0}, state));
}

TEST_CASE("point milestones") {
    CHECK(crosses_point_milestone(490, 505));
    CHECK(crosses_point_milestone(499, 500));
    CHECK_FALSE(crosses_point_milestone(500, 510));
    CHECK_FALSE(crosses_point_milestone(510, 490));
    CHECK(crosses_point_milestone(980, 1000));
}

TEST_CASE("report periods and bucket counts") {
    Stream s;
    s.answer(t0 + 9 * kHour, true);
    const Timestamp now = t0 + 10 * kHour;
    const auto day = monitoring_report(s.events, "p-test", ReportPeriod::Day, now);
    CHECK(day.series.size() == 24);
    CHECK(day.series[9].total == 1);
    CHECK(day.series[0].label == "00:00");
    CHECK(monitoring_report(s.events, "p-test", ReportPeriod::Week, now).series.size() == 7);
    CHECK(monitoring_report(s.events, "p-test", ReportPeriod::Month, now).series.size() == 30);
    CHECK(report_period_from_string("week") == ReportPeriod::Week);
    CHECK_THROWS_AS(report_period_from_string("year"), Error);
}

TEST_CASE("three correct and one wrong reads 3 of 4") {
    Stream s;
    s.answer(t0 + 9 * kHour, true);
    s.answer(t0 + 9 * kHour + 1, true);
    s.answer(t0 + 9 * kHour + 2, false);
    s.answer(t0 + 9 * kHour + 3, true);
    s.answer(t0 + 9 * kHour + 4, true, ChallengeKind::Standard);  // not an avatar item
    const auto r = monitoring_report(s.events, "p-test", ReportPeriod::Day, t0 + 12 * kHour);
    CHECK(r.solved_avatar_correct == 3);
    CHECK(r.solved_avatar_total == 4);
    CHECK(r.series[9] == SeriesBucket{"09:00", 3, 4});
    CHECK(r.score == 20 * 3 - 20 + 10);
    REQUIRE(r.remaining_to_next_stage.has_value());
    CHECK(*r.remaining_to_next_stage == 6);
    const auto j = to_json(r);
    CHECK(j["solved_avatar_correct"] == 3);
    CHECK(j["series"][9]["bucket"] == "09:00");
}

TEST_CASE("week totals equal the sum of day totals") {
    Stream s;
    SplitMix64 rng(3);
    for (int d = 0; d < 12; ++d) {
        const int n = static_cast<int>(rng.below(5));
        for (int i = 0; i < n; ++i) s.answer(t0 + d * kDay + static_cast<Timestamp>(rng.below(kDay)), rng.chance(0.6));
    }
    const Timestamp now = t0 + 11 * kDay + 23 * kHour + 59 * kMinute;
    const auto week = monitoring_report(s.events, "p-test", ReportPeriod::Week, now);
    int correct = 0;
    int total = 0;
    for (int d = 0; d < 7; ++d) {
        const auto day = monitoring_report(s.events, "p-test", ReportPeriod::Day, now - d * kDay);
        correct += day.solved_avatar_correct;
        total += day.solved_avatar_total;
        CHECK(week.series[static_cast<std::size_t>(6 - d)].total == day.solved_avatar_total);
    }
    CHECK(week.solved_avatar_correct == correct);
    CHECK(week.solved_avatar_total == total);
    // Late after seven distinct days.
    CHECK_FALSE(week.remaining_to_next_stage.has_value());
    CHECK(to_json(week)["remaining_to_next_stage"] == "already_late");
}

TEST_CASE("reports ignore later events and other players") {
    Stream s;
    s.answer(t0 + 9 * kHour, true);
    s.answer(t0 + 11 * kHour, true);
    auto other = s.events.back();
    other.player_id = "p-other";
    auto events = s.events;
    events.push_back(other);
    const auto r = monitoring_report(events, "p-test", ReportPeriod::Day, t0 + 10 * kHour);
    CHECK(r.solved_avatar_total == 1);
    try {
        monitoring_report(s.events, "p-nobody", ReportPeriod::Day, t0);
        FAIL("expected UnknownPlayer");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownPlayer);
    }
}
