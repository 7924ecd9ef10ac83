#include "rehearse/engagement.hpp"

#include <array>

#include "rehearse/error.hpp"
#include "rehearse/progression.hpp"

namespace rehearse {

std::string_view to_string(CueTrigger trigger) {
    switch (trigger) {
        case CueTrigger::DailyReturn: return "daily_return";
        case CueTrigger::Milestone: return "milestone";
        case CueTrigger::IncorrectAnswer: return "incorrect_answer";
        case CueTrigger::Lapse: return "lapse";
    }
    return "daily_return";
}

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::Positive: return "positive";
        case Severity::Neutral: return "neutral";
        case Severity::Negative: return "negative";
    }
    return "neutral";
}

namespace {

// "{days}" is the only placeholder.
constexpr std::array<std::string_view, 3> kDailyReturn = {
    "Welcome back! Another day with your avatar :)",
    "Great to see you again today :D",
    "You came back! Your avatar is proud of you ;)",
};
constexpr std::array<std::string_view, 3> kMilestone = {
    "Applause! You reached a new milestone \\o/",
    "What a milestone! Take a bow :D",
    "Milestone unlocked! Everyone is cheering for you :)",
};
constexpr std::array<std::string_view, 3> kIncorrect = {
    "Not quite, but keep going! You will get it :)",
    "So close! Every try makes the memory stronger ;)",
    "Don't give up, the next one is yours :)",
};
constexpr std::array<std::string_view, 2> kLapse = {
    "We missed you for {days} days... your avatar is feeling lonely :(",
    "{days} days without a visit? Your avatar is disappointed :/",
};

std::string render(std::string_view tpl, int days) {
    std::string out(tpl);
    if (const auto pos = out.find("{days}"); pos != std::string::npos) out.replace(pos, 6, std::to_string(days));
    return out;
}

}  // namespace

std::span<const std::string_view> cue_templates(CueTrigger trigger) {
    switch (trigger) {
        case CueTrigger::DailyReturn: return kDailyReturn;
        case CueTrigger::Milestone: return kMilestone;
        case CueTrigger::IncorrectAnswer: return kIncorrect;
        case CueTrigger::Lapse: return kLapse;
    }
    return kDailyReturn;
}

SocialCueMessage social_cue(const SocialTrigger& trigger, const PlayerState& state) {
    const auto templates = cue_templates(trigger.kind);
    const auto day_index = static_cast<std::size_t>(distinct_days_played(state));
    SocialCueMessage msg;
    msg.trigger = trigger.kind;
    msg.text = render(templates[day_index % templates.size()], trigger.lapse_days);
    switch (trigger.kind) {
        case CueTrigger::DailyReturn:
        case CueTrigger::Milestone: msg.severity = Severity::Positive; break;
        case CueTrigger::IncorrectAnswer: msg.severity = Severity::Neutral; break;
        case CueTrigger::Lapse:
            msg.severity = Severity::Negative;
            msg.lapse_days = trigger.lapse_days;
            break;
    }
    return msg;
}

nlohmann::json to_json(const SocialCueMessage& msg) {
    nlohmann::json out = {{"trigger", to_string(msg.trigger)}, {"text", msg.text}, {"severity", to_string(msg.severity)}};
    if (msg.trigger == CueTrigger::Lapse) out["lapse_days"] = msg.lapse_days;
    return out;
}

bool crosses_point_milestone(std::int64_t before, std::int64_t after) {
    return after > before && after / kPointMilestone > before / kPointMilestone;
}

std::string_view to_string(ReportPeriod period) {
    switch (period) {
        case ReportPeriod::Day: return "day";
        case ReportPeriod::Week: return "week";
        case ReportPeriod::Month: return "month";
    }
    return "day";
}

ReportPeriod report_period_from_string(std::string_view text) {
    if (text == "day") return ReportPeriod::Day;
    if (text == "week") return ReportPeriod::Week;
    if (text == "month") return ReportPeriod::Month;
    throw Error(ErrorCode::ParseError, "period must be day, week or month");
}

nlohmann::json to_json(const MonitoringReport& r) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& b : r.series) series.push_back({{"bucket", b.label}, {"correct", b.correct}, {"total", b.total}});
    return {{"period", to_string(r.period)},
            {"solved_avatar_correct", r.solved_avatar_correct},
            {"solved_avatar_total", r.solved_avatar_total},
            {"score", r.score},
            {"remaining_to_next_stage",
             r.remaining_to_next_stage ? nlohmann::json(*r.remaining_to_next_stage) : nlohmann::json("already_late")},
            {"skill_path", {{"window", r.skill_window}, {"answers", r.skill_window_answers}, {"correct", r.skill_window_correct}}},
            {"series", std::move(series)}};
}

MonitoringReport monitoring_report(std::span<const Event> events, const std::string& player_id, ReportPeriod period,
                                   Timestamp now) {
    PlayerState state;
    std::vector<const Event*> answers;
    bool seen = false;
    for (const auto& e : events) {
        if (e.player_id != player_id || e.timestamp > now) continue;
        apply_event(state, e);
        seen = true;
        if (e.kind == EventKind::AnswerJudged) answers.push_back(&e);
    }
    if (!seen) throw Error(ErrorCode::UnknownPlayer, player_id);

    const auto& tz = state.rules.timezone;
    const DayNumber today = local_day(now, tz);
    MonitoringReport report;
    report.period = period;

    const int span_days = period == ReportPeriod::Day ? 1 : period == ReportPeriod::Week ? kWeekDays : kMonthDays;
    const DayNumber first_day = today - (span_days - 1);
    if (period == ReportPeriod::Day) {
        for (int h = 0; h < 24; ++h) {
            char label[8];
            std::snprintf(label, sizeof label, "%02d:00", h);
            report.series.push_back({label, 0, 0});
        }
    } else {
        for (DayNumber d = first_day; d <= today; ++d) report.series.push_back({format_day(d), 0, 0});
    }

    for (const Event* e : answers) {
        const auto judged = judged_answer_from(*e);
        if (!is_avatar_kind(judged.item.kind)) continue;
        const DayNumber day = local_day(e->timestamp, tz);
        if (day < first_day || day > today) continue;
        const auto bucket =
            period == ReportPeriod::Day ? static_cast<std::size_t>(local_hour(e->timestamp, tz))
                                        : static_cast<std::size_t>(day - first_day);
        auto& b = report.series[bucket];
        ++b.total;
        ++report.solved_avatar_total;
        if (judged.verdict.correct) {
            ++b.correct;
            ++report.solved_avatar_correct;
        }
    }

    report.score = state.balance;
    if (state.stage == Stage::Early) {
        report.remaining_to_next_stage = std::max(0, state.rules.days_threshold - distinct_days_played(state));
    }
    report.skill_window = state.rules.skill_window;
    const auto window = std::min<std::size_t>(state.recent_recognition.size(), static_cast<std::size_t>(state.rules.skill_window));
    report.skill_window_answers = static_cast<int>(window);
    report.skill_window_correct = static_cast<int>(
        std::count(state.recent_recognition.end() - static_cast<std::ptrdiff_t>(window), state.recent_recognition.end(), true));
    return report;
}

}  // namespace rehearse
