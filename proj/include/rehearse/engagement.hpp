#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rehearse/events.hpp"
#include "rehearse/player_state.hpp"

namespace rehearse {

enum class CueTrigger { DailyReturn, Milestone, IncorrectAnswer, Lapse };
enum class Severity { Positive, Neutral, Negative };

std::string_view to_string(CueTrigger trigger);
std::string_view to_string(Severity severity);

struct SocialTrigger {
    CueTrigger kind = CueTrigger::DailyReturn;
    int lapse_days = 0;  // Lapse only, >= 2
};

struct SocialCueMessage {
    CueTrigger trigger = CueTrigger::DailyReturn;
    int lapse_days = 0;
    std::string text;
    Severity severity = Severity::Positive;

    bool operator==(const SocialCueMessage&) const = default;
};

nlohmann::json to_json(const SocialCueMessage& msg);

// A lapse is this many consecutive days without play.
inline constexpr int kLapseDays = 2;
// Point milestones fall on every multiple of this.
inline constexpr std::int64_t kPointMilestone = 500;

/// Template chosen by (trigger, distinct days played mod template count).
/// Templates never interpolate player data other than the lapse day count.
SocialCueMessage social_cue(const SocialTrigger& trigger, const PlayerState& state);

/// True when [before, after) crosses a multiple of kPointMilestone upwards.
bool crosses_point_milestone(std::int64_t before, std::int64_t after);

/// Every template for a trigger, for audits.
std::span<const std::string_view> cue_templates(CueTrigger trigger);

enum class ReportPeriod { Day, Week, Month };
std::string_view to_string(ReportPeriod period);
ReportPeriod report_period_from_string(std::string_view text);

struct SeriesBucket {
    std::string label;
    int correct = 0;
    int total = 0;

    bool operator==(const SeriesBucket&) const = default;
};

struct MonitoringReport {
    ReportPeriod period = ReportPeriod::Day;
    int solved_avatar_correct = 0;
    int solved_avatar_total = 0;
    std::int64_t score = 0;
    std::optional<int> remaining_to_next_stage;  // nullopt once Late
    int skill_window = 0;
    int skill_window_answers = 0;
    int skill_window_correct = 0;
    std::vector<SeriesBucket> series;

    bool operator==(const MonitoringReport&) const = default;
};

nlohmann::json to_json(const MonitoringReport& report);

// Period bounds: Day is the local day of `now` in 24 hourly buckets; Week and
// Month are the 7 and 30 local days ending on that day, one bucket per day.
inline constexpr int kWeekDays = 7;
inline constexpr int kMonthDays = 30;

/// Derived by replaying `events` (any players; filtered to `player_id`, up to
/// `now`). Throws UnknownPlayer when the player has no events.
MonitoringReport monitoring_report(std::span<const Event> events, const std::string& player_id, ReportPeriod period,
                                   Timestamp now);

}  // namespace rehearse
