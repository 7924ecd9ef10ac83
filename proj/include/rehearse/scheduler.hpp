#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rehearse/avatar.hpp"
#include "rehearse/challenge.hpp"
#include "rehearse/player_state.hpp"

namespace rehearse {

struct SchedulerConfig {
    int session_length = 10;
    double early_recognition_fraction = 0.8;
    double late_recognition_fraction = 0.2;

    void validate() const;
    bool operator==(const SchedulerConfig&) const = default;
};

struct SessionPlan {
    std::string session_id;
    std::string player_id;
    Timestamp created_at = 0;
    std::vector<ChallengeDescriptor> items;
    int avatar_count = 0;
    double recognition_fraction = 0.0;

    bool operator==(const SessionPlan&) const = default;
};

nlohmann::json to_json(const SessionPlan& plan);
SessionPlan session_plan_from_json(const nlohmann::json& doc);

/// Largest-remainder split of `total` seats between two parties with shares
/// `fraction` and 1 - fraction. Returns the first party's seats; an exact tie
/// on remainders goes to the first party.
int largest_remainder_seats(double fraction, int total);

/// Slots of `count` evenly spaced avatar items among `length` items:
/// floor((i + 0.5) * length / count).
std::vector<int> interleave_positions(int count, int length);

/// Fields ordered least-recently-rehearsed first, never-rehearsed before any
/// rehearsed field; equal timestamps go to the less rehearsed field, then
/// schema order.
std::vector<std::string> rehearsal_order(const PlayerState& state, const AvatarSchema& schema);

/// Pure planner. Avatar items fill up to the remaining daily quota, split
/// between recognition and recall by the stage's fraction; Standard items from
/// `bank` fill the rest of the session. Deterministic in its inputs.
SessionPlan next_session_plan(const PlayerState& state, const AvatarSchema& schema, const ChallengeBank& bank,
                              const SchedulerConfig& config, const ChallengeConfig& challenge_config, Timestamp now,
                              std::uint64_t seed);

/// Rebuilds the playable challenge a session item stands for.
Challenge materialize(const ChallengeDescriptor& item, const AvatarProfile& profile, const AvatarSchema& schema,
                      const ChallengeBank& bank, const ChallengeConfig& config);

/// Makes `plan` the active session and opens its challenges. Unanswered
/// challenges of the previous session are closed.
void issue_session(PlayerState& state, const SessionPlan& plan);

enum class NotificationKind { Reminder, StuckHintOffer };
std::string_view to_string(NotificationKind kind);

struct Notification {
    NotificationKind kind = NotificationKind::Reminder;
    std::string player_id;
    Timestamp due_at = 0;
    std::string payload;       // message id
    std::string challenge_id;  // StuckHintOffer only
    int lapse_days = 0;        // whole days since last play, for reminders

    bool operator==(const Notification&) const = default;
};

nlohmann::json to_json(const Notification& n);

inline constexpr Timestamp kReminderInterval = kDay;
inline constexpr Timestamp kStuckOfferInterval = kDay;

/// Reminder when the player has not played for >= 24h and no reminder went out
/// in the last 24h. StuckHintOffer for each challenge open >= 24h without an
/// offer in the last 24h.
std::vector<Notification> due_notifications(const PlayerState& state, Timestamp now);

/// Records that `notes` were delivered at `now`.
void mark_notifications_sent(PlayerState& state, const std::vector<Notification>& notes, Timestamp now);

using SessionOutcome = std::pair<ChallengeDescriptor, Verdict>;

/// Batch form of apply_verdict for a whole issued session. Replaying an
/// already recorded session id is a no-op. Throws UnknownSession.
std::vector<ScoreEvent> record_session(PlayerState& state, const std::string& session_id,
                                       const std::vector<SessionOutcome>& outcomes, Timestamp now);

}  // namespace rehearse
