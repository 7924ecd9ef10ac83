#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rehearse/auth.hpp"
#include "rehearse/player_state.hpp"
#include "rehearse/scheduler.hpp"

namespace rehearse {

enum class EventKind {
    ProfileCreated,
    SessionIssued,
    AnswerJudged,
    HintPurchased,
    BadgeAwarded,
    NotificationSent,
    AuthAttempted,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct Event {
    std::uint64_t sequence_number = 0;  // assigned by the log, per player
    std::string player_id;
    EventKind kind = EventKind::ProfileCreated;
    Timestamp timestamp = 0;
    nlohmann::json payload;

    bool operator==(const Event&) const = default;
};

// Payload builders. Each carries what the fold needs to redo the transition.
Event profile_created(const std::string& player_id, Timestamp at, const std::string& schema_id,
                      std::uint64_t profile_seed, const ProgressionRules& rules);
Event session_issued(const SessionPlan& plan);
Event answer_judged(const std::string& player_id, Timestamp at, const std::string& session_id,
                    const ChallengeDescriptor& item, const Verdict& verdict);
Event hint_purchased(const std::string& player_id, const HintGrant& grant);
Event badge_awarded(const std::string& player_id, const Badge& badge);
Event notification_sent(const Notification& note, Timestamp at);
Event auth_attempted(const std::string& player_id, const AuthAttempt& attempt);

/// Applies one event to `state`. Throws CorruptLog when the event cannot be
/// applied (unknown player, malformed payload, or a transition that fails).
void apply_event(PlayerState& state, const Event& event);

/// Folds events onto `state` in order.
void replay_onto(PlayerState& state, std::span<const Event> events);

/// Full replay from empty state. Throws UnknownPlayer for an empty stream.
PlayerState replay(std::span<const Event> events);

nlohmann::json to_json(const Event& event);
Event event_from_json(const nlohmann::json& doc);

/// Verdict fields carried by an AnswerJudged payload.
struct JudgedAnswer {
    std::string session_id;
    ChallengeDescriptor item;
    Verdict verdict;
};
JudgedAnswer judged_answer_from(const Event& event);

}  // namespace rehearse
