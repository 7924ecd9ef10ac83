#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rehearse/challenge.hpp"
#include "rehearse/time.hpp"

namespace rehearse {

enum class Stage { Early, Late };
std::string_view to_string(Stage stage);

enum class BadgeKind { Smiley, Cake, Trophy };
std::string_view to_string(BadgeKind kind);
BadgeKind badge_kind_from_string(std::string_view text);

struct Badge {
    BadgeKind kind = BadgeKind::Smiley;
    DayNumber day = 0;
    Timestamp awarded_at = 0;

    bool operator==(const Badge&) const = default;
};

struct ScoreEvent {
    std::string challenge_id;
    ChallengeKind kind = ChallengeKind::Standard;
    int delta = 0;
    std::int64_t balance_after = 0;
    Timestamp timestamp = 0;

    bool operator==(const ScoreEvent&) const = default;
};

/// Per-player progression knobs. Snapshotted into the player's first event so
/// replay never depends on the server's current configuration.
struct ProgressionRules {
    int daily_quota = 6;
    int days_threshold = 7;
    double skill_threshold = 0.8;
    int skill_window = 20;
    std::string timezone = "UTC";

    void validate() const;
    bool operator==(const ProgressionRules&) const = default;
};

inline constexpr std::size_t kMaxSkillWindow = 256;

struct FieldLedger {
    int successes = 0;
    int failures = 0;
    std::optional<Timestamp> last_success;
    std::optional<Timestamp> last_failure;

    std::optional<Timestamp> last_rehearsed() const;
    bool operator==(const FieldLedger&) const = default;
};

struct DayStats {
    int avatar_correct = 0;
    int avatar_total = 0;
    int standard_correct = 0;
    int standard_total = 0;

    bool operator==(const DayStats&) const = default;
};

/// What a session item is, independent of its rendered challenge.
struct ChallengeDescriptor {
    ChallengeKind kind = ChallengeKind::Standard;
    std::string field_id;  // avatar kinds
    std::string entry_id;  // Standard
    std::uint64_t seed = 0;
    std::string challenge_id;

    bool operator==(const ChallengeDescriptor&) const = default;
};

struct OpenChallenge {
    ChallengeDescriptor descriptor;
    std::string session_id;
    Timestamp issued_at = 0;
    int failed_attempts = 0;
    std::optional<Timestamp> last_offer_at;
    std::vector<HintGrant> grants;

    bool operator==(const OpenChallenge&) const = default;
};

struct IssuedSession {
    std::string session_id;
    Timestamp created_at = 0;
    std::vector<ChallengeDescriptor> items;
    std::set<std::string> answered;

    bool operator==(const IssuedSession&) const = default;
};

enum class AuthOutcome { Granted, Denied, Locked };
std::string_view to_string(AuthOutcome outcome);
AuthOutcome auth_outcome_from_string(std::string_view text);

/// Audit record of one reset attempt. Answers are kept as per-question match
/// flags, never as text.
struct AuthAttempt {
    Timestamp timestamp = 0;
    std::vector<std::string> question_set;
    std::vector<bool> answers_matched;
    AuthOutcome outcome = AuthOutcome::Denied;

    bool operator==(const AuthAttempt&) const = default;
};

/// The single mutable aggregate for one player. Every field is rebuilt by
/// folding the player's event stream.
struct PlayerState {
    std::string player_id;
    std::string schema_id;
    std::uint64_t profile_seed = 0;
    Timestamp created_at = 0;
    ProgressionRules rules;

    std::int64_t balance = 0;
    Stage stage = Stage::Early;
    std::vector<Badge> badges;
    std::map<DayNumber, DayStats> days;
    std::map<std::string, FieldLedger> ledger;
    std::deque<bool> recent_recognition;  // newest at back, capped at kMaxSkillWindow
    std::optional<Timestamp> last_played;
    std::optional<Timestamp> last_reminder_at;

    std::map<std::string, OpenChallenge> open_challenges;
    std::optional<IssuedSession> active_session;
    std::set<std::string> issued_sessions;
    std::set<std::string> recorded_sessions;
    std::vector<AuthAttempt> auth_history;

    bool operator==(const PlayerState&) const = default;
};

nlohmann::json to_json(const PlayerState& state);
PlayerState player_state_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ChallengeDescriptor& d);
ChallengeDescriptor descriptor_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ScoreEvent& e);
nlohmann::json to_json(const HintGrant& g);
nlohmann::json to_json(const Badge& b);
nlohmann::json to_json(const ProgressionRules& r);
ProgressionRules rules_from_json(const nlohmann::json& doc);

}  // namespace rehearse
