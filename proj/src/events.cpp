#include "rehearse/events.hpp"

#include "rehearse/error.hpp"
#include "rehearse/progression.hpp"

namespace rehearse {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::ProfileCreated: return "ProfileCreated";
        case EventKind::SessionIssued: return "SessionIssued";
        case EventKind::AnswerJudged: return "AnswerJudged";
        case EventKind::HintPurchased: return "HintPurchased";
        case EventKind::BadgeAwarded: return "BadgeAwarded";
        case EventKind::NotificationSent: return "NotificationSent";
        case EventKind::AuthAttempted: return "AuthAttempted";
    }
    return "ProfileCreated";
}

EventKind event_kind_from_string(std::string_view text) {
    for (auto k : {EventKind::ProfileCreated, EventKind::SessionIssued, EventKind::AnswerJudged,
                   EventKind::HintPurchased, EventKind::BadgeAwarded, EventKind::NotificationSent,
                   EventKind::AuthAttempted}) {
        if (to_string(k) == text) return k;
    }
    throw Error(ErrorCode::ParseError, "unknown event kind '" + std::string(text) + "'");
}

Event profile_created(const std::string& player_id, Timestamp at, const std::string& schema_id,
                      std::uint64_t profile_seed, const ProgressionRules& rules) {
    return {0, player_id, EventKind::ProfileCreated, at,
            {{"schema_id", schema_id}, {"profile_seed", profile_seed}, {"rules", to_json(rules)}}};
}

Event session_issued(const SessionPlan& plan) {
    return {0, plan.player_id, EventKind::SessionIssued, plan.created_at, to_json(plan)};
}

Event answer_judged(const std::string& player_id, Timestamp at, const std::string& session_id,
                    const ChallengeDescriptor& item, const Verdict& verdict) {
    return {0, player_id, EventKind::AnswerJudged, at,
            {{"session_id", session_id},
             {"item", to_json(item)},
             {"correct", verdict.correct},
             {"unspellable", verdict.unspellable},
             {"revealed", verdict.canonical_answer_revealed}}};
}

Event hint_purchased(const std::string& player_id, const HintGrant& grant) {
    return {0, player_id, EventKind::HintPurchased, grant.granted_at, to_json(grant)};
}

Event badge_awarded(const std::string& player_id, const Badge& badge) {
    return {0, player_id, EventKind::BadgeAwarded, badge.awarded_at,
            {{"kind", to_string(badge.kind)}, {"day", badge.day}}};
}

Event notification_sent(const Notification& note, Timestamp at) { return {0, note.player_id, EventKind::NotificationSent, at, to_json(note)}; }

Event auth_attempted(const std::string& player_id, const AuthAttempt& attempt) {
    return {0, player_id, EventKind::AuthAttempted, attempt.timestamp,
            {{"question_set", attempt.question_set},
             {"answers_matched", attempt.answers_matched},
             {"outcome", to_string(attempt.outcome)}}};
}

JudgedAnswer judged_answer_from(const Event& event) {
    const auto& p = event.payload;
    JudgedAnswer out;
    out.session_id = p.at("session_id").get<std::string>();
    out.item = descriptor_from_json(p.at("item"));
    out.verdict.kind = out.item.kind;
    out.verdict.correct = p.at("correct").get<bool>();
    out.verdict.unspellable = p.at("unspellable").get<bool>();
    out.verdict.canonical_answer_revealed = p.at("revealed").get<bool>();
    return out;
}

namespace {

void apply_unchecked(PlayerState& state, const Event& e) {
    const auto& p = e.payload;
    switch (e.kind) {
        case EventKind::ProfileCreated:
            state = PlayerState{};
            state.player_id = e.player_id;
            state.schema_id = p.at("schema_id").get<std::string>();
            state.profile_seed = p.at("profile_seed").get<std::uint64_t>();
            state.created_at = e.timestamp;
            state.rules = rules_from_json(p.at("rules"));
            return;
        case EventKind::SessionIssued:
            issue_session(state, session_plan_from_json(p));
            return;
        case EventKind::AnswerJudged: {
            const auto judged = judged_answer_from(e);
            apply_verdict(state, judged.item, judged.verdict, e.timestamp);
            return;
        }
        case EventKind::HintPurchased: {
            const auto kind = hint_kind_from_string(p.at("kind").get<std::string>());
            const auto id = p.at("challenge_id").get<std::string>();
            const HintGrant grant =
                kind == HintKind::VerbalCues ? purchase_hint(state, id, e.timestamp) : claim_stuck_hint(state, id, e.timestamp);
            if (grant.cost != p.at("cost").get<int>()) throw Error(ErrorCode::CorruptLog, "hint cost mismatch");
            return;
        }
        case EventKind::BadgeAwarded:
            grant_badges(state, {{badge_kind_from_string(p.at("kind").get<std::string>()), p.at("day").get<DayNumber>(),
                                  e.timestamp}});
            return;
        case EventKind::NotificationSent: {
            Notification n;
            n.kind = p.at("kind").get<std::string>() == "reminder" ? NotificationKind::Reminder
                                                                    : NotificationKind::StuckHintOffer;
            n.player_id = e.player_id;
            n.challenge_id = p.value("challenge_id", "");
            mark_notifications_sent(state, {n}, e.timestamp);
            return;
        }
        case EventKind::AuthAttempted:
            state.auth_history.push_back({e.timestamp, p.at("question_set").get<std::vector<std::string>>(),
                                          p.at("answers_matched").get<std::vector<bool>>(),
                                          auth_outcome_from_string(p.at("outcome").get<std::string>())});
            return;
    }
}

}  // namespace

void apply_event(PlayerState& state, const Event& event) {
    if (event.kind != EventKind::ProfileCreated && state.player_id != event.player_id) {
        throw Error(ErrorCode::CorruptLog, "event #" + std::to_string(event.sequence_number) + " for '" +
                                               event.player_id + "' applied before its ProfileCreated");
    }
    try {
        apply_unchecked(state, event);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, "event #" + std::to_string(event.sequence_number) + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptLog) throw;
        throw Error(ErrorCode::CorruptLog, "event #" + std::to_string(event.sequence_number) + ": " + e.what());
    }
}

void replay_onto(PlayerState& state, std::span<const Event> events) {
    for (const auto& e : events) apply_event(state, e);
}

PlayerState replay(std::span<const Event> events) {
    if (events.empty()) throw Error(ErrorCode::UnknownPlayer, "no events");
    PlayerState state;
    replay_onto(state, events);
    return state;
}

json to_json(const Event& e) {
    return {{"seq", e.sequence_number},
            {"player_id", e.player_id},
            {"kind", to_string(e.kind)},
            {"ts", e.timestamp},
            {"payload", e.payload}};
}

Event event_from_json(const json& j) {
    try {
        Event e;
        e.sequence_number = j.at("seq").get<std::uint64_t>();
        e.player_id = j.at("player_id").get<std::string>();
        e.kind = event_kind_from_string(j.at("kind").get<std::string>());
        e.timestamp = j.at("ts").get<Timestamp>();
        e.payload = j.at("payload");
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::ParseError, std::string("event: ") + ex.what());
    }
}

}  // namespace rehearse
