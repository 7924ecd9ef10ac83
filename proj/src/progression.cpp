#include "rehearse/progression.hpp"

#include <algorithm>

#include "rehearse/error.hpp"

namespace rehearse {

int reward_for(ChallengeKind kind) {
    switch (kind) {
        case ChallengeKind::Standard: return 10;
        case ChallengeKind::AvatarRecognition: return 15;
        case ChallengeKind::AvatarRecall: return 20;
    }
    return 0;
}

int hint_cost(Stage stage) { return stage == Stage::Early ? 30 : 50; }

ScoreEvent apply_verdict(PlayerState& state, const ChallengeDescriptor& item, const Verdict& verdict,
                         Timestamp now) {
    const int magnitude = reward_for(item.kind);
    const int delta = verdict.correct ? magnitude : -static_cast<int>(std::min<std::int64_t>(magnitude, state.balance));
    state.balance += delta;

    auto& day = state.days[local_day(now, state.rules.timezone)];
    if (is_avatar_kind(item.kind)) {
        ++day.avatar_total;
        auto& ledger = state.ledger[item.field_id];
        if (verdict.correct) {
            ++day.avatar_correct;
            ++ledger.successes;
            ledger.last_success = now;
        } else {
            ++ledger.failures;
            ledger.last_failure = now;
        }
    } else {
        ++day.standard_total;
        if (verdict.correct) ++day.standard_correct;
    }

    if (item.kind == ChallengeKind::AvatarRecognition) {
        state.recent_recognition.push_back(verdict.correct);
        if (state.recent_recognition.size() > kMaxSkillWindow) state.recent_recognition.pop_front();
    }

    if (auto it = state.open_challenges.find(item.challenge_id); it != state.open_challenges.end()) {
        if (verdict.correct) state.open_challenges.erase(it);
        else ++it->second.failed_attempts;
    }
    if (state.active_session) state.active_session->answered.insert(item.challenge_id);

    state.last_played = now;
    state.stage = evaluate_stage(state, state.rules, now);

    return {item.challenge_id, item.kind, delta, state.balance, now};
}

namespace {

OpenChallenge& open_or_throw(PlayerState& state, std::string_view challenge_id) {
    const auto it = state.open_challenges.find(std::string(challenge_id));
    if (it == state.open_challenges.end()) {
        throw Error(ErrorCode::UnknownChallenge, "no open challenge " + std::string(challenge_id));
    }
    return it->second;
}

bool has_grant(const OpenChallenge& open, HintKind kind) {
    return std::any_of(open.grants.begin(), open.grants.end(), [&](const HintGrant& g) { return g.kind == kind; });
}

}  // namespace

HintGrant purchase_hint(PlayerState& state, std::string_view challenge_id, Timestamp now) {
    auto& open = open_or_throw(state, challenge_id);
    if (has_grant(open, HintKind::VerbalCues)) {
        throw Error(ErrorCode::DuplicateGrant, "cues already granted for " + std::string(challenge_id));
    }
    const int cost = hint_cost(state.stage);
    if (state.balance < cost) {
        throw Error(ErrorCode::InsufficientPoints,
                    "need " + std::to_string(cost) + " points, have " + std::to_string(state.balance));
    }
    state.balance -= cost;
    HintGrant grant{std::string(challenge_id), cost, now, HintKind::VerbalCues};
    open.grants.push_back(grant);
    return grant;
}

bool is_stuck(const OpenChallenge& open, Timestamp now) {
    return open.failed_attempts >= kStuckFailedAttempts || now - open.issued_at >= kStuckOpenFor;
}

HintGrant claim_stuck_hint(PlayerState& state, std::string_view challenge_id, Timestamp now) {
    auto& open = open_or_throw(state, challenge_id);
    if (has_grant(open, HintKind::LetterReveal)) {
        throw Error(ErrorCode::DuplicateGrant, "letter already revealed for " + std::string(challenge_id));
    }
    if (!is_stuck(open, now)) throw Error(ErrorCode::NotStuck, std::string(challenge_id));
    HintGrant grant{std::string(challenge_id), 0, now, HintKind::LetterReveal};
    open.grants.push_back(grant);
    return grant;
}

int avatar_solved_on(const PlayerState& state, Timestamp now) {
    const auto it = state.days.find(local_day(now, state.rules.timezone));
    return it == state.days.end() ? 0 : it->second.avatar_correct;
}

std::vector<Badge> award_badges(const PlayerState& state, int daily_quota, Timestamp now) {
    std::vector<Badge> out;
    if (daily_quota < 1) return out;
    const DayNumber today = local_day(now, state.rules.timezone);
    const int solved = avatar_solved_on(state, now);
    auto already = [&](BadgeKind kind) {
        return std::any_of(state.badges.begin(), state.badges.end(),
                           [&](const Badge& b) { return b.day == today && b.kind == kind; });
    };
    const int half = (daily_quota + 1) / 2;
    const std::pair<BadgeKind, int> thresholds[] = {
        {BadgeKind::Smiley, 1}, {BadgeKind::Cake, half}, {BadgeKind::Trophy, daily_quota}};
    for (const auto& [kind, needed] : thresholds) {
        if (solved >= needed && !already(kind)) out.push_back({kind, today, now});
    }
    return out;
}

void grant_badges(PlayerState& state, const std::vector<Badge>& badges) {
    state.badges.insert(state.badges.end(), badges.begin(), badges.end());
}

int distinct_days_played(const PlayerState& state) {
    return static_cast<int>(std::count_if(state.days.begin(), state.days.end(), [](const auto& kv) {
        return kv.second.avatar_total + kv.second.standard_total > 0;
    }));
}

Stage evaluate_stage(const PlayerState& state, const ProgressionRules& rules, Timestamp /*now*/) {
    if (state.stage == Stage::Late) return Stage::Late;
    if (distinct_days_played(state) >= rules.days_threshold) return Stage::Late;
    const auto window = static_cast<std::size_t>(rules.skill_window);
    if (state.recent_recognition.size() >= window) {
        const auto correct = std::count(state.recent_recognition.end() - static_cast<std::ptrdiff_t>(window),
                                        state.recent_recognition.end(), true);
        const double accuracy = static_cast<double>(correct) / static_cast<double>(window);
        if (accuracy + 1e-12 >= rules.skill_threshold) return Stage::Late;
    }
    return Stage::Early;
}

}  // namespace rehearse
