#pragma once

#include <string_view>
#include <vector>

#include "rehearse/challenge.hpp"
#include "rehearse/player_state.hpp"

namespace rehearse {

// Reward table: +10 Standard, +15 AvatarRecognition, +20 AvatarRecall. A wrong
// answer deducts the same magnitude, floored so the balance stays >= 0.
int reward_for(ChallengeKind kind);

// Verbal cue price: 30 in the Early stage, 50 once Late.
int hint_cost(Stage stage);

/// Scores one judged answer and updates the daily counters, the rehearsal
/// ledger, the recognition window, the open-challenge record and the stage.
ScoreEvent apply_verdict(PlayerState& state, const ChallengeDescriptor& item, const Verdict& verdict,
                         Timestamp now);

/// Buys the verbal cues of an open challenge. Throws UnknownChallenge,
/// DuplicateGrant or InsufficientPoints; the state is untouched on error.
HintGrant purchase_hint(PlayerState& state, std::string_view challenge_id, Timestamp now);

// A challenge is stuck once it has 3 failed attempts or has been open 24h.
inline constexpr int kStuckFailedAttempts = 3;
inline constexpr Timestamp kStuckOpenFor = kDay;
bool is_stuck(const OpenChallenge& open, Timestamp now);

/// Free LetterReveal for a stuck challenge. Throws UnknownChallenge, NotStuck
/// or DuplicateGrant.
HintGrant claim_stuck_hint(PlayerState& state, std::string_view challenge_id, Timestamp now);

/// Badges newly earned today (player's zone): Smiley at 1 solved avatar
/// challenge, Cake at ceil(quota/2), Trophy at quota. Each kind at most once
/// per day. Does not modify the state; see grant_badges.
std::vector<Badge> award_badges(const PlayerState& state, int daily_quota, Timestamp now);
void grant_badges(PlayerState& state, const std::vector<Badge>& badges);

int distinct_days_played(const PlayerState& state);

/// Late once the player has played on days_threshold distinct days, or has
/// at least skill_window recognition answers with windowed accuracy at or
/// above skill_threshold. Never returns Early for a Late player.
Stage evaluate_stage(const PlayerState& state, const ProgressionRules& rules, Timestamp now);

/// Correct avatar answers on the local day containing `now`.
int avatar_solved_on(const PlayerState& state, Timestamp now);

}  // namespace rehearse
