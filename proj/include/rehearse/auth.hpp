#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rehearse/avatar.hpp"
#include "rehearse/player_state.hpp"
#include "rehearse/time.hpp"

namespace rehearse {

struct AuthPolicy {
    int m = 3;                      // questions asked
    int k = 3;                      // correct answers required
    int max_attempts_per_day = 3;   // judged attempts
    int lockout_after = 10;         // consecutive denied attempts
    double min_entropy_bits = 15.0; // gate on the chosen question set

    /// Throws InvalidPolicy. `field_count` is the schema's field count.
    void validate(std::size_t field_count) const;
    bool operator==(const AuthPolicy&) const = default;
};

nlohmann::json to_json(const AuthPolicy& p);
AuthPolicy auth_policy_from_json(const nlohmann::json& doc);

inline constexpr Timestamp kResetSessionTtl = 15 * kMinute;

struct ResetSession {
    std::string token;
    std::string player_id;
    std::vector<std::string> question_set;
    Timestamp issued_at = 0;

    bool expired(Timestamp now) const { return now - issued_at >= kResetSessionTtl; }
};

struct AuthDecision {
    AuthOutcome outcome = AuthOutcome::Denied;
    int matched = 0;
    int required = 0;
};

/// A uniformly chosen m-subset of fields whose summed entropy meets the
/// policy gate. Throws EntropyUnattainable when no subset qualifies.
std::vector<std::string> select_questions(const AvatarProfile& profile, const AvatarSchema& schema,
                                          const AuthPolicy& policy, std::uint64_t seed);

/// Judges one reset attempt and appends it to `history`. Locked preempts
/// judging when the day's judged attempts reached the limit or the trailing
/// run of denials reached lockout_after. Throws SessionUnknown for a missing,
/// expired or foreign session (nothing is appended then).
AuthDecision verify_reset(const AvatarProfile& profile, const ResetSession* session,
                          std::span<const std::string> answers, const AuthPolicy& policy,
                          std::vector<AuthAttempt>& history, Timestamp now, std::string_view tz_name = "UTC");

/// Judged (non-Locked) attempts on the local day of `now`.
int judged_attempts_on(std::span<const AuthAttempt> history, Timestamp now, std::string_view tz_name);
int trailing_denials(std::span<const AuthAttempt> history);

/// Tuples of the joint answer space that agree with a fixed victim tuple on at
/// least k coordinates: sum over |S| >= k of prod_{i not in S} (n_i - 1).
long double near_match_count(std::span<const std::uint64_t> pool_sizes, int k);

/// Probability that an attacker making `budget` distinct guesses, drawn
/// uniformly without replacement from the joint space of `pool_sizes`, hits
/// a uniformly drawn victim on >= k coordinates with some guess.
/// Hypergeometric: 1 - C(N - M, B) / C(N, B) with M = near_match_count.
double guess_success_probability(std::span<const std::uint64_t> pool_sizes, int k, std::uint64_t budget);

double guess_success_probability(const AvatarSchema& schema, std::span<const std::string> question_set,
                                 const AuthPolicy& policy, std::uint64_t budget);

}  // namespace rehearse
