#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rehearse/auth.hpp"
#include "rehearse/avatar.hpp"
#include "rehearse/challenge.hpp"
#include "rehearse/game_config.hpp"

namespace rehearse {

// ---------------------------------------------------------------------------
// Forgetting model
//
// Recall of a field decays exponentially: p = 2^-(carried + dt / half_life),
// dt in hours since the last rehearsal. A rehearsal first folds the decay
// accrued so far into `carried`. A success then divides `carried` by the
// growth factor (p becomes p^(1/growth)) and multiplies the half-life by it;
// a failure only multiplies the half-life by the failure factor. With both
// factors at 1 a rehearsal changes nothing and recall is pure decay.
// ---------------------------------------------------------------------------

struct MemoryParams {
    double initial_half_life_hours = 24.0;
    double growth_factor = 2.0;
    double failure_factor = 0.5;
    double recognition_boost = 2.0;

    void validate() const;
};

nlohmann::json to_json(const MemoryParams& p);
MemoryParams memory_params_from_json(const nlohmann::json& doc);

struct FieldMemory {
    double half_life_hours = 24.0;
    Timestamp last_rehearsal = 0;
    double carried_decay = 0.0;  // half-lives of decay before last_rehearsal

    bool operator==(const FieldMemory&) const = default;
};

using MemoryState = std::map<std::string, FieldMemory>;

/// 2^-(carried + dt/half_life); Recognition multiplies by recognition_boost,
/// capped at 1.
double recall_probability(const FieldMemory& mem, Timestamp now, AvatarMode mode, const MemoryParams& params);

void rehearse_field(FieldMemory& mem, bool success, Timestamp now, const MemoryParams& params);

// ---------------------------------------------------------------------------
// Simulated player
// ---------------------------------------------------------------------------

struct SessionPolicy {
    double adherence = 0.8;       // chance of attending each planned session
    double standard_skill = 0.9;  // chance of solving a Standard puzzle
    int session_hour = 9;         // UTC hour of the first daily session
    int sessions_per_day = 1;     // sessions 3 hours apart, at most 5

    void validate() const;
};

nlohmann::json to_json(const SessionPolicy& p);
SessionPolicy session_policy_from_json(const nlohmann::json& doc);

struct SimEnvironment {
    AvatarSchema schema;
    ChallengeBank bank;
};

// Simulated enrollment instant: 2024-01-01T00:00:00Z.
inline constexpr Timestamp kSimulationEpoch = 1'704'067'200'000;

inline constexpr int kCheckpointDays[] = {7, 30, 90, 180};

struct SimOutcome {
    GameConfig config;
    std::vector<std::pair<int, double>> checkpoints;  // (day, mean recall probability)
    double initial_recall = 1.0;
    double final_recall = 0.0;  // at the horizon
    int sessions_played = 0;
    int reminders_sent = 0;
    int badges_awarded = 0;
    std::int64_t final_balance = 0;
    Stage final_stage = Stage::Early;
    int late_from_day = -1;  // first day the player was Late, -1 if never

    bool operator==(const SimOutcome&) const = default;
};

nlohmann::json to_json(const SimOutcome& outcome);

/// Recall probability of every field in Recall mode, averaged.
double mean_recall(const MemoryState& memory, Timestamp now, const MemoryParams& params);

/// Runs one player for `horizon_days` through the production scheduler,
/// challenge and progression code. All randomness derives from `seed`.
SimOutcome simulate_player(const SimEnvironment& env, const GameConfig& config, const MemoryParams& memory,
                           int horizon_days, const SessionPolicy& policy, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Monte Carlo guessing attacker
// ---------------------------------------------------------------------------

enum class AttackerModel { Uniform, Zipf };

struct AttackSpec {
    AttackerModel model = AttackerModel::Uniform;
    double zipf_exponent = 1.0;
};

struct AttackResult {
    double success_rate = 0.0;
    double standard_error = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

nlohmann::json to_json(const AttackResult& r);

/// Uniform: the victim's answers are uniform over each pool and the attacker
/// tries `budget` distinct joint guesses in random order. Zipf: each victim
/// answer has rank r with probability proportional to r^-s, and the attacker
/// tries the `budget` most probable joint tuples in descending order.
/// Success means some guess matches >= k answers.
AttackResult simulate_guessing_attack(std::span<const std::uint64_t> pool_sizes, int k, const AttackSpec& attacker,
                                      std::uint64_t budget, std::uint64_t trials, std::uint64_t seed);

AttackResult simulate_guessing_attack(const AvatarSchema& schema, std::span<const std::string> question_set,
                                      const AuthPolicy& policy, const AttackSpec& attacker, std::uint64_t budget,
                                      std::uint64_t trials, std::uint64_t seed);

/// The `count` most probable joint tuples under a product of Zipf(s)
/// marginals, best first, ties in lexicographic rank order. Ranks are 0-based.
std::vector<std::vector<std::uint32_t>> zipf_top_tuples(std::span<const std::uint64_t> pool_sizes, double exponent,
                                                        std::uint64_t count);

// ---------------------------------------------------------------------------
// Configuration sweeps
// ---------------------------------------------------------------------------

struct SweepRow {
    std::size_t config_index = 0;
    std::string label;
    GameConfig config;
    double mean_final_recall = 0.0;
    std::vector<std::pair<int, double>> mean_checkpoints;
    double mean_sessions_played = 0.0;
    double mean_reminders_sent = 0.0;
    std::size_t seeds = 0;
    int rank = 0;
};

/// Runs every (config, seed) pair, in parallel when `threads` > 1, and ranks
/// configs by mean final recall (desc), then fewer sessions played.
std::vector<SweepRow> sweep_configs(const SimEnvironment& env, std::span<const GameConfig> grid,
                                    const MemoryParams& memory, std::span<const std::uint64_t> seeds, int horizon_days,
                                    const SessionPolicy& policy, unsigned threads = 0);

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);
nlohmann::json sweep_to_json(std::span<const SweepRow> rows, const MemoryParams& memory, const SessionPolicy& policy,
                             int horizon_days);

}  // namespace rehearse
