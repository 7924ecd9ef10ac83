#include "rehearse/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <queue>
#include <set>
#include <thread>
#include <unordered_set>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/progression.hpp"
#include "rehearse/rng.hpp"
#include "rehearse/scheduler.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

void MemoryParams::validate() const {
    if (!(initial_half_life_hours > 0.0)) throw Error(ErrorCode::InvalidConfig, "initial_half_life_hours must be > 0");
    if (!(growth_factor >= 1.0)) throw Error(ErrorCode::InvalidConfig, "growth_factor must be >= 1");
    if (!(failure_factor > 0.0 && failure_factor <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "failure_factor must be in (0, 1]");
    }
    if (!(recognition_boost >= 1.0)) throw Error(ErrorCode::InvalidConfig, "recognition_boost must be >= 1");
}

nlohmann::json to_json(const MemoryParams& p) {
    return {{"initial_half_life_hours", p.initial_half_life_hours},
            {"growth_factor", p.growth_factor},
            {"failure_factor", p.failure_factor},
            {"recognition_boost", p.recognition_boost}};
}

MemoryParams memory_params_from_json(const nlohmann::json& j) {
    json_io::require_keys(j, {"initial_half_life_hours", "growth_factor", "failure_factor", "recognition_boost"},
                          "memory");
    MemoryParams p;
    p.initial_half_life_hours = j.value("initial_half_life_hours", p.initial_half_life_hours);
    p.growth_factor = j.value("growth_factor", p.growth_factor);
    p.failure_factor = j.value("failure_factor", p.failure_factor);
    p.recognition_boost = j.value("recognition_boost", p.recognition_boost);
    p.validate();
    return p;
}

double recall_probability(const FieldMemory& mem, Timestamp now, AvatarMode mode, const MemoryParams& params) {
    const double dt_hours = static_cast<double>(std::max<Timestamp>(0, now - mem.last_rehearsal)) / kHour;
    const double p = std::exp2(-(mem.carried_decay + dt_hours / mem.half_life_hours));
    return mode == AvatarMode::Recognition ? std::min(1.0, p * params.recognition_boost) : p;
}

void rehearse_field(FieldMemory& mem, bool success, Timestamp now, const MemoryParams& params) {
    const double dt_hours = static_cast<double>(std::max<Timestamp>(0, now - mem.last_rehearsal)) / kHour;
    mem.carried_decay += dt_hours / mem.half_life_hours;
    if (success) {
        mem.carried_decay /= params.growth_factor;
        mem.half_life_hours *= params.growth_factor;
    } else {
        mem.half_life_hours *= params.failure_factor;
    }
    mem.last_rehearsal = now;
}

void SessionPolicy::validate() const {
    if (!(adherence >= 0.0 && adherence <= 1.0)) throw Error(ErrorCode::InvalidConfig, "adherence must be in [0, 1]");
    if (!(standard_skill >= 0.0 && standard_skill <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "standard_skill must be in [0, 1]");
    }
    if (session_hour < 0 || session_hour > 23) throw Error(ErrorCode::InvalidConfig, "session_hour must be in 0..23");
    if (sessions_per_day < 1 || sessions_per_day > 5) {
        throw Error(ErrorCode::InvalidConfig, "sessions_per_day must be in 1..5");
    }
}

nlohmann::json to_json(const SessionPolicy& p) {
    return {{"adherence", p.adherence},
            {"standard_skill", p.standard_skill},
            {"session_hour", p.session_hour},
            {"sessions_per_day", p.sessions_per_day}};
}

SessionPolicy session_policy_from_json(const nlohmann::json& j) {
    json_io::require_keys(j, {"adherence", "standard_skill", "session_hour", "sessions_per_day"}, "session_policy");
    SessionPolicy p;
    p.adherence = j.value("adherence", p.adherence);
    p.standard_skill = j.value("standard_skill", p.standard_skill);
    p.session_hour = j.value("session_hour", p.session_hour);
    p.sessions_per_day = j.value("sessions_per_day", p.sessions_per_day);
    p.validate();
    return p;
}

nlohmann::json to_json(const SimOutcome& o) {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& [day, rate] : o.checkpoints) cps.push_back({{"day", day}, {"recall_rate", rate}});
    return {{"config", to_json(o.config)},
            {"checkpoints", std::move(cps)},
            {"initial_recall", o.initial_recall},
            {"final_recall", o.final_recall},
            {"sessions_played", o.sessions_played},
            {"reminders_sent", o.reminders_sent},
            {"badges_awarded", o.badges_awarded},
            {"final_balance", o.final_balance},
            {"final_stage", to_string(o.final_stage)},
            {"late_from_day", o.late_from_day}};
}

double mean_recall(const MemoryState& memory, Timestamp now, const MemoryParams& params) {
    if (memory.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [_, mem] : memory) sum += recall_probability(mem, now, AvatarMode::Recall, params);
    return sum / static_cast<double>(memory.size());
}

namespace {

// A submission that can never match: '?' is not a letter, so it is always
// spellable and always normalizes to something other than a real answer.
std::string wrong_submission(const Challenge& c) {
    if (c.kind == ChallengeKind::AvatarRecognition) {
        for (const auto& o : c.options) {
            if (o != c.answer) return o;
        }
    }
    return "?";
}

}  // namespace

SimOutcome simulate_player(const SimEnvironment& env, const GameConfig& config, const MemoryParams& memory_params,
                           int horizon_days, const SessionPolicy& policy, std::uint64_t seed) {
    if (horizon_days < 1) throw Error(ErrorCode::InvalidConfig, "horizon_days must be >= 1");
    config.validate();
    memory_params.validate();
    policy.validate();
    validate_schema(env.schema);

    const Timestamp start = kSimulationEpoch;
    const Timestamp end = start + horizon_days * kDay;
    const AvatarProfile profile = generate_profile(env.schema, derive_seed(seed, "profile"));

    PlayerState state;
    state.player_id = "sim-" + to_hex64(seed);
    state.schema_id = env.schema.schema_id;
    state.profile_seed = profile.seed;
    state.created_at = start;
    state.rules = config.progression;

    MemoryState memory;
    for (const auto& f : env.schema.fields) {
        memory[f.field_id] = FieldMemory{memory_params.initial_half_life_hours, start, 0.0};
    }

    SimOutcome out;
    out.config = config;
    out.initial_recall = mean_recall(memory, start, memory_params);

    SplitMix64 rng(derive_seed(seed, "player"));
    std::uint64_t session_counter = 0;
    std::size_t next_checkpoint = 0;

    auto play_session = [&](Timestamp now) {
        const auto plan = next_session_plan(state, env.schema, env.bank, config.scheduler, config.challenge, now,
                                            derive_seed(seed, ++session_counter));
        issue_session(state, plan);
        std::vector<SessionOutcome> outcomes;
        for (const auto& item : plan.items) {
            const Challenge challenge = materialize(item, profile, env.schema, env.bank, config.challenge);
            bool knows = false;
            if (item.kind == ChallengeKind::Standard) {
                knows = rng.chance(policy.standard_skill);
            } else {
                const auto mode =
                    item.kind == ChallengeKind::AvatarRecall ? AvatarMode::Recall : AvatarMode::Recognition;
                auto& mem = memory.at(item.field_id);
                knows = rng.chance(recall_probability(mem, now, mode, memory_params));
                rehearse_field(mem, knows, now, memory_params);
            }
            const Verdict verdict = check_answer(challenge, knows ? challenge.answer : wrong_submission(challenge));
            outcomes.emplace_back(item, verdict);
        }
        record_session(state, plan.session_id, outcomes, now);
        const auto badges = award_badges(state, config.progression.daily_quota, now);
        grant_badges(state, badges);
        out.badges_awarded += static_cast<int>(badges.size());
        ++out.sessions_played;
    };

    for (Timestamp now = start; now < end; now += kHour) {
        while (next_checkpoint < std::size(kCheckpointDays) && start + kCheckpointDays[next_checkpoint] * kDay <= now) {
            const int day = kCheckpointDays[next_checkpoint++];
            if (day <= horizon_days) out.checkpoints.emplace_back(day, mean_recall(memory, start + day * kDay, memory_params));
        }
        const int hour = static_cast<int>(((now - start) % kDay) / kHour);
        for (int s = 0; s < policy.sessions_per_day; ++s) {
            if (hour == policy.session_hour + 3 * s && hour < 24 && rng.chance(policy.adherence)) play_session(now);
        }
        const auto notes = due_notifications(state, now);
        for (const auto& n : notes) out.reminders_sent += n.kind == NotificationKind::Reminder ? 1 : 0;
        mark_notifications_sent(state, notes, now);
        if (out.late_from_day < 0 && state.stage == Stage::Late) {
            out.late_from_day = static_cast<int>((now - start) / kDay);
        }
    }
    for (; next_checkpoint < std::size(kCheckpointDays); ++next_checkpoint) {
        const int day = kCheckpointDays[next_checkpoint];
        if (day <= horizon_days) out.checkpoints.emplace_back(day, mean_recall(memory, start + day * kDay, memory_params));
    }

    out.final_recall = mean_recall(memory, end, memory_params);
    out.final_balance = state.balance;
    out.final_stage = state.stage;
    return out;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const AttackResult& r) {
    return {{"success_rate", r.success_rate},
            {"standard_error", r.standard_error},
            {"successes", r.successes},
            {"trials", r.trials}};
}

std::vector<std::vector<std::uint32_t>> zipf_top_tuples(std::span<const std::uint64_t> pool_sizes, double exponent,
                                                        std::uint64_t count) {
    using Tuple = std::vector<std::uint32_t>;
    struct Node {
        double score;  // sum of -s * ln(rank + 1); higher is more probable
        Tuple ranks;
    };
    auto worse = [](const Node& a, const Node& b) {
        if (std::abs(a.score - b.score) > 1e-12) return a.score < b.score;
        return a.ranks > b.ranks;
    };
    auto score_of = [&](const Tuple& t) {
        double s = 0.0;
        for (auto r : t) s -= exponent * std::log(static_cast<double>(r) + 1.0);
        return s;
    };

    std::vector<Tuple> out;
    if (pool_sizes.empty() || count == 0) return out;
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(worse);
    std::set<Tuple> seen;
    Tuple origin(pool_sizes.size(), 0);
    frontier.push({score_of(origin), origin});
    seen.insert(origin);
    while (!frontier.empty() && out.size() < count) {
        Node best = frontier.top();
        frontier.pop();
        for (std::size_t i = 0; i < best.ranks.size(); ++i) {
            if (best.ranks[i] + 1 >= pool_sizes[i]) continue;
            Tuple next = best.ranks;
            ++next[i];
            if (seen.insert(next).second) frontier.push({score_of(next), next});
        }
        out.push_back(std::move(best.ranks));
    }
    return out;
}

AttackResult simulate_guessing_attack(std::span<const std::uint64_t> pool_sizes, int k, const AttackSpec& attacker,
                                      std::uint64_t budget, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    const std::size_t m = pool_sizes.size();
    long double space_ld = 1.0L;
    for (auto n : pool_sizes) {
        if (n == 0) throw Error(ErrorCode::InvalidConfig, "empty answer pool");
        space_ld *= static_cast<long double>(n);
    }
    if (space_ld >= 0x1p62L) throw Error(ErrorCode::InvalidConfig, "joint answer space too large to simulate");
    const auto space = static_cast<std::uint64_t>(space_ld);
    budget = std::min(budget, space);

    SplitMix64 rng(derive_seed(seed, attacker.model == AttackerModel::Uniform ? "attack-uniform" : "attack-zipf"));
    std::vector<std::uint32_t> victim(m);
    auto matches_enough = [&](std::span<const std::uint32_t> guess) {
        int hits = 0;
        for (std::size_t i = 0; i < m; ++i) hits += guess[i] == victim[i] ? 1 : 0;
        return hits >= k;
    };

    AttackResult result;
    result.trials = trials;
    if (budget == 0 || k > static_cast<int>(m)) return result;

    if (attacker.model == AttackerModel::Uniform) {
        std::vector<std::uint32_t> guess(m);
        std::vector<std::uint64_t> picked;
        std::unordered_set<std::uint64_t> picked_set;
        const bool small = budget <= 64;
        for (std::uint64_t t = 0; t < trials; ++t) {
            for (std::size_t i = 0; i < m; ++i) victim[i] = static_cast<std::uint32_t>(rng.below(pool_sizes[i]));
            // Floyd's sampling of `budget` distinct joint indices.
            picked.clear();
            picked_set.clear();
            auto contains = [&](std::uint64_t x) {
                return small ? std::find(picked.begin(), picked.end(), x) != picked.end() : picked_set.contains(x);
            };
            bool hit = false;
            for (std::uint64_t j = space - budget; j < space && !hit; ++j) {
                std::uint64_t x = rng.below(j + 1);
                if (contains(x)) x = j;
                if (small) picked.push_back(x);
                else picked_set.insert(x);
                std::uint64_t rest = x;
                for (std::size_t i = m; i-- > 0;) {
                    guess[i] = static_cast<std::uint32_t>(rest % pool_sizes[i]);
                    rest /= pool_sizes[i];
                }
                hit = matches_enough(guess);
            }
            result.successes += hit ? 1 : 0;
        }
    } else {
        const auto guesses = zipf_top_tuples(pool_sizes, attacker.zipf_exponent, budget);
        std::vector<std::vector<double>> cdf(m);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::uint64_t r = 0; r < pool_sizes[i]; ++r) {
                acc += std::pow(static_cast<double>(r + 1), -attacker.zipf_exponent);
                cdf[i].push_back(acc);
            }
            for (auto& c : cdf[i]) c /= acc;
        }
        for (std::uint64_t t = 0; t < trials; ++t) {
            for (std::size_t i = 0; i < m; ++i) {
                const double u = rng.unit();
                const auto it = std::upper_bound(cdf[i].begin(), cdf[i].end(), u);
                victim[i] = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf[i].begin(),
                                                                                static_cast<std::ptrdiff_t>(pool_sizes[i] - 1)));
            }
            bool hit = false;
            for (const auto& g : guesses) {
                if (matches_enough(g)) {
                    hit = true;
                    break;
                }
            }
            result.successes += hit ? 1 : 0;
        }
    }
    result.success_rate = static_cast<double>(result.successes) / static_cast<double>(trials);
    result.standard_error =
        std::sqrt(result.success_rate * (1.0 - result.success_rate) / static_cast<double>(trials));
    return result;
}

AttackResult simulate_guessing_attack(const AvatarSchema& schema, std::span<const std::string> question_set,
                                      const AuthPolicy& policy, const AttackSpec& attacker, std::uint64_t budget,
                                      std::uint64_t trials, std::uint64_t seed) {
    std::vector<std::uint64_t> sizes;
    for (const auto& id : question_set) sizes.push_back(schema.field(id).answer_pool.size());
    return simulate_guessing_attack(sizes, policy.k, attacker, budget, trials, seed);
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> sweep_configs(const SimEnvironment& env, std::span<const GameConfig> grid,
                                    const MemoryParams& memory, std::span<const std::uint64_t> seeds, int horizon_days,
                                    const SessionPolicy& policy, unsigned threads) {
    if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "sweep grid is empty");
    if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one seed");
    for (const auto& c : grid) c.validate();

    const std::size_t jobs = grid.size() * seeds.size();
    std::vector<SimOutcome> outcomes(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            outcomes[j] = simulate_player(env, grid[j / seeds.size()], memory, horizon_days, policy, seeds[j % seeds.size()]);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<SweepRow> rows;
    const double n = static_cast<double>(seeds.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        SweepRow row;
        row.config_index = c;
        row.label = grid[c].label;
        row.config = grid[c];
        row.seeds = seeds.size();
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const auto& o = outcomes[c * seeds.size() + s];
            row.mean_final_recall += o.final_recall / n;
            row.mean_sessions_played += o.sessions_played / n;
            row.mean_reminders_sent += o.reminders_sent / n;
            if (row.mean_checkpoints.empty()) {
                for (const auto& [day, _] : o.checkpoints) row.mean_checkpoints.emplace_back(day, 0.0);
            }
            for (std::size_t i = 0; i < o.checkpoints.size(); ++i) row.mean_checkpoints[i].second += o.checkpoints[i].second / n;
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.mean_final_recall != b.mean_final_recall) return a.mean_final_recall > b.mean_final_recall;
        if (a.mean_sessions_played != b.mean_sessions_played) return a.mean_sessions_played < b.mean_sessions_played;
        return a.config_index < b.config_index;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i + 1);
    return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
    out << "rank,label,daily_quota,session_length,early_recognition_fraction,late_recognition_fraction,"
           "mean_final_recall,mean_sessions_played,mean_reminders_sent,seeds";
    if (!rows.empty()) {
        for (const auto& [day, _] : rows.front().mean_checkpoints) out << ",recall_day_" << day;
    }
    out << '\n';
    out << std::setprecision(10);
    for (const auto& r : rows) {
        out << r.rank << ',' << r.label << ',' << r.config.progression.daily_quota << ','
            << r.config.scheduler.session_length << ',' << r.config.scheduler.early_recognition_fraction << ','
            << r.config.scheduler.late_recognition_fraction << ',' << r.mean_final_recall << ','
            << r.mean_sessions_played << ',' << r.mean_reminders_sent << ',' << r.seeds;
        for (const auto& [_, v] : r.mean_checkpoints) out << ',' << v;
        out << '\n';
    }
}

nlohmann::json sweep_to_json(std::span<const SweepRow> rows, const MemoryParams& memory, const SessionPolicy& policy,
                             int horizon_days) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json cps = nlohmann::json::array();
        for (const auto& [day, v] : r.mean_checkpoints) cps.push_back({{"day", day}, {"mean_recall", v}});
        table.push_back({{"rank", r.rank},
                         {"label", r.label},
                         {"config", to_json(r.config)},
                         {"mean_final_recall", r.mean_final_recall},
                         {"mean_checkpoints", std::move(cps)},
                         {"mean_sessions_played", r.mean_sessions_played},
                         {"mean_reminders_sent", r.mean_reminders_sent},
                         {"seeds", r.seeds}});
    }
    return {{"horizon_days", horizon_days},
            {"memory", to_json(memory)},
            {"session_policy", to_json(policy)},
            {"rows", std::move(table)}};
}

}  // namespace rehearse
