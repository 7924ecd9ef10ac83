#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rehearse/auth.hpp"
#include "rehearse/avatar.hpp"
#include "rehearse/challenge.hpp"
#include "rehearse/engagement.hpp"
#include "rehearse/event_log.hpp"
#include "rehearse/game_config.hpp"
#include "rehearse/rng.hpp"

namespace rehearse {

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

/// Operator-driven clock for simulated time.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start) : now_(start) {}
    Timestamp now() const override { return now_.load(); }
    void set(Timestamp t) { now_.store(t); }
    Timestamp advance(Timestamp delta) { return now_ += delta; }

private:
    std::atomic<Timestamp> now_;
};

struct ServiceOptions {
    std::filesystem::path data_dir;
    AvatarSchema schema;
    ChallengeBank bank;
    GameConfig game;
    AuthPolicy auth;
    LogOptions log;
    std::optional<std::string> operator_token;
    std::optional<std::uint64_t> rng_seed;  // player ids and reset tokens; random when unset
};

/// The command side of the platform. Every state change is appended to the
/// event log first and then folded into the cached state with the same code
/// replay uses, so a restart reproduces the cache exactly. Commands on one
/// player are serialized; different players proceed in parallel.
class GameService {
public:
    GameService(ServiceOptions options, std::shared_ptr<Clock> clock);

    /// Enrolls a player. The response carries the avatar's answers once, as
    /// the enrollment reveal; nothing else ever returns them.
    nlohmann::json create_player(std::optional<std::uint64_t> seed);
    /// The active session while it has unanswered items, else a new one.
    nlohmann::json session(const std::string& player_id);
    nlohmann::json answer(const std::string& player_id, const std::string& challenge_id,
                          const std::string& submission);
    nlohmann::json give_up(const std::string& player_id, const std::string& challenge_id);
    nlohmann::json hint(const std::string& player_id, const std::string& challenge_id, HintKind kind);
    nlohmann::json report(const std::string& player_id, ReportPeriod period) const;
    /// Returns due notifications and records them as sent.
    nlohmann::json notifications(const std::string& player_id);
    nlohmann::json start_reset(const std::string& player_id);
    nlohmann::json finish_reset(const std::string& player_id, const std::string& token,
                                const std::vector<std::string>& answers);

    PlayerState state(const std::string& player_id) const;
    Timestamp now() const { return clock_->now(); }
    /// Null unless the service runs on a ManualClock.
    ManualClock* manual_clock() const { return dynamic_cast<ManualClock*>(clock_.get()); }
    const ServiceOptions& options() const { return options_; }
    const EventLog& log() const { return log_; }

private:
    struct Player {
        mutable std::mutex mu;
        PlayerState state;
        AvatarProfile profile;
        std::map<std::string, ResetSession> resets;
    };

    Player& player(const std::string& player_id) const;
    void commit(Player& p, Event event);
    std::uint64_t next_random();
    nlohmann::json judge(Player& p, const OpenChallenge& open, const Verdict& verdict, Timestamp now);

    ServiceOptions options_;
    std::shared_ptr<Clock> clock_;
    EventLog log_;
    mutable std::shared_mutex players_mu_;
    std::map<std::string, std::unique_ptr<Player>> players_;
    std::mutex rng_mu_;
    SplitMix64 rng_;
};

}  // namespace rehearse
