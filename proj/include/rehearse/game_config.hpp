#pragma once

#include <string>

#include <json.hpp>

#include "rehearse/challenge.hpp"
#include "rehearse/player_state.hpp"
#include "rehearse/scheduler.hpp"

namespace rehearse {

/// Everything that shapes a player's game: progression rules, session
/// planning and challenge construction.
struct GameConfig {
    std::string label = "default";
    ProgressionRules progression;
    SchedulerConfig scheduler;
    ChallengeConfig challenge;

    void validate() const;
    bool operator==(const GameConfig&) const = default;
};

nlohmann::json to_json(const GameConfig& config);
/// Missing sections and keys keep their defaults; unknown keys are rejected.
GameConfig game_config_from_json(const nlohmann::json& doc);

}  // namespace rehearse
