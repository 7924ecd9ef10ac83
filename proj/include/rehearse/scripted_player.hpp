#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rehearse/challenge.hpp"

namespace rehearse {

/// A headless client that plays through the HTTP API against a service on a
/// manual clock. It learns its avatar from the enrollment reveal and
/// recognizes Standard puzzles by their images in the bank.
struct ScriptOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::string> operator_token;
    int days = 7;
    std::uint64_t seed = 1;
    int session_hour = 9;
    int sessions_per_day = 2;
    // Recognition items are answered correctly on every n-th attempt; other
    // kinds always correctly. 2 keeps the windowed accuracy at 0.5.
    int recognition_correct_every = 2;
};

struct ScriptDay {
    int day = 0;
    std::string stage;
    std::int64_t balance = 0;
    int answers = 0;
    int correct = 0;
    int notifications = 0;
    nlohmann::json day_report;
};

struct ScriptResult {
    std::string player_id;
    std::vector<ScriptDay> days;
    nlohmann::json week_report;
    std::string final_stage;
    int late_from_day = -1;  // 0-based day index
    bool reports_additive = false;
    std::string additivity_detail;
};

nlohmann::json to_json(const ScriptResult& r);

/// Throws Error(StorageFailure) when the service is unreachable and ParseError
/// on an unexpected response.
ScriptResult run_scripted_player(const ScriptOptions& options, const ChallengeBank& bank);

}  // namespace rehearse
