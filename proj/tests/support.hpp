#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "rehearse/avatar.hpp"
#include "rehearse/challenge.hpp"
#include "rehearse/events.hpp"
#include "rehearse/player_state.hpp"
#include "rehearse/simulation.hpp"

namespace testing {

inline const rehearse::AvatarSchema& default_schema() {
    static const auto s = rehearse::load_schema(std::string(REHEARSE_ASSET_DIR) + "/default_schema.json");
    return s;
}

inline const rehearse::ChallengeBank& default_bank() {
    static const auto b = rehearse::load_bank(std::string(REHEARSE_ASSET_DIR) + "/default_bank.json");
    return b;
}

// A freshly enrolled player, built through the same event the service writes.
inline rehearse::PlayerState enrolled(std::uint64_t seed = 7, rehearse::ProgressionRules rules = {},
                                      rehearse::Timestamp at = rehearse::kSimulationEpoch) {
    return rehearse::replay(std::vector<rehearse::Event>{
        rehearse::profile_created("p-test", at, default_schema().schema_id, seed, rules)});
}

// Unique scratch directory under the system temp dir, removed on destruction.
struct ScratchDir {
    std::filesystem::path path;
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("rehearse-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace testing
