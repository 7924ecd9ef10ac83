#include "rehearse/game_config.hpp"

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"

namespace rehearse {

void GameConfig::validate() const {
    progression.validate();
    scheduler.validate();
    challenge.validate();
}

nlohmann::json to_json(const GameConfig& c) {
    return {{"label", c.label},
            {"progression", to_json(c.progression)},
            {"scheduler",
             {{"session_length", c.scheduler.session_length},
              {"early_recognition_fraction", c.scheduler.early_recognition_fraction},
              {"late_recognition_fraction", c.scheduler.late_recognition_fraction}}},
            {"challenge",
             {{"option_count", c.challenge.option_count},
              {"hide_length_scope", c.challenge.hide_length_scope == HideLengthScope::All ? "all" : "avatar"},
              {"reveal_on_give_up", c.challenge.reveal_on_give_up}}}};
}

GameConfig game_config_from_json(const nlohmann::json& j) {
    json_io::require_keys(j, {"label", "progression", "scheduler", "challenge"}, "game config");
    GameConfig c;
    try {
        if (j.contains("label")) c.label = j["label"].get<std::string>();
        if (j.contains("progression")) c.progression = rules_from_json(j["progression"]);
        if (j.contains("scheduler")) {
            const auto& s = j["scheduler"];
            json_io::require_keys(s, {"session_length", "early_recognition_fraction", "late_recognition_fraction"},
                                  "scheduler");
            c.scheduler.session_length = s.value("session_length", c.scheduler.session_length);
            c.scheduler.early_recognition_fraction =
                s.value("early_recognition_fraction", c.scheduler.early_recognition_fraction);
            c.scheduler.late_recognition_fraction =
                s.value("late_recognition_fraction", c.scheduler.late_recognition_fraction);
        }
        if (j.contains("challenge")) {
            const auto& s = j["challenge"];
            json_io::require_keys(s, {"option_count", "hide_length_scope", "reveal_on_give_up"}, "challenge");
            c.challenge.option_count = s.value("option_count", c.challenge.option_count);
            const auto scope = s.value("hide_length_scope", std::string("avatar"));
            if (scope != "avatar" && scope != "all") {
                throw Error(ErrorCode::InvalidConfig, "hide_length_scope must be 'avatar' or 'all'");
            }
            c.challenge.hide_length_scope = scope == "all" ? HideLengthScope::All : HideLengthScope::Avatar;
            c.challenge.reveal_on_give_up = s.value("reveal_on_give_up", c.challenge.reveal_on_give_up);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("game config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace rehearse
