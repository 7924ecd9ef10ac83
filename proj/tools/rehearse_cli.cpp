// Operator CLI: service, avatar generation, simulation lab, attack audits,
// reports and log verification.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rehearse/auth.hpp"
#include "rehearse/avatar.hpp"
#include "rehearse/engagement.hpp"
#include "rehearse/error.hpp"
#include "rehearse/event_log.hpp"
#include "rehearse/http_api.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/scripted_player.hpp"
#include "rehearse/service.hpp"
#include "rehearse/simulation.hpp"
#include "rehearse/time.hpp"

using namespace rehearse;
using json = nlohmann::json;

namespace {

const std::string kAssets = REHEARSE_ASSET_DIR;

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const auto s = std::stoull(text);
            return {s, s};
        }
        const auto a = std::stoull(text.substr(0, dots));
        const auto b = std::stoull(text.substr(dots + 2));
        if (b < a) throw Error(ErrorCode::InvalidConfig, "seed range is empty: " + text);
        return {a, b};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidConfig, "bad seed range '" + text + "', expected A..B");
    }
}

ApiServer* g_server = nullptr;
void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rehearse: avatar rehearsal game platform"};
    app.require_subcommand(1);

    std::string schema_path = kAssets + "/default_schema.json";
    std::string bank_path = kAssets + "/default_bank.json";
    std::string data_dir = "./rehearse-data";
    std::string tz = "UTC";

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string game_config_path;
    std::string policy_path;
    std::string operator_token;
    bool manual_clock = false;
    Timestamp clock_start = kSimulationEpoch;
    bool fsync = false;
    serve->add_option("--port", port)->envname("REHEARSE_PORT");
    serve->add_option("--host", host);
    serve->add_option("--data-dir", data_dir)->envname("REHEARSE_DATA_DIR");
    serve->add_option("--tz", tz, "default timezone for new players")->envname("REHEARSE_TZ");
    serve->add_option("--schema", schema_path)->check(CLI::ExistingFile);
    serve->add_option("--bank", bank_path)->check(CLI::ExistingFile);
    serve->add_option("--game-config", game_config_path)->check(CLI::ExistingFile);
    serve->add_option("--auth-policy", policy_path)->check(CLI::ExistingFile);
    serve->add_option("--operator-token", operator_token)->envname("REHEARSE_OPERATOR_TOKEN");
    serve->add_flag("--manual-clock", manual_clock, "simulated clock driven through /admin/clock");
    serve->add_option("--clock-start", clock_start, "manual clock start, epoch ms");
    serve->add_flag("--fsync", fsync, "fsync every appended event");

    // gen-avatar
    auto* gen = app.add_subcommand("gen-avatar", "generate an avatar profile");
    std::uint64_t seed = 1;
    gen->add_option("--schema", schema_path)->check(CLI::ExistingFile);
    gen->add_option("--seed", seed)->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the simulation lab over a config grid");
    std::string sim_config_path;
    std::string seeds_text = "1..50";
    int horizon = 180;
    std::string out_path;
    std::string csv_path;
    unsigned threads = 0;
    sim->add_option("--config", sim_config_path)->required()->check(CLI::ExistingFile);
    sim->add_option("--seeds", seeds_text);
    sim->add_option("--horizon-days", horizon);
    sim->add_option("--out", out_path)->required();
    sim->add_option("--csv", csv_path, "table output, default <out>.csv");
    sim->add_option("--threads", threads);
    sim->add_option("--schema", schema_path)->check(CLI::ExistingFile);
    sim->add_option("--bank", bank_path)->check(CLI::ExistingFile);

    // attack
    auto* attack = app.add_subcommand("attack", "estimate guessing success against reset questions");
    std::string model = "uniform";
    std::uint64_t budget = 10;
    std::uint64_t trials = 100000;
    double zipf_exponent = 1.0;
    std::vector<std::string> questions;
    attack->add_option("--schema", schema_path)->check(CLI::ExistingFile);
    attack->add_option("--model", model)->check(CLI::IsMember({"uniform", "zipf"}));
    attack->add_option("--budget", budget);
    attack->add_option("--trials", trials);
    attack->add_option("--zipf-exponent", zipf_exponent);
    attack->add_option("--auth-policy", policy_path)->check(CLI::ExistingFile);
    attack->add_option("--questions", questions, "field ids; default: selected by policy")->delimiter(',');
    attack->add_option("--seed", seed);

    // report
    auto* report = app.add_subcommand("report", "monitoring report from the event log");
    std::string player;
    std::string period = "week";
    Timestamp at = 0;
    report->add_option("--player", player)->required();
    report->add_option("--period", period)->check(CLI::IsMember({"day", "week", "month"}));
    report->add_option("--data-dir", data_dir)->envname("REHEARSE_DATA_DIR");
    report->add_option("--at", at, "report instant, epoch ms; default: the player's last event");

    // verify-log
    auto* verify = app.add_subcommand("verify-log", "checksum and replay audit of the event log");
    verify->add_option("--data-dir", data_dir)->envname("REHEARSE_DATA_DIR");

    // play
    auto* play = app.add_subcommand("play", "scripted player against a running service");
    ScriptOptions script;
    std::string play_out;
    play->add_option("--host", script.host);
    play->add_option("--port", script.port)->envname("REHEARSE_PORT");
    play->add_option("--days", script.days);
    play->add_option("--seed", script.seed);
    play->add_option("--sessions-per-day", script.sessions_per_day);
    play->add_option("--bank", bank_path)->check(CLI::ExistingFile);
    play->add_option("--operator-token", operator_token)->envname("REHEARSE_OPERATOR_TOKEN");
    play->add_option("--out", play_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            if (!is_known_time_zone(tz)) throw Error(ErrorCode::InvalidConfig, "unknown timezone '" + tz + "'");
            ServiceOptions o;
            o.data_dir = data_dir;
            o.schema = load_schema(schema_path);
            o.bank = load_bank(bank_path);
            if (!game_config_path.empty()) {
                o.game = game_config_from_json((json_io::read_file(game_config_path)));
            } else {
                o.game.progression.timezone = tz;
            }
            if (!policy_path.empty()) o.auth = auth_policy_from_json((json_io::read_file(policy_path)));
            o.log.fsync_on_append = fsync;
            if (!operator_token.empty()) o.operator_token = operator_token;
            std::shared_ptr<Clock> clock;
            if (manual_clock) clock = std::make_shared<ManualClock>(clock_start);
            else clock = std::make_shared<SystemClock>();
            GameService service(std::move(o), clock);
            ApiServer server(service);
            const int bound = server.bind(host, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << json{{"listening", host}, {"port", bound}, {"data_dir", data_dir},
                              {"manual_clock", manual_clock}}.dump()
                      << std::endl;
            server.listen();
            g_server = nullptr;
            return 0;
        }
        if (*gen) {
            const auto schema = load_schema(schema_path);
            std::cout << profile_to_json(generate_profile(schema, seed)).dump(2) << '\n';
            return 0;
        }
        if (*sim) {
            SimEnvironment env{load_schema(schema_path), load_bank(bank_path)};
            const json doc = (json_io::read_file(sim_config_path));
            std::vector<GameConfig> grid;
            MemoryParams memory;
            SessionPolicy policy;
            if (doc.contains("grid")) {
                json_io::require_keys(doc, {"grid", "memory", "session_policy"}, "simulation config");
                for (const auto& c : doc.at("grid")) grid.push_back(game_config_from_json(c));
                if (doc.contains("memory")) memory = memory_params_from_json(doc.at("memory"));
                if (doc.contains("session_policy")) policy = session_policy_from_json(doc.at("session_policy"));
            } else {
                grid.push_back(game_config_from_json(doc));
            }
            const auto [a, b] = parse_seed_range(seeds_text);
            std::vector<std::uint64_t> seeds;
            for (auto s = a; s <= b; ++s) seeds.push_back(s);
            const auto rows = sweep_configs(env, grid, memory, seeds, horizon, policy, threads);
            std::ofstream(out_path) << sweep_to_json(rows, memory, policy, horizon).dump(2) << '\n';
            if (csv_path.empty()) csv_path = std::filesystem::path(out_path).replace_extension(".csv").string();
            std::ofstream csv(csv_path);
            write_sweep_csv(rows, csv);
            std::cout << json{{"configs", grid.size()}, {"seeds", seeds.size()}, {"out", out_path}, {"csv", csv_path},
                              {"best", rows.front().label}}.dump()
                      << '\n';
            return 0;
        }
        if (*attack) {
            const auto schema = load_schema(schema_path);
            AuthPolicy policy;
            if (!policy_path.empty()) policy = auth_policy_from_json((json_io::read_file(policy_path)));
            policy.validate(schema.fields.size());
            if (questions.empty()) questions = select_questions(generate_profile(schema, seed), schema, policy, seed);
            AttackSpec spec{model == "zipf" ? AttackerModel::Zipf : AttackerModel::Uniform, zipf_exponent};
            const auto mc = simulate_guessing_attack(schema, questions, policy, spec, budget, trials, seed);
            json out = {{"questions", questions},
                        {"entropy_bits", question_set_entropy(schema, questions)},
                        {"k", policy.k},
                        {"budget", budget},
                        {"model", model},
                        {"monte_carlo", to_json(mc)}};
            out["analytic_uniform"] = guess_success_probability(schema, questions, policy, budget);
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (*report) {
            EventLog log(data_dir);
            const auto events = log.events(player);
            if (events.empty()) throw Error(ErrorCode::UnknownPlayer, player);
            const Timestamp now = at != 0 ? at : events.back().timestamp;
            std::cout << to_json(monitoring_report(events, player, report_period_from_string(period), now)).dump(2)
                      << '\n';
            return 0;
        }
        if (*verify) {
            const auto audits = verify_log(data_dir);
            json out = json::array();
            bool ok = true;
            for (const auto& a : audits) {
                out.push_back(to_json(a));
                ok = ok && a.ok;
            }
            std::cout << json{{"ok", ok}, {"players", out}}.dump(2) << '\n';
            return ok ? 0 : 1;
        }
        if (*play) {
            if (!operator_token.empty()) script.operator_token = operator_token;
            const auto result = run_scripted_player(script, load_bank(bank_path));
            const json out = to_json(result);
            if (!play_out.empty()) std::ofstream(play_out) << out.dump(2) << '\n';
            std::cout << json{{"player_id", result.player_id},
                              {"final_stage", result.final_stage},
                              {"late_from_day", result.late_from_day},
                              {"reports_additive", result.reports_additive}}.dump()
                      << '\n';
            return result.reports_additive ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
