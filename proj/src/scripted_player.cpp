#include "rehearse/scripted_player.hpp"

#include <map>

#include <httplib.h>

#include "rehearse/error.hpp"
#include "rehearse/time.hpp"

namespace rehearse {

using json = nlohmann::json;

namespace {

class Api {
public:
    explicit Api(const ScriptOptions& o) : client_(o.host, o.port) {
        client_.set_read_timeout(30, 0);
        if (o.operator_token) headers_.emplace("Authorization", "Bearer " + *o.operator_token);
    }

    json get(const std::string& path) { return check(client_.Get(path, headers_), "GET " + path); }

    json post(const std::string& path, const json& body = json::object()) {
        return check(client_.Post(path, headers_, body.dump(), "application/json"), "POST " + path);
    }

private:
    static json check(const httplib::Result& res, const std::string& what) {
        if (!res) throw Error(ErrorCode::StorageFailure, what + ": " + httplib::to_string(res.error()));
        if (res->status >= 300) throw Error(ErrorCode::ParseError, what + " -> " + std::to_string(res->status) + " " + res->body);
        return json::parse(res->body);
    }

    httplib::Client client_;
    httplib::Headers headers_;
};

int bucket_sum(const json& report, const char* key) {
    int sum = 0;
    for (const auto& b : report.at("series")) sum += b.at(key).get<int>();
    return sum;
}

}  // namespace

json to_json(const ScriptResult& r) {
    json days = json::array();
    for (const auto& d : r.days) {
        days.push_back({{"day", d.day},
                        {"stage", d.stage},
                        {"balance", d.balance},
                        {"answers", d.answers},
                        {"correct", d.correct},
                        {"notifications", d.notifications},
                        {"day_report", d.day_report}});
    }
    return {{"player_id", r.player_id},
            {"days", std::move(days)},
            {"week_report", r.week_report},
            {"final_stage", r.final_stage},
            {"late_from_day", r.late_from_day},
            {"reports_additive", r.reports_additive},
            {"additivity_detail", r.additivity_detail}};
}

ScriptResult run_scripted_player(const ScriptOptions& o, const ChallengeBank& bank) {
    if (o.days < 1) throw Error(ErrorCode::InvalidConfig, "days must be >= 1");
    Api api(o);
    std::map<std::array<std::string, 4>, std::string> standard_answers;
    for (const auto& e : bank.entries) standard_answers[e.image_refs] = e.answer;

    const Timestamp start = api.get("/admin/clock").at("now").get<Timestamp>();
    const Timestamp day0 = start - start % kDay;
    api.post("/admin/clock", {{"set", day0 + o.session_hour * kHour}});

    const json enrolled = api.post("/players", {{"seed", o.seed}});
    ScriptResult result;
    result.player_id = enrolled.at("player_id").get<std::string>();
    std::map<std::string, std::string> avatar;
    for (const auto& f : enrolled.at("avatar")) avatar[f.at("field_id")] = f.at("answer");
    const std::string base = "/players/" + result.player_id;

    int recognition_attempts = 0;
    for (int day = 0; day < o.days; ++day) {
        ScriptDay log;
        log.day = day;
        for (int s = 0; s < o.sessions_per_day; ++s) {
            api.post("/admin/clock", {{"set", day0 + day * kDay + (o.session_hour + 2 * s) * kHour}});
            if (s == 0) log.notifications = static_cast<int>(api.get(base + "/notifications").at("notifications").size());
            const json session = api.get(base + "/session");
            for (const auto& item : session.at("items")) {
                if (item.at("answered").get<bool>()) continue;
                const auto kind = item.at("kind").get<std::string>();
                std::string submission;
                if (kind == "standard") {
                    const auto refs = item.at("image_refs").get<std::array<std::string, 4>>();
                    submission = standard_answers.at(refs);
                } else if (kind == "avatar_recall") {
                    submission = avatar.at(item.at("field_id"));
                } else {
                    const auto& truth = avatar.at(item.at("field_id"));
                    const bool right = ++recognition_attempts % o.recognition_correct_every == 0;
                    for (const auto& opt : item.at("options")) {
                        const auto text = opt.get<std::string>();
                        if ((text == truth) == right) {
                            submission = text;
                            break;
                        }
                    }
                }
                const json verdict = api.post(base + "/challenges/" + item.at("challenge_id").get<std::string>() +
                                                  "/answer",
                                              {{"submission", submission}});
                ++log.answers;
                log.correct += verdict.at("verdict").at("correct").get<bool>() ? 1 : 0;
                log.stage = verdict.at("stage");
                log.balance = verdict.at("balance");
            }
        }
        log.day_report = api.get(base + "/report?period=day");
        if (result.late_from_day < 0 && log.stage == "late") result.late_from_day = day;
        result.days.push_back(std::move(log));
    }

    result.week_report = api.get(base + "/report?period=week");
    result.final_stage = result.days.back().stage;

    // The week's daily buckets end today; align the last days played with them.
    const auto& series = result.week_report.at("series");
    result.reports_additive = true;
    int week_correct = 0;
    int week_total = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        week_correct += series[i].at("correct").get<int>();
        week_total += series[i].at("total").get<int>();
        const auto offset = static_cast<std::ptrdiff_t>(series.size()) - static_cast<std::ptrdiff_t>(i);
        const auto day_index = static_cast<std::ptrdiff_t>(result.days.size()) - offset;
        const int day_total = day_index >= 0 ? bucket_sum(result.days[day_index].day_report, "total") : 0;
        const int day_correct = day_index >= 0 ? bucket_sum(result.days[day_index].day_report, "correct") : 0;
        if (day_total != series[i].at("total").get<int>() || day_correct != series[i].at("correct").get<int>()) {
            result.reports_additive = false;
            result.additivity_detail += "bucket " + std::to_string(i) + " differs; ";
        }
    }
    int day_sum_correct = 0;
    int day_sum_total = 0;
    for (const auto& d : result.days) {
        day_sum_correct += d.day_report.at("solved_avatar_correct").get<int>();
        day_sum_total += d.day_report.at("solved_avatar_total").get<int>();
    }
    if (week_correct != day_sum_correct || week_total != day_sum_total ||
        result.week_report.at("solved_avatar_correct").get<int>() != day_sum_correct ||
        result.week_report.at("solved_avatar_total").get<int>() != day_sum_total) {
        result.reports_additive = false;
        result.additivity_detail += "week " + std::to_string(week_correct) + "/" + std::to_string(week_total) +
                                    " vs days " + std::to_string(day_sum_correct) + "/" +
                                    std::to_string(day_sum_total);
    }
    if (result.reports_additive) result.additivity_detail = "week == sum of days";
    return result;
}

}  // namespace rehearse
