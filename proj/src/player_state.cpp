#include "rehearse/player_state.hpp"

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"

namespace rehearse {

using nlohmann::json;

std::string_view to_string(Stage stage) { return stage == Stage::Early ? "early" : "late"; }

std::string_view to_string(BadgeKind kind) {
    switch (kind) {
        case BadgeKind::Smiley: return "smiley";
        case BadgeKind::Cake: return "cake";
        case BadgeKind::Trophy: return "trophy";
    }
    return "smiley";
}

BadgeKind badge_kind_from_string(std::string_view text) {
    if (text == "smiley") return BadgeKind::Smiley;
    if (text == "cake") return BadgeKind::Cake;
    if (text == "trophy") return BadgeKind::Trophy;
    throw Error(ErrorCode::ParseError, "unknown badge '" + std::string(text) + "'");
}

std::string_view to_string(AuthOutcome outcome) {
    switch (outcome) {
        case AuthOutcome::Granted: return "granted";
        case AuthOutcome::Denied: return "denied";
        case AuthOutcome::Locked: return "locked";
    }
    return "denied";
}

AuthOutcome auth_outcome_from_string(std::string_view text) {
    if (text == "granted") return AuthOutcome::Granted;
    if (text == "denied") return AuthOutcome::Denied;
    if (text == "locked") return AuthOutcome::Locked;
    throw Error(ErrorCode::ParseError, "unknown auth outcome '" + std::string(text) + "'");
}

void ProgressionRules::validate() const {
    if (daily_quota < 0) throw Error(ErrorCode::InvalidConfig, "daily_quota must be >= 0");
    if (days_threshold < 1) throw Error(ErrorCode::InvalidConfig, "days_threshold must be >= 1");
    if (!(skill_threshold >= 0.0 && skill_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "skill_threshold must be in [0, 1]");
    }
    if (skill_window < 1 || static_cast<std::size_t>(skill_window) > kMaxSkillWindow) {
        throw Error(ErrorCode::InvalidConfig, "skill_window must be in 1.." + std::to_string(kMaxSkillWindow));
    }
    if (!is_known_time_zone(timezone)) throw Error(ErrorCode::InvalidConfig, "unknown time zone " + timezone);
}

std::optional<Timestamp> FieldLedger::last_rehearsed() const {
    if (!last_success) return last_failure;
    if (!last_failure) return last_success;
    return std::max(*last_success, *last_failure);
}

namespace {

json opt(const std::optional<Timestamp>& t) { return t ? json(*t) : json(nullptr); }

std::optional<Timestamp> opt_ts(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<Timestamp>();
}

json grant_json(const HintGrant& g) {
    return {{"challenge_id", g.challenge_id},
            {"cost", g.cost},
            {"granted_at", g.granted_at},
            {"kind", to_string(g.kind)}};
}

HintGrant grant_from(const json& j) {
    return {j.at("challenge_id").get<std::string>(), j.at("cost").get<int>(), j.at("granted_at").get<Timestamp>(),
            hint_kind_from_string(j.at("kind").get<std::string>())};
}

}  // namespace

json to_json(const ChallengeDescriptor& d) {
    return {{"kind", to_string(d.kind)},
            {"field_id", d.field_id},
            {"entry_id", d.entry_id},
            {"seed", d.seed},
            {"challenge_id", d.challenge_id}};
}

ChallengeDescriptor descriptor_from_json(const json& j) {
    json_io::require_keys(j, {"kind", "field_id", "entry_id", "seed", "challenge_id"}, "descriptor");
    ChallengeDescriptor d;
    d.kind = challenge_kind_from_string(json_io::get<std::string>(j, "kind", "descriptor"));
    d.field_id = json_io::get<std::string>(j, "field_id", "descriptor");
    d.entry_id = json_io::get<std::string>(j, "entry_id", "descriptor");
    d.seed = json_io::get<std::uint64_t>(j, "seed", "descriptor");
    d.challenge_id = json_io::get<std::string>(j, "challenge_id", "descriptor");
    return d;
}

json to_json(const ScoreEvent& e) {
    return {{"challenge_id", e.challenge_id},
            {"kind", to_string(e.kind)},
            {"delta", e.delta},
            {"balance_after", e.balance_after},
            {"timestamp", e.timestamp}};
}

json to_json(const HintGrant& g) { return grant_json(g); }

json to_json(const Badge& b) {
    return {{"kind", to_string(b.kind)}, {"date", format_day(b.day)}, {"day", b.day}, {"awarded_at", b.awarded_at}};
}

json to_json(const ProgressionRules& r) {
    return {{"daily_quota", r.daily_quota},
            {"days_threshold", r.days_threshold},
            {"skill_threshold", r.skill_threshold},
            {"skill_window", r.skill_window},
            {"timezone", r.timezone}};
}

ProgressionRules rules_from_json(const json& j) {
    json_io::require_keys(j, {"daily_quota", "days_threshold", "skill_threshold", "skill_window", "timezone"},
                          "progression");
    ProgressionRules r;
    if (j.contains("daily_quota")) r.daily_quota = j["daily_quota"].get<int>();
    if (j.contains("days_threshold")) r.days_threshold = j["days_threshold"].get<int>();
    if (j.contains("skill_threshold")) r.skill_threshold = j["skill_threshold"].get<double>();
    if (j.contains("skill_window")) r.skill_window = j["skill_window"].get<int>();
    if (j.contains("timezone")) r.timezone = j["timezone"].get<std::string>();
    r.validate();
    return r;
}

json to_json(const PlayerState& s) {
    json badges = json::array();
    for (const auto& b : s.badges) badges.push_back({{"kind", to_string(b.kind)}, {"day", b.day}, {"awarded_at", b.awarded_at}});
    json days = json::array();
    for (const auto& [day, st] : s.days) {
        days.push_back({day, st.avatar_correct, st.avatar_total, st.standard_correct, st.standard_total});
    }
    json ledger = json::object();
    for (const auto& [field, l] : s.ledger) {
        ledger[field] = {{"successes", l.successes},
                         {"failures", l.failures},
                         {"last_success", opt(l.last_success)},
                         {"last_failure", opt(l.last_failure)}};
    }
    json open = json::object();
    for (const auto& [id, o] : s.open_challenges) {
        json grants = json::array();
        for (const auto& g : o.grants) grants.push_back(grant_json(g));
        open[id] = {{"descriptor", to_json(o.descriptor)},
                    {"session_id", o.session_id},
                    {"issued_at", o.issued_at},
                    {"failed_attempts", o.failed_attempts},
                    {"last_offer_at", opt(o.last_offer_at)},
                    {"grants", std::move(grants)}};
    }
    json session = nullptr;
    if (s.active_session) {
        json items = json::array();
        for (const auto& d : s.active_session->items) items.push_back(to_json(d));
        session = {{"session_id", s.active_session->session_id},
                   {"created_at", s.active_session->created_at},
                   {"items", std::move(items)},
                   {"answered", s.active_session->answered}};
    }
    json auth = json::array();
    for (const auto& a : s.auth_history) {
        auth.push_back({{"timestamp", a.timestamp},
                        {"question_set", a.question_set},
                        {"answers_matched", a.answers_matched},
                        {"outcome", to_string(a.outcome)}});
    }
    return {{"player_id", s.player_id},
            {"schema_id", s.schema_id},
            {"profile_seed", s.profile_seed},
            {"created_at", s.created_at},
            {"rules", to_json(s.rules)},
            {"balance", s.balance},
            {"stage", to_string(s.stage)},
            {"badges", std::move(badges)},
            {"days", std::move(days)},
            {"ledger", std::move(ledger)},
            {"recent_recognition", json(std::vector<bool>(s.recent_recognition.begin(), s.recent_recognition.end()))},
            {"last_played", opt(s.last_played)},
            {"last_reminder_at", opt(s.last_reminder_at)},
            {"open_challenges", std::move(open)},
            {"active_session", std::move(session)},
            {"issued_sessions", s.issued_sessions},
            {"recorded_sessions", s.recorded_sessions},
            {"auth_history", std::move(auth)}};
}

PlayerState player_state_from_json(const json& j) {
    try {
        PlayerState s;
        s.player_id = j.at("player_id").get<std::string>();
        s.schema_id = j.at("schema_id").get<std::string>();
        s.profile_seed = j.at("profile_seed").get<std::uint64_t>();
        s.created_at = j.at("created_at").get<Timestamp>();
        s.rules = rules_from_json(j.at("rules"));
        s.balance = j.at("balance").get<std::int64_t>();
        s.stage = j.at("stage").get<std::string>() == "late" ? Stage::Late : Stage::Early;
        for (const auto& b : j.at("badges")) {
            s.badges.push_back({badge_kind_from_string(b.at("kind").get<std::string>()), b.at("day").get<DayNumber>(),
                                b.at("awarded_at").get<Timestamp>()});
        }
        for (const auto& d : j.at("days")) {
            s.days[d.at(0).get<DayNumber>()] = {d.at(1).get<int>(), d.at(2).get<int>(), d.at(3).get<int>(),
                                                d.at(4).get<int>()};
        }
        for (const auto& [field, l] : j.at("ledger").items()) {
            s.ledger[field] = {l.at("successes").get<int>(), l.at("failures").get<int>(), opt_ts(l.at("last_success")),
                               opt_ts(l.at("last_failure"))};
        }
        for (bool b : j.at("recent_recognition")) s.recent_recognition.push_back(b);
        s.last_played = opt_ts(j.at("last_played"));
        s.last_reminder_at = opt_ts(j.at("last_reminder_at"));
        for (const auto& [id, o] : j.at("open_challenges").items()) {
            OpenChallenge oc;
            oc.descriptor = descriptor_from_json(o.at("descriptor"));
            oc.session_id = o.at("session_id").get<std::string>();
            oc.issued_at = o.at("issued_at").get<Timestamp>();
            oc.failed_attempts = o.at("failed_attempts").get<int>();
            oc.last_offer_at = opt_ts(o.at("last_offer_at"));
            for (const auto& g : o.at("grants")) oc.grants.push_back(grant_from(g));
            s.open_challenges.emplace(id, std::move(oc));
        }
        if (const auto& a = j.at("active_session"); !a.is_null()) {
            IssuedSession is;
            is.session_id = a.at("session_id").get<std::string>();
            is.created_at = a.at("created_at").get<Timestamp>();
            for (const auto& d : a.at("items")) is.items.push_back(descriptor_from_json(d));
            is.answered = a.at("answered").get<std::set<std::string>>();
            s.active_session = std::move(is);
        }
        s.issued_sessions = j.at("issued_sessions").get<std::set<std::string>>();
        s.recorded_sessions = j.at("recorded_sessions").get<std::set<std::string>>();
        for (const auto& a : j.at("auth_history")) {
            s.auth_history.push_back({a.at("timestamp").get<Timestamp>(),
                                      a.at("question_set").get<std::vector<std::string>>(),
                                      a.at("answers_matched").get<std::vector<bool>>(),
                                      auth_outcome_from_string(a.at("outcome").get<std::string>())});
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("player state: ") + e.what());
    }
}

}  // namespace rehearse
