#include "rehearse/service.hpp"

#include <chrono>
#include <random>

#include "rehearse/error.hpp"
#include "rehearse/events.hpp"
#include "rehearse/progression.hpp"
#include "rehearse/scheduler.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

using json = nlohmann::json;

Timestamp SystemClock::now() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

namespace {

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json client_session(const IssuedSession& s, const PlayerState& state, const AvatarProfile& profile,
                    const ServiceOptions& o) {
    json items = json::array();
    for (const auto& d : s.items) {
        const auto open = state.open_challenges.find(d.challenge_id);
        bool with_cues = false;
        if (open != state.open_challenges.end()) {
            for (const auto& g : open->second.grants) with_cues |= g.kind == HintKind::VerbalCues;
        }
        json item = to_client_json(materialize(d, profile, o.schema, o.bank, o.game.challenge), with_cues);
        item["answered"] = s.answered.contains(d.challenge_id);
        item["open"] = open != state.open_challenges.end();
        items.push_back(std::move(item));
    }
    return {{"session_id", s.session_id}, {"created_at", s.created_at}, {"items", std::move(items)}};
}

}  // namespace

GameService::GameService(ServiceOptions options, std::shared_ptr<Clock> clock)
    : options_(std::move(options)),
      clock_(std::move(clock)),
      log_(options_.data_dir, options_.log),
      rng_(options_.rng_seed ? *options_.rng_seed : entropy_seed()) {
    validate_schema(options_.schema);
    options_.game.validate();
    options_.auth.validate(options_.schema.fields.size());
    for (const auto& id : log_.players()) {
        const auto snap = read_snapshot(log_.dir(), id);
        auto p = std::make_unique<Player>();
        p->state = load_state(log_, id, snap ? &*snap : nullptr);
        if (p->state.schema_id != options_.schema.schema_id) {
            throw Error(ErrorCode::InvalidConfig, "player '" + id + "' was enrolled with schema '" +
                                                      p->state.schema_id + "'");
        }
        p->profile = generate_profile(options_.schema, p->state.profile_seed);
        players_.emplace(id, std::move(p));
    }
}

GameService::Player& GameService::player(const std::string& player_id) const {
    std::shared_lock lock(players_mu_);
    const auto it = players_.find(player_id);
    if (it == players_.end()) throw Error(ErrorCode::UnknownPlayer, player_id);
    return *it->second;
}

std::uint64_t GameService::next_random() {
    std::lock_guard lock(rng_mu_);
    return rng_.next();
}

void GameService::commit(Player& p, Event event) {
    event.sequence_number = log_.append(event);
    apply_event(p.state, event);
    if (event.sequence_number % options_.log.snapshot_interval == 0) {
        write_snapshot(log_.dir(), {event.player_id, event.sequence_number, p.state});
    }
}

json GameService::create_player(std::optional<std::uint64_t> seed) {
    const std::uint64_t s = seed ? *seed : next_random();
    const std::string id = "p-" + to_hex64(derive_seed(s, "player-id"));
    auto p = std::make_unique<Player>();
    p->profile = generate_profile(options_.schema, s);

    std::unique_lock lock(players_mu_);
    if (players_.contains(id) || log_.has_player(id)) throw Error(ErrorCode::PlayerExists, id);
    const Timestamp now = clock_->now();
    commit(*p, profile_created(id, now, options_.schema.schema_id, p->profile.seed, options_.game.progression));
    json avatar = json::array();
    for (const auto& f : options_.schema.fields) {
        avatar.push_back({{"field_id", f.field_id},
                          {"question", f.question_text},
                          {"answer", p->profile.assignments.at(f.field_id)}});
    }
    players_.emplace(id, std::move(p));
    return {{"player_id", id}, {"schema_id", options_.schema.schema_id}, {"created_at", now}, {"avatar", avatar}};
}

json GameService::session(const std::string& player_id) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const auto& active = p.state.active_session;
    if (!active || active->answered.size() >= active->items.size()) {
        const Timestamp now = clock_->now();
        const auto seed = derive_seed(p.state.profile_seed, "session-" + std::to_string(p.state.issued_sessions.size()));
        const auto plan = next_session_plan(p.state, options_.schema, options_.bank, options_.game.scheduler,
                                            options_.game.challenge, now, seed);
        commit(p, session_issued(plan));
    }
    json out = client_session(*p.state.active_session, p.state, p.profile, options_);
    out["stage"] = to_string(p.state.stage);
    out["balance"] = p.state.balance;
    return out;
}

json GameService::judge(Player& p, const OpenChallenge& open, const Verdict& verdict, Timestamp now) {
    const auto& tz = p.state.rules.timezone;
    const auto today = p.state.days.find(local_day(now, tz));
    const bool first_today = today == p.state.days.end() ||
                             today->second.avatar_total + today->second.standard_total == 0;
    const bool returning = p.state.last_played.has_value();
    const auto before = p.state.balance;

    PlayerState trial = p.state;
    const ScoreEvent score = apply_verdict(trial, open.descriptor, verdict, now);
    commit(p, answer_judged(p.state.player_id, now, open.session_id, open.descriptor, verdict));

    const auto badges = award_badges(p.state, p.state.rules.daily_quota, now);
    json badge_json = json::array();
    for (const auto& b : badges) {
        commit(p, badge_awarded(p.state.player_id, b));
        badge_json.push_back(to_json(b));
    }

    json cue = nullptr;
    if (!verdict.correct) {
        cue = to_json(social_cue({CueTrigger::IncorrectAnswer, 0}, p.state));
    } else if (!badges.empty() || crosses_point_milestone(before, p.state.balance)) {
        cue = to_json(social_cue({CueTrigger::Milestone, 0}, p.state));
    } else if (first_today && returning) {
        cue = to_json(social_cue({CueTrigger::DailyReturn, 0}, p.state));
    }

    json v = {{"correct", verdict.correct},
              {"kind", to_string(verdict.kind)},
              {"unspellable", verdict.unspellable},
              {"canonical_answer_revealed", verdict.canonical_answer_revealed}};
    return {{"verdict", std::move(v)},
            {"score_event", to_json(score)},
            {"badges", std::move(badge_json)},
            {"cue", std::move(cue)},
            {"balance", p.state.balance},
            {"stage", to_string(p.state.stage)}};
}

json GameService::answer(const std::string& player_id, const std::string& challenge_id, const std::string& submission) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const auto it = p.state.open_challenges.find(challenge_id);
    if (it == p.state.open_challenges.end()) throw Error(ErrorCode::UnknownChallenge, challenge_id);
    const OpenChallenge open = it->second;
    const Challenge c = materialize(open.descriptor, p.profile, options_.schema, options_.bank, options_.game.challenge);
    return judge(p, open, check_answer(c, submission), clock_->now());
}

json GameService::give_up(const std::string& player_id, const std::string& challenge_id) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const auto it = p.state.open_challenges.find(challenge_id);
    if (it == p.state.open_challenges.end()) throw Error(ErrorCode::UnknownChallenge, challenge_id);
    const OpenChallenge open = it->second;
    const Challenge c = materialize(open.descriptor, p.profile, options_.schema, options_.bank, options_.game.challenge);
    const Verdict verdict = rehearse::give_up(c, options_.game.challenge);
    json out = judge(p, open, verdict, clock_->now());
    if (verdict.canonical_answer_revealed) out["verdict"]["answer"] = c.answer;
    return out;
}

json GameService::hint(const std::string& player_id, const std::string& challenge_id, HintKind kind) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const Timestamp now = clock_->now();
    PlayerState trial = p.state;
    const HintGrant grant = kind == HintKind::VerbalCues ? purchase_hint(trial, challenge_id, now)
                                                          : claim_stuck_hint(trial, challenge_id, now);
    const auto& open = p.state.open_challenges.at(challenge_id);
    const Challenge c = materialize(open.descriptor, p.profile, options_.schema, options_.bank, options_.game.challenge);
    commit(p, hint_purchased(player_id, grant));

    json out = {{"grant", to_json(grant)}, {"balance", p.state.balance}};
    if (kind == HintKind::VerbalCues) {
        out["cues"] = verbal_cues_for(c, &grant);
    } else {
        out["letter"] = std::string(1, revealed_letter(c, &grant));
    }
    return out;
}

json GameService::report(const std::string& player_id, ReportPeriod period) const {
    player(player_id);
    return to_json(monitoring_report(log_.events(player_id), player_id, period, clock_->now()));
}

json GameService::notifications(const std::string& player_id) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const Timestamp now = clock_->now();
    const auto due = due_notifications(p.state, now);
    json out = json::array();
    for (const auto& n : due) {
        json j = to_json(n);
        if (n.kind == NotificationKind::Reminder) {
            const SocialTrigger trigger = n.lapse_days >= kLapseDays ? SocialTrigger{CueTrigger::Lapse, n.lapse_days}
                                                                     : SocialTrigger{CueTrigger::DailyReturn, 0};
            j["cue"] = to_json(social_cue(trigger, p.state));
        }
        commit(p, notification_sent(n, now));
        out.push_back(std::move(j));
    }
    return {{"player_id", player_id}, {"now", now}, {"notifications", std::move(out)}};
}

json GameService::start_reset(const std::string& player_id) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const Timestamp now = clock_->now();
    std::erase_if(p.resets, [&](const auto& kv) { return kv.second.expired(now); });

    ResetSession session;
    session.token = to_hex64(next_random()) + to_hex64(next_random());
    session.player_id = player_id;
    session.question_set = select_questions(p.profile, options_.schema, options_.auth, next_random());
    session.issued_at = now;

    json questions = json::array();
    for (const auto& id : session.question_set) {
        questions.push_back({{"field_id", id}, {"question", options_.schema.field(id).question_text}});
    }
    json out = {{"token", session.token},
                {"questions", std::move(questions)},
                {"required_matches", options_.auth.k},
                {"expires_at", now + kResetSessionTtl}};
    p.resets.emplace(session.token, std::move(session));
    return out;
}

json GameService::finish_reset(const std::string& player_id, const std::string& token,
                               const std::vector<std::string>& answers) {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    const Timestamp now = clock_->now();
    const auto it = p.resets.find(token);
    const ResetSession* session = it == p.resets.end() ? nullptr : &it->second;

    std::vector<AuthAttempt> history = p.state.auth_history;
    AuthDecision decision;
    try {
        decision = verify_reset(p.profile, session, answers, options_.auth, history, now, p.state.rules.timezone);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SessionUnknown && session) p.resets.erase(it);
        throw;
    }
    // Tokens are single-use whatever the outcome.
    p.resets.erase(it);
    commit(p, auth_attempted(player_id, history.back()));
    return {{"outcome", to_string(decision.outcome)}, {"matched", decision.matched}, {"required", decision.required}};
}

PlayerState GameService::state(const std::string& player_id) const {
    Player& p = player(player_id);
    std::lock_guard lock(p.mu);
    return p.state;
}

}  // namespace rehearse
