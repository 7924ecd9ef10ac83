#include "rehearse/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/progression.hpp"
#include "rehearse/rng.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

void SchedulerConfig::validate() const {
    if (session_length < 1) throw Error(ErrorCode::InvalidConfig, "session_length must be >= 1");
    for (double f : {early_recognition_fraction, late_recognition_fraction}) {
        if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::InvalidConfig, "recognition fractions must be in [0, 1]");
    }
}

nlohmann::json to_json(const SessionPlan& plan) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& d : plan.items) items.push_back(to_json(d));
    return {{"session_id", plan.session_id},
            {"player_id", plan.player_id},
            {"created_at", plan.created_at},
            {"items", std::move(items)},
            {"avatar_count", plan.avatar_count},
            {"recognition_fraction", plan.recognition_fraction}};
}

SessionPlan session_plan_from_json(const nlohmann::json& j) {
    json_io::require_keys(j, {"session_id", "player_id", "created_at", "items", "avatar_count", "recognition_fraction"},
                          "session plan");
    SessionPlan plan;
    plan.session_id = json_io::get<std::string>(j, "session_id", "session plan");
    plan.player_id = json_io::get<std::string>(j, "player_id", "session plan");
    plan.created_at = json_io::get<Timestamp>(j, "created_at", "session plan");
    for (const auto& d : json_io::get<nlohmann::json>(j, "items", "session plan")) {
        plan.items.push_back(descriptor_from_json(d));
    }
    plan.avatar_count = json_io::get<int>(j, "avatar_count", "session plan");
    plan.recognition_fraction = json_io::get<double>(j, "recognition_fraction", "session plan");
    return plan;
}

int largest_remainder_seats(double fraction, int total) {
    if (total <= 0) return 0;
    const double first_quota = fraction * total;
    const double second_quota = (1.0 - fraction) * total;
    // Snap values within rounding noise of an integer so 0.8 * 6 style products
    // do not lose a seat to representation error.
    auto floor_snapped = [](double q) {
        const double r = std::round(q);
        return std::abs(q - r) < 1e-9 ? r : std::floor(q);
    };
    int first = static_cast<int>(floor_snapped(first_quota));
    const int second = static_cast<int>(floor_snapped(second_quota));
    if (first + second < total) {
        const double first_rem = first_quota - first;
        const double second_rem = second_quota - second;
        if (first_rem + 1e-9 >= second_rem) ++first;
    }
    return std::clamp(first, 0, total);
}

std::vector<int> interleave_positions(int count, int length) {
    std::vector<int> out;
    if (count <= 0 || length <= 0) return out;
    count = std::min(count, length);
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(static_cast<int>((2LL * i + 1) * length / (2LL * count)));
    }
    return out;
}

std::vector<std::string> rehearsal_order(const PlayerState& state, const AvatarSchema& schema) {
    struct Key {
        std::size_t schema_index;
        std::optional<Timestamp> last;
        int rehearsals = 0;
    };
    std::vector<Key> keys;
    for (std::size_t i = 0; i < schema.fields.size(); ++i) {
        Key k{i, std::nullopt, 0};
        if (auto it = state.ledger.find(schema.fields[i].field_id); it != state.ledger.end()) {
            k.last = it->second.last_rehearsed();
            k.rehearsals = it->second.successes + it->second.failures;
        }
        keys.push_back(k);
    }
    // A whole session shares one timestamp, so equal stamps are common; the
    // less rehearsed field goes first there, else schema order decides.
    std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.last.has_value() != b.last.has_value()) return !a.last.has_value();
        if (a.last && b.last && *a.last != *b.last) return *a.last < *b.last;
        if (a.rehearsals != b.rehearsals) return a.rehearsals < b.rehearsals;
        return a.schema_index < b.schema_index;
    });
    std::vector<std::string> out;
    for (const auto& k : keys) out.push_back(schema.fields[k.schema_index].field_id);
    return out;
}

namespace {

bool recall_eligible(const FieldSchema& f) {
    return std::all_of(f.answer_pool.begin(), f.answer_pool.end(), [](const std::string& a) {
        const auto n = answer_letters(a).size();
        return n >= 1 && n <= kLetterPoolSize;
    });
}

bool recognition_eligible(const FieldSchema& f, const ChallengeConfig& cc) {
    return f.answer_pool.size() >= static_cast<std::size_t>(cc.option_count);
}

}  // namespace

SessionPlan next_session_plan(const PlayerState& state, const AvatarSchema& schema, const ChallengeBank& bank,
                              const SchedulerConfig& config, const ChallengeConfig& challenge_config, Timestamp now,
                              std::uint64_t seed) {
    config.validate();
    challenge_config.validate();

    SessionPlan plan;
    plan.player_id = state.player_id;
    plan.created_at = now;
    plan.session_id = "s-" + to_hex64(mix64(seed ^ fnv1a64(state.player_id) ^ static_cast<std::uint64_t>(now)));
    plan.recognition_fraction =
        state.stage == Stage::Early ? config.early_recognition_fraction : config.late_recognition_fraction;

    std::vector<const FieldSchema*> fields;
    for (const auto& id : rehearsal_order(state, schema)) {
        const FieldSchema& f = schema.field(id);
        if (recall_eligible(f) || recognition_eligible(f, challenge_config)) fields.push_back(&f);
    }

    const int quota_left = std::max(0, state.rules.daily_quota - avatar_solved_on(state, now));
    plan.avatar_count = fields.empty() ? 0 : std::min(quota_left, config.session_length);
    const int standard_count = bank.entries.empty() ? 0 : config.session_length - plan.avatar_count;
    const int total = plan.avatar_count + standard_count;
    if (total == 0) throw Error(ErrorCode::InvalidConfig, "nothing to schedule: empty bank and no avatar items due");

    // Recognition/recall mix, then repair any field the assigned mode cannot serve.
    const int recognition = largest_remainder_seats(plan.recognition_fraction, plan.avatar_count);
    std::vector<AvatarMode> modes(static_cast<std::size_t>(plan.avatar_count), AvatarMode::Recall);
    std::fill_n(modes.begin(), recognition, AvatarMode::Recognition);
    SplitMix64 mode_rng(derive_seed(seed, "modes"));
    shuffle(std::span<AvatarMode>(modes), mode_rng);

    std::vector<const FieldSchema*> avatar_fields;
    for (int i = 0; i < plan.avatar_count; ++i) avatar_fields.push_back(fields[static_cast<std::size_t>(i) % fields.size()]);
    auto serves = [&](std::size_t i, AvatarMode m) {
        return m == AvatarMode::Recall ? recall_eligible(*avatar_fields[i]) : recognition_eligible(*avatar_fields[i], challenge_config);
    };
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (serves(i, modes[i])) continue;
        bool fixed = false;
        for (std::size_t j = 0; j < modes.size() && !fixed; ++j) {
            if (modes[j] != modes[i] && serves(i, modes[j]) && serves(j, modes[i])) {
                std::swap(modes[i], modes[j]);
                fixed = true;
            }
        }
        if (!fixed) modes[i] = modes[i] == AvatarMode::Recall ? AvatarMode::Recognition : AvatarMode::Recall;
    }

    std::vector<std::size_t> bank_order(bank.entries.size());
    std::iota(bank_order.begin(), bank_order.end(), std::size_t{0});
    SplitMix64 bank_rng(derive_seed(seed, "bank"));
    shuffle(std::span<std::size_t>(bank_order), bank_rng);

    const auto slots = interleave_positions(plan.avatar_count, total);
    std::size_t next_avatar = 0;
    std::size_t next_standard = 0;
    for (int pos = 0; pos < total; ++pos) {
        ChallengeDescriptor d;
        d.seed = derive_seed(seed, static_cast<std::uint64_t>(pos));
        if (next_avatar < slots.size() && slots[next_avatar] == pos) {
            d.kind = modes[next_avatar] == AvatarMode::Recall ? ChallengeKind::AvatarRecall
                                                              : ChallengeKind::AvatarRecognition;
            d.field_id = avatar_fields[next_avatar]->field_id;
            d.challenge_id = challenge_id_for(d.kind, d.field_id, d.seed);
            ++next_avatar;
        } else {
            d.kind = ChallengeKind::Standard;
            d.entry_id = bank.entries[bank_order[next_standard % bank_order.size()]].entry_id;
            d.challenge_id = challenge_id_for(d.kind, d.entry_id, d.seed);
            ++next_standard;
        }
        plan.items.push_back(std::move(d));
    }
    return plan;
}

Challenge materialize(const ChallengeDescriptor& item, const AvatarProfile& profile, const AvatarSchema& schema,
                      const ChallengeBank& bank, const ChallengeConfig& config) {
    if (item.kind == ChallengeKind::Standard) {
        const BankEntry* entry = bank.find(item.entry_id);
        if (!entry) throw Error(ErrorCode::UnknownChallenge, "no bank entry '" + item.entry_id + "'");
        return build_standard_challenge(*entry, item.seed, config);
    }
    const auto mode = item.kind == ChallengeKind::AvatarRecall ? AvatarMode::Recall : AvatarMode::Recognition;
    return build_avatar_challenge(profile, schema, item.field_id, mode, item.seed, config);
}

void issue_session(PlayerState& state, const SessionPlan& plan) {
    if (state.active_session) {
        const auto& previous = state.active_session->session_id;
        std::erase_if(state.open_challenges, [&](const auto& kv) { return kv.second.session_id == previous; });
    }
    state.active_session = IssuedSession{plan.session_id, plan.created_at, plan.items, {}};
    state.issued_sessions.insert(plan.session_id);
    for (const auto& d : plan.items) {
        OpenChallenge open;
        open.descriptor = d;
        open.session_id = plan.session_id;
        open.issued_at = plan.created_at;
        state.open_challenges[d.challenge_id] = std::move(open);
    }
}

std::string_view to_string(NotificationKind kind) {
    return kind == NotificationKind::Reminder ? "reminder" : "stuck_hint_offer";
}

nlohmann::json to_json(const Notification& n) {
    nlohmann::json out = {{"kind", to_string(n.kind)},
                          {"player_id", n.player_id},
                          {"due_at", n.due_at},
                          {"payload", n.payload}};
    if (n.kind == NotificationKind::StuckHintOffer) out["challenge_id"] = n.challenge_id;
    else out["lapse_days"] = n.lapse_days;
    return out;
}

std::vector<Notification> due_notifications(const PlayerState& state, Timestamp now) {
    std::vector<Notification> out;
    const Timestamp since = state.last_played.value_or(state.created_at);
    const bool reminded_recently = state.last_reminder_at && now - *state.last_reminder_at < kReminderInterval;
    if (now - since >= kReminderInterval && !reminded_recently) {
        Notification n;
        n.kind = NotificationKind::Reminder;
        n.player_id = state.player_id;
        n.due_at = now;
        n.lapse_days = static_cast<int>((now - since) / kDay);
        n.payload = n.lapse_days >= 2 ? "lapse" : "reminder";
        out.push_back(std::move(n));
    }
    for (const auto& [id, open] : state.open_challenges) {
        if (now - open.issued_at < kStuckOpenFor) continue;
        if (open.last_offer_at && now - *open.last_offer_at < kStuckOfferInterval) continue;
        Notification n;
        n.kind = NotificationKind::StuckHintOffer;
        n.player_id = state.player_id;
        n.due_at = now;
        n.payload = "stuck_hint_offer";
        n.challenge_id = id;
        out.push_back(std::move(n));
    }
    return out;
}

void mark_notifications_sent(PlayerState& state, const std::vector<Notification>& notes, Timestamp now) {
    for (const auto& n : notes) {
        if (n.kind == NotificationKind::Reminder) {
            state.last_reminder_at = now;
        } else if (auto it = state.open_challenges.find(n.challenge_id); it != state.open_challenges.end()) {
            it->second.last_offer_at = now;
        }
    }
}

std::vector<ScoreEvent> record_session(PlayerState& state, const std::string& session_id,
                                       const std::vector<SessionOutcome>& outcomes, Timestamp now) {
    if (state.recorded_sessions.contains(session_id)) return {};
    if (!state.issued_sessions.contains(session_id)) throw Error(ErrorCode::UnknownSession, session_id);
    if (state.active_session && state.active_session->session_id == session_id) {
        const auto& items = state.active_session->items;
        for (const auto& [d, _] : outcomes) {
            if (std::find(items.begin(), items.end(), d) == items.end()) {
                throw Error(ErrorCode::UnknownChallenge, d.challenge_id + " is not part of " + session_id);
            }
        }
    }
    std::vector<ScoreEvent> events;
    events.reserve(outcomes.size());
    for (const auto& [d, verdict] : outcomes) events.push_back(apply_verdict(state, d, verdict, now));
    state.recorded_sessions.insert(session_id);
    state.last_played = now;
    return events;
}

}  // namespace rehearse
