#include "rehearse/auth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/rng.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

void AuthPolicy::validate(std::size_t field_count) const {
    if (k < 1 || k > m) throw Error(ErrorCode::InvalidPolicy, "need 1 <= k <= m");
    if (static_cast<std::size_t>(m) > field_count) throw Error(ErrorCode::InvalidPolicy, "m exceeds schema field count");
    if (max_attempts_per_day < 1 || lockout_after < 1) {
        throw Error(ErrorCode::InvalidPolicy, "attempt limits must be >= 1");
    }
    if (!(min_entropy_bits >= 0.0)) throw Error(ErrorCode::InvalidPolicy, "min_entropy_bits must be >= 0");
}

nlohmann::json to_json(const AuthPolicy& p) {
    return {{"m", p.m},
            {"k", p.k},
            {"max_attempts_per_day", p.max_attempts_per_day},
            {"lockout_after", p.lockout_after},
            {"min_entropy_bits", p.min_entropy_bits}};
}

AuthPolicy auth_policy_from_json(const nlohmann::json& j) {
    json_io::require_keys(j, {"m", "k", "max_attempts_per_day", "lockout_after", "min_entropy_bits"}, "auth");
    AuthPolicy p;
    if (j.contains("m")) p.m = j["m"].get<int>();
    if (j.contains("k")) p.k = j["k"].get<int>();
    if (j.contains("max_attempts_per_day")) p.max_attempts_per_day = j["max_attempts_per_day"].get<int>();
    if (j.contains("lockout_after")) p.lockout_after = j["lockout_after"].get<int>();
    if (j.contains("min_entropy_bits")) p.min_entropy_bits = j["min_entropy_bits"].get<double>();
    return p;
}

namespace {

constexpr std::uint64_t kEnumerationLimit = 200'000;
constexpr int kSampleTries = 100'000;

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r, std::uint64_t cap) {
    r = std::min(r, n - r);
    long double acc = 1.0L;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * static_cast<long double>(n - r + i) / static_cast<long double>(i);
        if (acc > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::uint64_t>(std::llround(acc));
}

}  // namespace

std::vector<std::string> select_questions(const AvatarProfile& profile, const AvatarSchema& schema,
                                          const AuthPolicy& policy, std::uint64_t seed) {
    policy.validate(schema.fields.size());
    const auto n = schema.fields.size();
    const auto m = static_cast<std::size_t>(policy.m);
    for (const auto& f : schema.fields) answer_for(profile, f.field_id);

    std::vector<double> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = std::log2(static_cast<double>(schema.fields[i].answer_pool.size()));
    // Small slack so log2 sums like 6 + 6 + 3 meet a 15-bit gate exactly.
    const double gate = policy.min_entropy_bits - 1e-9;

    std::vector<double> sorted_bits = bits;
    std::sort(sorted_bits.begin(), sorted_bits.end(), std::greater<>());
    if (std::accumulate(sorted_bits.begin(), sorted_bits.begin() + static_cast<std::ptrdiff_t>(m), 0.0) < gate) {
        throw Error(ErrorCode::EntropyUnattainable,
                    "no " + std::to_string(m) + "-question set reaches " + std::to_string(policy.min_entropy_bits) + " bits");
    }

    auto to_ids = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::string> ids;
        for (auto i : idx) ids.push_back(schema.fields[i].field_id);
        return ids;
    };
    auto entropy_of = [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (auto i : idx) s += bits[i];
        return s;
    };

    SplitMix64 rng(derive_seed(seed, "questions"));
    if (binomial_capped(n, m, kEnumerationLimit) <= kEnumerationLimit) {
        // Enumerate qualifying subsets in lexicographic order and pick one uniformly.
        std::vector<std::vector<std::size_t>> qualifying;
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            if (entropy_of(idx) >= gate) qualifying.push_back(idx);
            std::size_t pos = m;
            while (pos > 0 && idx[pos - 1] == n - m + (pos - 1)) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < m; ++j) idx[j] = idx[j - 1] + 1;
        }
        return to_ids(qualifying[rng.below(qualifying.size())]);
    }

    // Too many subsets to enumerate: rejection-sample uniform m-subsets.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (int attempt = 0; attempt < kSampleTries; ++attempt) {
        for (std::size_t i = 0; i < m; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
        std::vector<std::size_t> pick(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(pick.begin(), pick.end());
        if (entropy_of(pick) >= gate) return to_ids(pick);
    }
    // Qualifying subsets are rare; fall back to the m largest pools.
    std::vector<std::size_t> by_size(n);
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::stable_sort(by_size.begin(), by_size.end(), [&](auto a, auto b) { return bits[a] > bits[b]; });
    by_size.resize(m);
    std::sort(by_size.begin(), by_size.end());
    return to_ids(by_size);
}

int judged_attempts_on(std::span<const AuthAttempt> history, Timestamp now, std::string_view tz_name) {
    const DayNumber today = local_day(now, tz_name);
    return static_cast<int>(std::count_if(history.begin(), history.end(), [&](const AuthAttempt& a) {
        return a.outcome != AuthOutcome::Locked && local_day(a.timestamp, tz_name) == today;
    }));
}

int trailing_denials(std::span<const AuthAttempt> history) {
    int run = 0;
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->outcome == AuthOutcome::Granted) break;
        if (it->outcome == AuthOutcome::Denied) ++run;
    }
    return run;
}

AuthDecision verify_reset(const AvatarProfile& profile, const ResetSession* session,
                          std::span<const std::string> answers, const AuthPolicy& policy,
                          std::vector<AuthAttempt>& history, Timestamp now, std::string_view tz_name) {
    if (session == nullptr || session->expired(now)) throw Error(ErrorCode::SessionUnknown, "no live reset session");
    AuthDecision decision;
    decision.required = policy.k;

    AuthAttempt attempt;
    attempt.timestamp = now;
    attempt.question_set = session->question_set;

    if (judged_attempts_on(history, now, tz_name) >= policy.max_attempts_per_day ||
        trailing_denials(history) >= policy.lockout_after) {
        attempt.outcome = AuthOutcome::Locked;
        decision.outcome = AuthOutcome::Locked;
        history.push_back(std::move(attempt));
        return decision;
    }

    for (std::size_t i = 0; i < session->question_set.size(); ++i) {
        const bool match = i < answers.size() &&
                           normalize_answer(answers[i]) == normalize_answer(answer_for(profile, session->question_set[i]));
        attempt.answers_matched.push_back(match);
        decision.matched += match ? 1 : 0;
    }
    decision.outcome = decision.matched >= policy.k ? AuthOutcome::Granted : AuthOutcome::Denied;
    attempt.outcome = decision.outcome;
    history.push_back(std::move(attempt));
    return decision;
}

long double near_match_count(std::span<const std::uint64_t> pool_sizes, int k) {
    // coeff[j] = number of tuples agreeing on exactly j coordinates.
    std::vector<long double> coeff{1.0L};
    for (auto n : pool_sizes) {
        std::vector<long double> next(coeff.size() + 1, 0.0L);
        for (std::size_t j = 0; j < coeff.size(); ++j) {
            next[j] += coeff[j] * static_cast<long double>(n - 1);
            next[j + 1] += coeff[j];
        }
        coeff = std::move(next);
    }
    long double total = 0.0L;
    for (std::size_t j = static_cast<std::size_t>(std::max(k, 0)); j < coeff.size(); ++j) total += coeff[j];
    return total;
}

double guess_success_probability(std::span<const std::uint64_t> pool_sizes, int k, std::uint64_t budget) {
    if (budget == 0) return 0.0;
    if (k <= 0) return 1.0;
    long double space = 1.0L;
    for (auto n : pool_sizes) space *= static_cast<long double>(n);
    const long double hits = near_match_count(pool_sizes, k);
    if (hits <= 0.0L) return 0.0;
    const long double misses = space - hits;
    if (static_cast<long double>(budget) > misses) return 1.0;

    // log C(N-M, B) - log C(N, B) = sum_{i<B} log(1 - M / (N - i)).
    long double log_fail = 0.0L;
    constexpr std::uint64_t kDirectLimit = 10'000'000;
    if (budget <= kDirectLimit) {
        for (std::uint64_t i = 0; i < budget; ++i) {
            log_fail += std::log1p(-hits / (space - static_cast<long double>(i)));
        }
    } else {
        const long double b = static_cast<long double>(budget);
        log_fail = std::lgamma(misses + 1) - std::lgamma(misses - b + 1) - std::lgamma(space + 1) +
                   std::lgamma(space - b + 1);
    }
    return static_cast<double>(std::clamp(-std::expm1(log_fail), 0.0L, 1.0L));
}

double guess_success_probability(const AvatarSchema& schema, std::span<const std::string> question_set,
                                 const AuthPolicy& policy, std::uint64_t budget) {
    std::vector<std::uint64_t> sizes;
    for (const auto& id : question_set) sizes.push_back(schema.field(id).answer_pool.size());
    return guess_success_probability(sizes, policy.k, budget);
}

}  // namespace rehearse
