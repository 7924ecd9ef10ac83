#include "rehearse/challenge.hpp"

#include <algorithm>
#include <array>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/rng.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

std::string_view to_string(ChallengeKind kind) {
    switch (kind) {
        case ChallengeKind::Standard: return "standard";
        case ChallengeKind::AvatarRecognition: return "avatar_recognition";
        case ChallengeKind::AvatarRecall: return "avatar_recall";
    }
    return "standard";
}

ChallengeKind challenge_kind_from_string(std::string_view text) {
    if (text == "standard") return ChallengeKind::Standard;
    if (text == "avatar_recognition") return ChallengeKind::AvatarRecognition;
    if (text == "avatar_recall") return ChallengeKind::AvatarRecall;
    throw Error(ErrorCode::ParseError, "unknown challenge kind '" + std::string(text) + "'");
}

bool is_avatar_kind(ChallengeKind kind) { return kind != ChallengeKind::Standard; }

std::string_view to_string(HintKind kind) {
    return kind == HintKind::VerbalCues ? "verbal_cues" : "letter_reveal";
}

HintKind hint_kind_from_string(std::string_view text) {
    if (text == "verbal_cues") return HintKind::VerbalCues;
    if (text == "letter_reveal") return HintKind::LetterReveal;
    throw Error(ErrorCode::ParseError, "unknown hint kind '" + std::string(text) + "'");
}

void ChallengeConfig::validate() const {
    if (option_count < 2 || option_count > 8) {
        throw Error(ErrorCode::InvalidConfig, "option_count must be in 2..8");
    }
}

const BankEntry* ChallengeBank::find(std::string_view entry_id) const {
    for (const auto& e : entries) {
        if (e.entry_id == entry_id) return &e;
    }
    return nullptr;
}

ChallengeBank bank_from_json(const nlohmann::json& doc) {
    json_io::require_keys(doc, {"bank_id", "entries"}, "bank");
    ChallengeBank bank;
    bank.bank_id = json_io::get<std::string>(doc, "bank_id", "bank");
    for (const auto& item : json_io::get<nlohmann::json>(doc, "entries", "bank")) {
        json_io::require_keys(item, {"entry_id", "answer", "image_refs", "verbal_cues"}, "bank.entries[]");
        BankEntry e;
        e.entry_id = json_io::get<std::string>(item, "entry_id", "entry");
        const std::string ctx = "entry '" + e.entry_id + "'";
        e.answer = json_io::get<std::string>(item, "answer", ctx);
        const auto images = json_io::get<std::vector<std::string>>(item, "image_refs", ctx);
        const auto cues = json_io::get<std::vector<std::string>>(item, "verbal_cues", ctx);
        if (images.size() != 4 || cues.size() != 4) {
            throw Error(ErrorCode::ParseError, ctx + " needs exactly 4 image_refs and 4 verbal_cues");
        }
        std::copy(images.begin(), images.end(), e.image_refs.begin());
        std::copy(cues.begin(), cues.end(), e.verbal_cues.begin());
        const auto letters = answer_letters(e.answer);
        if (letters.empty()) throw Error(ErrorCode::EmptyAnswer, ctx);
        if (letters.size() > kLetterPoolSize) throw Error(ErrorCode::AnswerTooLong, ctx);
        if (bank.find(e.entry_id) != nullptr) throw Error(ErrorCode::ParseError, "duplicate " + ctx);
        bank.entries.push_back(std::move(e));
    }
    return bank;
}

ChallengeBank load_bank(const std::filesystem::path& path) { return bank_from_json(json_io::read_file(path)); }

std::string challenge_id_for(ChallengeKind kind, std::string_view key, std::uint64_t seed) {
    const char* prefix = kind == ChallengeKind::Standard            ? "std-"
                         : kind == ChallengeKind::AvatarRecognition ? "rcg-"
                                                                    : "rcl-";
    return prefix + std::string(key) + "-" + to_hex64(seed);
}

std::vector<char> build_letter_pool(std::string_view answer, std::uint64_t seed, std::size_t pool_size) {
    const auto letters = answer_letters(answer);
    if (letters.empty()) throw Error(ErrorCode::EmptyAnswer, "answer has no letters");
    if (letters.size() > pool_size) {
        throw Error(ErrorCode::AnswerTooLong,
                    std::to_string(letters.size()) + " letters exceed pool of " + std::to_string(pool_size));
    }
    SplitMix64 rng(seed);
    std::vector<char> pool(letters.begin(), letters.end());
    while (pool.size() < pool_size) pool.push_back(static_cast<char>('A' + rng.below(26)));
    shuffle(std::span<char>(pool), rng);
    return pool;
}

Challenge build_standard_challenge(const BankEntry& entry, std::uint64_t pool_seed, const ChallengeConfig& config) {
    Challenge c;
    c.challenge_id = challenge_id_for(ChallengeKind::Standard, entry.entry_id, pool_seed);
    c.kind = ChallengeKind::Standard;
    c.image_refs = entry.image_refs;
    c.verbal_cues = entry.verbal_cues;
    c.answer = entry.answer;
    c.letter_pool = build_letter_pool(entry.answer, pool_seed);
    c.show_length = config.hide_length_scope != HideLengthScope::All;
    return c;
}

Challenge build_avatar_challenge(const AvatarProfile& profile, const AvatarSchema& schema,
                                 std::string_view field_id, AvatarMode mode, std::uint64_t seed,
                                 const ChallengeConfig& config) {
    config.validate();
    const FieldSchema& field = schema.field(field_id);
    Challenge c;
    c.answer = answer_for(profile, field_id);
    c.field_id = field.field_id;
    c.prompt = field.question_text;
    c.image_refs = field.image_set;
    c.verbal_cues = field.verbal_cues;
    c.show_length = false;

    if (mode == AvatarMode::Recall) {
        c.kind = ChallengeKind::AvatarRecall;
        c.challenge_id = challenge_id_for(c.kind, field.field_id, seed);
        c.letter_pool = build_letter_pool(c.answer, derive_seed(seed, "letters"));
        return c;
    }

    c.kind = ChallengeKind::AvatarRecognition;
    c.challenge_id = challenge_id_for(c.kind, field.field_id, seed);
    const auto want = static_cast<std::size_t>(config.option_count);
    if (field.answer_pool.size() < want) {
        throw Error(ErrorCode::PoolTooSmall, field.field_id + " has " + std::to_string(field.answer_pool.size()) +
                                                 " answers, need " + std::to_string(want));
    }
    const auto target = normalize_answer(c.answer);
    std::vector<std::string> decoys;
    for (const auto& candidate : field.answer_pool) {
        if (normalize_answer(candidate) != target) decoys.push_back(candidate);
    }
    SplitMix64 rng(derive_seed(seed, "options"));
    // Partial Fisher-Yates: the first want-1 slots become a uniform sample.
    for (std::size_t i = 0; i + 1 < want; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(decoys.size() - i));
        std::swap(decoys[i], decoys[j]);
    }
    c.options.assign(decoys.begin(), decoys.begin() + static_cast<std::ptrdiff_t>(want - 1));
    c.options.push_back(c.answer);
    shuffle(std::span<std::string>(c.options), rng);
    return c;
}

bool spellable_from(std::string_view submission, const std::vector<char>& pool) {
    std::array<int, 26> available{};
    for (char c : pool) {
        if (c >= 'A' && c <= 'Z') ++available[static_cast<std::size_t>(c - 'A')];
    }
    for (char c : submission) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x80) return false;
        char up = c;
        if (up >= 'a' && up <= 'z') up = static_cast<char>(up - 'a' + 'A');
        if (up < 'A' || up > 'Z') continue;
        if (--available[static_cast<std::size_t>(up - 'A')] < 0) return false;
    }
    return true;
}

Verdict check_answer(const Challenge& challenge, std::string_view submission) {
    Verdict v;
    v.kind = challenge.kind;
    if (challenge.kind == ChallengeKind::AvatarRecall && !spellable_from(submission, challenge.letter_pool)) {
        v.unspellable = true;
        return v;
    }
    v.correct = normalize_answer(submission) == normalize_answer(challenge.answer);
    return v;
}

Verdict give_up(const Challenge& challenge, const ChallengeConfig& config) {
    Verdict v;
    v.kind = challenge.kind;
    v.canonical_answer_revealed = config.reveal_on_give_up && challenge.kind == ChallengeKind::Standard;
    return v;
}

std::array<std::string, 4> verbal_cues_for(const Challenge& challenge, const HintGrant* grant) {
    if (grant == nullptr || grant->challenge_id != challenge.challenge_id || grant->kind != HintKind::VerbalCues) {
        throw Error(ErrorCode::NoGrant, "no verbal cue grant for " + challenge.challenge_id);
    }
    return challenge.verbal_cues;
}

char revealed_letter(const Challenge& challenge, const HintGrant* grant) {
    if (grant == nullptr || grant->challenge_id != challenge.challenge_id || grant->kind != HintKind::LetterReveal) {
        throw Error(ErrorCode::NoGrant, "no letter grant for " + challenge.challenge_id);
    }
    return answer_letters(challenge.answer).front();
}

nlohmann::json to_client_json(const Challenge& challenge, bool with_cues) {
    nlohmann::json out = {
        {"challenge_id", challenge.challenge_id},
        {"kind", to_string(challenge.kind)},
        {"image_refs", challenge.image_refs},
    };
    if (challenge.kind == ChallengeKind::AvatarRecognition) {
        out["options"] = challenge.options;
    } else {
        nlohmann::json tiles = nlohmann::json::array();
        for (char c : challenge.letter_pool) tiles.push_back(std::string(1, c));
        out["letter_pool"] = std::move(tiles);
    }
    if (is_avatar_kind(challenge.kind)) {
        out["field_id"] = challenge.field_id;
        out["prompt"] = challenge.prompt;
    }
    if (challenge.show_length && !is_avatar_kind(challenge.kind)) {
        out["length"] = answer_letters(challenge.answer).size();
    }
    if (with_cues) out["verbal_cues"] = challenge.verbal_cues;
    return out;
}

}  // namespace rehearse
