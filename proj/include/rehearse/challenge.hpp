#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rehearse/avatar.hpp"
#include "rehearse/time.hpp"

namespace rehearse {

inline constexpr std::size_t kLetterPoolSize = 12;

enum class ChallengeKind { Standard, AvatarRecognition, AvatarRecall };
enum class AvatarMode { Recognition, Recall };

std::string_view to_string(ChallengeKind kind);
ChallengeKind challenge_kind_from_string(std::string_view text);
bool is_avatar_kind(ChallengeKind kind);

enum class HideLengthScope { Avatar, All };

struct ChallengeConfig {
    int option_count = 4;  // recognition options, 2..8
    HideLengthScope hide_length_scope = HideLengthScope::Avatar;
    bool reveal_on_give_up = true;  // Standard challenges only

    void validate() const;
    bool operator==(const ChallengeConfig&) const = default;
};

struct Challenge {
    std::string challenge_id;
    ChallengeKind kind = ChallengeKind::Standard;
    std::array<std::string, 4> image_refs;
    std::string answer;
    std::vector<char> letter_pool;     // Standard, AvatarRecall
    std::vector<std::string> options;  // AvatarRecognition
    bool show_length = true;
    std::array<std::string, 4> verbal_cues;
    std::string field_id;  // avatar kinds
    std::string prompt;    // question text for avatar kinds

    bool operator==(const Challenge&) const = default;
};

struct Verdict {
    bool correct = false;
    ChallengeKind kind = ChallengeKind::Standard;
    bool canonical_answer_revealed = false;
    // Recall submission used letters the pool cannot supply.
    bool unspellable = false;

    bool operator==(const Verdict&) const = default;
};

/// Source record for a Standard challenge.
struct BankEntry {
    std::string entry_id;
    std::string answer;
    std::array<std::string, 4> image_refs;
    std::array<std::string, 4> verbal_cues;

    bool operator==(const BankEntry&) const = default;
};

struct ChallengeBank {
    std::string bank_id;
    std::vector<BankEntry> entries;

    const BankEntry* find(std::string_view entry_id) const;
};

ChallengeBank bank_from_json(const nlohmann::json& doc);
ChallengeBank load_bank(const std::filesystem::path& path);

enum class HintKind { VerbalCues, LetterReveal };
std::string_view to_string(HintKind kind);
HintKind hint_kind_from_string(std::string_view text);

struct HintGrant {
    std::string challenge_id;
    int cost = 0;
    Timestamp granted_at = 0;
    HintKind kind = HintKind::VerbalCues;

    bool operator==(const HintGrant&) const = default;
};

/// Stable id for a challenge: "std-<entry>-<seed>", "rcg-<field>-<seed>" or
/// "rcl-<field>-<seed>", seed in 16 hex digits.
std::string challenge_id_for(ChallengeKind kind, std::string_view key, std::uint64_t seed);

/// Twelve uppercase letters holding the answer's letters as a sub-multiset,
/// the rest uniform A-Z decoys, in seeded shuffled order.
/// Throws EmptyAnswer or AnswerTooLong.
std::vector<char> build_letter_pool(std::string_view answer, std::uint64_t seed,
                                    std::size_t pool_size = kLetterPoolSize);

Challenge build_standard_challenge(const BankEntry& entry, std::uint64_t pool_seed,
                                   const ChallengeConfig& config = {});

Challenge build_avatar_challenge(const AvatarProfile& profile, const AvatarSchema& schema,
                                 std::string_view field_id, AvatarMode mode, std::uint64_t seed,
                                 const ChallengeConfig& config = {});

/// True when every letter of `submission` is available in `pool` at its
/// multiplicity. Non-letters are ignored; non-ASCII bytes are never spellable.
bool spellable_from(std::string_view submission, const std::vector<char>& pool);

Verdict check_answer(const Challenge& challenge, std::string_view submission);

/// Judged as wrong; the answer is revealed only for Standard challenges and
/// only when the config allows it.
Verdict give_up(const Challenge& challenge, const ChallengeConfig& config);

/// The four cues in image order. Throws NoGrant unless `grant` is a
/// VerbalCues grant for this challenge.
std::array<std::string, 4> verbal_cues_for(const Challenge& challenge, const HintGrant* grant);

/// First letter of the answer, for LetterReveal grants. Throws NoGrant.
char revealed_letter(const Challenge& challenge, const HintGrant* grant);

/// Client-facing form: never carries the answer, and carries the length only
/// when show_length is set. Cues are included when `with_cues`.
nlohmann::json to_client_json(const Challenge& challenge, bool with_cues = false);

}  // namespace rehearse
