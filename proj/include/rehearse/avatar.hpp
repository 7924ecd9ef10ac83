#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rehearse {

/// One security question of the avatar: the answer pool a profile draws from,
/// plus the fixed images and verbal cues used to teach it.
struct FieldSchema {
    std::string field_id;
    std::string question_text;
    std::vector<std::string> answer_pool;
    std::array<std::string, 4> image_set;
    std::array<std::string, 4> verbal_cues;

    bool operator==(const FieldSchema&) const = default;
};

struct AvatarSchema {
    std::string schema_id;
    std::vector<FieldSchema> fields;

    // nullptr when absent.
    const FieldSchema* find(std::string_view field_id) const;
    const FieldSchema& field(std::string_view field_id) const;  // throws UnknownField

    bool operator==(const AvatarSchema&) const = default;
};

inline constexpr std::size_t kMinSchemaFields = 6;

/// Throws InvalidSchema on the first violated invariant.
void validate_schema(const AvatarSchema& schema);

/// The system-generated identity a player is taught.
struct AvatarProfile {
    std::string profile_id;
    std::string schema_id;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> assignments;

    bool operator==(const AvatarProfile&) const = default;
};

/// Deterministic in (schema, seed). Each field draws from its own SplitMix64
/// stream seeded with derive_seed(seed, field_id), so adding or reordering
/// fields leaves other fields' answers untouched.
AvatarProfile generate_profile(const AvatarSchema& schema, std::uint64_t seed);

/// log2 of the answer pool size. Throws UnknownField.
double field_entropy(const AvatarSchema& schema, std::string_view field_id);

/// Sum of field entropies. Throws UnknownField or DuplicateField.
double question_set_entropy(const AvatarSchema& schema, std::span<const std::string> field_ids);

/// The stored assignment, verbatim. Throws UnknownField.
const std::string& answer_for(const AvatarProfile& profile, std::string_view field_id);

// Schema documents. Parsing rejects unknown keys and validates the result.
AvatarSchema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const AvatarSchema& schema);
AvatarSchema load_schema(const std::filesystem::path& path);

nlohmann::json profile_to_json(const AvatarProfile& profile);

}  // namespace rehearse
