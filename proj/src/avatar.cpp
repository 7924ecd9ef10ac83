#include "rehearse/avatar.hpp"

#include <cmath>
#include <set>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"
#include "rehearse/rng.hpp"
#include "rehearse/text.hpp"

namespace rehearse {

const FieldSchema* AvatarSchema::find(std::string_view field_id) const {
    for (const auto& f : fields) {
        if (f.field_id == field_id) return &f;
    }
    return nullptr;
}

const FieldSchema& AvatarSchema::field(std::string_view field_id) const {
    if (const auto* f = find(field_id)) return *f;
    throw Error(ErrorCode::UnknownField, std::string(field_id));
}

void validate_schema(const AvatarSchema& schema) {
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::InvalidSchema, schema.schema_id + ": " + why);
    };
    if (schema.schema_id.empty()) fail("empty schema_id");
    if (schema.fields.size() < kMinSchemaFields) {
        fail("needs at least " + std::to_string(kMinSchemaFields) + " fields, has " +
             std::to_string(schema.fields.size()));
    }
    std::set<std::string> ids;
    for (const auto& f : schema.fields) {
        if (f.field_id.empty()) fail("empty field_id");
        if (!ids.insert(f.field_id).second) fail("duplicate field_id '" + f.field_id + "'");
        if (f.answer_pool.size() < 2) fail("field '" + f.field_id + "' answer_pool needs >= 2 entries");
        std::set<std::string> seen;
        for (const auto& answer : f.answer_pool) {
            const auto norm = normalize_answer(answer);
            if (norm.empty()) fail("field '" + f.field_id + "' has a blank answer");
            if (!seen.insert(norm).second) {
                fail("field '" + f.field_id + "' answer '" + answer + "' repeats after normalization");
            }
        }
    }
}

AvatarProfile generate_profile(const AvatarSchema& schema, std::uint64_t seed) {
    validate_schema(schema);
    AvatarProfile profile;
    profile.schema_id = schema.schema_id;
    profile.seed = seed;
    profile.profile_id = schema.schema_id + "-" + to_hex64(seed);
    for (const auto& f : schema.fields) {
        SplitMix64 rng(derive_seed(seed, f.field_id));
        profile.assignments.emplace(f.field_id, f.answer_pool[rng.below(f.answer_pool.size())]);
    }
    return profile;
}

double field_entropy(const AvatarSchema& schema, std::string_view field_id) {
    return std::log2(static_cast<double>(schema.field(field_id).answer_pool.size()));
}

double question_set_entropy(const AvatarSchema& schema, std::span<const std::string> field_ids) {
    std::set<std::string_view> seen;
    double bits = 0.0;
    for (const auto& id : field_ids) {
        if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateField, id);
        bits += field_entropy(schema, id);
    }
    return bits;
}

const std::string& answer_for(const AvatarProfile& profile, std::string_view field_id) {
    const auto it = profile.assignments.find(std::string(field_id));
    if (it == profile.assignments.end()) throw Error(ErrorCode::UnknownField, std::string(field_id));
    return it->second;
}

namespace {

template <std::size_t N>
std::array<std::string, N> fixed_list(const nlohmann::json& obj, std::string_view key,
                                      std::string_view ctx) {
    const auto items = json_io::get<std::vector<std::string>>(obj, key, ctx);
    if (items.size() != N) {
        throw Error(ErrorCode::InvalidSchema, std::string(ctx) + "." + std::string(key) + " must have exactly " +
                                                  std::to_string(N) + " entries");
    }
    std::array<std::string, N> out;
    std::copy(items.begin(), items.end(), out.begin());
    return out;
}

}  // namespace

AvatarSchema schema_from_json(const nlohmann::json& doc) {
    json_io::require_keys(doc, {"schema_id", "fields"}, "schema");
    AvatarSchema schema;
    schema.schema_id = json_io::get<std::string>(doc, "schema_id", "schema");
    const auto fields = json_io::get<nlohmann::json>(doc, "fields", "schema");
    if (!fields.is_array()) throw Error(ErrorCode::ParseError, "schema.fields must be an array");
    for (const auto& item : fields) {
        json_io::require_keys(item, {"field_id", "question_text", "answer_pool", "image_set", "verbal_cues"},
                              "schema.fields[]");
        FieldSchema f;
        f.field_id = json_io::get<std::string>(item, "field_id", "field");
        const std::string ctx = "field '" + f.field_id + "'";
        f.question_text = json_io::get<std::string>(item, "question_text", ctx);
        f.answer_pool = json_io::get<std::vector<std::string>>(item, "answer_pool", ctx);
        f.image_set = fixed_list<4>(item, "image_set", ctx);
        f.verbal_cues = fixed_list<4>(item, "verbal_cues", ctx);
        schema.fields.push_back(std::move(f));
    }
    validate_schema(schema);
    return schema;
}

nlohmann::json schema_to_json(const AvatarSchema& schema) {
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& f : schema.fields) {
        fields.push_back({{"field_id", f.field_id},
                          {"question_text", f.question_text},
                          {"answer_pool", f.answer_pool},
                          {"image_set", f.image_set},
                          {"verbal_cues", f.verbal_cues}});
    }
    return {{"schema_id", schema.schema_id}, {"fields", std::move(fields)}};
}

AvatarSchema load_schema(const std::filesystem::path& path) {
    return schema_from_json(json_io::read_file(path));
}

nlohmann::json profile_to_json(const AvatarProfile& profile) {
    return {{"profile_id", profile.profile_id},
            {"schema_id", profile.schema_id},
            {"seed", profile.seed},
            {"assignments", profile.assignments}};
}

}  // namespace rehearse
