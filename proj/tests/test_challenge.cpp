#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "rehearse/challenge.hpp"
#include "rehearse/error.hpp"
#include "rehearse/text.hpp"
#include "support.hpp"

using namespace rehearse;

namespace {

// Multiset containment written independently of spellable_from.
bool letters_fit(const std::string& word, const std::vector<char>& pool) {
    std::map<char, int> need;
    for (char c : answer_letters(word)) ++need[c];
    for (const auto& [c, n] : need) {
        if (std::count(pool.begin(), pool.end(), c) < n) return false;
    }
    return true;
}

const BankEntry& germany() { return *testing::default_bank().find("germany"); }

}  // namespace

TEST_CASE("letter pool holds the answer plus uppercase decoys") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto pool = build_letter_pool("Germany", seed);
        REQUIRE(pool.size() == kLetterPoolSize);
        CHECK(letters_fit("Germany", pool));
        CHECK(std::all_of(pool.begin(), pool.end(), [](char c) { return c >= 'A' && c <= 'Z'; }));
    }
    CHECK(build_letter_pool("Germany", 4) == build_letter_pool("Germany", 4));
    CHECK_THROWS_AS(build_letter_pool("abcdefghijklm", 1), Error);
    CHECK_THROWS_AS(build_letter_pool("1234", 1), Error);
}

TEST_CASE("spellability respects letter multiplicity") {
    const std::vector<char> pool = {'B', 'O', 'K', 'X', 'Y', 'Z', 'Q', 'W', 'E', 'R', 'T', 'U'};
    CHECK(spellable_from("box", pool));
    CHECK_FALSE(spellable_from("book", pool));  // one O only
    CHECK(spellable_from("b-o x!", pool));      // punctuation is not a tile
    CHECK_FALSE(spellable_from("b\xc3\xb6x", pool));
    CHECK(spellable_from("", pool));
}

TEST_CASE("standard challenge") {
    const ChallengeConfig cfg;
    const auto c = build_standard_challenge(germany(), 11, cfg);
    CHECK(c.kind == ChallengeKind::Standard);
    CHECK(c.image_refs == germany().image_refs);
    CHECK(c.show_length);
    CHECK(check_answer(c, "  germany ").correct);
    CHECK_FALSE(check_answer(c, "france").correct);
    const auto j = to_client_json(c);
    CHECK(j.at("length") == 7);
    CHECK(j.at("letter_pool").size() == 12);
    CHECK_FALSE(j.contains("answer"));

    ChallengeConfig hide;
    hide.hide_length_scope = HideLengthScope::All;
    CHECK_FALSE(to_client_json(build_standard_challenge(germany(), 11, hide)).contains("length"));
}

TEST_CASE("avatar challenges hide answer and length") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 3);
    const ChallengeConfig cfg;
    for (const auto& f : schema.fields) {
        const auto rcg = build_avatar_challenge(profile, schema, f.field_id, AvatarMode::Recognition, 8, cfg);
        CHECK(rcg.options.size() == 4);
        CHECK(std::count(rcg.options.begin(), rcg.options.end(), rcg.answer) == 1);
        std::set<std::string> distinct(rcg.options.begin(), rcg.options.end());
        CHECK(distinct.size() == 4);
        const auto j = to_client_json(rcg);
        CHECK_FALSE(j.contains("length"));
        CHECK_FALSE(j.contains("answer"));
        CHECK(j.at("prompt") == f.question_text);

        const auto rcl = build_avatar_challenge(profile, schema, f.field_id, AvatarMode::Recall, 8, cfg);
        CHECK(rcl.letter_pool.size() == 12);
        CHECK(letters_fit(rcl.answer, rcl.letter_pool));
        const auto text = to_client_json(rcl).dump();
        CHECK(text.find(rcl.answer) == std::string::npos);
        CHECK_FALSE(to_client_json(rcl).contains("length"));
        CHECK(check_answer(rcl, rcl.answer).correct);
    }
}

TEST_CASE("recognition needs enough answers for the options") {
    auto schema = testing::default_schema();
    schema.fields[0].answer_pool.resize(3);
    const auto profile = generate_profile(schema, 1);
    try {
        build_avatar_challenge(profile, schema, schema.fields[0].field_id, AvatarMode::Recognition, 1, {});
        FAIL("expected PoolTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PoolTooSmall);
    }
    ChallengeConfig bad;
    bad.option_count = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("recall submissions outside the pool are flagged") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 3);
    const auto c = build_avatar_challenge(profile, schema, "first_name", AvatarMode::Recall, 2, {});
    const auto v = check_answer(c, "QQQQQQQQQQQQQ");
    CHECK_FALSE(v.correct);
    CHECK(v.unspellable);
    CHECK(v.kind == ChallengeKind::AvatarRecall);
}

TEST_CASE("give up reveals only standard answers") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 3);
    CHECK(give_up(build_standard_challenge(germany(), 1, {}), {}).canonical_answer_revealed);
    ChallengeConfig quiet;
    quiet.reveal_on_give_up = false;
    CHECK_FALSE(give_up(build_standard_challenge(germany(), 1, {}), quiet).canonical_answer_revealed);
    const auto rcl = build_avatar_challenge(profile, schema, "surname", AvatarMode::Recall, 2, {});
    CHECK_FALSE(give_up(rcl, {}).canonical_answer_revealed);
    CHECK_FALSE(give_up(rcl, {}).correct);
}

TEST_CASE("hints require a matching grant") {
    const auto c = build_standard_challenge(germany(), 1, {});
    CHECK_THROWS_AS(verbal_cues_for(c, nullptr), Error);
    const HintGrant cues{c.challenge_id, 30, 0, HintKind::VerbalCues};
    const HintGrant other{"std-x-0", 30, 0, HintKind::VerbalCues};
    CHECK(verbal_cues_for(c, &cues) == germany().verbal_cues);
    CHECK_THROWS_AS(verbal_cues_for(c, &other), Error);
    const HintGrant letter{c.challenge_id, 0, 0, HintKind::LetterReveal};
    CHECK(revealed_letter(c, &letter) == 'G');
    CHECK_THROWS_AS(revealed_letter(c, &cues), Error);
    CHECK(to_client_json(c, true).at("verbal_cues").size() == 4);
}

TEST_CASE("client serialization is stable") {
    const auto& schema = testing::default_schema();
    const auto profile = generate_profile(schema, 3);
    const auto c = build_avatar_challenge(profile, schema, "school_name", AvatarMode::Recognition, 5, {});
    const auto once = to_client_json(c).dump();
    CHECK(nlohmann::json::parse(once).dump() == once);
    CHECK(to_client_json(c).dump() == once);
}

TEST_CASE("bank document") {
    const auto& bank = testing::default_bank();
    CHECK(bank.entries.size() == 32);
    CHECK(bank.find("germany") != nullptr);
    CHECK(bank.find("atlantis") == nullptr);
    nlohmann::json bad = {{"bank_id", "x"}, {"entries", nlohmann::json::array()}, {"extra", true}};
    CHECK_THROWS_AS(bank_from_json(bad), Error);
}
