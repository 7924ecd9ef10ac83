#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rehearse {

// Canonical comparison form for answers: ASCII case-fold, trim, and collapse
// runs of internal whitespace to one space. Bytes >= 0x80 pass through.
std::string normalize_answer(std::string_view text);

// Uppercase A-Z letters of `text`, all other characters dropped.
std::string answer_letters(std::string_view text);

std::string to_hex64(std::uint64_t value);

}  // namespace rehearse
