#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

namespace rehearse::json_io {

// Throws ParseError if `obj` is not an object or carries a key outside `allowed`.
void require_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                  std::string_view context);

// Typed member access with ParseError on absence or type mismatch.
template <typename T>
T get(const nlohmann::json& obj, std::string_view key, std::string_view context);

nlohmann::json read_file(const std::filesystem::path& path);
/// Raw bytes. Throws StorageFailure.
std::string read_text(const std::filesystem::path& path);

}  // namespace rehearse::json_io

#include "rehearse/detail/json_io_impl.hpp"
