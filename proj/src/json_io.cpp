#include "rehearse/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace rehearse::json_io {

void require_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                  std::string_view context) {
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, std::string(context) + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::ParseError, std::string(context) + ": unknown key '" + key + "'");
        }
    }
}

nlohmann::json read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageFailure, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rehearse::json_io
