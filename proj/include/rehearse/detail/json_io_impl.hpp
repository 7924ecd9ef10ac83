#pragma once

#include "rehearse/error.hpp"

namespace rehearse::json_io {

template <typename T>
T get(const nlohmann::json& obj, std::string_view key, std::string_view context) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw Error(ErrorCode::ParseError,
                    std::string(context) + ": missing key '" + std::string(key) + "'");
    }
    try {
        return it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError,
                    std::string(context) + "." + std::string(key) + ": " + e.what());
    }
}

}  // namespace rehearse::json_io
