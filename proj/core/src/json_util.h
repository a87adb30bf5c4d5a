// Small helpers over nlohmann::json shared by the document readers.
#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "placer/common.h"

namespace placer::json_util {

using nlohmann::json;

/// Parses text, translating the library's byte offset into line/column.
json parse(std::string_view text);

/// Rejects keys outside `allowed` so typos do not silently become defaults.
void expect_keys(const json &obj, std::initializer_list<const char *> allowed, const std::string &ctx);

const json &require(const json &obj, const char *key, const std::string &ctx);
const json &require_array(const json &obj, const char *key, const std::string &ctx);

std::string get_string(const json &obj, const char *key, const std::string &ctx);

/// Integer field; floats, strings and out-of-range values are ParseErrors.
Cost get_int(const json &obj, const char *key, const std::string &ctx);
Cost as_int(const json &value, const std::string &ctx);

} // namespace placer::json_util
