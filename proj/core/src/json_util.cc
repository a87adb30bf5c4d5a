#include "json_util.h"

#include <algorithm>

namespace placer::json_util {

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    // e.byte is 1-based and points one past the offending character.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("syntax error: " + std::string(e.what()), line, column);
  }
}

void expect_keys(const json &obj, std::initializer_list<const char *> allowed, const std::string &ctx) {
  if (!obj.is_object()) {
    throw ParseError(ctx + ": expected an object");
  }
  for (const auto &[key, _] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char *a) {
      return key == a;
    });
    if (!known) {
      throw ParseError(ctx + ": unknown field '" + key + "'");
    }
  }
}

const json &require(const json &obj, const char *key, const std::string &ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(ctx + ": missing field '" + key + "'");
  }
  return *it;
}

const json &require_array(const json &obj, const char *key, const std::string &ctx) {
  const json &value = require(obj, key, ctx);
  if (!value.is_array()) {
    throw ParseError(ctx + ": field '" + key + "' must be an array");
  }
  return value;
}

std::string get_string(const json &obj, const char *key, const std::string &ctx) {
  const json &value = require(obj, key, ctx);
  if (!value.is_string()) {
    throw ParseError(ctx + ": field '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

Cost as_int(const json &value, const std::string &ctx) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned() &&
        value.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Cost>::max())) {
      throw ParseError(ctx + ": integer out of 64-bit range");
    }
    return value.get<Cost>();
  }
  throw ParseError(ctx + ": expected an integer");
}

Cost get_int(const json &obj, const char *key, const std::string &ctx) {
  return as_int(require(obj, key, ctx), ctx + "." + key);
}

} // namespace placer::json_util
