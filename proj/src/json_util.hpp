#pragma once

#include <json.hpp>

#include <string>

#include "ivdep/error.hpp"
#include "ivdep/numeric.hpp"

namespace ivdep::detail {

using json = nlohmann::json;

template <class T>
T scalar_from_json(const json& value) {
  if (value.is_string()) return Num<T>::parse(value.get<std::string>());
  if (value.is_number_integer()) return T(static_cast<long>(value.get<long long>()));
  if (value.is_number()) {
    if constexpr (std::is_same_v<T, double>) {
      return value.get<double>();
    } else {
      return rational_from_double(value.get<double>());
    }
  }
  throw Error(ErrorCode::malformed_input, "expected a number or a fraction string, got " + value.dump());
}

template <class T>
json scalar_to_json(const T& value) {
  if constexpr (std::is_same_v<T, double>) {
    return value;
  } else {
    return to_string(value);
  }
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed JSON: ") + e.what());
  }
}

inline const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::malformed_input, std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

}  // namespace ivdep::detail
