// transeg/json_util.hpp

// Copyright 2026 The transeg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Internal helpers shared by the JSON readers and writers.

#ifndef TRANSEG_JSON_UTIL_HPP_
#define TRANSEG_JSON_UTIL_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "transeg/models.hpp"

namespace transeg {

inline std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

inline const nlohmann::json& json_member(const nlohmann::json& obj, const char* key,
                                         const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where, "missing field");
  return obj[key];
}

template <typename T>
T json_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const nlohmann::json& v = json_member(obj, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where, std::string("wrong type: ") + e.what());
  }
}

/// Parses JSON text, reporting syntax errors as "line L, column C".
inline nlohmann::json parse_json_text(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col),
                     "syntax error");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace transeg

#endif  // TRANSEG_JSON_UTIL_HPP_
