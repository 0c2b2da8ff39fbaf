// Copyright 2026 The sidesum Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Packing file format:
//
//   {"container": {"kind": "unit_square" | "unit_triangle" | "parallelogram",
//                  "frame": [[e1u, e1v], [e2u, e2v]]},        // parallelogram only
//    "placements": [{"kind": "square" | "tri_up" | "tri_down",
//                    "x": "p/q", "y": "p/q", "s": "p/q"}, ...],
//    "meta": "..."}
//
// Keys are emitted in exactly this order so files can be compared byte-wise.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sidesum/error.hpp"
#include "sidesum/geometry.hpp"

namespace sidesum {

using Json = nlohmann::ordered_json;

/// Serialization used for every file the library writes: two-space indent,
/// trailing newline.
inline std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

inline Json container_to_json(const Container& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  if (c.kind == ContainerKind::kParallelogram && c.frame) {
    const Frame& f = *c.frame;
    j["frame"] = Json::array({Json::array({f[0][0], f[0][1]}), Json::array({f[1][0], f[1][1]})});
  }
  return j;
}

inline Json placement_to_json(const Placement& p) {
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  j["x"] = p.x.str();
  j["y"] = p.y.str();
  j["s"] = p.s.str();
  return j;
}

inline Json to_json(const Packing& pk) {
  Json j;
  j["container"] = container_to_json(pk.container);
  j["placements"] = Json::array();
  for (const auto& p : pk.placements) j["placements"].push_back(placement_to_json(p));
  j["meta"] = pk.meta;
  return j;
}

inline Json to_json(const VerificationReport& r) {
  Json j;
  j["valid"] = r.valid;
  j["side_sum"] = r.side_sum.str();
  j["violations"] = Json::array();
  for (const auto& v : r.violations) {
    Json e;
    e["first"] = v.first;
    if (v.second) e["second"] = *v.second;
    e["reason"] = v.reason;
    j["violations"].push_back(std::move(e));
  }
  return j;
}

namespace detail {

template <typename J>
const J& require(const J& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename J>
Rational rational_field(const J& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a \"p/q\" string");
  return Rational::parse(v.template get<std::string>());
}

}  // namespace detail

inline ContainerKind parse_container_kind(const std::string& s) {
  if (s == "unit_square") return ContainerKind::kUnitSquare;
  if (s == "unit_triangle") return ContainerKind::kUnitTriangle;
  if (s == "parallelogram") return ContainerKind::kParallelogram;
  throw ParseError("unknown container kind '" + s + "'");
}

inline PlacementKind parse_placement_kind(const std::string& s) {
  if (s == "square") return PlacementKind::kSquare;
  if (s == "tri_up") return PlacementKind::kTriUp;
  if (s == "tri_down") return PlacementKind::kTriDown;
  throw ParseError("unknown placement kind '" + s + "'");
}

inline Container container_from_json(const Json& j) {
  const auto& kind = detail::require(j, "kind");
  if (!kind.is_string()) throw ParseError("container kind must be a string");
  Container c;
  c.kind = parse_container_kind(kind.get<std::string>());
  if (c.kind == ContainerKind::kParallelogram) {
    const auto& fj = detail::require(j, "frame");
    if (!fj.is_array() || fj.size() != 2) throw ParseError("frame must be [[r,r],[r,r]]");
    Frame f{};
    for (std::size_t r = 0; r < 2; ++r) {
      if (!fj[r].is_array() || fj[r].size() != 2) throw ParseError("frame must be [[r,r],[r,r]]");
      for (std::size_t k = 0; k < 2; ++k) {
        if (!fj[r][k].is_number()) throw ParseError("frame entries must be numbers");
        f[r][k] = fj[r][k].get<double>();
      }
    }
    try {
      c = Container::parallelogram(f);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
  }
  return c;
}

inline Packing packing_from_json(const Json& j) {
  Packing pk;
  pk.container = container_from_json(detail::require(j, "container"));
  const auto& list = detail::require(j, "placements");
  if (!list.is_array()) throw ParseError("placements must be an array");
  for (const auto& pj : list) {
    const auto& kind = detail::require(pj, "kind");
    if (!kind.is_string()) throw ParseError("placement kind must be a string");
    pk.placements.push_back({parse_placement_kind(kind.get<std::string>()),
                             detail::rational_field(pj, "x"), detail::rational_field(pj, "y"),
                             detail::rational_field(pj, "s")});
  }
  if (j.contains("meta")) {
    if (!j["meta"].is_string()) throw ParseError("meta must be a string");
    pk.meta = j["meta"].get<std::string>();
  }
  return pk;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline Packing load_packing(const std::string& path) {
  return packing_from_json(parse_json_text(read_text_file(path)));
}

inline void save_packing(const std::string& path, const Packing& pk) {
  write_text_file(path, dump_canonical(to_json(pk)));
}

}  // namespace sidesum
