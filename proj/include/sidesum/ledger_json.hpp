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

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sidesum/bounds.hpp"
#include "sidesum/packing_json.hpp"

namespace sidesum {

/// "p/q" for rationals, {"sqrt_of": n} for sqrt(n), else the full triple.
inline Json bound_to_json(const Surd& v) {
  if (v.is_rational()) return v.rat().str();
  Json j = Json::object();
  if (v.is_pure_sqrt()) {
    j["sqrt_of"] = v.radicand();
    return j;
  }
  j["rat"] = v.rat().str();
  j["coef"] = v.coef().str();
  j["sqrt_of"] = v.radicand();
  return j;
}

inline Surd bound_from_json(const Json& j) {
  if (j.is_string()) return Surd(Rational::parse(j.get<std::string>()));
  if (!j.is_object() || !j.contains("sqrt_of") || !j["sqrt_of"].is_number_integer()) {
    throw ParseError("bound must be \"p/q\" or an object with integer sqrt_of");
  }
  const auto radicand = j["sqrt_of"].get<std::int64_t>();
  if (radicand < 0) throw ParseError("sqrt_of must be non-negative");
  if (!j.contains("rat") && !j.contains("coef")) return Surd::sqrt_of(radicand);
  return Surd(detail::rational_field(j, "rat"), detail::rational_field(j, "coef"), radicand);
}

namespace detail {

inline Json optional_id(const std::optional<std::size_t>& id) { return id ? Json(*id) : Json(nullptr); }

inline std::optional<std::size_t> parse_optional_id(const Json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_unsigned()) throw ParseError("rule reference must be a non-negative integer or null");
  return j.get<std::size_t>();
}

inline std::int64_t int_field(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace detail

inline Json rule_to_json(const RuleApplication& r) {
  Json j = Json::object();
  j["id"] = r.id;
  j["rule"] = std::string(to_string(r.rule));
  j["side"] = std::string(to_string(r.side));
  j["target"] = r.target;
  Json params = Json::object();
  switch (r.rule) {
    case RuleKind::kAnchorSquare:
      params["k"] = exact_isqrt(r.target);
      break;
    case RuleKind::kStarLower:
    case RuleKind::kStarUpper:
      params["a"] = r.a;
      params["b"] = r.b;
      params["m"] = r.m;
      break;
    case RuleKind::kHypothesis:
      params["n"] = r.hyp_n;
      if (r.alpha) params["alpha"] = r.alpha->str();
      break;
    case RuleKind::kCertificate:
      params["digest"] = r.digest;
      if (r.certificate) params["packing"] = to_json(*r.certificate);
      break;
    default:
      break;
  }
  j["params"] = std::move(params);
  Json premises = Json::array();
  if (r.has_premise_slot()) premises.push_back(detail::optional_id(r.premise));
  j["premises"] = std::move(premises);
  j["value"] = bound_to_json(r.value);
  j["hypothetical"] = r.hypothetical;
  return j;
}

inline RuleApplication rule_from_json(const Json& j) {
  RuleApplication r;
  const auto id = detail::int_field(j, "id");
  if (id < 0) throw ParseError("rule id must be non-negative");
  r.id = static_cast<std::size_t>(id);
  const auto& rule = detail::require(j, "rule");
  const auto& side = detail::require(j, "side");
  if (!rule.is_string() || !side.is_string()) throw ParseError("rule and side must be strings");
  r.rule = parse_rule_kind(rule.get<std::string>());
  const auto side_name = side.get<std::string>();
  if (side_name != "lower" && side_name != "upper") throw ParseError("side must be lower or upper");
  r.side = side_name == "lower" ? Side::kLower : Side::kUpper;
  r.target = detail::int_field(j, "target");
  const auto& params = detail::require(j, "params");
  if (!params.is_object()) throw ParseError("params must be an object");
  switch (r.rule) {
    case RuleKind::kStarLower:
    case RuleKind::kStarUpper:
      r.a = detail::int_field(params, "a");
      r.b = detail::int_field(params, "b");
      r.m = detail::int_field(params, "m");
      break;
    case RuleKind::kHypothesis:
      r.hyp_n = detail::int_field(params, "n");
      if (params.contains("alpha")) r.alpha = detail::rational_field(params, "alpha");
      break;
    case RuleKind::kCertificate: {
      const auto& digest = detail::require(params, "digest");
      if (!digest.is_string()) throw ParseError("digest must be a string");
      r.digest = digest.get<std::string>();
      if (params.contains("packing")) r.certificate = packing_from_json(params["packing"]);
      break;
    }
    default:
      break;
  }
  const auto& premises = detail::require(j, "premises");
  if (!premises.is_array() || premises.size() != (r.has_premise_slot() ? 1u : 0u)) {
    throw ParseError("wrong number of premises for rule " + std::string(to_string(r.rule)));
  }
  if (r.has_premise_slot()) r.premise = detail::parse_optional_id(premises[0]);
  r.value = bound_from_json(detail::require(j, "value"));
  const auto& hyp = detail::require(j, "hypothetical");
  if (!hyp.is_boolean()) throw ParseError("hypothetical must be a boolean");
  r.hypothetical = hyp.get<bool>();
  return r;
}

inline Json to_json(const Ledger& ledger) {
  Json j = Json::object();
  j["container"] = std::string(to_string(ledger.family()));
  j["N"] = ledger.max_n();
  Json entries = Json::array();
  for (const auto& e : ledger.entries()) {
    Json ej = Json::object();
    ej["n"] = e.n;
    ej["lower"] = e.lower.str();
    ej["upper"] = bound_to_json(e.upper);
    ej["lower_prov"] = detail::optional_id(e.lower_prov);
    ej["upper_prov"] = detail::optional_id(e.upper_prov);
    entries.push_back(std::move(ej));
  }
  j["entries"] = std::move(entries);
  Json rules = Json::array();
  for (const auto& r : ledger.rules()) rules.push_back(rule_to_json(r));
  j["rules"] = std::move(rules);
  return j;
}

/// Structural parse only; callers should audit() the result.
inline Ledger ledger_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("ledger must be a JSON object");
  const auto& family = detail::require(j, "container");
  if (!family.is_string()) throw ParseError("container must be a string");
  const auto max_n = detail::int_field(j, "N");
  if (max_n < 1) throw ParseError("N must be at least 1");
  Ledger ledger(parse_ledger_family(family.get<std::string>()), max_n);
  const auto& rules = detail::require(j, "rules");
  if (!rules.is_array()) throw ParseError("rules must be an array");
  for (const auto& rj : rules) ledger.restore_rule(rule_from_json(rj));
  const auto& entries = detail::require(j, "entries");
  if (!entries.is_array() || static_cast<std::int64_t>(entries.size()) != max_n) {
    throw ParseError("entries must list n = 1..N");
  }
  for (const auto& ej : entries) {
    BoundEntry e;
    e.n = detail::int_field(ej, "n");
    e.lower = detail::rational_field(ej, "lower");
    e.upper = bound_from_json(detail::require(ej, "upper"));
    e.lower_prov = detail::parse_optional_id(detail::require(ej, "lower_prov"));
    e.upper_prov = detail::parse_optional_id(detail::require(ej, "upper_prov"));
    for (const auto& prov : {e.lower_prov, e.upper_prov}) {
      if (prov && *prov >= ledger.rules().size()) throw ParseError("entry refers to an unknown rule");
    }
    ledger.restore_entry(std::move(e));
  }
  return ledger;
}

inline Ledger load_ledger(const std::string& path) { return ledger_from_json(parse_json_text(read_text_file(path))); }

inline void save_ledger(const std::string& path, const Ledger& ledger) {
  write_text_file(path, dump_canonical(to_json(ledger)));
}

}  // namespace sidesum
