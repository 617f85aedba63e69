// include/tsvad/report.hpp

// Copyright 2026 The tsvad-kit Authors
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

// Score report serialization.
//
// JSON field names (stable):
//   der:   missed, false_alarm, confusion, total_ref_speech, der, collar,
//          mapping{pairs[[ref,hyp]], unmatched_ref[], unmatched_hyp[]}
//          (der is null when undefined, i.e. infinite)
//   jer:   jer, per_speaker{ref: value}
//   cpwer: substitutions, deletions, insertions, ref_words, cpwer,
//          permutation{pairs, unmatched_ref, unmatched_hyp}

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "json.hpp"
#include "tsvad/metrics.hpp"

namespace tsvad {

inline nlohmann::json to_json(const Mapping &m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto &[a, b] : m.pairs) pairs.push_back({a, b});
  return {{"pairs", pairs},
          {"unmatched_ref", m.unmatched_a},
          {"unmatched_hyp", m.unmatched_b}};
}

inline Mapping mapping_from_json(const nlohmann::json &j) {
  Mapping m;
  for (const auto &p : j.at("pairs"))
    m.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  m.unmatched_a = j.at("unmatched_ref").get<std::vector<std::string>>();
  m.unmatched_b = j.at("unmatched_hyp").get<std::vector<std::string>>();
  return m;
}

inline nlohmann::json to_json(const DerReport &r) {
  nlohmann::json j = {{"missed", r.missed},
                      {"false_alarm", r.false_alarm},
                      {"confusion", r.confusion},
                      {"total_ref_speech", r.total_ref_speech},
                      {"collar", r.collar},
                      {"mapping", to_json(r.mapping)}};
  if (std::isfinite(r.der))
    j["der"] = r.der;
  else
    j["der"] = nullptr;
  return j;
}

inline DerReport der_report_from_json(const nlohmann::json &j) {
  DerReport r;
  r.missed = j.at("missed").get<double>();
  r.false_alarm = j.at("false_alarm").get<double>();
  r.confusion = j.at("confusion").get<double>();
  r.total_ref_speech = j.at("total_ref_speech").get<double>();
  r.collar = j.at("collar").get<double>();
  r.der = j.at("der").is_null() ? std::numeric_limits<double>::infinity()
                                : j.at("der").get<double>();
  r.mapping = mapping_from_json(j.at("mapping"));
  return r;
}

inline nlohmann::json to_json(const JerReport &r) {
  return {{"jer", r.jer}, {"per_speaker", r.per_speaker_jer}};
}

inline nlohmann::json to_json(const CpWerReport &r) {
  return {{"substitutions", r.substitutions},
          {"deletions", r.deletions},
          {"insertions", r.insertions},
          {"ref_words", r.ref_words},
          {"cpwer", r.cpwer},
          {"permutation", to_json(r.permutation)}};
}

inline CpWerReport cpwer_report_from_json(const nlohmann::json &j) {
  CpWerReport r;
  r.substitutions = j.at("substitutions").get<std::int64_t>();
  r.deletions = j.at("deletions").get<std::int64_t>();
  r.insertions = j.at("insertions").get<std::int64_t>();
  r.ref_words = j.at("ref_words").get<std::int64_t>();
  r.cpwer = j.at("cpwer").get<double>();
  r.permutation = mapping_from_json(j.at("permutation"));
  return r;
}

namespace detail {
inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}
}  // namespace detail

/// One-line "key=value" summary.
inline std::string to_key_value(const DerReport &r) {
  return "der=" + (std::isfinite(r.der) ? detail::fmt_num(r.der) : "inf") +
         " missed=" + detail::fmt_num(r.missed) +
         " false_alarm=" + detail::fmt_num(r.false_alarm) +
         " confusion=" + detail::fmt_num(r.confusion) +
         " total_ref_speech=" + detail::fmt_num(r.total_ref_speech) +
         " collar=" + detail::fmt_num(r.collar);
}

inline std::string to_key_value(const CpWerReport &r) {
  return "cpwer=" + detail::fmt_num(r.cpwer) +
         " substitutions=" + std::to_string(r.substitutions) +
         " deletions=" + std::to_string(r.deletions) +
         " insertions=" + std::to_string(r.insertions) +
         " ref_words=" + std::to_string(r.ref_words);
}

}  // namespace tsvad
