// include/tsvad/rttm.hpp

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

// NIST RTTM / UEM readers and writers, and the per-speaker transcript format
// consumed by cpWER scoring.
//
// RTTM:        SPEAKER <rec> <chan> <onset> <dur> <NA> <NA> <spk> <NA> <NA>
// UEM:         <rec> <chan> <onset> <offset>
// Transcript:  <speaker>\t<onset>\t<token> <token> ...

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsvad/common.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

using RecordingMap = std::map<std::string, Diarization>;
using UemMap = std::map<std::string, std::vector<Interval>>;

struct RttmRecord {
  std::string type_tag;
  std::string recording_id;
  int channel = 1;
  double onset = 0.0;
  double duration = 0.0;
  std::string speaker;
};

struct RttmDocument {
  RecordingMap recordings;
  std::size_t skipped_lines = 0;  // non-SPEAKER records
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
           c == '\f';
  };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_seconds(std::string_view field, std::size_t line,
                            const char *name) {
  double v = 0.0;
  const char *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError(line, std::string("malformed ") + name + " field '" +
                               std::string(field) + "'");
  return v;
}

inline int parse_int(std::string_view field, std::size_t line,
                     const char *name) {
  int v = 0;
  const char *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError(line, std::string("malformed ") + name + " field '" +
                               std::string(field) + "'");
  return v;
}

inline bool is_blank_or_comment(std::string_view line) {
  auto fields = split_ws(line);
  return fields.empty() || fields.front().front() == '#' ||
         fields.front().front() == ';';
}

inline long long to_ms(double seconds) { return std::llround(seconds * 1000.0); }

inline std::string format_ms(long long ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%03lld", ms < 0 ? "-" : "",
                std::llabs(ms) / 1000, std::llabs(ms) % 1000);
  return buf;
}

}  // namespace detail

/// Parses one RTTM line. Returns nullopt for blank/comment lines.
inline std::optional<RttmRecord> parse_rttm_line(std::string_view text,
                                                 std::size_t line_no) {
  if (detail::is_blank_or_comment(text)) return std::nullopt;
  auto f = detail::split_ws(text);
  RttmRecord rec;
  rec.type_tag = std::string(f[0]);
  if (rec.type_tag != "SPEAKER") return rec;
  if (f.size() < 9)
    throw ParseError(line_no, "SPEAKER line has " + std::to_string(f.size()) +
                                  " fields, expected at least 9");
  rec.recording_id = std::string(f[1]);
  rec.channel = detail::parse_int(f[2], line_no, "channel");
  rec.onset = detail::parse_seconds(f[3], line_no, "onset");
  rec.duration = detail::parse_seconds(f[4], line_no, "duration");
  rec.speaker = std::string(f[7]);
  if (rec.onset < 0.0) throw ParseError(line_no, "negative onset");
  if (rec.duration < 0.0) throw ParseError(line_no, "negative duration");
  return rec;
}

inline RttmDocument parse_rttm(std::istream &in) {
  std::map<std::string, std::vector<Turn>> turns;
  RttmDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto rec = parse_rttm_line(line, line_no);
    if (!rec) continue;
    if (rec->type_tag != "SPEAKER") {
      ++doc.skipped_lines;
      continue;
    }
    turns[rec->recording_id].push_back(
        {rec->recording_id, rec->speaker, rec->onset, rec->duration});
  }
  for (auto &[id, ts] : turns)
    doc.recordings.emplace(id, Diarization(id, std::move(ts)));
  return doc;
}

inline RttmDocument parse_rttm(const std::string &text) {
  std::istringstream in(text);
  return parse_rttm(in);
}

inline RttmDocument read_rttm_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open RTTM file " + path.string());
  try {
    return parse_rttm(in);
  } catch (const ParseError &e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Canonical 1 ms form of a diarization: onsets and offsets rounded to the
/// nearest millisecond, then renormalized.
inline Diarization quantize_ms(const Diarization &diar) {
  std::vector<Turn> turns;
  for (const auto &t : diar.turns()) {
    long long on = detail::to_ms(t.onset), off = detail::to_ms(t.offset());
    turns.push_back({t.recording_id, t.speaker, on / 1000.0,
                     static_cast<double>(off - on) / 1000.0});
  }
  return Diarization(diar.recording_id(), std::move(turns));
}

/// Canonical RTTM text: lines sorted by (recording, onset, speaker), times
/// with 3 decimals, channel 1.
inline std::string write_rttm(const RecordingMap &recordings) {
  std::string out;
  for (const auto &[id, diar] : recordings) {
    const Diarization q = quantize_ms(diar);
    for (const auto &t : q.turns()) {
      long long on = detail::to_ms(t.onset);
      long long off = detail::to_ms(t.offset());
      out += "SPEAKER " + id + " 1 " + detail::format_ms(on) + " " +
             detail::format_ms(off - on) + " <NA> <NA> " + t.speaker +
             " <NA> <NA>\n";
    }
  }
  return out;
}

inline std::string write_rttm(const Diarization &diar) {
  return write_rttm(RecordingMap{{diar.recording_id(), diar}});
}

inline void write_rttm_file(const std::filesystem::path &path,
                            const RecordingMap &recordings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write RTTM file " + path.string());
  out << write_rttm(recordings);
  if (!out) throw Error("write failed for " + path.string());
}

/// Scoring regions per recording; overlapping entries are merged.
inline UemMap parse_uem(std::istream &in) {
  std::map<std::string, std::vector<Interval>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    auto f = detail::split_ws(line);
    if (f.size() < 4)
      throw ParseError(line_no, "UEM line needs 4 fields");
    detail::parse_int(f[1], line_no, "channel");
    double on = detail::parse_seconds(f[2], line_no, "onset");
    double off = detail::parse_seconds(f[3], line_no, "offset");
    if (on < 0.0) throw ParseError(line_no, "negative onset");
    if (!(off > on)) throw ParseError(line_no, "offset must exceed onset");
    raw[std::string(f[0])].push_back({on, off});
  }
  UemMap out;
  for (auto &[id, xs] : raw) out.emplace(id, merge_intervals(std::move(xs)));
  return out;
}

inline UemMap parse_uem(const std::string &text) {
  std::istringstream in(text);
  return parse_uem(in);
}

/// A missing UEM file means "score everything", reported as nullopt.
inline std::optional<UemMap> read_uem_file(const std::filesystem::path &path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw Error("cannot open UEM file " + path.string());
  return parse_uem(in);
}

struct Utterance {
  double onset = 0.0;
  std::vector<std::string> tokens;

  friend bool operator==(const Utterance &, const Utterance &) = default;
};

struct SpeakerTranscript {
  std::string recording_id;
  std::string speaker;
  std::vector<Utterance> utterances;  // ordered by onset

  friend bool operator==(const SpeakerTranscript &,
                         const SpeakerTranscript &) = default;
};

using TranscriptSet = std::map<std::string, SpeakerTranscript>;

inline TranscriptSet parse_transcripts(std::istream &in,
                                       const std::string &recording_id) {
  TranscriptSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw ParseError(line_no, "transcript line needs speaker<TAB>onset<TAB>text");
    std::string speaker = line.substr(0, tab1);
    if (speaker.empty()) throw ParseError(line_no, "empty speaker label");
    double onset = detail::parse_seconds(
        std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1), line_no,
        "onset");
    Utterance u{onset, {}};
    for (auto tok : detail::split_ws(std::string_view(line).substr(tab2 + 1)))
      u.tokens.emplace_back(tok);
    auto &st = out[speaker];
    st.recording_id = recording_id;
    st.speaker = speaker;
    st.utterances.push_back(std::move(u));
  }
  for (auto &[spk, st] : out)
    std::stable_sort(st.utterances.begin(), st.utterances.end(),
                     [](const Utterance &a, const Utterance &b) {
                       return a.onset < b.onset;
                     });
  return out;
}

inline TranscriptSet parse_transcripts(const std::string &text,
                                       const std::string &recording_id) {
  std::istringstream in(text);
  return parse_transcripts(in, recording_id);
}

inline std::string write_transcripts(const TranscriptSet &transcripts) {
  std::string out;
  for (const auto &[spk, st] : transcripts) {
    for (const auto &u : st.utterances) {
      out += spk + "\t" + detail::format_ms(detail::to_ms(u.onset)) + "\t";
      for (std::size_t i = 0; i < u.tokens.size(); ++i)
        out += (i ? " " : "") + u.tokens[i];
      out += "\n";
    }
  }
  return out;
}

}  // namespace tsvad
