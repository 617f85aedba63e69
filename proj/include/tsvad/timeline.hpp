// include/tsvad/timeline.hpp

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

// Interval algebra over speaker turns and conversion between the segment
// domain (turns in seconds) and the frame domain (T x S activity matrices).

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsvad/common.hpp"

namespace tsvad {

struct Interval {
  double onset = 0.0;
  double offset = 0.0;

  double length() const { return offset - onset; }
  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Sorted, disjoint union of the given intervals. Touching intervals merge.
inline std::vector<Interval> merge_intervals(std::vector<Interval> xs) {
  std::erase_if(xs, [](const Interval &x) { return !(x.offset > x.onset); });
  std::sort(xs.begin(), xs.end(), [](const Interval &a, const Interval &b) {
    return std::tie(a.onset, a.offset) < std::tie(b.onset, b.offset);
  });
  std::vector<Interval> out;
  for (const auto &x : xs) {
    if (!out.empty() && x.onset <= out.back().offset + kTimeEps)
      out.back().offset = std::max(out.back().offset, x.offset);
    else
      out.push_back(x);
  }
  return out;
}

inline double total_length(std::span<const Interval> xs) {
  double sum = 0.0;
  for (const auto &x : xs) sum += x.length();
  return sum;
}

/// Intersection of two sorted disjoint interval lists.
inline std::vector<Interval> intersect_intervals(std::span<const Interval> a,
                                                 std::span<const Interval> b) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].onset, b[j].onset);
    double hi = std::min(a[i].offset, b[j].offset);
    if (hi > lo) out.push_back({lo, hi});
    if (a[i].offset < b[j].offset)
      ++i;
    else
      ++j;
  }
  return out;
}

struct Turn {
  std::string recording_id;
  std::string speaker;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds

  double offset() const { return onset + duration; }
  friend bool operator==(const Turn &, const Turn &) = default;
};

// Shorthand used when building diarizations by hand.
struct Segment {
  std::string speaker;
  double onset = 0.0;
  double offset = 0.0;
};

/// All turns of one recording, normalized: turns sorted by (onset, speaker),
/// same-speaker overlapping or touching turns merged, zero-length turns
/// dropped. Immutable once built.
class Diarization {
 public:
  Diarization() = default;

  Diarization(std::string recording_id, std::vector<Turn> turns)
      : recording_id_(std::move(recording_id)) {
    for (auto &t : turns) {
      if (t.recording_id.empty()) t.recording_id = recording_id_;
      if (t.recording_id != recording_id_)
        throw Error("turn of recording '" + t.recording_id +
                    "' added to diarization of '" + recording_id_ + "'");
      if (!std::isfinite(t.onset) || !std::isfinite(t.duration) ||
          !std::isfinite(t.offset()))
        throw Error("non-finite turn time for speaker '" + t.speaker + "'");
      if (t.onset < 0.0)
        throw Error("negative onset for speaker '" + t.speaker + "'");
      if (t.duration < 0.0)
        throw Error("negative duration for speaker '" + t.speaker + "'");
    }
    normalize(std::move(turns));
  }

  const std::string &recording_id() const { return recording_id_; }
  const std::vector<Turn> &turns() const { return turns_; }
  bool empty() const { return turns_.empty(); }

  /// Distinct speaker labels in lexicographic order.
  std::vector<std::string> speakers() const {
    std::set<std::string> s;
    for (const auto &t : turns_) s.insert(t.speaker);
    return {s.begin(), s.end()};
  }

  /// Sorted disjoint intervals of one speaker.
  std::vector<Interval> intervals(const std::string &speaker) const {
    std::vector<Interval> out;
    for (const auto &t : turns_)
      if (t.speaker == speaker) out.push_back({t.onset, t.offset()});
    return out;
  }

  double end_time() const {
    double e = 0.0;
    for (const auto &t : turns_) e = std::max(e, t.offset());
    return e;
  }

  friend bool operator==(const Diarization &, const Diarization &) = default;

 private:
  void normalize(std::vector<Turn> turns) {
    std::erase_if(turns, [](const Turn &t) { return !(t.duration > 0.0); });
    std::sort(turns.begin(), turns.end(), [](const Turn &a, const Turn &b) {
      return std::tie(a.speaker, a.onset) < std::tie(b.speaker, b.onset);
    });
    for (const auto &t : turns) {
      if (!turns_.empty() && turns_.back().speaker == t.speaker &&
          t.onset <= turns_.back().offset() + kTimeEps) {
        Turn &last = turns_.back();
        double end = std::max(last.offset(), t.offset());
        last.duration = end - last.onset;
      } else {
        turns_.push_back(t);
      }
    }
    std::sort(turns_.begin(), turns_.end(), [](const Turn &a, const Turn &b) {
      return std::tie(a.onset, a.speaker) < std::tie(b.onset, b.speaker);
    });
  }

  std::string recording_id_;
  std::vector<Turn> turns_;
};

inline Diarization make_diarization(const std::string &recording_id,
                                    const std::vector<Segment> &segments) {
  std::vector<Turn> turns;
  turns.reserve(segments.size());
  for (const auto &s : segments)
    turns.push_back({recording_id, s.speaker, s.onset, s.offset - s.onset});
  return Diarization(recording_id, std::move(turns));
}

/// Renames speakers; labels missing from `mapping` are dropped unless
/// `keep_unmapped` is set.
inline Diarization relabel(const Diarization &diar,
                           const std::map<std::string, std::string> &mapping,
                           bool keep_unmapped = true) {
  std::vector<Turn> turns;
  for (auto t : diar.turns()) {
    auto it = mapping.find(t.speaker);
    if (it != mapping.end())
      t.speaker = it->second;
    else if (!keep_unmapped)
      continue;
    turns.push_back(std::move(t));
  }
  return Diarization(diar.recording_id(), std::move(turns));
}

struct FrameGrid {
  double frame_step = 0.010;
  std::size_t total_frames = 0;
  double origin = 0.0;

  double frame_start(std::size_t t) const {
    return origin + static_cast<double>(t) * frame_step;
  }
  double midpoint(std::size_t t) const {
    return origin + (static_cast<double>(t) + 0.5) * frame_step;
  }
  double end_time() const { return frame_start(total_frames); }

  /// Grid long enough to cover [origin, end).
  static FrameGrid covering(double end, double frame_step = 0.010,
                            double origin = 0.0) {
    if (!(frame_step > 0.0)) throw Error("frame_step must be positive");
    double n = std::ceil((end - origin) / frame_step - 1e-9);
    return {frame_step, n > 0 ? static_cast<std::size_t>(n) : 0, origin};
  }

  friend bool operator==(const FrameGrid &, const FrameGrid &) = default;
};

/// T x S matrix of per-frame, per-speaker values in [0,1]; row-major.
class ActivityMatrix {
 public:
  ActivityMatrix() = default;

  ActivityMatrix(FrameGrid grid, std::vector<std::string> speakers)
      : grid_(grid),
        speakers_(std::move(speakers)),
        values_(grid.total_frames * speakers_.size(), 0.0) {
    validate_header();
  }

  ActivityMatrix(FrameGrid grid, std::vector<std::string> speakers,
                 std::vector<double> values)
      : grid_(grid), speakers_(std::move(speakers)), values_(std::move(values)) {
    validate_header();
    if (values_.size() != grid_.total_frames * speakers_.size())
      throw Error("activity matrix size does not match T x S");
    for (double v : values_)
      if (!(v >= 0.0 && v <= 1.0))
        throw Error("activity value outside [0,1]");
  }

  const FrameGrid &grid() const { return grid_; }
  std::size_t frames() const { return grid_.total_frames; }
  std::size_t num_speakers() const { return speakers_.size(); }
  const std::vector<std::string> &speakers() const { return speakers_; }
  std::span<const double> values() const { return values_; }

  double operator()(std::size_t t, std::size_t s) const {
    return values_[t * speakers_.size() + s];
  }

  void set(std::size_t t, std::size_t s, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("activity value outside [0,1]");
    values_[t * speakers_.size() + s] = v;
  }

  std::vector<double> column(std::size_t s) const {
    std::vector<double> col(frames());
    for (std::size_t t = 0; t < frames(); ++t) col[t] = (*this)(t, s);
    return col;
  }

  std::optional<std::size_t> index_of(const std::string &speaker) const {
    auto it = std::find(speakers_.begin(), speakers_.end(), speaker);
    if (it == speakers_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - speakers_.begin());
  }

  bool is_binary() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
  }

  friend bool operator==(const ActivityMatrix &,
                         const ActivityMatrix &) = default;

 private:
  void validate_header() const {
    if (!(grid_.frame_step > 0.0)) throw Error("frame_step must be positive");
    std::set<std::string> seen(speakers_.begin(), speakers_.end());
    if (seen.size() != speakers_.size())
      throw Error("duplicate speaker label in activity matrix");
  }

  FrameGrid grid_;
  std::vector<std::string> speakers_;
  std::vector<double> values_;
};

/// Frame range [first, last) whose midpoints fall inside [onset, offset).
inline std::pair<std::size_t, std::size_t> frames_covering(
    const FrameGrid &grid, double onset, double offset) {
  auto clamp_index = [&](double x) -> std::size_t {
    double c = std::ceil((x - grid.origin) / grid.frame_step - 0.5);
    if (c <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(c), grid.total_frames);
  };
  std::size_t first = clamp_index(onset);
  std::size_t last = clamp_index(offset);
  return {first, std::max(first, last)};
}

/// Entry (t,s) is 1 iff speaker s has a turn covering the midpoint of frame t.
/// Columns follow `speakers` when given, otherwise diar.speakers(); turns of
/// speakers outside the column set are ignored.
inline ActivityMatrix rasterize(const Diarization &diar, const FrameGrid &grid,
                                std::optional<std::vector<std::string>>
                                    speakers = std::nullopt) {
  ActivityMatrix out(grid, speakers ? *speakers : diar.speakers());
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t s = 0; s < out.num_speakers(); ++s)
    column.emplace(out.speakers()[s], s);
  for (const auto &turn : diar.turns()) {
    auto it = column.find(turn.speaker);
    if (it == column.end()) continue;
    auto [first, last] = frames_covering(grid, turn.onset, turn.offset());
    for (std::size_t t = first; t < last; ++t) out.set(t, it->second, 1.0);
  }
  return out;
}

/// Maximal runs of ones per column become turns; runs shorter than
/// `min_duration` seconds are dropped.
inline Diarization segmentize(const ActivityMatrix &act, double min_duration,
                              const std::string &recording_id = "") {
  if (!act.is_binary()) throw Error("segmentize requires a binary matrix");
  const FrameGrid &grid = act.grid();
  std::vector<Turn> turns;
  for (std::size_t s = 0; s < act.num_speakers(); ++s) {
    std::size_t t = 0;
    while (t < act.frames()) {
      if (act(t, s) == 0.0) {
        ++t;
        continue;
      }
      std::size_t start = t;
      while (t < act.frames() && act(t, s) == 1.0) ++t;
      double duration = static_cast<double>(t - start) * grid.frame_step;
      if (duration < min_duration - kTimeEps) continue;
      turns.push_back({recording_id, act.speakers()[s], grid.frame_start(start),
                       duration});
    }
  }
  return Diarization(recording_id, std::move(turns));
}

struct Region {
  double onset = 0.0;
  double offset = 0.0;
  std::vector<std::string> speakers;  // sorted

  double length() const { return offset - onset; }
  bool is_overlap() const { return speakers.size() >= 2; }
};

/// Partition of the speech support into regions with a constant, non-empty
/// set of active speakers.
inline std::vector<Region> overlap_regions(const Diarization &diar) {
  const auto labels = diar.speakers();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);

  struct Event {
    double time;
    int delta;
    std::size_t speaker;
  };
  std::vector<Event> events;
  events.reserve(diar.turns().size() * 2);
  for (const auto &t : diar.turns()) {
    events.push_back({t.onset, +1, index[t.speaker]});
    events.push_back({t.offset(), -1, index[t.speaker]});
  }
  std::sort(events.begin(), events.end(),
            [](const Event &a, const Event &b) { return a.time < b.time; });

  std::vector<int> active(labels.size(), 0);
  std::size_t n_active = 0;
  std::vector<Region> out;
  std::size_t i = 0;
  while (i < events.size()) {
    double now = events[i].time;
    while (i < events.size() && events[i].time == now) {
      int &a = active[events[i].speaker];
      if (a == 0 && events[i].delta > 0) ++n_active;
      a += events[i].delta;
      if (a == 0 && events[i].delta < 0) --n_active;
      ++i;
    }
    if (n_active == 0 || i == events.size()) continue;
    Region r{now, events[i].time, {}};
    for (std::size_t s = 0; s < labels.size(); ++s)
      if (active[s] > 0) r.speakers.push_back(labels[s]);
    out.push_back(std::move(r));
  }
  return out;
}

enum class DurationMode { kTotal, kNonOverlapping };

/// Seconds of speech per speaker. Non-overlapping mode counts only time where
/// the speaker is the sole active speaker. Every speaker gets an entry.
inline std::map<std::string, double> speaking_durations(const Diarization &diar,
                                                        DurationMode mode) {
  std::map<std::string, double> out;
  for (const auto &s : diar.speakers()) out[s] = 0.0;
  if (mode == DurationMode::kTotal) {
    for (const auto &t : diar.turns()) out[t.speaker] += t.duration;
    return out;
  }
  for (const auto &r : overlap_regions(diar))
    if (r.speakers.size() == 1) out[r.speakers.front()] += r.length();
  return out;
}

inline std::vector<Interval> speech_support(const Diarization &diar) {
  std::vector<Interval> xs;
  for (const auto &t : diar.turns()) xs.push_back({t.onset, t.offset()});
  return merge_intervals(std::move(xs));
}

/// Fraction of speaking time during which two or more speakers are active.
inline double overlap_ratio(const Diarization &diar) {
  double speech = 0.0, overlap = 0.0;
  for (const auto &r : overlap_regions(diar)) {
    speech += r.length();
    if (r.is_overlap()) overlap += r.length();
  }
  return speech > 0.0 ? overlap / speech : 0.0;
}

}  // namespace tsvad
