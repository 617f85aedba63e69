// include/tsvad/metrics.hpp

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

// Overlap-aware diarization error rate, Jaccard error rate and concatenated
// minimum-permutation WER.
//
// DER is computed with exact interval arithmetic: the timeline is cut at
// every reference, hypothesis and scoring-region boundary, and each
// elementary segment with n_ref reference and n_hyp hypothesis speakers
// contributes
//   missed      max(0, n_ref - n_hyp)
//   false alarm max(0, n_hyp - n_ref)
//   confusion   min(n_ref, n_hyp) - n_correct
// times its duration, where n_correct counts active mapped pairs.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsvad/assignment.hpp"
#include "tsvad/common.hpp"
#include "tsvad/rttm.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

/// Partial bijection between two label sets.
struct Mapping {
  std::vector<std::pair<std::string, std::string>> pairs;  // sorted by .first
  std::vector<std::string> unmatched_a;
  std::vector<std::string> unmatched_b;

  std::optional<std::string> b_for(const std::string &a) const {
    for (const auto &[x, y] : pairs)
      if (x == a) return y;
    return std::nullopt;
  }
  std::optional<std::string> a_for(const std::string &b) const {
    for (const auto &[x, y] : pairs)
      if (y == b) return x;
    return std::nullopt;
  }
  /// a -> b as a map, suitable for relabel() in the b -> a direction when
  /// inverted.
  std::map<std::string, std::string> b_to_a() const {
    std::map<std::string, std::string> m;
    for (const auto &[x, y] : pairs) m[y] = x;
    return m;
  }

  friend bool operator==(const Mapping &, const Mapping &) = default;
};

/// Builds the overlap-maximizing mapping from a |a| x |b| weight matrix.
/// Pairs with no overlap are left unmatched.
inline Mapping mapping_from_overlap(const std::vector<std::string> &a,
                                    const std::vector<std::string> &b,
                                    const CostMatrix<double> &overlap) {
  Mapping m;
  std::vector<bool> b_used(b.size(), false);
  auto assignment = solve_max_assignment(overlap);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto j = assignment.row_to_col[i];
    if (j >= 0 && overlap[i][static_cast<std::size_t>(j)] > kTimeEps) {
      m.pairs.emplace_back(a[i], b[static_cast<std::size_t>(j)]);
      b_used[static_cast<std::size_t>(j)] = true;
    } else {
      m.unmatched_a.push_back(a[i]);
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!b_used[j]) m.unmatched_b.push_back(b[j]);
  return m;
}

namespace detail {

// One piece of the common refinement of reference and hypothesis timelines.
struct ScoredPiece {
  double duration;
  std::vector<std::uint16_t> ref;  // indices of active reference speakers
  std::vector<std::uint16_t> hyp;
};

inline std::vector<Interval> subtract_intervals(
    const std::vector<Interval> &a, const std::vector<Interval> &b) {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (auto x : a) {
    while (j < b.size() && b[j].offset <= x.onset) ++j;
    std::size_t k = j;
    double cur = x.onset;
    while (k < b.size() && b[k].onset < x.offset) {
      if (b[k].onset > cur) out.push_back({cur, b[k].onset});
      cur = std::max(cur, b[k].offset);
      ++k;
    }
    if (cur < x.offset) out.push_back({cur, x.offset});
  }
  return out;
}

/// Sweeps ref and hyp turns restricted to `scored` (sorted disjoint).
inline std::vector<ScoredPiece> refine(
    const Diarization &ref, const std::vector<std::string> &ref_labels,
    const Diarization &hyp, const std::vector<std::string> &hyp_labels,
    const std::vector<Interval> &scored) {
  enum Kind : int { kRef = 0, kHyp = 1, kScore = 2 };
  struct Event {
    double time;
    int delta;
    Kind kind;
    std::uint16_t index;
  };
  std::unordered_map<std::string, std::uint16_t> ri, hi;
  for (std::size_t i = 0; i < ref_labels.size(); ++i)
    ri.emplace(ref_labels[i], static_cast<std::uint16_t>(i));
  for (std::size_t i = 0; i < hyp_labels.size(); ++i)
    hi.emplace(hyp_labels[i], static_cast<std::uint16_t>(i));

  std::vector<Event> ev;
  ev.reserve(2 * (ref.turns().size() + hyp.turns().size() + scored.size()));
  for (const auto &t : ref.turns()) {
    ev.push_back({t.onset, +1, kRef, ri[t.speaker]});
    ev.push_back({t.offset(), -1, kRef, ri[t.speaker]});
  }
  for (const auto &t : hyp.turns()) {
    ev.push_back({t.onset, +1, kHyp, hi[t.speaker]});
    ev.push_back({t.offset(), -1, kHyp, hi[t.speaker]});
  }
  for (const auto &s : scored) {
    ev.push_back({s.onset, +1, kScore, 0});
    ev.push_back({s.offset, -1, kScore, 0});
  }
  std::sort(ev.begin(), ev.end(),
            [](const Event &a, const Event &b) { return a.time < b.time; });

  std::vector<int> ref_on(ref_labels.size(), 0), hyp_on(hyp_labels.size(), 0);
  int scoring = 0;
  std::vector<ScoredPiece> pieces;
  std::size_t i = 0;
  while (i < ev.size()) {
    double now = ev[i].time;
    while (i < ev.size() && ev[i].time == now) {
      const Event &e = ev[i++];
      if (e.kind == kRef)
        ref_on[e.index] += e.delta;
      else if (e.kind == kHyp)
        hyp_on[e.index] += e.delta;
      else
        scoring += e.delta;
    }
    if (i == ev.size() || scoring <= 0) continue;
    ScoredPiece p{ev[i].time - now, {}, {}};
    for (std::size_t r = 0; r < ref_on.size(); ++r)
      if (ref_on[r] > 0) p.ref.push_back(static_cast<std::uint16_t>(r));
    for (std::size_t h = 0; h < hyp_on.size(); ++h)
      if (hyp_on[h] > 0) p.hyp.push_back(static_cast<std::uint16_t>(h));
    if (!p.ref.empty() || !p.hyp.empty()) pieces.push_back(std::move(p));
  }
  return pieces;
}

inline CostMatrix<double> overlap_matrix(const std::vector<ScoredPiece> &pieces,
                                         std::size_t n_ref, std::size_t n_hyp) {
  CostMatrix<double> m(n_ref, std::vector<double>(n_hyp, 0.0));
  for (const auto &p : pieces)
    for (auto r : p.ref)
      for (auto h : p.hyp) m[r][h] += p.duration;
  return m;
}

inline std::vector<Interval> everything(const Diarization &a,
                                        const Diarization &b) {
  double end = std::max(a.end_time(), b.end_time());
  return {{0.0, end + 1.0}};
}

}  // namespace detail

/// Maps reference to hypothesis speakers maximizing total overlap duration.
inline Mapping optimal_speaker_mapping(const Diarization &ref,
                                       const Diarization &hyp) {
  auto rl = ref.speakers(), hl = hyp.speakers();
  auto pieces =
      detail::refine(ref, rl, hyp, hl, detail::everything(ref, hyp));
  return mapping_from_overlap(rl, hl,
                              detail::overlap_matrix(pieces, rl.size(), hl.size()));
}

struct DerReport {
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double total_ref_speech = 0.0;
  double der = 0.0;  // +inf when there is no reference speech but errors
  double collar = 0.0;
  Mapping mapping;

  double errors() const { return missed + false_alarm + confusion; }
};

/// Accumulates several recordings into one pooled report (time-weighted).
inline DerReport pool_der(const std::vector<DerReport> &reports) {
  DerReport out;
  for (const auto &r : reports) {
    out.missed += r.missed;
    out.false_alarm += r.false_alarm;
    out.confusion += r.confusion;
    out.total_ref_speech += r.total_ref_speech;
    out.collar = r.collar;
  }
  if (out.total_ref_speech > 0.0)
    out.der = out.errors() / out.total_ref_speech;
  else
    out.der = out.errors() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return out;
}

/// Diarization error rate. `uem` restricts scoring to the given regions;
/// `collar` seconds on either side of every reference boundary are excluded.
inline DerReport der(const Diarization &ref, const Diarization &hyp,
                     double collar = 0.0,
                     const std::optional<std::vector<Interval>> &uem =
                         std::nullopt) {
  if (collar < 0.0) throw Error("collar must be non-negative");
  std::vector<Interval> scored =
      uem ? merge_intervals(*uem) : detail::everything(ref, hyp);
  if (collar > 0.0) {
    std::vector<Interval> excluded;
    for (const auto &t : ref.turns()) {
      excluded.push_back({t.onset - collar, t.onset + collar});
      excluded.push_back({t.offset() - collar, t.offset() + collar});
    }
    scored = detail::subtract_intervals(scored, merge_intervals(excluded));
  }

  auto rl = ref.speakers(), hl = hyp.speakers();
  auto pieces = detail::refine(ref, rl, hyp, hl, scored);
  DerReport rep;
  rep.collar = collar;
  rep.mapping = mapping_from_overlap(
      rl, hl, detail::overlap_matrix(pieces, rl.size(), hl.size()));

  std::vector<std::ptrdiff_t> ref_to_hyp(rl.size(), -1);
  for (const auto &[r, h] : rep.mapping.pairs) {
    auto ri = std::lower_bound(rl.begin(), rl.end(), r) - rl.begin();
    auto hi = std::lower_bound(hl.begin(), hl.end(), h) - hl.begin();
    ref_to_hyp[static_cast<std::size_t>(ri)] = hi;
  }
  for (const auto &p : pieces) {
    double nr = static_cast<double>(p.ref.size());
    double nh = static_cast<double>(p.hyp.size());
    double correct = 0.0;
    for (auto r : p.ref) {
      auto h = ref_to_hyp[r];
      if (h >= 0 && std::binary_search(p.hyp.begin(), p.hyp.end(),
                                       static_cast<std::uint16_t>(h)))
        correct += 1.0;
    }
    rep.total_ref_speech += p.duration * nr;
    rep.missed += p.duration * std::max(0.0, nr - nh);
    rep.false_alarm += p.duration * std::max(0.0, nh - nr);
    rep.confusion += p.duration * (std::min(nr, nh) - correct);
  }
  if (rep.total_ref_speech > 0.0)
    rep.der = rep.errors() / rep.total_ref_speech;
  else
    rep.der = rep.errors() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return rep;
}

struct JerReport {
  std::map<std::string, double> per_speaker_jer;
  double jer = 0.0;
  Mapping mapping;
};

/// Jaccard error rate: mean over reference speakers of 1 - |r n h| / |r u h|
/// under the overlap-maximizing mapping; unmapped reference speakers score 1.
inline JerReport jer(const Diarization &ref, const Diarization &hyp) {
  auto rl = ref.speakers(), hl = hyp.speakers();
  auto pieces =
      detail::refine(ref, rl, hyp, hl, detail::everything(ref, hyp));
  auto overlap = detail::overlap_matrix(pieces, rl.size(), hl.size());
  JerReport rep;
  rep.mapping = mapping_from_overlap(rl, hl, overlap);
  auto ref_total = speaking_durations(ref, DurationMode::kTotal);
  auto hyp_total = speaking_durations(hyp, DurationMode::kTotal);
  for (std::size_t r = 0; r < rl.size(); ++r) {
    double value = 1.0;
    if (auto h = rep.mapping.b_for(rl[r])) {
      auto hi = static_cast<std::size_t>(
          std::lower_bound(hl.begin(), hl.end(), *h) - hl.begin());
      double inter = overlap[r][hi];
      double uni = ref_total[rl[r]] + hyp_total[*h] - inter;
      value = uni > 0.0 ? std::clamp(1.0 - inter / uni, 0.0, 1.0) : 0.0;
    }
    rep.per_speaker_jer[rl[r]] = value;
    rep.jer += value;
  }
  if (!rl.empty())
    rep.jer /= static_cast<double>(rl.size());
  else
    rep.jer = hyp.empty() ? 0.0 : 1.0;
  return rep;
}

struct EditCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;

  std::int64_t total() const { return substitutions + deletions + insertions; }
  EditCounts &operator+=(const EditCounts &o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    return *this;
  }
  friend bool operator==(const EditCounts &, const EditCounts &) = default;
};

/// Word-level Levenshtein alignment with unit costs; the breakdown follows
/// one minimal alignment (substitution preferred over deletion over
/// insertion when tied).
inline EditCounts word_edit_distance(const std::vector<std::string> &ref,
                                     const std::vector<std::string> &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::int64_t> d((n + 1) * (m + 1));
  auto D = [&](std::size_t i, std::size_t j) -> std::int64_t & {
    return d[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) D(i, 0) = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) D(0, j) = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      D(i, j) = std::min({D(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                          D(i - 1, j) + 1, D(i, j - 1) + 1});
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        D(i, j) == D(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && D(i, j) == D(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

/// ASCII case-fold and punctuation removal. May return an empty string.
inline std::string normalize_token(const std::string &token) {
  std::string out;
  out.reserve(token.size());
  for (unsigned char c : token) {
    if (c < 128 && std::ispunct(c)) continue;
    out.push_back(c < 128 ? static_cast<char>(std::tolower(c))
                          : static_cast<char>(c));
  }
  return out;
}

/// All of a speaker's words in onset order, normalized.
inline std::vector<std::string> concatenate_words(const SpeakerTranscript &st) {
  auto utts = st.utterances;
  std::stable_sort(utts.begin(), utts.end(),
                   [](const Utterance &a, const Utterance &b) {
                     return a.onset < b.onset;
                   });
  std::vector<std::string> words;
  for (const auto &u : utts)
    for (const auto &tok : u.tokens)
      if (auto w = normalize_token(tok); !w.empty()) words.push_back(std::move(w));
  return words;
}

struct CpWerReport {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_words = 0;
  double cpwer = 0.0;
  Mapping permutation;  // (ref speaker, hyp speaker)

  std::int64_t errors() const { return substitutions + deletions + insertions; }
};

/// Concatenated minimum-permutation WER. Unmatched reference streams count
/// as deletions, unmatched hypothesis streams as insertions.
inline CpWerReport cpwer(const TranscriptSet &ref, const TranscriptSet &hyp) {
  std::vector<std::string> rl, hl;
  std::vector<std::vector<std::string>> rw, hw;
  for (const auto &[spk, st] : ref) {
    rl.push_back(spk);
    rw.push_back(concatenate_words(st));
  }
  for (const auto &[spk, st] : hyp) {
    hl.push_back(spk);
    hw.push_back(concatenate_words(st));
  }
  CpWerReport rep;
  for (const auto &w : rw) rep.ref_words += static_cast<std::int64_t>(w.size());
  if (rep.ref_words == 0) throw Error("cpWER undefined: reference has no words");

  // (R+H) x (H+R) matrix: real pairs, plus "leave unmatched" slots.
  const std::size_t R = rl.size(), H = hl.size(), n = R + H;
  CostMatrix<std::int64_t> cost(n, std::vector<std::int64_t>(n, 0));
  std::vector<std::vector<EditCounts>> pair(R, std::vector<EditCounts>(H));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t h = 0; h < H; ++h) {
      pair[r][h] = word_edit_distance(rw[r], hw[h]);
      cost[r][h] = pair[r][h].total();
    }
    for (std::size_t k = H; k < n; ++k)
      cost[r][k] = static_cast<std::int64_t>(rw[r].size());
  }
  for (std::size_t k = R; k < n; ++k)
    for (std::size_t h = 0; h < H; ++h)
      cost[k][h] = static_cast<std::int64_t>(hw[h].size());

  auto a = solve_assignment(cost);
  EditCounts total;
  std::vector<bool> hyp_used(H, false);
  for (std::size_t r = 0; r < R; ++r) {
    auto c = a.row_to_col[r];
    if (c >= 0 && static_cast<std::size_t>(c) < H) {
      total += pair[r][static_cast<std::size_t>(c)];
      hyp_used[static_cast<std::size_t>(c)] = true;
      rep.permutation.pairs.emplace_back(rl[r], hl[static_cast<std::size_t>(c)]);
    } else {
      total.deletions += static_cast<std::int64_t>(rw[r].size());
      rep.permutation.unmatched_a.push_back(rl[r]);
    }
  }
  for (std::size_t h = 0; h < H; ++h) {
    if (hyp_used[h]) continue;
    total.insertions += static_cast<std::int64_t>(hw[h].size());
    rep.permutation.unmatched_b.push_back(hl[h]);
  }
  rep.substitutions = total.substitutions;
  rep.deletions = total.deletions;
  rep.insertions = total.insertions;
  rep.cpwer = static_cast<double>(rep.errors()) /
              static_cast<double>(rep.ref_words);
  return rep;
}

}  // namespace tsvad
