// include/tsvad/fusion.hpp

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

// Combination of several diarization systems by weighted frame voting.
//
// Every system is first mapped into the label space of the anchor (the first
// hypothesis) by optimal assignment on pairwise overlap duration. The fused
// weight of global speaker s at frame i is
//
//   W_s(i) = sum_n g_n * VAD_n,s(i),   sum_n g_n = 1,
//
// where VAD_n,s is system n's binarized activity for s (zero when system n
// has no speaker mapped to s).

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsvad/common.hpp"
#include "tsvad/metrics.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

struct SystemHypothesis {
  std::string system_id;
  Diarization diar;
  double weight = 1.0;
};

/// Fused per-frame weights; same shape and value range as an activity matrix.
using FusedActivity = ActivityMatrix;

struct AlignedLabels {
  std::vector<std::string> speakers;  // global label list
  // One mapping per system: pairs (global label, system label).
  std::vector<Mapping> mappings;
};

inline AlignedLabels align_labels(const std::vector<SystemHypothesis> &hyps) {
  if (hyps.empty()) throw Error("align_labels needs at least one hypothesis");
  const auto &anchor = hyps.front().diar;
  for (const auto &h : hyps)
    if (h.diar.recording_id() != anchor.recording_id())
      throw Error("hypotheses cover different recordings: '" +
                  anchor.recording_id() + "' vs '" + h.diar.recording_id() +
                  "'");

  AlignedLabels out;
  out.speakers = anchor.speakers();
  Mapping identity;
  for (const auto &s : out.speakers) identity.pairs.emplace_back(s, s);
  out.mappings.push_back(identity);

  for (std::size_t n = 1; n < hyps.size(); ++n) {
    Mapping m = optimal_speaker_mapping(anchor, hyps[n].diar);
    Mapping global;
    global.pairs = m.pairs;
    for (const auto &local : m.unmatched_b) {
      std::string label = hyps[n].system_id + ":" + local;
      out.speakers.push_back(label);
      global.pairs.emplace_back(label, local);
    }
    for (const auto &s : out.speakers)
      if (!global.b_for(s)) global.unmatched_a.push_back(s);
    out.mappings.push_back(std::move(global));
  }
  return out;
}

/// Per-frame weighted vote. Weights are normalized to sum to one.
inline FusedActivity fuse(const std::vector<SystemHypothesis> &hyps,
                          const FrameGrid &grid) {
  if (hyps.empty()) throw Error("fuse needs at least one hypothesis");
  double total_weight = 0.0;
  for (const auto &h : hyps) {
    if (!(h.weight >= 0.0)) throw Error("system weight must be non-negative");
    total_weight += h.weight;
  }
  if (!(total_weight > 0.0)) throw Error("system weights sum to zero");

  AlignedLabels aligned = align_labels(hyps);
  const std::size_t S = aligned.speakers.size();
  std::vector<double> w(grid.total_frames * S, 0.0);
  for (std::size_t n = 0; n < hyps.size(); ++n) {
    const double g = hyps[n].weight / total_weight;
    Diarization global = relabel(hyps[n].diar, aligned.mappings[n].b_to_a(),
                                 /*keep_unmapped=*/false);
    ActivityMatrix vad = rasterize(global, grid, aligned.speakers);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += g * vad.values()[i];
  }
  for (double &x : w) x = std::clamp(x, 0.0, 1.0);
  return FusedActivity(grid, aligned.speakers, std::move(w));
}

/// Binary mask with entry 1 where W >= threshold. With `sole_speaker`, frames
/// where two or more speakers pass the threshold are cleared for everyone.
inline ActivityMatrix select_mask(const FusedActivity &fused, double threshold,
                                  bool sole_speaker) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error("mask threshold must be in (0,1]");
  ActivityMatrix mask(fused.grid(), fused.speakers());
  const std::size_t S = fused.num_speakers();
  for (std::size_t t = 0; t < fused.frames(); ++t) {
    std::size_t n_on = 0;
    for (std::size_t s = 0; s < S; ++s)
      if (fused(t, s) >= threshold - 1e-12) ++n_on;
    if (n_on == 0 || (sole_speaker && n_on >= 2)) continue;
    for (std::size_t s = 0; s < S; ++s)
      if (fused(t, s) >= threshold - 1e-12) mask.set(t, s, 1.0);
  }
  return mask;
}

}  // namespace tsvad
