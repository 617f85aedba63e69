// include/tsvad/simulator.hpp

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

// Meeting-style synthetic sessions: ground-truth turns with a controlled
// overlap ratio, embedding-mixture feature streams, word transcripts, and
// perturbed copies of the ground truth that imitate the error profiles of
// real initial diarization systems.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsvad/common.hpp"
#include "tsvad/metrics.hpp"
#include "tsvad/profile.hpp"
#include "tsvad/rttm.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

enum class SilenceStyle { kShort, kLong };

inline constexpr double kMaxTargetOverlap = 0.45;
inline constexpr double kOverlapTolerance = 0.02;
inline constexpr double kLongSilenceScale = 4.0;
inline constexpr double kSecondsPerToken = 0.3;

struct SessionSpec {
  std::string recording_id = "session";
  std::string session_id;  // groups mini-sessions in a manifest
  std::size_t n_speakers = 8;
  double duration = 600.0;
  double target_overlap = 0.0;
  SilenceStyle silence_style = SilenceStyle::kShort;
  std::uint64_t seed = 0;
  std::size_t max_concurrent = 2;  // 2 or 3
  double frame_step = 0.010;
  std::size_t dim = 64;
  double feature_noise = 0.1;
  double hyp_der_target = 0.2;  // for the perturbed hypotheses of batch()

  void validate() const {
    if (n_speakers < 1) throw Error("n_speakers must be at least 1");
    if (!(duration > 0.0)) throw Error("duration must be positive");
    if (!(target_overlap >= 0.0 && target_overlap <= kMaxTargetOverlap))
      throw Error("target overlap " + std::to_string(target_overlap) +
                  " outside [0, 0.45]");
    if (n_speakers == 1 && target_overlap > 0.0)
      throw Error("a single-speaker session cannot have overlap");
    if (max_concurrent < 2 || max_concurrent > 3)
      throw Error("max_concurrent must be 2 or 3");
    if (!(frame_step > 0.0)) throw Error("frame_step must be positive");
    if (dim == 0) throw Error("dim must be positive");
    if (!(hyp_der_target >= 0.0 && hyp_der_target <= 0.6))
      throw Error("hypothesis DER target must be in [0, 0.6]");
  }
};

/// Corpus condition tag: "0S"/"0L" for zero overlap, else the percentage.
inline std::string condition_label(const SessionSpec &spec) {
  long pct = std::lround(spec.target_overlap * 100.0);
  if (pct == 0) return spec.silence_style == SilenceStyle::kLong ? "0L" : "0S";
  return std::to_string(pct);
}

struct SyntheticSession {
  SessionSpec spec;
  Diarization ground_truth;
  FeatureStream feats;
  TranscriptSet transcripts;
  std::map<std::string, std::vector<double>> voices;
  double measured_overlap = 0.0;
};

namespace detail {

inline const std::vector<std::string> &lexicon() {
  static const std::vector<std::string> words = {
      "the",   "of",     "and",   "to",     "a",      "in",    "that",
      "he",    "was",    "it",    "his",    "you",    "with",  "as",
      "for",   "had",    "is",    "her",    "not",    "but",   "at",
      "on",    "she",    "be",    "have",   "by",     "which", "him",
      "they",  "this",   "from",  "all",    "were",   "my",    "we",
      "one",   "said",   "there", "would",  "their",  "when",  "so",
      "could", "little", "time",  "very",   "upon",   "house", "old",
      "night", "water",  "great", "before", "himself"};
  return words;
}

struct PlacedUtterance {
  std::size_t speaker;
  double onset;
  double offset;
  std::uint64_t stream;  // per-utterance random stream, for tokens
};

// Lays out utterances for overlap-probability q. Random draws come from one
// stream per utterance index, so different q reuse the same numbers.
inline std::vector<PlacedUtterance> layout(const SessionSpec &spec,
                                           std::uint64_t attempt_seed,
                                           double q) {
  const std::size_t n = spec.n_speakers;
  const std::size_t m = spec.max_concurrent;
  std::vector<std::size_t> first_round(n);
  std::iota(first_round.begin(), first_round.end(), 0);
  {
    std::mt19937_64 rng(mix_seed(attempt_seed, 0xF1F5));
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(first_round[i - 1], first_round[pick(rng)]);
    }
  }
  const double gap_scale =
      spec.silence_style == SilenceStyle::kLong ? kLongSilenceScale : 1.0;
  std::vector<PlacedUtterance> utts;
  for (std::size_t i = 0;; ++i) {
    std::uint64_t stream = mix_seed(attempt_seed, i + 1);
    std::mt19937_64 rng(stream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double len = 2.0 + 10.0 * unit(rng);
    double coin = unit(rng);
    double frac = 0.15 + 0.75 * unit(rng);
    double gap = (0.1 + 0.9 * unit(rng)) * gap_scale;
    double pick = unit(rng);

    double onset = 0.0;
    if (utts.empty()) {
      onset = gap;
    } else {
      const auto &prev = utts.back();
      if (n >= 2 && coin < q) {
        double o = frac * std::min(prev.offset - prev.onset, len);
        // Keep at most m speakers active: start after utterance i-m+1 ends.
        if (utts.size() >= m) o = std::min(o, prev.offset - utts[utts.size() - m].offset);
        onset = prev.offset - std::max(0.0, o);
      } else {
        onset = prev.offset + gap;
      }
    }
    if (onset >= spec.duration - 1.0) break;
    double offset = std::min(onset + len, spec.duration);

    std::size_t speaker = 0;
    if (i < n) {
      speaker = first_round[i];
    } else {
      std::set<std::size_t> busy;
      std::size_t lookback = std::min(utts.size(), n > m - 1 ? m - 1 : 1);
      for (std::size_t k = 0; k < lookback; ++k)
        busy.insert(utts[utts.size() - 1 - k].speaker);
      std::vector<std::size_t> free;
      for (std::size_t s = 0; s < n; ++s)
        if (!busy.count(s)) free.push_back(s);
      if (free.empty()) free.push_back(utts.back().speaker);
      speaker = free[std::min(free.size() - 1,
                              static_cast<std::size_t>(pick * free.size()))];
    }
    utts.push_back({speaker, onset, offset, stream});
    if (offset >= spec.duration) break;
  }
  return utts;
}

inline Diarization to_diarization(const std::vector<PlacedUtterance> &utts,
                                  const std::vector<std::string> &labels,
                                  const std::string &recording_id) {
  std::vector<Turn> turns;
  for (const auto &u : utts)
    turns.push_back({recording_id, labels[u.speaker], u.onset, u.offset - u.onset});
  return Diarization(recording_id, std::move(turns));
}

inline std::vector<std::string> reader_ids(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0x5EAC));
  std::uniform_int_distribution<int> id(1000, 9999);
  std::set<std::string> used;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string s = std::to_string(id(rng));
    if (used.insert(s).second) out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Generates one session. Overlap is steered by the probability q that the
/// next utterance starts before the current one ends; q is found by
/// bisection and the layout is redrawn (bounded retries) until the measured
/// overlap ratio is within kOverlapTolerance of the target.
inline SyntheticSession generate(const SessionSpec &spec) {
  spec.validate();
  const auto labels = detail::reader_ids(spec.n_speakers, spec.seed);

  std::vector<detail::PlacedUtterance> best;
  double best_overlap = 0.0;
  bool found = false;
  for (std::uint64_t attempt = 0; attempt < 32 && !found; ++attempt) {
    const std::uint64_t aseed = mix_seed(spec.seed, 1000 + attempt);
    auto measure = [&](double q, std::vector<detail::PlacedUtterance> &utts) {
      utts = detail::layout(spec, aseed, q);
      std::set<std::size_t> seen;
      for (const auto &u : utts) seen.insert(u.speaker);
      if (seen.size() != spec.n_speakers) return -1.0;
      return overlap_ratio(detail::to_diarization(utts, labels, spec.recording_id));
    };
    std::vector<detail::PlacedUtterance> utts;
    auto consider = [&](double q) {
      double r = measure(q, utts);
      if (r < 0.0) return r;
      if (std::abs(r - spec.target_overlap) <= kOverlapTolerance &&
          (!found || std::abs(r - spec.target_overlap) <
                         std::abs(best_overlap - spec.target_overlap))) {
        found = true;
        best = utts;
        best_overlap = r;
      }
      return r;
    };
    if (spec.target_overlap == 0.0) {
      consider(0.0);
      continue;
    }
    double lo = 0.0, hi = 1.0;
    if (consider(hi) < spec.target_overlap - kOverlapTolerance) continue;
    for (int step = 0; step < 30; ++step) {
      double mid = 0.5 * (lo + hi);
      double r = consider(mid);
      if (r < 0.0) break;
      if (std::abs(r - spec.target_overlap) <= 0.25 * kOverlapTolerance) break;
      (r < spec.target_overlap ? lo : hi) = mid;
    }
  }
  if (!found)
    throw Error("could not reach target overlap " +
                std::to_string(spec.target_overlap) + " with " +
                std::to_string(spec.n_speakers) + " speakers in " +
                std::to_string(spec.duration) + " s");

  SyntheticSession out;
  out.spec = spec;
  out.ground_truth = detail::to_diarization(best, labels, spec.recording_id);
  out.measured_overlap = best_overlap;
  for (const auto &l : labels) out.voices[l] = synth_embed(l, spec.dim);

  // Transcripts: one lexicon token per 0.3 s of speech.
  const auto &lex = detail::lexicon();
  for (const auto &u : best) {
    std::mt19937_64 rng(mix_seed(u.stream, 0x70C));
    std::uniform_int_distribution<std::size_t> word(0, lex.size() - 1);
    std::size_t count = std::max<std::size_t>(
        1, static_cast<std::size_t>((u.offset - u.onset) / kSecondsPerToken));
    Utterance utt{u.onset, {}};
    for (std::size_t k = 0; k < count; ++k) utt.tokens.push_back(lex[word(rng)]);
    auto &st = out.transcripts[labels[u.speaker]];
    st.recording_id = spec.recording_id;
    st.speaker = labels[u.speaker];
    st.utterances.push_back(std::move(utt));
  }
  for (auto &[spk, st] : out.transcripts)
    std::stable_sort(st.utterances.begin(), st.utterances.end(),
                     [](const Utterance &a, const Utterance &b) {
                       return a.onset < b.onset;
                     });

  // Features: sum of active speakers' voices plus Gaussian noise.
  FrameGrid grid = FrameGrid::covering(spec.duration, spec.frame_step);
  ActivityMatrix act = rasterize(out.ground_truth, grid, labels);
  std::vector<float> frames(grid.total_frames * spec.dim);
  std::mt19937_64 rng(mix_seed(spec.seed, 0xFEA7));
  std::normal_distribution<double> noise(0.0, spec.feature_noise);
  for (std::size_t t = 0; t < grid.total_frames; ++t) {
    float *row = frames.data() + t * spec.dim;
    for (std::size_t d = 0; d < spec.dim; ++d)
      row[d] = static_cast<float>(spec.feature_noise > 0.0 ? noise(rng) : 0.0);
    for (std::size_t s = 0; s < labels.size(); ++s) {
      if (act(t, s) == 0.0) continue;
      const auto &v = out.voices[labels[s]];
      for (std::size_t d = 0; d < spec.dim; ++d)
        row[d] += static_cast<float>(v[d]);
    }
  }
  out.feats = FeatureStream(grid, spec.dim, std::move(frames));
  return out;
}

enum class PerturbStyle { kBoundaryJitter, kMergeSpeakers, kMissOverlap };

inline std::string to_string(PerturbStyle s) {
  switch (s) {
    case PerturbStyle::kBoundaryJitter: return "boundary_jitter";
    case PerturbStyle::kMergeSpeakers: return "merge_speakers";
    case PerturbStyle::kMissOverlap: return "miss_overlap";
  }
  return "?";
}

inline PerturbStyle parse_perturb_style(const std::string &s) {
  if (s == "boundary_jitter") return PerturbStyle::kBoundaryJitter;
  if (s == "merge_speakers") return PerturbStyle::kMergeSpeakers;
  if (s == "miss_overlap") return PerturbStyle::kMissOverlap;
  throw Error("unknown perturbation style '" + s + "'");
}

/// Moves every turn edge by scale * N(0,1), seeded per turn.
inline Diarization jitter_boundaries(const Diarization &d, double scale,
                                     std::uint64_t seed) {
  if (scale == 0.0) return d;
  std::vector<Turn> turns;
  for (std::size_t i = 0; i < d.turns().size(); ++i) {
    Turn t = d.turns()[i];
    std::mt19937_64 rng(mix_seed(seed, i));
    std::normal_distribution<double> z(0.0, 1.0);
    double on = std::max(0.0, t.onset + scale * z(rng));
    double off = t.offset() + scale * z(rng);
    if (off <= on) continue;
    t.onset = on;
    t.duration = off - on;
    turns.push_back(std::move(t));
  }
  return Diarization(d.recording_id(), std::move(turns));
}

/// Keeps a single speaker in every overlap region: the one whose enclosing
/// turn is longest (ties by label), as a single-label clustering system would.
inline Diarization remove_overlap(const Diarization &d) {
  std::vector<Turn> turns;
  for (const auto &r : overlap_regions(d)) {
    std::string keep = r.speakers.front();
    if (r.is_overlap()) {
      double mid = 0.5 * (r.onset + r.offset), longest = -1.0;
      for (const auto &s : r.speakers)
        for (const auto &iv : d.intervals(s))
          if (iv.onset <= mid && mid < iv.offset && iv.length() > longest) {
            longest = iv.length();
            keep = s;
          }
    }
    turns.push_back({d.recording_id(), keep, r.onset, r.length()});
  }
  return Diarization(d.recording_id(), std::move(turns));
}

/// Relabels the lesser-speaking speaker of the most similar voice pair as the
/// other one (a speaker-count underestimate).
inline Diarization merge_closest_speakers(const Diarization &d,
                                          std::size_t dim = 64) {
  auto labels = d.speakers();
  if (labels.size() < 2) return d;
  std::vector<std::vector<double>> voices;
  for (const auto &l : labels) voices.push_back(synth_embed(l, dim));
  double best = -2.0;
  std::size_t a = 0, b = 1;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (double c = cosine(voices[i], voices[j]); c > best) {
        best = c;
        a = i;
        b = j;
      }
  auto total = speaking_durations(d, DurationMode::kTotal);
  if (total[labels[a]] < total[labels[b]]) std::swap(a, b);
  return relabel(d, {{labels[b], labels[a]}});
}

/// Degrades a ground truth toward a target DER. The structural edit of the
/// style (speaker merge, overlap removal) is applied, then boundary jitter is
/// scaled by bisection until DER is within 0.05 of the target. When the
/// structural edit alone overshoots, that result is returned unchanged.
inline Diarization perturb(const Diarization &truth, double der_target,
                           PerturbStyle style, std::uint64_t seed) {
  if (!(der_target >= 0.0 && der_target <= 0.6))
    throw Error("der_target must be in [0, 0.6]");
  if (der_target == 0.0) return truth;
  Diarization base =
      style == PerturbStyle::kMergeSpeakers ? merge_closest_speakers(truth) : truth;
  auto make = [&](double scale) {
    Diarization j = jitter_boundaries(base, scale, seed);
    return style == PerturbStyle::kMissOverlap ? remove_overlap(j) : j;
  };
  auto err = [&](const Diarization &h) { return der(truth, h).der; };

  Diarization best = make(0.0);
  double best_err = err(best);
  if (best_err >= der_target) return best;

  double lo = 0.0, hi = 0.25;
  for (int k = 0; k < 12; ++k) {
    Diarization h = make(hi);
    double e = err(h);
    if (std::abs(e - der_target) < std::abs(best_err - der_target)) {
      best = h;
      best_err = e;
    }
    if (e >= der_target) break;
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 30 && std::abs(best_err - der_target) > 0.005; ++k) {
    double mid = 0.5 * (lo + hi);
    Diarization h = make(mid);
    double e = err(h);
    if (std::abs(e - der_target) < std::abs(best_err - der_target)) {
      best = h;
      best_err = e;
    }
    (e < der_target ? lo : hi) = mid;
  }
  return best;
}

/// The six mini-session conditions of one LibriCSS-style session:
/// 0L, 0S, 10, 20, 30 and 40 % overlap.
inline std::vector<SessionSpec> mini_session_specs(const std::string &session_id,
                                                   const SessionSpec &base) {
  struct Cond {
    double overlap;
    SilenceStyle style;
  };
  const Cond conds[] = {{0.0, SilenceStyle::kLong}, {0.0, SilenceStyle::kShort},
                        {0.10, SilenceStyle::kShort}, {0.20, SilenceStyle::kShort},
                        {0.30, SilenceStyle::kShort}, {0.40, SilenceStyle::kShort}};
  std::vector<SessionSpec> out;
  std::uint64_t k = 0;
  for (const auto &c : conds) {
    SessionSpec s = base;
    s.session_id = session_id;
    s.target_overlap = c.overlap;
    s.silence_style = c.style;
    s.seed = mix_seed(base.seed, k++);
    s.recording_id = session_id + "_" + condition_label(s);
    out.push_back(s);
  }
  return out;
}

inline const PerturbStyle kAllPerturbStyles[] = {PerturbStyle::kBoundaryJitter,
                                                 PerturbStyle::kMissOverlap,
                                                 PerturbStyle::kMergeSpeakers};

/// Generates every spec and writes, per recording:
///   <rec>.ref.rttm, <rec>.<style>.rttm (three styles), <rec>.feats,
///   <rec>.trans.txt
/// plus manifest.json listing artifacts (relative paths), specs and seeds.
/// An empty spec list writes nothing and returns an empty manifest.
inline nlohmann::json batch(const std::vector<SessionSpec> &specs,
                            const std::filesystem::path &out_dir,
                            std::size_t parallelism = 1) {
  nlohmann::json manifest = {{"format", "tsvad-manifest"},
                             {"version", 1},
                             {"sessions", nlohmann::json::array()}};
  if (specs.empty()) return manifest;
  for (const auto &s : specs) s.validate();
  std::set<std::string> ids;
  for (const auto &s : specs)
    if (!ids.insert(s.recording_id).second)
      throw Error("duplicate recording id '" + s.recording_id + "'");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<nlohmann::json> entries(specs.size());
  parallel_for(specs.size(), parallelism, [&](std::size_t i) {
    const SessionSpec &spec = specs[i];
    SyntheticSession sess = generate(spec);
    const std::string rec = spec.recording_id;
    auto path = [&](const std::string &suffix) { return rec + suffix; };
    write_rttm_file(out_dir / path(".ref.rttm"), {{rec, sess.ground_truth}});
    write_features_file(out_dir / path(".feats"), sess.feats);
    {
      std::ofstream t(out_dir / path(".trans.txt"), std::ios::binary);
      if (!t) throw Error("cannot write " + (out_dir / path(".trans.txt")).string());
      t << write_transcripts(sess.transcripts);
    }
    nlohmann::json hyps = nlohmann::json::object();
    std::uint64_t k = 0;
    for (auto style : kAllPerturbStyles) {
      std::uint64_t hseed = mix_seed(spec.seed, 0x4859 + k++);
      Diarization h = perturb(sess.ground_truth, spec.hyp_der_target, style, hseed);
      auto file = path("." + to_string(style) + ".rttm");
      write_rttm_file(out_dir / file, {{rec, h}});
      hyps[to_string(style)] = {{"path", file},
                                {"seed", hseed},
                                {"der", der(sess.ground_truth, h).der}};
    }
    entries[i] = {
        {"recording_id", rec},
        {"condition", condition_label(spec)},
        {"seed", spec.seed},
        {"spec",
         {{"n_speakers", spec.n_speakers},
          {"duration", spec.duration},
          {"target_overlap", spec.target_overlap},
          {"silence_style",
           spec.silence_style == SilenceStyle::kLong ? "long" : "short"},
          {"max_concurrent", spec.max_concurrent},
          {"frame_step", spec.frame_step},
          {"dim", spec.dim},
          {"feature_noise", spec.feature_noise},
          {"hyp_der_target", spec.hyp_der_target}}},
        {"measured_overlap", sess.measured_overlap},
        {"speakers", sess.ground_truth.speakers()},
        {"files",
         {{"reference", path(".ref.rttm")},
          {"features", path(".feats")},
          {"transcripts", path(".trans.txt")},
          {"hypotheses", hyps}}}};
  });

  // Group by session id, keeping first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, nlohmann::json> groups;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::string sid =
        specs[i].session_id.empty() ? specs[i].recording_id : specs[i].session_id;
    if (!groups.count(sid)) {
      order.push_back(sid);
      groups[sid] = {{"session_id", sid},
                     {"mini_sessions", nlohmann::json::array()}};
    }
    groups[sid]["mini_sessions"].push_back(entries[i]);
  }
  for (const auto &sid : order) manifest["sessions"].push_back(groups[sid]);

  std::ofstream m(out_dir / "manifest.json", std::ios::binary);
  if (!m) throw Error("cannot write " + (out_dir / "manifest.json").string());
  m << manifest.dump(2) << "\n";
  return manifest;
}

struct ManifestEntry {
  std::string session_id;
  std::string recording_id;
  std::string condition;
  std::filesystem::path reference;
  std::filesystem::path features;
  std::filesystem::path transcripts;
  std::map<std::string, std::filesystem::path> hypotheses;
};

/// Flattened manifest with paths resolved against the manifest directory.
inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
  auto dir = path.parent_path();
  std::vector<ManifestEntry> out;
  try {
    for (const auto &s : j.at("sessions"))
      for (const auto &m : s.at("mini_sessions")) {
        ManifestEntry e;
        e.session_id = s.at("session_id").get<std::string>();
        e.recording_id = m.at("recording_id").get<std::string>();
        e.condition = m.at("condition").get<std::string>();
        const auto &f = m.at("files");
        e.reference = dir / f.at("reference").get<std::string>();
        e.features = dir / f.at("features").get<std::string>();
        e.transcripts = dir / f.at("transcripts").get<std::string>();
        for (const auto &[style, h] : f.at("hypotheses").items())
          e.hypotheses[style] = dir / h.at("path").get<std::string>();
        out.push_back(std::move(e));
      }
  } catch (const nlohmann::json::exception &e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace tsvad
