// include/tsvad/harness.hpp

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

// Iterative target-speaker decoding with a fixed-capacity posterior model.
//
//   init hypothesis
//     -> profiles from sole-speaker frames
//     -> arrange to exactly N inputs (keep the N speakers with the most
//        non-overlapped speech, or pad with pool dummies)
//     -> model.infer  (T x N posteriors)
//     -> median filter, threshold, drop dummy columns, segment
//     -> next hypothesis
//
// The model can only confirm or drop the speakers it is given; it never adds
// one.

#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tsvad/common.hpp"
#include "tsvad/fusion.hpp"
#include "tsvad/profile.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

struct DecodeConfig {
  std::size_t iterations = 2;
  double binarize_threshold = 0.5;
  std::size_t median_filter_frames = 11;  // odd
  double min_turn = 0.2;                  // seconds
  std::size_t capacity = 8;
  std::size_t profile_dim = 64;
  std::uint64_t seed = 0;  // dummy draw

  void validate() const {
    if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
      throw Error("binarize_threshold must be in (0,1)");
    if (median_filter_frames % 2 == 0)
      throw Error("median_filter_frames must be odd");
    if (min_turn < 0.0) throw Error("min_turn must be non-negative");
    if (capacity == 0) throw Error("capacity must be positive");
    if (profile_dim == 0) throw Error("profile_dim must be positive");
  }
};

/// Flat "key = value" config with optional [section] headers. Keys inside a
/// section are returned as "section.key". '#' starts a comment.
inline std::map<std::string, std::string> parse_key_value_config(
    std::istream &in) {
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Applies "decode.*" (or bare) keys to `cfg`; unknown decode keys throw.
/// Keys of other sections are ignored.
inline DecodeConfig apply_decode_config(
    const std::map<std::string, std::string> &kv, DecodeConfig cfg) {
  auto as_size = [](const std::string &k, const std::string &v) {
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
      x = std::stoull(v, &pos);
    } catch (const std::exception &) {
      pos = 0;
    }
    if (pos != v.size() || v.empty() || v.front() == '-')
      throw Error("config key '" + k + "' expects a non-negative integer");
    return x;
  };
  auto as_double = [](const std::string &k, const std::string &v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception &) {
      pos = 0;
    }
    if (pos != v.size() || v.empty())
      throw Error("config key '" + k + "' expects a number");
    return x;
  };
  for (const auto &[full, value] : kv) {
    std::string key = full;
    if (key.rfind("decode.", 0) == 0)
      key = key.substr(7);
    else if (key.find('.') != std::string::npos)
      continue;
    if (key == "iterations")
      cfg.iterations = as_size(full, value);
    else if (key == "binarize_threshold")
      cfg.binarize_threshold = as_double(full, value);
    else if (key == "median_filter_frames")
      cfg.median_filter_frames = as_size(full, value);
    else if (key == "min_turn")
      cfg.min_turn = as_double(full, value);
    else if (key == "capacity")
      cfg.capacity = as_size(full, value);
    else if (key == "profile_dim")
      cfg.profile_dim = as_size(full, value);
    else if (key == "seed")
      cfg.seed = as_size(full, value);
    else
      throw Error("unknown decode config key '" + full + "'");
  }
  cfg.validate();
  return cfg;
}

/// Contract for a target-speaker posterior model: N profiles in, T x N
/// activity posteriors out, column k belonging to profile k.
class PosteriorModel {
 public:
  virtual ~PosteriorModel() = default;
  virtual std::size_t capacity() const = 0;
  virtual std::size_t profile_dim() const = 0;
  // Models that cannot serve concurrent infer() calls return false; the
  // batch driver then serializes their calls.
  virtual bool concurrent_safe() const { return true; }
  virtual ActivityMatrix infer(const FeatureStream &feats,
                               std::span<const SpeakerProfile> profiles) const = 0;
};

inline std::vector<std::string> node_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("node" + std::to_string(k));
  return out;
}

struct OracleNoisyOptions {
  std::size_t capacity = 8;
  std::size_t profile_dim = 64;
  double match_threshold = 0.7;  // cosine
  double flip_prob = 0.0;
  std::size_t smear_frames = 0;
  std::uint64_t seed = 0;
};

/// Test double for a trained network. Each input profile is matched to the
/// true speaker with the most similar voice; if the cosine reaches
/// match_threshold the column reproduces that speaker's reference activity
/// (boundaries moved by up to smear_frames, each frame flipped with
/// probability flip_prob), otherwise the column is silence plus flips.
/// Noise is seeded per (seed, matched speaker), so infer() is stateless.
class OracleNoisyModel : public PosteriorModel {
 public:
  OracleNoisyModel(Diarization ground_truth,
                   std::map<std::string, std::vector<double>> voices,
                   OracleNoisyOptions opts)
      : truth_(std::move(ground_truth)), voices_(std::move(voices)), opts_(opts) {
    if (opts_.flip_prob < 0.0 || opts_.flip_prob > 1.0)
      throw Error("flip_prob must be in [0,1]");
  }

  /// Voices generated with synth_embed from the reference labels.
  static OracleNoisyModel from_ground_truth(Diarization ground_truth,
                                            OracleNoisyOptions opts) {
    std::map<std::string, std::vector<double>> voices;
    for (const auto &s : ground_truth.speakers())
      voices[s] = synth_embed(s, opts.profile_dim);
    return OracleNoisyModel(std::move(ground_truth), std::move(voices), opts);
  }

  std::size_t capacity() const override { return opts_.capacity; }
  std::size_t profile_dim() const override { return opts_.profile_dim; }

  /// Best-matching true speaker, or empty when below threshold.
  std::string match(const SpeakerProfile &p) const {
    std::string best;
    double best_cos = opts_.match_threshold;
    for (const auto &[label, voice] : voices_) {
      double c = cosine(p.vector, voice);
      if (c >= best_cos) {
        best_cos = c;
        best = label;
      }
    }
    return best;
  }

  ActivityMatrix infer(const FeatureStream &feats,
                       std::span<const SpeakerProfile> profiles) const override {
    if (profiles.size() != opts_.capacity)
      throw Error("model expects exactly " + std::to_string(opts_.capacity) +
                  " profiles, got " + std::to_string(profiles.size()));
    const FrameGrid &grid = feats.grid();
    ActivityMatrix out(grid, node_labels(profiles.size()));
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      std::string who = match(profiles[k]);
      std::uint64_t col_seed =
          mix_seed(opts_.seed, stable_hash(who.empty() ? "~" + profiles[k].label
                                                       : who));
      std::mt19937_64 rng(col_seed);
      std::vector<double> col(grid.total_frames, 0.0);
      if (!who.empty()) {
        std::uniform_int_distribution<long> shift(
            -static_cast<long>(opts_.smear_frames),
            static_cast<long>(opts_.smear_frames));
        for (const auto &iv : truth_.intervals(who)) {
          auto [first, last] = frames_covering(grid, iv.onset, iv.offset);
          long a = static_cast<long>(first), b = static_cast<long>(last);
          if (opts_.smear_frames > 0) {
            a += shift(rng);
            b += shift(rng);
          }
          a = std::clamp(a, 0L, static_cast<long>(grid.total_frames));
          b = std::clamp(b, 0L, static_cast<long>(grid.total_frames));
          for (long t = a; t < b; ++t) col[static_cast<std::size_t>(t)] = 1.0;
        }
      }
      if (opts_.flip_prob > 0.0) {
        std::bernoulli_distribution flip(opts_.flip_prob);
        for (auto &v : col)
          if (flip(rng)) v = 1.0 - v;
      }
      for (std::size_t t = 0; t < col.size(); ++t)
        if (col[t] != 0.0) out.set(t, k, col[t]);
    }
    return out;
  }

 private:
  Diarization truth_;
  std::map<std::string, std::vector<double>> voices_;
  OracleNoisyOptions opts_;
};

/// Serializes infer() of a model that is not safe for concurrent use.
class SerializedModel : public PosteriorModel {
 public:
  explicit SerializedModel(const PosteriorModel &inner) : inner_(inner) {}
  std::size_t capacity() const override { return inner_.capacity(); }
  std::size_t profile_dim() const override { return inner_.profile_dim(); }
  ActivityMatrix infer(const FeatureStream &feats,
                       std::span<const SpeakerProfile> profiles) const override {
    std::lock_guard lock(mu_);
    return inner_.infer(feats, profiles);
  }

 private:
  const PosteriorModel &inner_;
  mutable std::mutex mu_;
};

/// Number of speakers with speech in the initial hypothesis.
inline std::size_t estimate_speaker_count(const Diarization &init) {
  std::size_t n = 0;
  for (const auto &[spk, dur] : speaking_durations(init, DurationMode::kTotal))
    if (dur > 0.0) ++n;
  return n;
}

struct Arrangement {
  std::vector<SpeakerProfile> profiles;     // exactly N
  std::vector<std::string> kept_labels;     // labels of the real profiles
  std::vector<std::size_t> dummy_indices;   // positions of pool dummies
};

/// Fits the estimated profiles to exactly `capacity` model inputs. With more
/// speakers than capacity, the ones with the longest non-overlapped speech in
/// `init` are kept (ties: longer total speech, then label order) in their
/// original order; with fewer, pool dummies fill the remaining slots.
inline Arrangement arrange_profiles(const std::vector<SpeakerProfile> &estimated,
                                    std::size_t capacity, const ProfilePool &pool,
                                    const Diarization &init, std::uint64_t seed) {
  Arrangement out;
  std::vector<std::size_t> keep(estimated.size());
  std::iota(keep.begin(), keep.end(), 0);
  if (estimated.size() > capacity) {
    auto solo = speaking_durations(init, DurationMode::kNonOverlapping);
    auto total = speaking_durations(init, DurationMode::kTotal);
    auto get = [](const std::map<std::string, double> &m, const std::string &k) {
      auto it = m.find(k);
      return it == m.end() ? 0.0 : it->second;
    };
    std::vector<std::size_t> ranked = keep;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      const auto &la = estimated[a].label, &lb = estimated[b].label;
      double sa = get(solo, la), sb = get(solo, lb);
      if (sa != sb) return sa > sb;
      double ta = get(total, la), tb = get(total, lb);
      if (ta != tb) return ta > tb;
      return la < lb;
    });
    ranked.resize(capacity);
    std::sort(ranked.begin(), ranked.end());
    keep = ranked;
  }
  for (auto i : keep) {
    out.profiles.push_back(estimated[i]);
    out.kept_labels.push_back(estimated[i].label);
  }
  if (out.profiles.size() < capacity) {
    std::size_t need = capacity - out.profiles.size();
    for (auto &d : draw_dummies(pool, need, seed)) {
      out.dummy_indices.push_back(out.profiles.size());
      out.profiles.push_back(std::move(d));
    }
  }
  return out;
}

/// Running median with edge replication; window must be odd.
inline std::vector<double> median_filter(std::span<const double> x,
                                         std::size_t window) {
  if (window % 2 == 0) throw Error("median window must be odd");
  if (window <= 1 || x.empty()) return {x.begin(), x.end()};
  const long half = static_cast<long>(window / 2);
  const long n = static_cast<long>(x.size());
  std::vector<double> out(x.size()), buf(window);
  for (long t = 0; t < n; ++t) {
    for (long k = -half; k <= half; ++k)
      buf[static_cast<std::size_t>(k + half)] =
          x[static_cast<std::size_t>(std::clamp(t + k, 0L, n - 1))];
    auto mid = buf.begin() + half;
    std::nth_element(buf.begin(), mid, buf.end());
    out[static_cast<std::size_t>(t)] = *mid;
  }
  return out;
}

/// Raw T x N posteriors to a diarization: median filter, threshold, drop the
/// dummy columns, segment with cfg.min_turn and label the remaining columns
/// with kept_labels (in column order).
inline Diarization postprocess(const ActivityMatrix &raw,
                               const std::vector<std::size_t> &dummy_indices,
                               const std::vector<std::string> &kept_labels,
                               const DecodeConfig &cfg,
                               const std::string &recording_id = "") {
  std::set<std::size_t> dummies(dummy_indices.begin(), dummy_indices.end());
  std::vector<std::size_t> real;
  for (std::size_t k = 0; k < raw.num_speakers(); ++k)
    if (!dummies.count(k)) real.push_back(k);
  if (real.size() != kept_labels.size())
    throw Error("kept_labels does not match the number of non-dummy columns");

  ActivityMatrix bin(raw.grid(), kept_labels);
  for (std::size_t j = 0; j < real.size(); ++j) {
    auto col = median_filter(raw.column(real[j]), cfg.median_filter_frames);
    for (std::size_t t = 0; t < col.size(); ++t)
      if (col[t] >= cfg.binarize_threshold) bin.set(t, j, 1.0);
  }
  return segmentize(bin, cfg.min_turn, recording_id);
}

struct DecodeResult {
  Diarization final;
  std::vector<Diarization> iterations;  // hypothesis after each pass
  std::vector<std::string> warnings;
};

/// Per-speaker profiles from sole-speaker frames of `hyp`, falling back to
/// all of the speaker's frames; speakers with no frames at all are skipped.
inline std::vector<SpeakerProfile> estimate_profiles(
    const FeatureStream &feats, const Diarization &hyp, std::size_t dim,
    std::vector<std::string> *warnings = nullptr) {
  ActivityMatrix act = rasterize(hyp, feats.grid());
  ActivityMatrix sole = select_mask(act, 1.0, /*sole_speaker=*/true);
  std::vector<SpeakerProfile> out;
  for (std::size_t s = 0; s < act.num_speakers(); ++s) {
    const std::string &label = act.speakers()[s];
    auto w = sole.column(s);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
      w = act.column(s);
      if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
        if (warnings)
          warnings->push_back("speaker '" + label +
                              "' has no frames; dropped for this iteration");
        continue;
      }
    }
    out.push_back(estimate_profile(feats, w, label, dim));
  }
  return out;
}

inline DecodeResult decode(const FeatureStream &feats, const Diarization &init,
                           const PosteriorModel &model, const ProfilePool &pool,
                           const DecodeConfig &cfg) {
  cfg.validate();
  if (model.capacity() != cfg.capacity)
    throw Error("model capacity " + std::to_string(model.capacity()) +
                " does not match configured capacity " +
                std::to_string(cfg.capacity));
  DecodeResult res;
  Diarization hyp = init;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    auto profiles =
        estimate_profiles(feats, hyp, model.profile_dim(), &res.warnings);
    Arrangement arr = arrange_profiles(profiles, cfg.capacity, pool, hyp, cfg.seed);
    ActivityMatrix raw = model.infer(feats, arr.profiles);
    hyp = postprocess(raw, arr.dummy_indices, arr.kept_labels, cfg,
                      init.recording_id());
    res.iterations.push_back(hyp);
  }
  res.final = hyp;
  return res;
}

/// Initial hypothesis from fused system weights: frames where a speaker's
/// fused weight reaches `threshold` (overlaps kept), segmented without a
/// minimum duration.
inline Diarization hypothesis_from_fused(const FusedActivity &fused,
                                         double threshold,
                                         const std::string &recording_id) {
  return segmentize(select_mask(fused, threshold, /*sole_speaker=*/false), 0.0,
                    recording_id);
}

struct DecodeJob {
  const FeatureStream *feats = nullptr;
  const Diarization *init = nullptr;
  const PosteriorModel *model = nullptr;
};

/// Decodes independent recordings concurrently. Models that declare
/// themselves not concurrent-safe have their infer() calls serialized.
inline std::vector<DecodeResult> decode_many(const std::vector<DecodeJob> &jobs,
                                             const ProfilePool &pool,
                                             const DecodeConfig &cfg,
                                             std::size_t parallelism) {
  std::map<const PosteriorModel *, std::unique_ptr<SerializedModel>> guards;
  for (const auto &j : jobs)
    if (!j.model->concurrent_safe() && !guards.count(j.model))
      guards.emplace(j.model, std::make_unique<SerializedModel>(*j.model));
  std::vector<DecodeResult> out(jobs.size());
  parallel_for(jobs.size(), parallelism, [&](std::size_t i) {
    const PosteriorModel *m = jobs[i].model;
    if (auto g = guards.find(m); g != guards.end()) m = g->second.get();
    out[i] = decode(*jobs[i].feats, *jobs[i].init, *m, pool, cfg);
  });
  return out;
}

// Activity / posterior matrix text file, version 1:
//   tsvad-activity 1
//   frame_step <s>
//   origin <s>
//   frames <T>
//   speakers <label_1> ... <label_S>
//   <T rows of S values>
inline std::string write_activity(const ActivityMatrix &m) {
  std::ostringstream out;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", m.grid().frame_step);
  out << "tsvad-activity 1\nframe_step " << buf;
  std::snprintf(buf, sizeof buf, "%.17g", m.grid().origin);
  out << "\norigin " << buf << "\nframes " << m.frames() << "\nspeakers";
  for (const auto &s : m.speakers()) out << ' ' << s;
  out << '\n';
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t s = 0; s < m.num_speakers(); ++s) {
      std::snprintf(buf, sizeof buf, "%.17g", m(t, s));
      out << (s ? " " : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

inline ActivityMatrix read_activity(std::istream &in) {
  std::string magic, key, line;
  int version = 0;
  FrameGrid grid;
  if (!(in >> magic >> version) || magic != "tsvad-activity")
    throw Error("not an activity file");
  if (version != 1)
    throw Error("unsupported activity file version " + std::to_string(version));
  if (!(in >> key >> grid.frame_step) || key != "frame_step")
    throw Error("activity: expected frame_step");
  if (!(in >> key >> grid.origin) || key != "origin")
    throw Error("activity: expected origin");
  if (!(in >> key >> grid.total_frames) || key != "frames")
    throw Error("activity: expected frames");
  if (!(in >> key) || key != "speakers") throw Error("activity: expected speakers");
  std::getline(in, line);
  std::vector<std::string> speakers;
  {
    std::istringstream ls(line);
    for (std::string s; ls >> s;) speakers.push_back(s);
  }
  std::vector<double> values(grid.total_frames * speakers.size());
  for (auto &v : values)
    if (!(in >> v)) throw Error("activity: truncated matrix");
  return ActivityMatrix(grid, std::move(speakers), std::move(values));
}

}  // namespace tsvad
