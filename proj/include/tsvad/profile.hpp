// include/tsvad/profile.hpp

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

// Speaker profiles (fixed-length vectors standing in for i-vectors), their
// estimation from weighted feature frames, and the dummy-profile pool used to
// pad the model input up to its capacity.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tsvad/common.hpp"
#include "tsvad/timeline.hpp"

namespace tsvad {

/// T x D row-major feature frames on a frame grid.
class FeatureStream {
 public:
  FeatureStream() = default;
  FeatureStream(FrameGrid grid, std::size_t dim, std::vector<float> frames)
      : grid_(grid), dim_(dim), frames_(std::move(frames)) {
    if (frames_.size() != grid_.total_frames * dim_)
      throw Error("feature stream size does not match T x D");
    for (float v : frames_)
      if (!std::isfinite(v)) throw Error("non-finite feature value");
  }

  const FrameGrid &grid() const { return grid_; }
  std::size_t frames() const { return grid_.total_frames; }
  std::size_t dim() const { return dim_; }
  std::span<const float> data() const { return frames_; }
  std::span<const float> frame(std::size_t t) const {
    return std::span<const float>(frames_).subspan(t * dim_, dim_);
  }

  friend bool operator==(const FeatureStream &, const FeatureStream &) = default;

 private:
  FrameGrid grid_;
  std::size_t dim_ = 0;
  std::vector<float> frames_;
};

enum class ProfileSource { kEstimated, kDummyPool, kOracle };

struct SpeakerProfile {
  std::string label;
  std::vector<double> vector;
  ProfileSource source = ProfileSource::kEstimated;

  friend bool operator==(const SpeakerProfile &, const SpeakerProfile &) = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

/// Weighted mean of the feature frames, projected to `dim` (truncation or
/// zero padding; identity when the feature dimension already matches).
inline SpeakerProfile estimate_profile(const FeatureStream &feats,
                                       std::span<const double> weights,
                                       std::string label, std::size_t dim = 64) {
  if (weights.size() != feats.frames())
    throw Error("weight vector length does not match the feature stream");
  std::vector<double> acc(feats.dim(), 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    double w = weights[t];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("frame weights must be finite and non-negative");
    if (w == 0.0) continue;
    total += w;
    auto f = feats.frame(t);
    for (std::size_t d = 0; d < f.size(); ++d) acc[d] += w * f[d];
  }
  if (!(total > 0.0)) throw Error("no frames for speaker '" + label + "'");
  SpeakerProfile p{std::move(label), std::vector<double>(dim, 0.0),
                   ProfileSource::kEstimated};
  for (std::size_t d = 0; d < std::min(dim, acc.size()); ++d)
    p.vector[d] = acc[d] / total;
  return p;
}

/// Deterministic unit-norm "voice" for a synthetic speaker identity.
inline std::vector<double> synth_embed(const std::string &identity,
                                       std::size_t dim = 64) {
  std::mt19937_64 rng(stable_hash(identity));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto &x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto &x : v) x /= norm;
  return v;
}

struct ProfilePool {
  std::vector<SpeakerProfile> profiles;
  std::uint64_t rng_seed = 0;

  std::size_t size() const { return profiles.size(); }
  std::size_t dim() const {
    return profiles.empty() ? 0 : profiles.front().vector.size();
  }
};

/// Pool of `count` synthetic training-set speakers.
inline ProfilePool make_synthetic_pool(std::size_t count, std::size_t dim,
                                       std::uint64_t seed) {
  ProfilePool pool;
  pool.rng_seed = seed;
  for (std::size_t i = 0; i < count; ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "dummy%04zu", i);
    pool.profiles.push_back(
        {label,
         synth_embed("pool:" + std::to_string(seed) + ":" + std::to_string(i),
                     dim),
         ProfileSource::kDummyPool});
  }
  return pool;
}

/// k distinct pool profiles, without replacement. The draw is the first k
/// entries of a seeded permutation, so draws with the same seed are nested.
inline std::vector<SpeakerProfile> draw_dummies(const ProfilePool &pool,
                                                std::size_t k,
                                                std::uint64_t seed) {
  if (k > pool.size())
    throw Error("profile pool too small: need " + std::to_string(k) +
                ", have " + std::to_string(pool.size()));
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(seed, pool.rng_seed));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  std::vector<SpeakerProfile> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(pool.profiles[order[i]]);
    out.back().source = ProfileSource::kDummyPool;
  }
  return out;
}

// Pool file, version 1 (text):
//   tsvad-profile-pool 1
//   dim <L>
//   seed <seed>
//   count <n>
//   <label> <v_1> ... <v_L>      (n rows)
inline std::string write_pool(const ProfilePool &pool) {
  std::ostringstream out;
  out << "tsvad-profile-pool 1\n"
      << "dim " << pool.dim() << "\nseed " << pool.rng_seed << "\ncount "
      << pool.size() << "\n";
  char buf[40];
  for (const auto &p : pool.profiles) {
    out << p.label;
    for (double x : p.vector) {
      std::snprintf(buf, sizeof buf, " %.17g", x);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

inline ProfilePool read_pool(std::istream &in) {
  std::string magic, key;
  int version = 0;
  std::size_t dim = 0, count = 0;
  ProfilePool pool;
  if (!(in >> magic >> version) || magic != "tsvad-profile-pool")
    throw Error("not a profile pool file");
  if (version != 1)
    throw Error("unsupported profile pool version " + std::to_string(version));
  if (!(in >> key >> dim) || key != "dim") throw Error("pool: expected dim");
  if (!(in >> key >> pool.rng_seed) || key != "seed")
    throw Error("pool: expected seed");
  if (!(in >> key >> count) || key != "count")
    throw Error("pool: expected count");
  for (std::size_t i = 0; i < count; ++i) {
    SpeakerProfile p{{}, std::vector<double>(dim), ProfileSource::kDummyPool};
    if (!(in >> p.label)) throw Error("pool: truncated at row " + std::to_string(i));
    for (auto &x : p.vector)
      if (!(in >> x) || !std::isfinite(x))
        throw Error("pool: bad value in row " + std::to_string(i));
    pool.profiles.push_back(std::move(p));
  }
  return pool;
}

inline ProfilePool read_pool_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile pool " + path.string());
  return read_pool(in);
}

// Feature file, version 1 (binary, little endian):
//   "TSVF" | u32 version | u64 T | u32 D | f64 frame_step | T*D f32 row-major
static_assert(std::endian::native == std::endian::little,
              "feature files assume a little-endian host");

inline void write_features(std::ostream &out, const FeatureStream &feats) {
  const std::uint32_t version = 1;
  const std::uint64_t T = feats.frames();
  const std::uint32_t D = static_cast<std::uint32_t>(feats.dim());
  const double step = feats.grid().frame_step;
  out.write("TSVF", 4);
  out.write(reinterpret_cast<const char *>(&version), sizeof version);
  out.write(reinterpret_cast<const char *>(&T), sizeof T);
  out.write(reinterpret_cast<const char *>(&D), sizeof D);
  out.write(reinterpret_cast<const char *>(&step), sizeof step);
  out.write(reinterpret_cast<const char *>(feats.data().data()),
            static_cast<std::streamsize>(feats.data().size() * sizeof(float)));
}

inline FeatureStream read_features(std::istream &in) {
  char magic[4];
  std::uint32_t version = 0, D = 0;
  std::uint64_t T = 0;
  double step = 0.0;
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "TSVF") throw Error("not a feature file");
  in.read(reinterpret_cast<char *>(&version), sizeof version);
  in.read(reinterpret_cast<char *>(&T), sizeof T);
  in.read(reinterpret_cast<char *>(&D), sizeof D);
  in.read(reinterpret_cast<char *>(&step), sizeof step);
  if (!in) throw Error("truncated feature header");
  if (version != 1)
    throw Error("unsupported feature file version " + std::to_string(version));
  if (!(step > 0.0)) throw Error("feature file has invalid frame step");
  if (D != 0 && T > (std::uint64_t{1} << 40) / D)
    throw Error("feature file too large");
  std::vector<float> frames(T * D);
  in.read(reinterpret_cast<char *>(frames.data()),
          static_cast<std::streamsize>(frames.size() * sizeof(float)));
  if (!in) throw Error("truncated feature data");
  return FeatureStream({step, static_cast<std::size_t>(T), 0.0}, D,
                       std::move(frames));
}

inline void write_features_file(const std::filesystem::path &path,
                                const FeatureStream &feats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write feature file " + path.string());
  write_features(out, feats);
  if (!out) throw Error("write failed for " + path.string());
}

inline FeatureStream read_features_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature file " + path.string());
  return read_features(in);
}

}  // namespace tsvad
