// tests/fusion_test.cpp

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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tsvad/fusion.hpp"

using namespace tsvad;

namespace {

const FrameGrid kGrid{0.5, 20, 0.0};

std::vector<double> values(const ActivityMatrix &m) {
  return {m.values().begin(), m.values().end()};
}

}  // namespace

TEST(Fuse, SingleSystemEqualsItsVad) {
  auto d = make_diarization("r", {{"A", 0.0, 3.0}, {"B", 2.0, 6.0}});
  auto w = fuse({{"s1", d, 1.0}}, kGrid);
  EXPECT_EQ(w, rasterize(d, kGrid));
}

TEST(Fuse, ThreeAgreeingSystems) {
  auto d = make_diarization("r", {{"A", 0.0, 3.0}, {"B", 2.0, 6.0}});
  auto d2 = relabel(d, {{"A", "x"}, {"B", "y"}});
  auto w = fuse({{"s1", d, 1.0}, {"s2", d2, 2.0}, {"s3", d, 0.5}}, kGrid);
  EXPECT_EQ(w.speakers(), d.speakers());
  for (std::size_t i = 0; i < w.values().size(); ++i)
    EXPECT_NEAR(w.values()[i], rasterize(d, kGrid).values()[i], 1e-12);
}

TEST(Fuse, TwoOfThreeMajority) {
  auto a = make_diarization("r", {{"A", 0.0, 4.0}});
  auto b = make_diarization("r", {{"A", 0.0, 2.0}});
  auto w = fuse({{"s1", a}, {"s2", a}, {"s3", b}}, kGrid);
  EXPECT_NEAR(w(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(w(5, 0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(w(9, 0), 0.0, 1e-12);
  auto m = select_mask(w, 0.5, false);
  EXPECT_EQ(m(5, 0), 1.0);
  EXPECT_EQ(m(9, 0), 0.0);
}

TEST(Fuse, UnmatchedSpeakerGetsNamespacedLabel) {
  auto a = make_diarization("r", {{"A", 0.0, 4.0}});
  auto b = make_diarization("r", {{"x", 0.0, 4.0}, {"y", 6.0, 8.0}});
  auto aligned = align_labels({{"s1", a}, {"s2", b}});
  EXPECT_EQ(aligned.speakers, (std::vector<std::string>{"A", "s2:y"}));
  auto w = fuse({{"s1", a}, {"s2", b}}, kGrid);
  EXPECT_NEAR(w(13, 1), 0.5, 1e-12);
}

TEST(Fuse, Errors) {
  auto a = make_diarization("r", {{"A", 0.0, 4.0}});
  auto other = make_diarization("q", {{"A", 0.0, 4.0}});
  EXPECT_THROW(fuse({}, kGrid), Error);
  EXPECT_THROW(fuse({{"s1", a}, {"s2", other}}, kGrid), Error);
  EXPECT_THROW(fuse({{"s1", a, 0.0}}, kGrid), Error);
  EXPECT_THROW(fuse({{"s1", a, -1.0}, {"s2", a, 2.0}}, kGrid), Error);
}

TEST(Fuse, WeightsMatchDirectSumAfterAlignment) {
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SystemHypothesis> hs;
    for (int n = 0; n < 3; ++n)
      hs.push_back({"s" + std::to_string(n),
                    oracle::to_diar(oracle::random_segments(rng, 4, 10, 20000,
                                                            "h" + std::to_string(n))),
                    u(rng)});
    FrameGrid g{0.01, 2000, 0.0};
    auto w = fuse(hs, g);
    auto aligned = align_labels(hs);
    double gsum = 0;
    for (auto &h : hs) gsum += h.weight;
    for (std::size_t s = 0; s < w.num_speakers(); ++s) {
      const auto &label = w.speakers()[s];
      std::vector<double> expect(g.total_frames, 0.0);
      for (std::size_t n = 0; n < hs.size(); ++n) {
        auto local = aligned.mappings[n].b_for(label);
        if (!local) continue;
        auto f = oracle::frames_by_midpoint(hs[n].diar, 0.01, g.total_frames);
        for (std::size_t t = 0; t < g.total_frames; ++t)
          expect[t] += hs[n].weight / gsum * f[*local][t];
      }
      for (std::size_t t = 0; t < g.total_frames; ++t)
        ASSERT_NEAR(w(t, s), expect[t], 1e-12);
    }
  }
}

TEST(SelectMask, ThresholdAndSoleSpeaker) {
  ActivityMatrix w({0.1, 4, 0.0}, {"A", "B"},
                   {1.0, 0.0, 0.5, 0.5, 0.49, 1.0, 0.2, 0.2});
  auto all = select_mask(w, 0.5, false);
  EXPECT_EQ(values(all), (std::vector<double>{1, 0, 1, 1, 0, 1, 0, 0}));
  auto sole = select_mask(w, 0.5, true);
  EXPECT_EQ(values(sole), (std::vector<double>{1, 0, 0, 0, 0, 1, 0, 0}));
  EXPECT_THROW(select_mask(w, 0.0, false), Error);
  EXPECT_THROW(select_mask(w, 1.5, false), Error);
}

TEST(SelectMask, ThresholdOneKeepsUnanimousFrames) {
  auto a = make_diarization("r", {{"A", 0.0, 4.0}});
  auto b = make_diarization("r", {{"A", 0.0, 2.0}});
  auto w = fuse({{"s1", a, 0.3}, {"s2", a, 0.3}, {"s3", b, 0.4}}, kGrid);
  auto m = select_mask(w, 1.0, false);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(5, 0), 0.0);
}
