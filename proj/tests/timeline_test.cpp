// tests/timeline_test.cpp

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
#include "tsvad/timeline.hpp"

using namespace tsvad;

TEST(Diarization, MergesSameSpeakerOverlapsAndSorts) {
  auto d = make_diarization("r", {{"B", 1.0, 3.0}, {"A", 0.0, 1.0},
                                  {"A", 1.0, 2.0}, {"A", 1.5, 2.5}});
  ASSERT_EQ(d.turns().size(), 2u);
  EXPECT_EQ(d.turns()[0].speaker, "A");
  EXPECT_DOUBLE_EQ(d.turns()[0].onset, 0.0);
  EXPECT_DOUBLE_EQ(d.turns()[0].duration, 2.5);
  EXPECT_EQ(d.turns()[1].speaker, "B");
  EXPECT_EQ(d.speakers(), (std::vector<std::string>{"A", "B"}));
}

TEST(Diarization, DropsZeroLengthAndRejectsNegative) {
  auto d = make_diarization("r", {{"A", 0.0, 1.0}, {"C", 2.0, 2.0}});
  EXPECT_EQ(d.speakers(), (std::vector<std::string>{"A"}));
  EXPECT_THROW(make_diarization("r", {{"A", 1.0, 0.5}}), Error);
  EXPECT_THROW(make_diarization("r", {{"A", -1.0, 0.5}}), Error);
  EXPECT_THROW(Diarization("r", {{"other", "A", 0.0, 1.0}}), Error);
}

TEST(Rasterize, FullCoverage) {
  auto d = make_diarization("r", {{"A", 0.0, 1.0}});
  auto m = rasterize(d, {0.01, 100, 0.0});
  ASSERT_EQ(m.num_speakers(), 1u);
  for (std::size_t t = 0; t < 100; ++t) EXPECT_EQ(m(t, 0), 1.0) << t;
}

TEST(Rasterize, EmptyDiarization) {
  Diarization d("r", {});
  auto m = rasterize(d, {0.01, 50, 0.0});
  EXPECT_EQ(m.frames(), 50u);
  EXPECT_EQ(m.num_speakers(), 0u);
  auto m2 = rasterize(d, {0.01, 50, 0.0}, std::vector<std::string>{"A", "B"});
  for (double v : m2.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m2.values().size(), 100u);
}

TEST(Rasterize, PartialOverlapHalfSecondFrames) {
  // Midpoints 0.25 0.75 1.25 1.75 2.25 2.75.
  auto d = make_diarization("r", {{"A", 0.0, 2.0}, {"B", 1.0, 3.0}});
  auto m = rasterize(d, {0.5, 6, 0.0});
  std::vector<double> a = {1, 1, 1, 1, 0, 0}, b = {0, 0, 1, 1, 1, 1};
  EXPECT_EQ(m.column(0), a);
  EXPECT_EQ(m.column(1), b);
}

TEST(Rasterize, MatchesMidpointOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = oracle::to_diar(oracle::random_segments(rng, 4, 10, 20000));
    FrameGrid g = FrameGrid::covering(d.end_time(), 0.01);
    auto m = rasterize(d, g);
    auto ref = oracle::frames_by_midpoint(d, 0.01, g.total_frames);
    for (std::size_t s = 0; s < m.num_speakers(); ++s)
      for (std::size_t t = 0; t < g.total_frames; ++t)
        ASSERT_EQ(m(t, s), ref[m.speakers()[s]][t]);
  }
}

TEST(Rasterize, PermutationEquivariant) {
  std::mt19937_64 rng(5);
  auto d = oracle::to_diar(oracle::random_segments(rng, 4, 12, 20000));
  FrameGrid g = FrameGrid::covering(d.end_time());
  auto labels = d.speakers();
  auto base = rasterize(d, g, labels);
  std::shuffle(labels.begin(), labels.end(), rng);
  auto perm = rasterize(d, g, labels);
  for (std::size_t s = 0; s < labels.size(); ++s)
    EXPECT_EQ(perm.column(s), base.column(*base.index_of(labels[s])));
}

TEST(Segmentize, InverseOfFullColumn) {
  ActivityMatrix m({0.01, 100, 0.0}, {"A"}, std::vector<double>(100, 1.0));
  auto d = segmentize(m, 0.0, "r");
  ASSERT_EQ(d.turns().size(), 1u);
  EXPECT_DOUBLE_EQ(d.turns()[0].onset, 0.0);
  EXPECT_NEAR(d.turns()[0].offset(), 1.0, 1e-12);
}

TEST(Segmentize, DropsShortRuns) {
  std::vector<double> v(100, 0.0);
  v[40] = 1.0;
  ActivityMatrix m({0.01, 100, 0.0}, {"A"}, v);
  EXPECT_TRUE(segmentize(m, 0.2).empty());
  EXPECT_EQ(segmentize(m, 0.0).turns().size(), 1u);
}

TEST(Segmentize, AlternatingPattern) {
  ActivityMatrix m({0.1, 5, 0.0}, {"A"}, {1, 1, 0, 1, 1});
  auto d = segmentize(m, 0.0);
  ASSERT_EQ(d.turns().size(), 2u);
  EXPECT_NEAR(d.turns()[0].onset, 0.0, 1e-12);
  EXPECT_NEAR(d.turns()[0].duration, 0.2, 1e-12);
  EXPECT_NEAR(d.turns()[1].onset, 0.3, 1e-12);
  EXPECT_NEAR(d.turns()[1].duration, 0.2, 1e-12);
}

TEST(Segmentize, RejectsNonBinary) {
  ActivityMatrix m({0.1, 2, 0.0}, {"A"}, {0.5, 1.0});
  EXPECT_THROW(segmentize(m, 0.0), Error);
}

TEST(Segmentize, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t T = 1 + rng() % 300, S = rng() % 5;
    double step = std::array<double, 3>{0.01, 0.02, 0.1}[rng() % 3];
    double origin = (rng() % 2) ? 0.0 : 1.5;
    std::vector<std::string> labels;
    for (std::size_t s = 0; s < S; ++s) labels.push_back("spk" + std::to_string(s));
    std::vector<double> v(T * S);
    double p = (rng() % 100) / 100.0;
    for (auto &x : v) x = (rng() % 1000) / 1000.0 < p ? 1.0 : 0.0;
    ActivityMatrix m({step, T, origin}, labels, v);
    auto d = segmentize(m, 0.0, "r");
    EXPECT_EQ(rasterize(d, m.grid(), labels), m) << "trial " << trial;
  }
}

TEST(OverlapRegions, TwoIntervals) {
  auto d = make_diarization("r", {{"A", 0.0, 2.0}, {"B", 1.0, 3.0}});
  auto rs = overlap_regions(d);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].speakers, (std::vector<std::string>{"A"}));
  EXPECT_DOUBLE_EQ(rs[0].onset, 0.0);
  EXPECT_DOUBLE_EQ(rs[0].offset, 1.0);
  EXPECT_EQ(rs[1].speakers, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(rs[1].is_overlap());
  EXPECT_EQ(rs[2].speakers, (std::vector<std::string>{"B"}));
  EXPECT_DOUBLE_EQ(rs[2].offset, 3.0);
}

TEST(OverlapRegions, SingleSpeaker) {
  auto d = make_diarization("r", {{"A", 0.5, 2.0}});
  auto rs = overlap_regions(d);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_FALSE(rs[0].is_overlap());
  EXPECT_DOUBLE_EQ(overlap_ratio(d), 0.0);
}

TEST(OverlapRegions, NestedThreeSpeakersMatchFrameCount) {
  std::vector<oracle::Seg> segs = {
      {"A", 0, 10000}, {"B", 2000, 8000}, {"C", 3000, 4500}, {"C", 9000, 12000}};
  auto d = oracle::to_diar(segs);
  auto frames = oracle::frames_1ms(segs, 12000);
  std::int64_t speech = 0, overlap = 0;
  for (std::size_t t = 0; t < 12000; ++t) {
    int n = 0;
    for (auto &[k, v] : frames) n += v[t];
    speech += n > 0;
    overlap += n > 1;
  }
  double sum = 0, ov = 0;
  for (const auto &r : overlap_regions(d)) {
    sum += r.length();
    if (r.is_overlap()) ov += r.length();
  }
  EXPECT_NEAR(sum, speech / 1000.0, 1e-9);
  EXPECT_NEAR(ov, overlap / 1000.0, 1e-9);
  EXPECT_NEAR(sum, total_length(speech_support(d)), 1e-9);
}

TEST(SpeakingDurations, Example) {
  auto d = make_diarization("r", {{"A", 0.0, 2.0}, {"B", 1.0, 3.0}});
  auto solo = speaking_durations(d, DurationMode::kNonOverlapping);
  auto total = speaking_durations(d, DurationMode::kTotal);
  EXPECT_DOUBLE_EQ(solo["A"], 1.0);
  EXPECT_DOUBLE_EQ(solo["B"], 1.0);
  EXPECT_DOUBLE_EQ(total["A"], 2.0);
  EXPECT_DOUBLE_EQ(total["B"], 2.0);
}

TEST(SpeakingDurations, DisjointSpeakersTotalEqualsSolo) {
  auto d = make_diarization("r", {{"A", 0.0, 2.0}, {"B", 2.0, 3.0}, {"A", 4.0, 5.5}});
  EXPECT_EQ(speaking_durations(d, DurationMode::kNonOverlapping),
            speaking_durations(d, DurationMode::kTotal));
}

TEST(SpeakingDurations, RandomSessionsMatchBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto segs = oracle::random_segments(rng, 4, 16, 60000);
    auto d = oracle::to_diar(segs);
    auto frames = oracle::frames_1ms(segs, 60000);
    auto solo = speaking_durations(d, DurationMode::kNonOverlapping);
    auto total = speaking_durations(d, DurationMode::kTotal);
    for (auto &[spk, v] : frames) {
      std::int64_t tot = 0, alone = 0;
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (!v[t]) continue;
        ++tot;
        int n = 0;
        for (auto &[k2, v2] : frames) n += v2[t];
        alone += n == 1;
      }
      EXPECT_NEAR(total[spk], tot / 1000.0, 0.01);
      EXPECT_NEAR(solo[spk], alone / 1000.0, 0.01);
      EXPECT_LE(solo[spk], total[spk] + 1e-12);
    }
  }
}

TEST(Intervals, MergeAndIntersect) {
  auto m = merge_intervals({{3, 4}, {0, 1}, {0.5, 2}, {2, 2.5}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (Interval{0, 2.5}));
  auto x = intersect_intervals(m, std::vector<Interval>{{1, 3.5}});
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x[0], (Interval{1, 2.5}));
  EXPECT_EQ(x[1], (Interval{3, 3.5}));
}
