// tests/harness_test.cpp

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

#include <set>
#include <sstream>

#include "tsvad/harness.hpp"
#include "tsvad/metrics.hpp"

using namespace tsvad;

namespace {

// Features are the sum of the active speakers' voices, no noise.
FeatureStream clean_features(const Diarization &truth, double end,
                             std::size_t dim = 64) {
  FrameGrid g = FrameGrid::covering(end);
  auto act = rasterize(truth, g);
  std::vector<float> v(g.total_frames * dim, 0.0f);
  for (std::size_t s = 0; s < act.num_speakers(); ++s) {
    auto voice = synth_embed(act.speakers()[s], dim);
    for (std::size_t t = 0; t < g.total_frames; ++t)
      if (act(t, s) > 0)
        for (std::size_t d = 0; d < dim; ++d)
          v[t * dim + d] += static_cast<float>(voice[d]);
  }
  return FeatureStream(g, dim, v);
}

Diarization round_robin(std::size_t speakers, double turn, double end) {
  std::vector<Segment> segs;
  std::size_t k = 0;
  for (double t = 0; t + turn <= end + 1e-9; t += turn, ++k)
    segs.push_back({"spk" + std::to_string(k % speakers), t, t + turn});
  // A little overlap between the first two speakers.
  segs.push_back({"spk1", 0.5, 1.5});
  return make_diarization("rec", segs);
}

SpeakerProfile profile(const std::string &label) {
  return {label, synth_embed(label, 8), ProfileSource::kEstimated};
}

}  // namespace

TEST(MedianFilter, Basic) {
  std::vector<double> x = {0, 1, 0, 0, 1, 1, 1, 0, 1};
  EXPECT_EQ(median_filter(x, 3),
            (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1, 1}));
  EXPECT_EQ(median_filter(x, 1), x);
  EXPECT_THROW(median_filter(x, 4), Error);
}

TEST(ArrangeProfiles, PadsWithDummies) {
  auto pool = make_synthetic_pool(20, 8, 1);
  std::vector<SpeakerProfile> est = {profile("a"), profile("b"), profile("c")};
  auto arr = arrange_profiles(est, 8, pool, Diarization("r", {}), 5);
  ASSERT_EQ(arr.profiles.size(), 8u);
  EXPECT_EQ(arr.dummy_indices, (std::vector<std::size_t>{3, 4, 5, 6, 7}));
  EXPECT_EQ(arr.kept_labels, (std::vector<std::string>{"a", "b", "c"}));
  for (auto i : arr.dummy_indices)
    EXPECT_EQ(arr.profiles[i].source, ProfileSource::kDummyPool);
}

TEST(ArrangeProfiles, KeepsLongestSoloSpeakers) {
  // Speaker i talks alone for i+1 seconds; capacity 3 keeps the last three.
  std::vector<Segment> segs;
  std::vector<SpeakerProfile> est;
  double t = 0;
  for (int i = 0; i < 6; ++i) {
    std::string l = "s" + std::to_string(i);
    segs.push_back({l, t, t + i + 1});
    t += i + 1;
    est.push_back(profile(l));
  }
  // s5 also covers s0's turn, leaving s0 with no solo time.
  segs.push_back({"s5", 0.0, 1.0});
  auto init = make_diarization("r", segs);
  auto pool = make_synthetic_pool(4, 8, 1);
  auto arr = arrange_profiles(est, 3, pool, init, 0);
  EXPECT_TRUE(arr.dummy_indices.empty());
  EXPECT_EQ(arr.kept_labels, (std::vector<std::string>{"s3", "s4", "s5"}));
}

TEST(ArrangeProfiles, TiesBrokenByTotalThenLabel) {
  auto init = make_diarization(
      "r", {{"b", 0, 2}, {"a", 2, 4}, {"c", 4, 6}, {"c", 6.5, 7}, {"x", 6.5, 7}});
  // Solo: a=2 b=2 c=2 x=0 (c's extra half second is overlapped).
  std::vector<SpeakerProfile> est = {profile("b"), profile("a"), profile("c"),
                                     profile("x")};
  auto pool = make_synthetic_pool(4, 8, 1);
  auto arr = arrange_profiles(est, 2, pool, init, 0);
  EXPECT_EQ(arr.kept_labels, (std::vector<std::string>{"a", "c"}));
}

TEST(ArrangeProfiles, PoolTooSmallIsAnError) {
  auto pool = make_synthetic_pool(2, 8, 1);
  EXPECT_THROW(arrange_profiles({profile("a")}, 8, pool, Diarization("r", {}), 0),
               Error);
}

TEST(Postprocess, DropsDummyColumnsAndThresholds) {
  FrameGrid g{0.1, 30, 0.0};
  ActivityMatrix raw(g, node_labels(3));
  for (std::size_t t = 0; t < 30; ++t) {
    raw.set(t, 0, t < 15 ? 0.9 : 0.1);
    raw.set(t, 1, 1.0);  // dummy
    raw.set(t, 2, t >= 10 ? 0.6 : 0.4);
  }
  DecodeConfig cfg;
  cfg.median_filter_frames = 3;
  cfg.min_turn = 0.0;
  auto d = postprocess(raw, {1}, {"A", "B"}, cfg, "rec");
  EXPECT_EQ(d.speakers(), (std::vector<std::string>{"A", "B"}));
  auto a = d.intervals("A");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0].offset, 1.5, 1e-9);
  EXPECT_NEAR(d.intervals("B")[0].onset, 1.0, 1e-9);
  EXPECT_THROW(postprocess(raw, {}, {"A"}, cfg), Error);
}

TEST(OracleNoisyModel, ReproducesTruthForMatchingProfile) {
  auto truth = round_robin(3, 2.0, 30.0);
  auto feats = clean_features(truth, 30.0);
  OracleNoisyOptions opts;
  opts.capacity = 4;
  auto model = OracleNoisyModel::from_ground_truth(truth, opts);
  std::vector<SpeakerProfile> ps = {
      {"x", synth_embed("spk2", 64), ProfileSource::kEstimated},
      {"y", synth_embed("other", 64), ProfileSource::kEstimated},
      {"z", synth_embed("spk0", 64), ProfileSource::kEstimated},
      {"w", synth_embed("another", 64), ProfileSource::kEstimated}};
  auto out = model.infer(feats, ps);
  auto ref = rasterize(truth, feats.grid());
  EXPECT_EQ(out.column(0), ref.column(*ref.index_of("spk2")));
  EXPECT_EQ(out.column(2), ref.column(*ref.index_of("spk0")));
  for (double v : out.column(1)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(model.infer(feats, std::span(ps).first(3)), Error);
}

TEST(OracleNoisyModel, DeterministicNoise) {
  auto truth = round_robin(2, 1.0, 10.0);
  auto feats = clean_features(truth, 10.0);
  OracleNoisyOptions opts;
  opts.capacity = 2;
  opts.flip_prob = 0.1;
  opts.smear_frames = 3;
  opts.seed = 9;
  auto model = OracleNoisyModel::from_ground_truth(truth, opts);
  std::vector<SpeakerProfile> ps = {
      {"a", synth_embed("spk0", 64), ProfileSource::kEstimated},
      {"b", synth_embed("spk1", 64), ProfileSource::kEstimated}};
  EXPECT_EQ(model.infer(feats, ps), model.infer(feats, ps));
}

TEST(Decode, PerfectInitStaysPerfect) {
  auto truth = round_robin(3, 2.0, 60.0);
  auto feats = clean_features(truth, 60.0);
  auto model = OracleNoisyModel::from_ground_truth(truth, {});
  auto pool = make_synthetic_pool(32, 64, 3);
  auto res = decode(feats, truth, model, pool, DecodeConfig{});
  ASSERT_EQ(res.iterations.size(), 2u);
  EXPECT_LT(der(truth, res.final).der, 1e-9);
}

TEST(Decode, NeverAddsSpeakers) {
  auto truth = round_robin(5, 1.5, 60.0);
  auto feats = clean_features(truth, 60.0);
  // Init only knows about spk0 and spk1.
  std::map<std::string, std::string> m = {{"spk0", "A"}, {"spk1", "B"}};
  auto init = relabel(truth, m, /*keep_unmapped=*/false);
  auto model = OracleNoisyModel::from_ground_truth(truth, {});
  auto pool = make_synthetic_pool(32, 64, 3);
  auto res = decode(feats, init, model, pool, DecodeConfig{});
  for (const auto &s : res.final.speakers()) EXPECT_TRUE(s == "A" || s == "B") << s;
}

TEST(Decode, OverCapacitySessionsAreTrimmed) {
  auto truth = round_robin(8, 1.0, 80.0);
  auto feats = clean_features(truth, 80.0);
  OracleNoisyOptions opts;
  opts.capacity = 5;
  auto model = OracleNoisyModel::from_ground_truth(truth, opts);
  auto pool = make_synthetic_pool(32, 64, 3);
  DecodeConfig cfg;
  cfg.capacity = 5;
  auto res = decode(feats, truth, model, pool, cfg);
  EXPECT_LE(res.final.speakers().size(), 5u);
  cfg.capacity = 4;
  EXPECT_THROW(decode(feats, truth, model, pool, cfg), Error);
}

TEST(Decode, ManyMatchesSequential) {
  auto pool = make_synthetic_pool(32, 64, 3);
  std::vector<Diarization> truths;
  std::vector<FeatureStream> feats;
  for (std::size_t i = 0; i < 4; ++i) {
    truths.push_back(round_robin(2 + i, 1.0 + 0.25 * i, 30.0));
    feats.push_back(clean_features(truths.back(), 30.0));
  }
  OracleNoisyOptions opts;
  opts.flip_prob = 0.05;
  std::vector<OracleNoisyModel> models;
  for (auto &t : truths) models.push_back(OracleNoisyModel::from_ground_truth(t, opts));
  std::vector<DecodeJob> jobs;
  for (std::size_t i = 0; i < 4; ++i) jobs.push_back({&feats[i], &truths[i], &models[i]});
  auto par = decode_many(jobs, pool, DecodeConfig{}, 4);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(par[i].final,
              decode(feats[i], truths[i], models[i], pool, DecodeConfig{}).final);
}

TEST(DecodeConfig, ParseAndApply) {
  std::istringstream in(
      "# comment\n[decode]\niterations = 3\nmedian_filter_frames=5\n"
      "[other]\nfoo = bar\n");
  auto cfg = apply_decode_config(parse_key_value_config(in), DecodeConfig{});
  EXPECT_EQ(cfg.iterations, 3u);
  EXPECT_EQ(cfg.median_filter_frames, 5u);
  EXPECT_EQ(cfg.capacity, 8u);
  std::istringstream bad("[decode]\nbogus = 1\n");
  EXPECT_THROW(apply_decode_config(parse_key_value_config(bad), {}), Error);
  std::istringstream even("median_filter_frames = 4\n");
  EXPECT_THROW(apply_decode_config(parse_key_value_config(even), {}), Error);
  std::istringstream broken("[decode\n");
  EXPECT_THROW(parse_key_value_config(broken), ParseError);
}

TEST(ActivityFile, RoundTrip) {
  ActivityMatrix m({0.02, 3, 1.0}, {"a", "b"}, {0.1, 0.2, 0.3, 1.0 / 3.0, 0, 1});
  std::istringstream in(write_activity(m));
  EXPECT_EQ(read_activity(in), m);
}

TEST(HypothesisFromFused, KeepsOverlap) {
  ActivityMatrix w({0.5, 4, 0.0}, {"A", "B"}, {1, 0, 1, 0.7, 0.2, 0.7, 0, 0});
  auto d = hypothesis_from_fused(w, 0.5, "rec");
  EXPECT_EQ(d.intervals("A"), (std::vector<Interval>{{0.0, 1.0}}));
  EXPECT_EQ(d.intervals("B"), (std::vector<Interval>{{0.5, 1.5}}));
}

TEST(EstimateSpeakerCount, Basic) {
  EXPECT_EQ(estimate_speaker_count(Diarization("r", {})), 0u);
  auto d = make_diarization("r", {{"A", 0, 1}, {"B", 1, 2}, {"C", 2, 3}, {"D", 4, 4}});
  EXPECT_EQ(estimate_speaker_count(d), 3u);
}

TEST(ArrangeProfiles, TenSpeakersCapacityEight) {
  // Speakers 8 and 9 have the two shortest solo durations.
  std::vector<Segment> segs;
  std::vector<SpeakerProfile> est;
  const double solo[] = {5, 6, 7, 8, 9, 10, 11, 12, 1, 2};
  double t = 0;
  for (int i = 0; i < 10; ++i) {
    std::string l = "s" + std::to_string(i);
    segs.push_back({l, t, t + solo[i]});
    t += solo[i] + 0.5;
    est.push_back(profile(l));
  }
  auto arr = arrange_profiles(est, 8, make_synthetic_pool(4, 8, 1),
                              make_diarization("r", segs), 0);
  EXPECT_EQ(arr.kept_labels, (std::vector<std::string>{"s0", "s1", "s2", "s3", "s4",
                                                       "s5", "s6", "s7"}));
}

TEST(OracleNoisyModel, ColumnOrderInvariance) {
  auto truth = round_robin(3, 1.0, 20.0);
  auto feats = clean_features(truth, 20.0);
  OracleNoisyOptions opts;
  opts.capacity = 4;
  opts.flip_prob = 0.1;
  opts.smear_frames = 2;
  auto model = OracleNoisyModel::from_ground_truth(truth, opts);
  std::vector<SpeakerProfile> ps;
  for (const char *l : {"spk0", "spk1", "spk2", "nobody"})
    ps.push_back({std::string("p_") + l, synth_embed(l, 64), ProfileSource::kEstimated});
  auto base = model.infer(feats, ps);
  std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<SpeakerProfile> permuted;
  for (auto k : perm) permuted.push_back(ps[k]);
  auto out = model.infer(feats, permuted);
  for (std::size_t j = 0; j < perm.size(); ++j)
    EXPECT_EQ(out.column(j), base.column(perm[j]));
}
