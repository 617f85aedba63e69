// tools/tsvad_cli.cpp

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

// tsvad: simulate / fuse / decode / score / cpwer.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsvad/tsvad.hpp"

namespace fs = std::filesystem;
using namespace tsvad;

namespace {

// Condition columns of the per-condition breakdown, in display order.
const std::vector<std::string> kConditions = {"0L", "0S", "10", "20", "30", "40"};

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

TranscriptSet read_transcripts_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript file " + path.string());
  try {
    return parse_transcripts(in, path.stem().string());
  } catch (const ParseError &e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// "path" or "path:weight"; a trailing ":<number>" is taken as the weight.
std::pair<std::string, double> split_weighted(const std::string &arg) {
  auto colon = arg.rfind(':');
  if (colon != std::string::npos && colon + 1 < arg.size()) {
    std::string tail = arg.substr(colon + 1);
    char *end = nullptr;
    double w = std::strtod(tail.c_str(), &end);
    if (end && *end == '\0') return {arg.substr(0, colon), w};
  }
  return {arg, 1.0};
}

// The only recording of a document, or the named one.
Diarization pick_recording(const RecordingMap &m, const std::string &wanted,
                           const std::string &what) {
  if (!wanted.empty()) {
    auto it = m.find(wanted);
    if (it == m.end())
      throw Error(what + " has no recording '" + wanted + "'");
    return it->second;
  }
  if (m.size() != 1)
    throw Error(what + " holds " + std::to_string(m.size()) +
                " recordings; select one with --recording");
  return m.begin()->second;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  SessionSpec spec;
  std::string out;
  std::string silence = "short";
  std::string mini_sessions;
  std::size_t jobs = 1;
};

int cmd_simulate(const SimulateArgs &a) {
  SessionSpec spec = a.spec;
  if (a.silence == "long")
    spec.silence_style = SilenceStyle::kLong;
  else if (a.silence != "short")
    throw Error("--silence must be 'short' or 'long'");
  try {
    spec.validate();
  } catch (const Error &e) {
    throw Error(std::string(e.what()) + "\nsee 'tsvad simulate --help'");
  }
  std::vector<SessionSpec> specs;
  if (!a.mini_sessions.empty()) {
    specs = mini_session_specs(a.mini_sessions, spec);
  } else {
    if (spec.recording_id.empty()) spec.recording_id = "session";
    specs.push_back(spec);
  }
  batch(specs, a.out, a.jobs);
  std::cout << (fs::path(a.out) / "manifest.json").string() << "\n";
  return 0;
}

// -------------------------------------------------------------------- fuse

struct FuseArgs {
  std::vector<std::string> hyps;
  std::string out;
  std::string weights_out;
  double threshold = 0.5;
  double frame_step = 0.01;
  bool sole_speaker = false;
};

int cmd_fuse(const FuseArgs &a) {
  std::vector<std::pair<std::string, RecordingMap>> systems;
  std::vector<double> weights;
  for (const auto &arg : a.hyps) {
    auto [path, w] = split_weighted(arg);
    systems.emplace_back(fs::path(path).stem().string(),
                         read_rttm_file(path).recordings);
    weights.push_back(w);
  }
  // Distinct system ids even when file names repeat.
  std::set<std::string> seen;
  for (std::size_t n = 0; n < systems.size(); ++n)
    if (!seen.insert(systems[n].first).second)
      systems[n].first += "#" + std::to_string(n);

  std::set<std::string> recs;
  for (const auto &[id, m] : systems[0].second) recs.insert(id);
  for (const auto &[sys, m] : systems) {
    std::set<std::string> other;
    for (const auto &[id, d] : m) other.insert(id);
    if (other != recs)
      throw Error("hypothesis '" + sys + "' covers different recordings than '" +
                  systems[0].first + "'");
  }

  RecordingMap fused_out;
  std::string soft;
  for (const auto &rec : recs) {
    std::vector<SystemHypothesis> hs;
    double end = 0.0;
    for (std::size_t n = 0; n < systems.size(); ++n) {
      hs.push_back({systems[n].first, systems[n].second.at(rec), weights[n]});
      end = std::max(end, hs.back().diar.end_time());
    }
    FrameGrid grid = FrameGrid::covering(end, a.frame_step);
    FusedActivity w = fuse(hs, grid);
    fused_out[rec] = segmentize(select_mask(w, a.threshold, a.sole_speaker), 0.0, rec);
    if (!a.weights_out.empty()) soft += "# " + rec + "\n" + write_activity(w);
  }
  if (a.out.empty())
    std::cout << write_rttm(fused_out);
  else
    write_text(a.out, write_rttm(fused_out));
  if (!a.weights_out.empty()) write_text(a.weights_out, soft);
  return 0;
}

// ------------------------------------------------------------------ decode

struct DecodeArgs {
  std::string feats;
  std::string init;
  std::string model = "oracle-noisy";
  std::string ref;
  std::string posterior;
  std::vector<std::size_t> dummy_columns;
  std::string pool;
  std::size_t pool_size = 256;
  std::uint64_t pool_seed = 0;
  std::string recording;
  std::string config;
  std::string out;
  std::string manifest;
  std::string style = "boundary_jitter";
  std::string out_dir;
  std::size_t jobs = 1;
  bool json = false;
  OracleNoisyOptions oracle;
};

ProfilePool load_pool(const DecodeArgs &a, std::size_t dim) {
  if (!a.pool.empty()) {
    ProfilePool p = read_pool_file(a.pool);
    if (p.dim() != dim)
      throw Error("profile pool dimension " + std::to_string(p.dim()) +
                  " does not match model dimension " + std::to_string(dim));
    return p;
  }
  return make_synthetic_pool(a.pool_size, dim, a.pool_seed);
}

int decode_manifest(const DecodeArgs &a, const DecodeConfig &cfg) {
  if (a.out_dir.empty()) throw Error("--manifest requires --out-dir");
  parse_perturb_style(a.style);
  auto entries = read_manifest(a.manifest);
  fs::create_directories(a.out_dir);
  ProfilePool pool = load_pool(a, cfg.profile_dim);
  OracleNoisyOptions opts = a.oracle;
  opts.capacity = cfg.capacity;
  opts.profile_dim = cfg.profile_dim;

  std::vector<DerReport> init_der(entries.size()), final_der(entries.size());
  parallel_for(entries.size(), a.jobs, [&](std::size_t i) {
    const auto &e = entries[i];
    auto hyp_it = e.hypotheses.find(a.style);
    if (hyp_it == e.hypotheses.end())
      throw Error("manifest entry '" + e.recording_id + "' has no '" + a.style +
                  "' hypothesis");
    Diarization ref =
        pick_recording(read_rttm_file(e.reference).recordings, e.recording_id, "reference");
    Diarization init =
        pick_recording(read_rttm_file(hyp_it->second).recordings, e.recording_id, "hypothesis");
    FeatureStream feats = read_features_file(e.features);
    auto model = OracleNoisyModel::from_ground_truth(ref, opts);
    DecodeResult res = decode(feats, init, model, pool, cfg);
    write_rttm_file(fs::path(a.out_dir) / (e.recording_id + ".decoded.rttm"),
                    {{e.recording_id, res.final}});
    init_der[i] = der(ref, init);
    final_der[i] = der(ref, res.final);
  });

  if (a.json) {
    nlohmann::json j = {{"recordings", nlohmann::json::object()}};
    for (std::size_t i = 0; i < entries.size(); ++i)
      j["recordings"][entries[i].recording_id] = {{"init", to_json(init_der[i])},
                                                  {"final", to_json(final_der[i])}};
    j["pooled"] = {{"init", to_json(pool_der(init_der))},
                   {"final", to_json(pool_der(final_der))}};
    std::cout << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < entries.size(); ++i)
      std::printf("%s init_der=%.4f final_der=%.4f\n",
                  entries[i].recording_id.c_str(), init_der[i].der,
                  final_der[i].der);
    std::printf("ALL init_der=%.4f final_der=%.4f\n", pool_der(init_der).der,
                pool_der(final_der).der);
  }
  return 0;
}

int cmd_decode(const DecodeArgs &a, const DecodeConfig &cfg) {
  if (!a.manifest.empty()) return decode_manifest(a, cfg);

  Diarization result;
  std::optional<Diarization> ref;
  if (!a.ref.empty())
    ref = pick_recording(read_rttm_file(a.ref).recordings, a.recording, "reference");

  if (a.model == "posterior-file") {
    if (a.posterior.empty()) throw Error("--model posterior-file needs --posterior");
    std::ifstream in(a.posterior);
    if (!in) throw Error("cannot open posterior file " + a.posterior);
    ActivityMatrix raw = read_activity(in);
    std::set<std::size_t> dummies(a.dummy_columns.begin(), a.dummy_columns.end());
    std::vector<std::string> kept;
    for (std::size_t k = 0; k < raw.num_speakers(); ++k) {
      if (!dummies.count(k)) kept.push_back(raw.speakers()[k]);
    }
    for (auto d : dummies)
      if (d >= raw.num_speakers())
        throw Error("dummy column " + std::to_string(d) + " out of range");
    std::string rec = a.recording.empty() ? (ref ? ref->recording_id() : "rec")
                                          : a.recording;
    result = postprocess(raw, a.dummy_columns, kept, cfg, rec);
  } else if (a.model == "oracle-noisy") {
    if (a.feats.empty() || a.init.empty())
      throw Error("--model oracle-noisy needs --feats and --init");
    if (!ref) throw Error("--model oracle-noisy needs --ref (its ground truth)");
    Diarization init =
        pick_recording(read_rttm_file(a.init).recordings,
                       a.recording.empty() ? ref->recording_id() : a.recording,
                       "initial hypothesis");
    if (cfg.iterations == 0) {
      result = init;
    } else {
      FeatureStream feats = read_features_file(a.feats);
      OracleNoisyOptions opts = a.oracle;
      opts.capacity = cfg.capacity;
      opts.profile_dim = cfg.profile_dim;
      auto model = OracleNoisyModel::from_ground_truth(*ref, opts);
      DecodeResult res = decode(feats, init, model, load_pool(a, cfg.profile_dim), cfg);
      for (const auto &w : res.warnings) std::cerr << "warning: " << w << "\n";
      result = res.final;
    }
  } else {
    throw Error("unknown model '" + a.model + "' (oracle-noisy | posterior-file)");
  }

  if (a.out.empty())
    std::cout << write_rttm(result);
  else
    write_text(a.out, write_rttm(result));
  if (ref) {
    DerReport r = der(*ref, result);
    if (a.json)
      std::cerr << to_json(r).dump() << "\n";
    else
      std::cerr << to_key_value(r) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- score

struct ScoreArgs {
  std::vector<std::string> refs;
  std::vector<std::string> hyps;
  std::string manifest;
  std::string style;
  std::string hyp_dir;
  std::string hyp_suffix = ".decoded.rttm";
  double collar = 0.0;
  std::string uem;
  bool json = false;
  std::size_t jobs = 1;
};

RecordingMap load_all(const std::vector<std::string> &paths) {
  RecordingMap out;
  for (const auto &p : paths)
    for (auto &[id, d] : read_rttm_file(p).recordings) {
      if (out.count(id)) throw Error("recording '" + id + "' appears in two files");
      out.emplace(id, std::move(d));
    }
  return out;
}

int cmd_score(const ScoreArgs &a) {
  RecordingMap refs = load_all(a.refs), hyps = load_all(a.hyps);
  std::map<std::string, std::string> condition;
  if (!a.manifest.empty()) {
    for (const auto &e : read_manifest(a.manifest)) {
      condition[e.recording_id] = e.condition;
      if (a.refs.empty())
        refs[e.recording_id] =
            pick_recording(read_rttm_file(e.reference).recordings, e.recording_id,
                           "reference");
      std::optional<fs::path> hp;
      if (!a.style.empty()) {
        auto it = e.hypotheses.find(a.style);
        if (it == e.hypotheses.end())
          throw Error("no '" + a.style + "' hypothesis for " + e.recording_id);
        hp = it->second;
      } else if (!a.hyp_dir.empty()) {
        hp = fs::path(a.hyp_dir) / (e.recording_id + a.hyp_suffix);
      }
      if (hp)
        hyps[e.recording_id] = pick_recording(read_rttm_file(*hp).recordings,
                                              e.recording_id, "hypothesis");
    }
  }
  if (refs.empty()) throw Error("nothing to score: no reference recordings");

  std::optional<UemMap> uem;
  if (!a.uem.empty()) {
    if (!fs::exists(a.uem)) throw Error("UEM file not found: " + a.uem);
    uem = read_uem_file(a.uem);
  }

  std::vector<std::string> ids;
  for (const auto &[id, d] : refs) ids.push_back(id);
  for (const auto &[id, d] : hyps)
    if (!refs.count(id)) ids.push_back(id);
  std::vector<DerReport> reports(ids.size());
  parallel_for(ids.size(), a.jobs, [&](std::size_t i) {
    const auto &id = ids[i];
    Diarization empty(id, {});
    const Diarization &r = refs.count(id) ? refs.at(id) : empty;
    const Diarization &h = hyps.count(id) ? hyps.at(id) : empty;
    std::optional<std::vector<Interval>> region;
    if (uem) {
      auto it = uem->find(id);
      region = it == uem->end() ? std::vector<Interval>{} : it->second;
    }
    reports[i] = der(r, h, a.collar, region);
  });

  std::map<std::string, std::vector<DerReport>> by_cond;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (auto it = condition.find(ids[i]); it != condition.end())
      by_cond[it->second].push_back(reports[i]);
  DerReport all = pool_der(reports);

  if (a.json) {
    nlohmann::json j = {{"recordings", nlohmann::json::object()},
                        {"pooled", to_json(all)}};
    for (std::size_t i = 0; i < ids.size(); ++i) j["recordings"][ids[i]] = to_json(reports[i]);
    if (!by_cond.empty()) {
      j["conditions"] = nlohmann::json::object();
      for (const auto &[c, rs] : by_cond) j["conditions"][c] = to_json(pool_der(rs));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::cout << ids[i] << " " << to_key_value(reports[i]) << "\n";
  std::cout << "ALL " << to_key_value(all) << "\n";
  if (!by_cond.empty()) {
    std::vector<std::string> cols;
    for (const auto &c : kConditions)
      if (by_cond.count(c)) cols.push_back(c);
    for (const auto &[c, rs] : by_cond)
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    std::printf("\n%-10s", "Overlap");
    for (const auto &c : cols) std::printf("%8s", c.c_str());
    std::printf("%8s\n%-10s", "Avg", "DER(%)");
    for (const auto &c : cols) std::printf("%8.2f", 100.0 * pool_der(by_cond[c]).der);
    std::printf("%8.2f\n", 100.0 * all.der);
  }
  return 0;
}

// ------------------------------------------------------------------- cpwer

int cmd_cpwer(const std::string &ref, const std::string &hyp, bool json) {
  CpWerReport r = cpwer(read_transcripts_file(ref), read_transcripts_file(hyp));
  if (json)
    std::cout << to_json(r).dump(2) << "\n";
  else
    std::cout << to_key_value(r) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Target-speaker VAD toolkit: simulate, fuse, decode, score"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto *simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  simulate->add_option("--speakers", sim.spec.n_speakers, "Speakers per session")
      ->capture_default_str();
  simulate->add_option("--overlap", sim.spec.target_overlap,
                       "Target overlap ratio in [0, 0.45]")
      ->capture_default_str();
  simulate->add_option("--duration", sim.spec.duration, "Session length (s)")
      ->capture_default_str();
  simulate->add_option("--seed", sim.spec.seed, "Random seed")->capture_default_str();
  simulate->add_option("--silence", sim.silence, "short | long")->capture_default_str();
  simulate->add_option("--max-concurrent", sim.spec.max_concurrent,
                       "Max simultaneous speakers (2 or 3)")
      ->capture_default_str();
  simulate->add_option("--dim", sim.spec.dim, "Feature dimension")->capture_default_str();
  simulate->add_option("--noise", sim.spec.feature_noise, "Feature noise std")
      ->capture_default_str();
  simulate->add_option("--hyp-der", sim.spec.hyp_der_target,
                       "DER of the perturbed hypotheses")
      ->capture_default_str();
  simulate->add_option("--recording-id", sim.spec.recording_id, "Recording id")
      ->capture_default_str();
  simulate->add_option("--mini-sessions", sim.mini_sessions,
                       "Session id; writes the six 0L/0S/10/20/30/40 conditions");
  simulate->add_option("--jobs", sim.jobs, "Parallel sessions")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output directory")->required();

  FuseArgs fz;
  auto *fuse_cmd = app.add_subcommand("fuse", "Fuse initial hypotheses");
  fuse_cmd->add_option("--hyp", fz.hyps, "RTTM[:weight], repeatable")->required();
  fuse_cmd->add_option("--out", fz.out, "Fused RTTM (default stdout)");
  fuse_cmd->add_option("--weights-out", fz.weights_out, "Soft-weight activity file");
  fuse_cmd->add_option("--threshold", fz.threshold, "Selection threshold in (0,1]")
      ->capture_default_str();
  fuse_cmd->add_option("--frame-step", fz.frame_step, "Frame step (s)")
      ->capture_default_str();
  fuse_cmd->add_flag("--sole-speaker", fz.sole_speaker,
                     "Drop frames where two or more speakers pass the threshold");

  DecodeArgs dec;
  DecodeConfig flag_cfg;
  auto *decode_cmd = app.add_subcommand("decode", "Iterative target-speaker decoding");
  decode_cmd->add_option("--model", dec.model, "oracle-noisy | posterior-file")
      ->capture_default_str();
  decode_cmd->add_option("--feats", dec.feats, "Feature file");
  decode_cmd->add_option("--init", dec.init, "Initial hypothesis RTTM");
  decode_cmd->add_option("--ref", dec.ref, "Reference RTTM (oracle model, DER report)");
  decode_cmd->add_option("--posterior", dec.posterior, "Posterior activity file");
  decode_cmd->add_option("--dummy-columns", dec.dummy_columns,
                         "Posterior columns that belong to dummy profiles")
      ->delimiter(',');
  decode_cmd->add_option("--recording", dec.recording, "Recording id to decode");
  decode_cmd->add_option("--pool", dec.pool, "Profile pool file");
  decode_cmd->add_option("--pool-size", dec.pool_size, "Synthetic pool size")
      ->capture_default_str();
  decode_cmd->add_option("--pool-seed", dec.pool_seed, "Synthetic pool seed")
      ->capture_default_str();
  decode_cmd->add_option("--config", dec.config, "key = value config file");
  auto *o_iter = decode_cmd->add_option("--iterations", flag_cfg.iterations);
  auto *o_thr = decode_cmd->add_option("--threshold", flag_cfg.binarize_threshold);
  auto *o_med = decode_cmd->add_option("--median", flag_cfg.median_filter_frames);
  auto *o_min = decode_cmd->add_option("--min-turn", flag_cfg.min_turn);
  auto *o_cap = decode_cmd->add_option("--capacity", flag_cfg.capacity);
  auto *o_dim = decode_cmd->add_option("--profile-dim", flag_cfg.profile_dim);
  auto *o_seed = decode_cmd->add_option("--seed", flag_cfg.seed, "Dummy draw seed");
  decode_cmd->add_option("--flip-prob", dec.oracle.flip_prob, "Oracle frame flip prob")
      ->capture_default_str();
  decode_cmd->add_option("--smear", dec.oracle.smear_frames, "Oracle boundary smear")
      ->capture_default_str();
  decode_cmd->add_option("--match-threshold", dec.oracle.match_threshold,
                         "Oracle profile match cosine")
      ->capture_default_str();
  decode_cmd->add_option("--model-seed", dec.oracle.seed, "Oracle noise seed")
      ->capture_default_str();
  decode_cmd->add_option("--out", dec.out, "Output RTTM (default stdout)");
  decode_cmd->add_option("--manifest", dec.manifest, "Decode every manifest recording");
  decode_cmd->add_option("--style", dec.style, "Manifest hypothesis used as init")
      ->capture_default_str();
  decode_cmd->add_option("--out-dir", dec.out_dir, "Output directory for --manifest");
  decode_cmd->add_option("--jobs", dec.jobs, "Parallel recordings")
      ->check(CLI::PositiveNumber);
  decode_cmd->add_flag("--json", dec.json, "Machine-readable report");

  ScoreArgs sc;
  auto *score_cmd = app.add_subcommand("score", "DER against a reference");
  score_cmd->add_option("--ref", sc.refs, "Reference RTTM, repeatable");
  score_cmd->add_option("--hyp", sc.hyps, "Hypothesis RTTM, repeatable");
  score_cmd->add_option("--manifest", sc.manifest, "Corpus manifest (conditions)");
  score_cmd->add_option("--style", sc.style, "Score the manifest's hypothesis of this style");
  score_cmd->add_option("--hyp-dir", sc.hyp_dir, "Directory of <rec><suffix> hypotheses");
  score_cmd->add_option("--hyp-suffix", sc.hyp_suffix)->capture_default_str();
  score_cmd->add_option("--collar", sc.collar, "Collar (s)")->capture_default_str();
  score_cmd->add_option("--uem", sc.uem, "UEM file");
  score_cmd->add_option("--jobs", sc.jobs, "Parallel recordings")
      ->check(CLI::PositiveNumber);
  score_cmd->add_flag("--json", sc.json, "Machine-readable report");

  std::string cp_ref, cp_hyp;
  bool cp_json = false;
  auto *cpwer_cmd = app.add_subcommand("cpwer", "Concatenated minimum-permutation WER");
  cpwer_cmd->add_option("--ref", cp_ref, "Reference transcripts")->required();
  cpwer_cmd->add_option("--hyp", cp_hyp, "Hypothesis transcripts")->required();
  cpwer_cmd->add_flag("--json", cp_json, "Machine-readable report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*fuse_cmd) return cmd_fuse(fz);
    if (*decode_cmd) {
      // defaults < config file < flags
      DecodeConfig cfg;
      if (!dec.config.empty()) {
        std::ifstream in(dec.config);
        if (!in) throw Error("cannot open config " + dec.config);
        try {
          cfg = apply_decode_config(parse_key_value_config(in), cfg);
        } catch (const ParseError &e) {
          throw Error(dec.config + ": " + e.what());
        }
      }
      if (o_iter->count()) cfg.iterations = flag_cfg.iterations;
      if (o_thr->count()) cfg.binarize_threshold = flag_cfg.binarize_threshold;
      if (o_med->count()) cfg.median_filter_frames = flag_cfg.median_filter_frames;
      if (o_min->count()) cfg.min_turn = flag_cfg.min_turn;
      if (o_cap->count()) cfg.capacity = flag_cfg.capacity;
      if (o_dim->count()) cfg.profile_dim = flag_cfg.profile_dim;
      if (o_seed->count()) cfg.seed = flag_cfg.seed;
      cfg.validate();
      return cmd_decode(dec, cfg);
    }
    if (*score_cmd) return cmd_score(sc);
    if (*cpwer_cmd) return cmd_cpwer(cp_ref, cp_hyp, cp_json);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
