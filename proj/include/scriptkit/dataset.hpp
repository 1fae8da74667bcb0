// include/scriptkit/dataset.hpp

// Copyright 2026  Scriptkit Authors

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
//
// Builds task instances from validated articles: video plans (clip
// concatenation, method segmentation, end-frame prefixes), materialization to
// frame directories, and the per-domain train/dev/test split.

#ifndef SCRIPTKIT_DATASET_HPP_
#define SCRIPTKIT_DATASET_HPP_

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scriptkit/common.hpp"
#include "scriptkit/corpus.hpp"
#include "scriptkit/frames.hpp"
#include "scriptkit/video.hpp"

namespace scriptkit {

/// A contiguous [begin, end) frame range of one stored video.
struct VideoSlice {
  VideoRef source;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t frame_count() const { return end - begin; }
};

/// Ordered slices that concatenate into one demonstration video.
struct VideoPlan {
  std::vector<VideoSlice> slices;
  double fps = 30.0;

  std::size_t frame_count() const {
    std::size_t total = 0;
    for (const VideoSlice &s : slices) total += s.frame_count();
    return total;
  }

  static VideoPlan whole(const VideoRef &ref) {
    VideoPlan plan;
    plan.fps = ref.fps;
    if (ref.frame_count > 0) plan.slices.push_back({ref, 0, ref.frame_count});
    return plan;
  }
};

/// Exposes a [begin, end) window of another source as its own video.
class SliceFrameSource : public FrameSource {
 public:
  SliceFrameSource(std::shared_ptr<const FrameSource> base, std::size_t begin, std::size_t end)
      : base_(std::move(base)), begin_(begin), end_(end) {
    if (!base_ || end_ < begin_ || end_ > base_->frame_count()) {
      throw Error("dataset", "invalid frame slice");
    }
  }
  std::size_t frame_count() const override { return end_ - begin_; }
  double fps() const override { return base_->fps(); }
  Image frame(std::size_t index) const override {
    if (index >= frame_count()) throw Error("dataset", "slice frame index out of range");
    return base_->frame(begin_ + index);
  }

 private:
  std::shared_ptr<const FrameSource> base_;
  std::size_t begin_;
  std::size_t end_;
};

/// Validates that the slices of a plan agree on frame shape and fps; throws
/// on mismatch. Empty plans are trivially fine.
inline void validate_plan(const VideoPlan &plan) {
  int width = -1, height = -1;
  for (const VideoSlice &s : plan.slices) {
    if (s.end > s.source.frame_count || s.begin > s.end) {
      throw Error("dataset", "slice range exceeds source video " + s.source.uri);
    }
    if (s.frame_count() == 0) continue;
    if (s.source.fps != plan.fps) {
      throw Error("dataset", "fps mismatch during concatenation for " + s.source.uri);
    }
    DirectoryFrameSource probe(s.source);
    Image first = probe.frame(s.begin);
    if (width == -1) {
      width = first.width;
      height = first.height;
    } else if (first.width != width || first.height != height) {
      throw Error("dataset", "frame shape mismatch during concatenation for " + s.source.uri);
    }
  }
}

/// Copies the planned frames into `dest_dir` with canonical numbering and
/// returns the new video's reference. Copies are byte-identical to their
/// source files.
inline VideoRef materialize_plan(const VideoPlan &plan, const std::string &dest_dir) {
  namespace fs = std::filesystem;
  validate_plan(plan);
  fs::create_directories(dest_dir);
  std::size_t out_index = 0;
  for (const VideoSlice &s : plan.slices) {
    for (std::size_t i = s.begin; i < s.end; ++i) {
      fs::copy_file(fs::path(s.source.uri) / frame_file_name(i),
                    fs::path(dest_dir) / frame_file_name(out_index),
                    fs::copy_options::overwrite_existing);
      ++out_index;
    }
  }
  return VideoRef{dest_dir, out_index, plan.fps};
}

/// Outcome of planning one instance's video.
struct PlanOutcome {
  std::optional<VideoPlan> plan;
  std::string skip_reason;  // set when plan is absent

  bool ok() const { return plan.has_value(); }
};

/// Demonstration video for a full-script instance: the concatenation of all
/// step clips when every step has one, otherwise the method's own video,
/// otherwise a skip.
inline PlanOutcome plan_msg_video(const Method &method, const std::optional<VideoPlan> &method_video) {
  bool all_clipped = !method.steps.empty();
  for (const StepRecord &s : method.steps) {
    if (!s.clip.has_value() || s.clip->frame_count == 0) {
      all_clipped = false;
      break;
    }
  }
  if (all_clipped) {
    VideoPlan plan;
    plan.fps = method.steps.front().clip->fps;
    for (const StepRecord &s : method.steps) plan.slices.push_back({*s.clip, 0, s.clip->frame_count});
    return {plan, ""};
  }
  if (method_video && method_video->frame_count() > 0) return {*method_video, ""};
  return {std::nullopt, "no demonstration video"};
}

/// Partial video covering the first k steps. When the clips C_1..C_k are all
/// present they are concatenated (k = 0 gives an empty video). Otherwise the
/// prefix of the method video up to the end frame of step k is used, where
/// the end frame is the last frame of C_k or the first frame of C_{k+1}.
inline PlanOutcome plan_ssp_video(const Method &method, int k,
                                  const std::optional<VideoPlan> &method_video,
                                  int end_frame_tolerance = 0) {
  const int n = static_cast<int>(method.steps.size());
  if (k < 0 || k > n - 1) throw Error("dataset", "k out of range");

  double fallback_fps = 30.0;
  for (const StepRecord &s : method.steps) {
    if (s.clip) {
      fallback_fps = s.clip->fps;
      break;
    }
  }
  if (!method.steps.front().clip && method_video) fallback_fps = method_video->fps;

  bool clips_present = true;
  for (int i = 0; i < k; ++i) {
    if (!method.steps[static_cast<std::size_t>(i)].clip ||
        method.steps[static_cast<std::size_t>(i)].clip->frame_count == 0) {
      clips_present = false;
      break;
    }
  }
  if (clips_present) {
    VideoPlan plan;
    plan.fps = k > 0 ? method.steps.front().clip->fps : fallback_fps;
    for (int i = 0; i < k; ++i) {
      const VideoRef &clip = *method.steps[static_cast<std::size_t>(i)].clip;
      plan.slices.push_back({clip, 0, clip.frame_count});
    }
    return {plan, ""};
  }

  if (!method_video || method_video->frame_count() == 0) return {std::nullopt, "no demonstration video"};

  // End frame of step k: last frame of C_k, else first frame of C_{k+1}.
  // k >= 1 here: k = 0 always takes the clip branch above (vacuously).
  const std::optional<VideoRef> &clip_k = method.steps[static_cast<std::size_t>(k - 1)].clip;
  const std::optional<VideoRef> &clip_next = method.steps[static_cast<std::size_t>(k)].clip;
  Image end_frame;
  if (clip_k && clip_k->frame_count > 0) {
    DirectoryFrameSource src(*clip_k);
    end_frame = src.frame(clip_k->frame_count - 1);
  } else if (clip_next && clip_next->frame_count > 0) {
    DirectoryFrameSource src(*clip_next);
    end_frame = src.frame(0);
  } else {
    return {std::nullopt, "no end frame"};
  }

  // The method video may itself be a plan over slices; expose it as a single
  // source for matching.
  if (method_video->slices.size() != 1) {
    throw Error("dataset", "method video plan must be a single slice");
  }
  const VideoSlice &mv = method_video->slices.front();
  auto base = std::make_shared<DirectoryFrameSource>(mv.source);
  SliceFrameSource view(base, mv.begin, mv.end);
  std::optional<std::size_t> hit = match_end_frame(view, end_frame, end_frame_tolerance);
  if (!hit) return {std::nullopt, "end frame not found"};
  VideoPlan plan;
  plan.fps = method_video->fps;
  plan.slices.push_back({mv.source, mv.begin, mv.begin + *hit + 1});
  return {plan, ""};
}

// ---------------------------------------------------------------------------
// Train / dev / test split
// ---------------------------------------------------------------------------

/// Round-half-up split boundaries: within each domain the articles are
/// shuffled by the seeded generator and cut at round(r_train*n) and
/// round((r_train+r_dev)*n); the remainder is the test set. Instances inherit
/// their article's split, so one article never leaks across splits.
inline std::map<std::string, Split> split_dataset(const std::vector<Article> &articles,
                                                  std::uint64_t seed,
                                                  std::array<double, 3> ratios = {0.80, 0.05, 0.15}) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::fabs(sum - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
    throw Error("split", "ratios must be nonnegative and sum to 1");
  }
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const Article &a : articles) by_domain[a.domain].push_back(a.id);

  auto round_half_up = [](double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); };

  std::map<std::string, Split> assignment;
  SplitMix64 rng(seed);
  for (auto &[domain, ids] : by_domain) {
    seeded_shuffle(ids, rng);
    const std::size_t n = ids.size();
    std::size_t c1 = std::min(n, round_half_up(ratios[0] * static_cast<double>(n)));
    std::size_t c2 = std::min(n, round_half_up((ratios[0] + ratios[1]) * static_cast<double>(n)));
    if (c2 < c1) c2 = c1;
    for (std::size_t i = 0; i < n; ++i) {
      assignment[ids[i]] = i < c1 ? Split::kTrain : (i < c2 ? Split::kDev : Split::kTest);
    }
  }
  return assignment;
}

// ---------------------------------------------------------------------------
// Corpus build
// ---------------------------------------------------------------------------

struct SkipRecord {
  std::string article_id;
  int method_index = 0;               // 0 for article-level skips
  std::optional<int> step_index;      // 1-based target step for SSP skips
  std::string reason;
};

struct BuildReport {
  std::size_t articles_total = 0;
  std::size_t articles_eligible = 0;
  std::size_t built_msg = 0;
  std::size_t built_ssp = 0;
  std::vector<SkipRecord> skipped;
};

inline json to_json(const BuildReport &r) {
  json skipped = json::array();
  for (const SkipRecord &s : r.skipped) {
    json rec{{"article_id", s.article_id}, {"method_index", s.method_index}, {"reason", s.reason}};
    if (s.step_index) rec["step_index"] = *s.step_index;
    skipped.push_back(std::move(rec));
  }
  return json{{"articles_total", r.articles_total},
              {"articles_eligible", r.articles_eligible},
              {"built_msg", r.built_msg},
              {"built_ssp", r.built_ssp},
              {"skipped", std::move(skipped)}};
}

struct BuildOptions {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios = {0.80, 0.05, 0.15};
  int min_k = 0;                       // smallest preceding count for SSP instances
  int end_frame_tolerance = 0;
  std::optional<TransitionTemplate> transition_template;
  std::vector<std::string> domain_allowlist = default_domains();
  bool materialize = true;             // false keeps plans virtual (tests)
};

struct BuildResult {
  std::vector<MSGInstance> msg;
  std::vector<SSPInstance> ssp;
  BuildReport report;
};

namespace detail {

inline std::string sanitize_id(const std::string &id) {
  std::string out;
  for (char c : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out;
}

/// Per-method demonstration-video plans for one article. A method's own video
/// wins; otherwise the full video is carved by transition cards (or used
/// whole for single-method articles). Methods without any of those get no
/// plan.
inline std::vector<std::optional<VideoPlan>> method_video_plans(const Article &article,
                                                                const BuildOptions &opts) {
  std::vector<std::optional<VideoPlan>> plans(article.methods.size());
  for (std::size_t m = 0; m < article.methods.size(); ++m) {
    if (article.methods[m].method_video && article.methods[m].method_video->frame_count > 0) {
      plans[m] = VideoPlan::whole(*article.methods[m].method_video);
    }
  }
  if (!article.full_video || article.full_video->frame_count == 0) return plans;

  const VideoRef &full = *article.full_video;
  if (opts.transition_template) {
    DirectoryFrameSource source(full);
    std::vector<IndexRange> runs = detect_transition_runs(source, *opts.transition_template);
    SegmentSet segs = segment_by_transition_runs(full.frame_count, runs, article.methods.size());
    if (segs.ok()) {
      for (std::size_t m = 0; m < article.methods.size(); ++m) {
        if (plans[m]) continue;
        VideoPlan plan;
        plan.fps = full.fps;
        plan.slices.push_back({full, segs.segments[m].begin, segs.segments[m].end});
        plans[m] = plan;
      }
    }
  } else if (article.methods.size() == 1 && !plans[0]) {
    plans[0] = VideoPlan::whole(full);
  }
  return plans;
}

}  // namespace detail

/// Builds both instance sets from a corpus of articles, materializing the
/// demonstration videos under out_dir/videos/ and assigning the per-domain
/// split. Deterministic for a fixed seed and input order.
inline BuildResult build_dataset(const std::vector<Article> &articles, const BuildOptions &opts) {
  namespace fs = std::filesystem;
  BuildResult result;
  result.report.articles_total = articles.size();

  std::vector<const Article *> eligible;
  for (const Article &article : articles) {
    ValidationReport v = validate_article(article, opts.domain_allowlist);
    if (!v.eligible) {
      std::string reason = "ineligible article";
      if (!v.reasons.empty()) reason += ": " + v.reasons.front();
      result.report.skipped.push_back({article.id, 0, std::nullopt, reason});
      continue;
    }
    eligible.push_back(&article);
  }
  result.report.articles_eligible = eligible.size();

  const fs::path videos_dir = fs::path(opts.out_dir) / "videos";
  auto realize = [&](const VideoPlan &plan, const std::string &name) {
    if (!opts.materialize) {
      return VideoRef{(videos_dir / name).string(), plan.frame_count(), plan.fps};
    }
    return materialize_plan(plan, (videos_dir / name).string());
  };

  for (const Article *article : eligible) {
    std::vector<std::optional<VideoPlan>> mv_plans = detail::method_video_plans(*article, opts);
    for (std::size_t m = 0; m < article->methods.size(); ++m) {
      const Method &method = article->methods[m];
      const std::string base_name = detail::sanitize_id(article->id) + "_m" + std::to_string(method.index);

      PlanOutcome msg_plan = plan_msg_video(method, mv_plans[m]);
      if (msg_plan.ok()) {
        MSGInstance inst;
        inst.id = article->id + "#m" + std::to_string(method.index);
        inst.goal = article->title;
        inst.video = realize(*msg_plan.plan, base_name);
        for (const StepRecord &s : method.steps) inst.script.push_back(s.text);
        inst.article_id = article->id;
        inst.method_index = method.index;
        result.msg.push_back(std::move(inst));
        ++result.report.built_msg;
      } else {
        result.report.skipped.push_back({article->id, method.index, std::nullopt, msg_plan.skip_reason});
      }

      const int n = static_cast<int>(method.steps.size());
      for (int k = opts.min_k; k <= n - 1; ++k) {
        PlanOutcome ssp_plan = plan_ssp_video(method, k, mv_plans[m], opts.end_frame_tolerance);
        if (!ssp_plan.ok()) {
          result.report.skipped.push_back({article->id, method.index, k + 1, ssp_plan.skip_reason});
          continue;
        }
        SSPInstance inst;
        inst.id = article->id + "#m" + std::to_string(method.index) + "#k" + std::to_string(k);
        inst.goal = article->title;
        inst.partial_video = realize(*ssp_plan.plan, base_name + "_k" + std::to_string(k));
        inst.preceding_count = k;
        inst.target_step = method.steps[static_cast<std::size_t>(k)].text;
        inst.article_id = article->id;
        inst.method_index = method.index;
        result.ssp.push_back(std::move(inst));
        ++result.report.built_ssp;
      }
    }
  }

  std::vector<Article> eligible_copy;
  eligible_copy.reserve(eligible.size());
  for (const Article *a : eligible) eligible_copy.push_back(*a);
  std::map<std::string, Split> assignment = split_dataset(eligible_copy, opts.seed, opts.ratios);
  for (MSGInstance &inst : result.msg) inst.split = assignment.at(inst.article_id);
  for (SSPInstance &inst : result.ssp) inst.split = assignment.at(inst.article_id);
  return result;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_DATASET_HPP_
