// include/scriptkit/video.hpp

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
// Frame-level procedures: transition-card detection, method segmentation,
// end-frame matching and keyframe extraction.

#ifndef SCRIPTKIT_VIDEO_HPP_
#define SCRIPTKIT_VIDEO_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scriptkit/common.hpp"
#include "scriptkit/frames.hpp"

namespace scriptkit {

/// Boolean per-pixel mask; true marks pixels whose values stay constant on
/// every transition card (everything except the card's name/ID area).
struct PixelMask {
  int width = 0;
  int height = 0;
  std::vector<bool> fixed;  // row-major, size = width * height

  bool at(int y, int x) const { return fixed[static_cast<std::size_t>(y) * width + x]; }
  std::size_t true_count() const { return static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), true)); }
};

/// The exemplar transition card plus the content-fixed region it is compared
/// on. Tolerance is the maximum per-channel absolute difference.
struct TransitionTemplate {
  Image exemplar;
  PixelMask mask;
  int tolerance = 0;

  void validate() const {
    if (exemplar.width != mask.width || exemplar.height != mask.height) {
      throw Error("video", "transition template exemplar and mask shapes differ");
    }
    if (mask.true_count() == 0) throw Error("video", "transition mask has no fixed pixels");
    if (tolerance < 0) throw Error("video", "transition tolerance must be >= 0");
  }
};

inline PixelMask mask_from_image(const Image &img) {
  PixelMask m;
  m.width = img.width;
  m.height = img.height;
  m.fixed.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      m.fixed[static_cast<std::size_t>(y) * img.width + x] =
          img.at(y, x, 0) != 0 || img.at(y, x, 1) != 0 || img.at(y, x, 2) != 0;
    }
  }
  return m;
}

/// Loads exemplar.png + mask.png + template.json from a template directory.
inline TransitionTemplate load_transition_template(const std::string &dir) {
  namespace fs = std::filesystem;
  TransitionTemplate t;
  t.exemplar = read_png((fs::path(dir) / "exemplar.png").string());
  t.mask = mask_from_image(read_png((fs::path(dir) / "mask.png").string()));
  const fs::path meta = fs::path(dir) / "template.json";
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    nlohmann::json obj = nlohmann::json::parse(in, nullptr, true);
    if (obj.contains("tolerance")) t.tolerance = obj["tolerance"].get<int>();
  }
  t.validate();
  return t;
}

/// True iff every masked pixel of the two frames differs by at most
/// `tolerance` in each channel. Shapes must agree.
inline bool region_match(const Image &a, const Image &b, const PixelMask &mask, int tolerance) {
  if (!a.same_shape(b) || a.width != mask.width || a.height != mask.height) {
    throw Error("video", "region_match: frame/mask shape mismatch");
  }
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (!mask.at(y, x)) continue;
      for (int c = 0; c < 3; ++c) {
        int d = static_cast<int>(a.at(y, x, c)) - static_cast<int>(b.at(y, x, c));
        if (d < 0) d = -d;
        if (d > tolerance) return false;
      }
    }
  }
  return true;
}

/// Half-open [begin, end) index range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const IndexRange &) const = default;
};

/// Maximal runs of consecutive frames whose content-fixed region matches the
/// exemplar card.
inline std::vector<IndexRange> detect_transition_runs(const FrameSource &source,
                                                      const TransitionTemplate &tmpl) {
  tmpl.validate();
  std::vector<IndexRange> runs;
  const std::size_t n = source.frame_count();
  bool in_run = false;
  for (std::size_t i = 0; i < n; ++i) {
    bool hit = region_match(source.frame(i), tmpl.exemplar, tmpl.mask, tmpl.tolerance);
    if (hit && !in_run) {
      runs.push_back({i, i + 1});
      in_run = true;
    } else if (hit) {
      runs.back().end = i + 1;
    } else {
      in_run = false;
    }
  }
  return runs;
}

/// Ascending indices of detected transition cards. A card held over several
/// consecutive frames reports only the first frame of the run, so one card
/// never splits the video more than once.
inline std::vector<std::size_t> detect_transition_frames(const FrameSource &source,
                                                         const TransitionTemplate &tmpl) {
  std::vector<std::size_t> indices;
  for (const IndexRange &run : detect_transition_runs(source, tmpl)) indices.push_back(run.begin);
  return indices;
}

struct SegmentSet {
  enum class Status { kOk, kUnavailable };
  std::vector<IndexRange> segments;
  Status status = Status::kUnavailable;

  bool ok() const { return status == Status::kOk; }
};

namespace detail {

inline SegmentSet segments_between(std::size_t frame_count, const std::vector<IndexRange> &cuts,
                                   std::size_t method_count) {
  SegmentSet out;
  std::size_t cursor = 0;
  for (const IndexRange &cut : cuts) {
    if (cut.begin < cursor || cut.end > frame_count) {
      throw Error("video", "transition indices out of order or out of bounds");
    }
    if (cut.begin > cursor) out.segments.push_back({cursor, cut.begin});
    cursor = cut.end;
  }
  if (cursor < frame_count) out.segments.push_back({cursor, frame_count});
  out.status = (out.segments.size() == method_count) ? SegmentSet::Status::kOk
                                                     : SegmentSet::Status::kUnavailable;
  return out;
}

}  // namespace detail

/// Splits [0, frame_count) at the given transition frame indices; the
/// transition frames themselves belong to no segment. When the number of
/// resulting segments differs from `method_count` the video is reported
/// unavailable for its methods.
inline SegmentSet segment_by_transitions(const FrameSource &source,
                                         const std::vector<std::size_t> &transition_indices,
                                         std::size_t method_count) {
  std::vector<IndexRange> cuts;
  cuts.reserve(transition_indices.size());
  for (std::size_t idx : transition_indices) cuts.push_back({idx, idx + 1});
  return detail::segments_between(source.frame_count(), cuts, method_count);
}

/// Run-aware variant used by the dataset builder: a card held over several
/// frames is excluded whole, so segments never contain card frames.
inline SegmentSet segment_by_transition_runs(std::size_t frame_count,
                                             const std::vector<IndexRange> &runs,
                                             std::size_t method_count) {
  return detail::segments_between(frame_count, runs, method_count);
}

/// Index of the first frame equal to `end_frame` across the whole frame
/// (within per-channel tolerance), or nullopt when no frame matches.
inline std::optional<std::size_t> match_end_frame(const FrameSource &source, const Image &end_frame,
                                                  int tolerance = 0) {
  const std::size_t n = source.frame_count();
  if (n == 0) return std::nullopt;
  PixelMask all;
  all.width = end_frame.width;
  all.height = end_frame.height;
  all.fixed.assign(static_cast<std::size_t>(end_frame.width) * end_frame.height, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (region_match(source.frame(i), end_frame, all, tolerance)) return i;
  }
  return std::nullopt;
}

struct Keyframe {
  std::size_t frame_index = 0;
  double timestamp_s = 0.0;
};

struct KeyframeConfig {
  // Scene-change threshold: mean + stddev_factor * stddev of the
  // frame-to-frame deltas.
  double stddev_factor = 1.0;
  // Minimum spacing between accepted scene boundaries, in frames.
  // <= 0 means derive it from the source: half a second of frames.
  int min_gap_frames = 0;
};

/// Mean absolute per-channel difference between two equally shaped frames.
inline double frame_delta(const Image &a, const Image &b) {
  if (!a.same_shape(b)) throw Error("video", "frame_delta: shape mismatch");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    int d = static_cast<int>(a.pixels[i]) - static_cast<int>(b.pixels[i]);
    total += static_cast<std::uint64_t>(d < 0 ? -d : d);
  }
  return a.pixels.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(a.pixels.size());
}

/// Picks one representative frame per detected scene. Scene boundaries are
/// local maxima of the frame-difference signal above an adaptive threshold,
/// thinned to a minimum gap; each scene then contributes its middle frame.
/// A video with no detected boundary yields its single middle frame.
inline std::vector<Keyframe> extract_keyframes(const FrameSource &source,
                                               const KeyframeConfig &config = {}) {
  const std::size_t n = source.frame_count();
  if (n == 0) throw Error("video", "extract_keyframes: empty video");
  const double fps = source.fps();
  int min_gap = config.min_gap_frames;
  if (min_gap <= 0) min_gap = std::max(1, static_cast<int>(std::llround(fps / 2.0)));

  auto make_keyframe = [&](std::size_t idx) {
    return Keyframe{idx, fps > 0 ? static_cast<double>(idx) / fps : 0.0};
  };

  std::vector<std::size_t> boundaries;
  if (n >= 2) {
    // deltas[i] is the change from frame i-1 to frame i, for i in [1, n).
    std::vector<double> deltas(n, 0.0);
    Image prev = source.frame(0);
    for (std::size_t i = 1; i < n; ++i) {
      Image cur = source.frame(i);
      deltas[i] = frame_delta(prev, cur);
      prev = std::move(cur);
    }
    double mean = 0.0;
    for (std::size_t i = 1; i < n; ++i) mean += deltas[i];
    mean /= static_cast<double>(n - 1);
    double var = 0.0;
    for (std::size_t i = 1; i < n; ++i) var += (deltas[i] - mean) * (deltas[i] - mean);
    var /= static_cast<double>(n - 1);
    const double threshold = mean + config.stddev_factor * std::sqrt(var);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i < n; ++i) {
      if (deltas[i] <= threshold) continue;
      double left = (i >= 2) ? deltas[i - 1] : -1.0;
      double right = (i + 1 < n) ? deltas[i + 1] : -1.0;
      if (deltas[i] >= left && deltas[i] >= right) candidates.push_back(i);
    }
    // Greedy thinning, strongest first, ties resolved toward earlier frames.
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (deltas[candidates[a]] != deltas[candidates[b]]) return deltas[candidates[a]] > deltas[candidates[b]];
      return candidates[a] < candidates[b];
    });
    for (std::size_t k : order) {
      std::size_t idx = candidates[k];
      bool blocked = false;
      for (std::size_t kept : boundaries) {
        std::size_t gap = kept > idx ? kept - idx : idx - kept;
        if (gap < static_cast<std::size_t>(min_gap)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) boundaries.push_back(idx);
    }
    std::sort(boundaries.begin(), boundaries.end());
  }

  std::vector<Keyframe> keys;
  std::size_t start = 0;
  for (std::size_t b : boundaries) {
    keys.push_back(make_keyframe(start + (b - start) / 2));
    start = b;
  }
  keys.push_back(make_keyframe(start + (n - start) / 2));
  return keys;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_VIDEO_HPP_
