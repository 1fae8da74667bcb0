// include/scriptkit/frames.hpp

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

#ifndef SCRIPTKIT_FRAMES_HPP_
#define SCRIPTKIT_FRAMES_HPP_

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "scriptkit/common.hpp"
#include "scriptkit/png_io.hpp"

namespace scriptkit {

/// Handle to a video stored as a directory of numbered RGB frames
/// (frame_000000.png, frame_000001.png, ...). Duration in seconds is
/// frame_count / fps.
struct VideoRef {
  std::string uri;        // frame directory path; may be empty for a 0-frame video
  std::size_t frame_count = 0;
  double fps = 30.0;

  bool empty() const { return frame_count == 0; }
  double duration_s() const { return fps > 0 ? static_cast<double>(frame_count) / fps : 0.0; }
};

inline std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.png", index);
  return std::string(buf);
}

/// Random access to the frames of one video. Implementations must be safe
/// for concurrent reads; all frames of a source share the same dimensions.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t frame_count() const = 0;
  virtual double fps() const = 0;
  virtual Image frame(std::size_t index) const = 0;
};

/// Frames held in memory; used by tests and synthetic fixtures.
class MemoryFrameSource : public FrameSource {
 public:
  MemoryFrameSource(std::vector<Image> frames, double fps)
      : frames_(std::move(frames)), fps_(fps) {
    for (std::size_t i = 1; i < frames_.size(); ++i) {
      if (!frames_[i].same_shape(frames_[0])) {
        throw Error("frames", "frame " + std::to_string(i) + " has mismatched shape");
      }
    }
  }

  std::size_t frame_count() const override { return frames_.size(); }
  double fps() const override { return fps_; }
  Image frame(std::size_t index) const override {
    if (index >= frames_.size()) throw Error("frames", "frame index out of range");
    return frames_[index];
  }

 private:
  std::vector<Image> frames_;
  double fps_;
};

/// Reads frames lazily from a frame directory. Each access decodes the PNG
/// from disk, so concurrent reads are safe without locking.
class DirectoryFrameSource : public FrameSource {
 public:
  explicit DirectoryFrameSource(VideoRef ref) : ref_(std::move(ref)) {
    namespace fs = std::filesystem;
    if (ref_.fps <= 0) throw Error("frames", "fps must be positive for " + ref_.uri);
    if (ref_.frame_count == 0) return;
    if (!fs::is_directory(ref_.uri)) throw Error("frames", "not a frame directory: " + ref_.uri);
    std::size_t on_disk = 0;
    while (fs::exists(fs::path(ref_.uri) / frame_file_name(on_disk))) ++on_disk;
    if (on_disk != ref_.frame_count) {
      throw Error("frames", ref_.uri + ": frame_count " + std::to_string(ref_.frame_count) +
                                " does not match " + std::to_string(on_disk) + " files on disk");
    }
    Image first = read_png((fs::path(ref_.uri) / frame_file_name(0)).string());
    width_ = first.width;
    height_ = first.height;
  }

  std::size_t frame_count() const override { return ref_.frame_count; }
  double fps() const override { return ref_.fps; }

  Image frame(std::size_t index) const override {
    if (index >= ref_.frame_count) throw Error("frames", "frame index out of range in " + ref_.uri);
    Image img = read_png((std::filesystem::path(ref_.uri) / frame_file_name(index)).string());
    if (img.width != width_ || img.height != height_) {
      throw Error("frames", ref_.uri + ": frame " + std::to_string(index) + " has mismatched shape");
    }
    return img;
  }

 private:
  VideoRef ref_;
  int width_ = 0;
  int height_ = 0;
};

/// Writes `frames` into `dir` using the canonical numbering and returns the
/// matching VideoRef. The directory is created if needed.
inline VideoRef write_frame_dir(const std::string &dir, const std::vector<Image> &frames, double fps) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_png((fs::path(dir) / frame_file_name(i)).string(), frames[i]);
  }
  return VideoRef{dir, frames.size(), fps};
}

inline std::shared_ptr<FrameSource> open_frames(const VideoRef &ref) {
  return std::make_shared<DirectoryFrameSource>(ref);
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_FRAMES_HPP_
