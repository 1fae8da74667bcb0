// include/scriptkit/corpus.hpp

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
// Domain model for multimedia instructional corpora: articles with methods
// and step clips, plus the two task-instance records (full-script generation
// and next-step prediction) and their JSONL schemas.

#ifndef SCRIPTKIT_CORPUS_HPP_
#define SCRIPTKIT_CORPUS_HPP_

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scriptkit/common.hpp"
#include "scriptkit/frames.hpp"

namespace scriptkit {

using json = nlohmann::json;

enum class Split { kTrain, kDev, kTest };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

inline Split split_from_string(const std::string &s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw Error("schema", "invalid split value \"" + s + "\"");
}

/// One step of a method: its text description and an optional demo clip.
struct StepRecord {
  std::string text;
  std::optional<VideoRef> clip;
};

/// A method is one way of completing the article's task.
struct Method {
  int index = 1;  // 1-based method ID
  std::vector<StepRecord> steps;
  std::optional<VideoRef> method_video;
};

struct Article {
  std::string id;
  std::string title;   // the task goal
  std::string domain;
  std::vector<Method> methods;
  std::optional<VideoRef> full_video;
};

/// Full-script generation instance: (goal, demonstration video) -> script.
struct MSGInstance {
  std::string id;
  std::string goal;
  VideoRef video;
  std::vector<std::string> script;
  std::string article_id;
  int method_index = 1;
  Split split = Split::kTrain;
};

/// Next-step prediction instance: (goal, partial video of the first k steps)
/// -> step k+1.
struct SSPInstance {
  std::string id;
  std::string goal;
  VideoRef partial_video;
  int preceding_count = 0;  // k
  std::string target_step;  // S_{k+1}
  std::string article_id;
  int method_index = 1;
  Split split = Split::kTrain;
};

/// The domain labels observed in the source corpus. Unknown labels produce a
/// warning, not a failure, since the source taxonomy includes catch-alls.
inline const std::vector<std::string> &default_domains() {
  static const std::vector<std::string> kDomains = {
      "Animals and Pets",
      "Art and Entertainment",
      "Business and Finance",
      "Cars & Other Vehicles",
      "Computers and Electronics",
      "Education and Communication",
      "Family Life",
      "Food and Entertaining",
      "Health",
      "Hobbies and Crafts",
      "Holidays & Traditions",
      "Home and Garden",
      "Insect pests and diseases",
      "Other",
      "Personal Care and Style",
      "Philosophy and Religion",
      "Relationships",
      "Sports and Fitness",
      "Travel",
      "Work World",
      "Youth",
  };
  return kDomains;
}

struct ValidationReport {
  bool eligible = false;
  std::vector<std::string> reasons;   // why ineligible (empty when eligible)
  std::vector<std::string> warnings;  // non-fatal issues (unknown domain, ...)
};

/// An article is usable when it ships a full demonstration video, or when at
/// least one method has a clip on every step.
inline ValidationReport validate_article(const Article &article,
                                         const std::vector<std::string> &domain_allowlist = default_domains()) {
  ValidationReport report;
  if (article.id.empty()) {
    report.reasons.push_back("article id is empty");
    return report;
  }
  if (article.methods.empty()) {
    report.reasons.push_back("article has no methods");
    return report;
  }
  for (const Method &m : article.methods) {
    if (m.steps.empty()) {
      report.reasons.push_back("method " + std::to_string(m.index) + " has no steps");
      return report;
    }
    for (std::size_t i = 0; i < m.steps.size(); ++i) {
      if (trim(m.steps[i].text).empty()) {
        report.reasons.push_back("method " + std::to_string(m.index) + " step " +
                                 std::to_string(i + 1) + " has empty text");
        return report;
      }
    }
  }
  if (!domain_allowlist.empty() &&
      std::find(domain_allowlist.begin(), domain_allowlist.end(), article.domain) == domain_allowlist.end()) {
    report.warnings.push_back("unknown domain \"" + article.domain + "\"");
  }

  if (article.full_video.has_value()) {
    report.eligible = true;
    return report;
  }
  bool any_fully_clipped = false;
  for (const Method &m : article.methods) {
    std::vector<int> missing;
    for (std::size_t i = 0; i < m.steps.size(); ++i) {
      if (!m.steps[i].clip.has_value()) missing.push_back(static_cast<int>(i + 1));
    }
    if (missing.empty()) {
      any_fully_clipped = true;
    } else {
      std::string detail = "method " + std::to_string(m.index) + " missing clips for steps:";
      for (int s : missing) detail += " " + std::to_string(s);
      report.reasons.push_back(detail);
    }
  }
  if (any_fully_clipped) {
    report.eligible = true;
    report.reasons.clear();
  } else {
    report.reasons.insert(report.reasons.begin(), "no full video and no fully clipped method");
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization
// ---------------------------------------------------------------------------

namespace detail {

inline const json &require_field(const json &obj, const char *name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    throw Error("schema", std::string("missing field \"") + name + "\"");
  }
  return *it;
}

inline std::string require_string(const json &obj, const char *name) {
  const json &v = require_field(obj, name);
  if (!v.is_string()) throw Error("schema", std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

inline std::int64_t require_int(const json &obj, const char *name) {
  const json &v = require_field(obj, name);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw Error("schema", std::string("field \"") + name + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

inline double require_number(const json &obj, const char *name) {
  const json &v = require_field(obj, name);
  if (!v.is_number()) throw Error("schema", std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

inline json to_json(const VideoRef &v) {
  return json{{"uri", v.uri}, {"frame_count", v.frame_count}, {"fps", v.fps}};
}

inline VideoRef video_ref_from_json(const json &obj) {
  if (!obj.is_object()) throw Error("schema", "video reference must be an object");
  VideoRef v;
  v.uri = detail::require_string(obj, "uri");
  std::int64_t count = detail::require_int(obj, "frame_count");
  if (count < 0) throw Error("schema", "field \"frame_count\" must be >= 0");
  v.frame_count = static_cast<std::size_t>(count);
  v.fps = detail::require_number(obj, "fps");
  if (!(v.fps > 0)) throw Error("schema", "field \"fps\" must be positive");
  return v;
}

inline json to_json(const MSGInstance &inst) {
  return json{{"id", inst.id},
              {"goal", inst.goal},
              {"video", to_json(inst.video)},
              {"script", inst.script},
              {"article_id", inst.article_id},
              {"method_index", inst.method_index},
              {"split", to_string(inst.split)}};
}

inline MSGInstance msg_instance_from_json(const json &obj) {
  MSGInstance inst;
  inst.id = detail::require_string(obj, "id");
  inst.goal = detail::require_string(obj, "goal");
  inst.video = video_ref_from_json(detail::require_field(obj, "video"));
  const json &script = detail::require_field(obj, "script");
  if (!script.is_array() || script.empty()) {
    throw Error("schema", "field \"script\" must be a nonempty array");
  }
  for (const auto &s : script) {
    if (!s.is_string()) throw Error("schema", "field \"script\" must contain strings");
    inst.script.push_back(s.get<std::string>());
  }
  inst.article_id = detail::require_string(obj, "article_id");
  inst.method_index = static_cast<int>(detail::require_int(obj, "method_index"));
  inst.split = split_from_string(detail::require_string(obj, "split"));
  return inst;
}

inline json to_json(const SSPInstance &inst) {
  return json{{"id", inst.id},
              {"goal", inst.goal},
              {"partial_video", to_json(inst.partial_video)},
              {"preceding_count", inst.preceding_count},
              {"target_step", inst.target_step},
              {"article_id", inst.article_id},
              {"method_index", inst.method_index},
              {"split", to_string(inst.split)}};
}

inline SSPInstance ssp_instance_from_json(const json &obj) {
  SSPInstance inst;
  inst.id = detail::require_string(obj, "id");
  inst.goal = detail::require_string(obj, "goal");
  inst.partial_video = video_ref_from_json(detail::require_field(obj, "partial_video"));
  inst.preceding_count = static_cast<int>(detail::require_int(obj, "preceding_count"));
  if (inst.preceding_count < 0) throw Error("schema", "field \"preceding_count\" must be >= 0");
  if (inst.preceding_count == 0 && inst.partial_video.frame_count != 0) {
    throw Error("schema", "preceding_count 0 requires an empty partial_video");
  }
  inst.target_step = detail::require_string(obj, "target_step");
  if (trim(inst.target_step).empty()) throw Error("schema", "field \"target_step\" must be nonempty");
  inst.article_id = detail::require_string(obj, "article_id");
  inst.method_index = static_cast<int>(detail::require_int(obj, "method_index"));
  inst.split = split_from_string(detail::require_string(obj, "split"));
  return inst;
}

inline json to_json(const Article &a) {
  json methods = json::array();
  for (const Method &m : a.methods) {
    json steps = json::array();
    for (const StepRecord &s : m.steps) {
      json step{{"text", s.text}};
      if (s.clip) step["clip"] = to_json(*s.clip);
      steps.push_back(std::move(step));
    }
    json method{{"index", m.index}, {"steps", std::move(steps)}};
    if (m.method_video) method["method_video"] = to_json(*m.method_video);
    methods.push_back(std::move(method));
  }
  json out{{"id", a.id}, {"title", a.title}, {"domain", a.domain}, {"methods", std::move(methods)}};
  if (a.full_video) out["full_video"] = to_json(*a.full_video);
  return out;
}

inline Article article_from_json(const json &obj) {
  Article a;
  a.id = detail::require_string(obj, "id");
  a.title = detail::require_string(obj, "title");
  a.domain = detail::require_string(obj, "domain");
  const json &methods = detail::require_field(obj, "methods");
  if (!methods.is_array() || methods.empty()) {
    throw Error("schema", "field \"methods\" must be a nonempty array");
  }
  int expected_index = 1;
  for (const auto &mj : methods) {
    Method m;
    m.index = static_cast<int>(detail::require_int(mj, "index"));
    if (m.index != expected_index) {
      throw Error("schema", "method indices must be contiguous from 1");
    }
    ++expected_index;
    const json &steps = detail::require_field(mj, "steps");
    if (!steps.is_array() || steps.empty()) {
      throw Error("schema", "field \"steps\" must be a nonempty array");
    }
    for (const auto &sj : steps) {
      StepRecord s;
      s.text = detail::require_string(sj, "text");
      if (sj.contains("clip") && !sj["clip"].is_null()) s.clip = video_ref_from_json(sj["clip"]);
      m.steps.push_back(std::move(s));
    }
    if (mj.contains("method_video") && !mj["method_video"].is_null()) {
      m.method_video = video_ref_from_json(mj["method_video"]);
    }
    a.methods.push_back(std::move(m));
  }
  if (obj.contains("full_video") && !obj["full_video"].is_null()) {
    a.full_video = video_ref_from_json(obj["full_video"]);
  }
  return a;
}

// ---------------------------------------------------------------------------
// JSONL files: UTF-8, one object per line.
// ---------------------------------------------------------------------------

/// Parses every nonempty line of a JSONL file through `fn(json, line_no)`.
/// Malformed lines and schema violations are reported with their line number.
template <typename Fn>
void for_each_jsonl(const std::string &path, Fn &&fn) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error("io", path + ":" + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    try {
      fn(obj, line_no);
    } catch (const Error &e) {
      throw Error("schema", path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::vector<MSGInstance> read_msg_instances(const std::string &path) {
  std::vector<MSGInstance> out;
  for_each_jsonl(path, [&](const json &obj, std::size_t) { out.push_back(msg_instance_from_json(obj)); });
  return out;
}

inline std::vector<SSPInstance> read_ssp_instances(const std::string &path) {
  std::vector<SSPInstance> out;
  for_each_jsonl(path, [&](const json &obj, std::size_t) { out.push_back(ssp_instance_from_json(obj)); });
  return out;
}

inline std::vector<Article> read_articles(const std::string &path) {
  std::vector<Article> out;
  std::set<std::string> seen;
  for_each_jsonl(path, [&](const json &obj, std::size_t) {
    Article a = article_from_json(obj);
    if (!seen.insert(a.id).second) throw Error("schema", "duplicate article id \"" + a.id + "\"");
    out.push_back(std::move(a));
  });
  return out;
}

template <typename T>
void write_instances(const std::vector<T> &items, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path);
  for (const T &item : items) out << to_json(item).dump() << "\n";
  if (!out) throw Error("io", "failed writing " + path);
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_CORPUS_HPP_
