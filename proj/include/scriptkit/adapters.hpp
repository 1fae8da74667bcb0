// include/scriptkit/adapters.hpp

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
// JSON-over-HTTP adapters that put real models behind the backend contracts.
// A model server exposes POST /caption, /instruct, /entail, /next_token_dist
// and GET /vocab. These adapters are optional extras; nothing in the toolkit
// requires them.

#ifndef SCRIPTKIT_ADAPTERS_HPP_
#define SCRIPTKIT_ADAPTERS_HPP_

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scriptkit/backends.hpp"
#include "scriptkit/common.hpp"

namespace scriptkit {

/// Checkpoint names and fine-tuning settings for the reference stack. The
/// fine-tuning values are what the served models are expected to have been
/// trained with; this toolkit performs no training itself.
struct RemoteBackendDefaults {
  std::string captioner_model = "OFA-Sys/ofa-base";
  std::string instruction_model = "vicuna-13b-v1.1";
  std::string nli_model = "nli-deberta-v3-base";
  std::string decoder_model = "univl-youcookii";
  double learning_rate = 3e-5;
  int batch_size = 128;
  int max_epochs = 100;
  int early_stopping_patience = 5;
};

struct RemoteConfig {
  std::string host = "127.0.0.1";
  int port = 8421;
  int timeout_s = 30;
  RemoteBackendDefaults defaults;
};

namespace detail {

inline std::string base64_encode(const std::uint8_t *data, std::size_t len) {
  static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= data[i + 2];
    out.push_back(table[(chunk >> 18) & 63]);
    out.push_back(table[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? table[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? table[chunk & 63] : '=');
  }
  return out;
}

inline nlohmann::json post_json(const RemoteConfig &config, const std::string &path,
                                const nlohmann::json &body) {
  httplib::Client client(config.host, config.port);
  client.set_read_timeout(config.timeout_s, 0);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw Error("remote", "POST " + path + " failed" +
                              (res ? " with status " + std::to_string(res->status) : ""));
  }
  return nlohmann::json::parse(res->body);
}

}  // namespace detail

class RemoteCaptioner : public Captioner {
 public:
  explicit RemoteCaptioner(RemoteConfig config) : config_(std::move(config)) {}

  std::string caption(const Image &frame) const override {
    nlohmann::json body{{"model", config_.defaults.captioner_model},
                        {"width", frame.width},
                        {"height", frame.height},
                        {"pixels_b64", detail::base64_encode(frame.pixels.data(), frame.pixels.size())}};
    return detail::post_json(config_, "/caption", body).at("caption").get<std::string>();
  }

 private:
  RemoteConfig config_;
};

class RemoteInstructionModel : public InstructionModel {
 public:
  explicit RemoteInstructionModel(RemoteConfig config) : config_(std::move(config)) {}

  std::string instruct(const std::string &prompt) const override {
    nlohmann::json body{{"model", config_.defaults.instruction_model}, {"prompt", prompt}};
    return detail::post_json(config_, "/instruct", body).at("text").get<std::string>();
  }

 private:
  RemoteConfig config_;
};

class RemoteNliScorer : public NliScorer {
 public:
  explicit RemoteNliScorer(RemoteConfig config) : config_(std::move(config)) {}

  double entail(const std::string &premise, const std::string &hypothesis) const override {
    nlohmann::json body{{"model", config_.defaults.nli_model},
                        {"premise", premise},
                        {"hypothesis", hypothesis}};
    double p = detail::post_json(config_, "/entail", body).at("entailment").get<double>();
    return std::min(1.0, std::max(0.0, p));
  }

 private:
  RemoteConfig config_;
};

class RemoteStepDecoder : public StepDecoder {
 public:
  /// `with_knowledge` selects which of the two served encoders answers.
  RemoteStepDecoder(RemoteConfig config, bool with_knowledge)
      : config_(std::move(config)), with_knowledge_(with_knowledge) {
    httplib::Client client(config_.host, config_.port);
    client.set_read_timeout(config_.timeout_s, 0);
    auto res = client.Get("/vocab");
    if (!res || res->status != 200) throw Error("remote", "GET /vocab failed");
    auto vocab = std::make_shared<std::vector<std::string>>();
    for (const auto &t : nlohmann::json::parse(res->body).at("vocab")) {
      vocab->push_back(t.get<std::string>());
    }
    vocab_ = vocab;
  }

  std::shared_ptr<const std::vector<std::string>> vocab() const override { return vocab_; }

  TokenDistribution next_token_dist(const std::string &goal, const std::string &text_context,
                                    const VideoRef &video,
                                    const std::vector<std::string> &prefix) const override {
    nlohmann::json body{{"model", config_.defaults.decoder_model},
                        {"with_knowledge", with_knowledge_},
                        {"goal", goal},
                        {"context", text_context},
                        {"video", {{"uri", video.uri}, {"frame_count", video.frame_count}, {"fps", video.fps}}},
                        {"prefix", prefix}};
    nlohmann::json reply = detail::post_json(config_, "/next_token_dist", body);
    TokenDistribution dist;
    dist.vocab = vocab_;
    dist.probs = reply.at("probs").get<std::vector<double>>();
    if (!dist.valid()) throw Error("remote", "server returned an invalid distribution");
    return dist;
  }

 private:
  RemoteConfig config_;
  bool with_knowledge_;
  std::shared_ptr<const std::vector<std::string>> vocab_;
};

/// Full backend set served over HTTP; the embedding scorer stays local since
/// the metrics only need a deterministic embedding space.
inline BackendSet make_remote_backends(const RemoteConfig &config) {
  BackendSet set;
  set.captioner = std::make_shared<RemoteCaptioner>(config);
  set.instruction_llm = std::make_shared<RemoteInstructionModel>(config);
  set.nli_scorer = std::make_shared<RemoteNliScorer>(config);
  set.decoder_with_knowledge = std::make_shared<RemoteStepDecoder>(config, true);
  set.decoder_without_knowledge = std::make_shared<RemoteStepDecoder>(config, false);
  set.embedding_scorer = std::make_shared<ToyEmbeddingScorer>();
  set.validate();
  return set;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_ADAPTERS_HPP_
