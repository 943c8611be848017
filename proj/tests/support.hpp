#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <nlohmann/json.hpp>

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "suffbench/corpus.hpp"
#include "suffbench/gateway/gateway.hpp"
#include "suffbench/prompts.hpp"

namespace suffbench::testing {

inline std::filesystem::path data_dir() { return SUFFBENCH_TEST_DATA_DIR; }
inline std::filesystem::path templates_dir() { return SUFFBENCH_TEMPLATES_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json load_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "suffbench") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

struct RecordedRequest {
  std::string path;
  std::string body;
  gateway::Headers headers;
};

/// Transport backed by a callback; records every request.
class FunctionTransport final : public gateway::Transport {
 public:
  using Handler = std::function<gateway::HttpResponse(std::string_view path, const nlohmann::json& body)>;

  explicit FunctionTransport(Handler handler, std::shared_ptr<std::vector<RecordedRequest>> log = nullptr)
      : handler_(std::move(handler)), log_(std::move(log)) {}

  gateway::HttpResponse post_json(std::string_view path, const std::string& body, const gateway::Headers& headers,
                                  std::chrono::milliseconds) override {
    {
      std::lock_guard lock(mu_);
      if (log_) log_->push_back({std::string(path), body, headers});
    }
    return handler_(path, nlohmann::json::parse(body));
  }

 private:
  Handler handler_;
  std::shared_ptr<std::vector<RecordedRequest>> log_;
  std::mutex mu_;
};

/// Replies from a fixed queue in order; throws when exhausted.
class ScriptedTransport final : public gateway::Transport {
 public:
  explicit ScriptedTransport(std::deque<gateway::HttpResponse> replies,
                             std::shared_ptr<std::vector<RecordedRequest>> log = nullptr)
      : replies_(std::move(replies)), log_(std::move(log)) {}

  gateway::HttpResponse post_json(std::string_view path, const std::string& body, const gateway::Headers& headers,
                                  std::chrono::milliseconds) override {
    std::lock_guard lock(mu_);
    if (log_) log_->push_back({std::string(path), body, headers});
    if (replies_.empty()) throw std::runtime_error("scripted transport exhausted");
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }

 private:
  std::deque<gateway::HttpResponse> replies_;
  std::shared_ptr<std::vector<RecordedRequest>> log_;
  std::mutex mu_;
};

inline gateway::GatewayOptions options_with(std::shared_ptr<gateway::Transport> transport,
                                            std::shared_ptr<gateway::Clock> clock = nullptr) {
  gateway::GatewayOptions o;
  o.clock = clock ? clock : std::make_shared<gateway::VirtualClock>();
  o.transport_factory = [transport](const gateway::ModelEndpoint&) {
    struct Shared final : gateway::Transport {
      std::shared_ptr<gateway::Transport> inner;
      explicit Shared(std::shared_ptr<gateway::Transport> t) : inner(std::move(t)) {}
      gateway::HttpResponse post_json(std::string_view p, const std::string& b, const gateway::Headers& h,
                                      std::chrono::milliseconds t) override {
        return inner->post_json(p, b, h, t);
      }
    };
    return std::make_unique<Shared>(transport);
  };
  return o;
}

inline gateway::ModelEndpoint endpoint(const std::string& url, const std::string& model, int rpm = 6000000) {
  gateway::ModelEndpoint e;
  e.base_url = url;
  e.model_id = model;
  e.requests_per_minute = rpm;
  return e;
}

inline gateway::HttpResponse chat_reply(const std::string& content) {
  nlohmann::json body = {{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}},
                                       {"finish_reason", "stop"}}}}};
  return {200, body.dump()};
}

/// Echo+logprobs reply for a single-token continuation appended to a
/// one-token prompt.
inline gateway::HttpResponse echo_reply(const std::string& continuation, double logprob) {
  nlohmann::json lp = {{"tokens", {"prompt", continuation}}, {"token_logprobs", {nullptr, logprob}}};
  nlohmann::json body = {{"choices", {{{"index", 0}, {"text", "prompt" + continuation}, {"logprobs", lp}}}}};
  return {200, body.dump()};
}

inline QuestionItem make_item(const std::string& id, const std::string& stem, std::array<std::string, 4> options,
                              Label gold, Language lang = Language::en) {
  QuestionItem q;
  q.id = id;
  q.stem = stem;
  q.options = std::move(options);
  q.gold = gold;
  q.language = lang;
  return q;
}

inline PromptTemplateSet repo_templates(Language lang) { return load_templates(templates_dir(), "v1", lang); }

/// Config JSON for a fully offline run over the bilingual fixture.
inline nlohmann::json mock_config(const std::filesystem::path& store, const std::string& scorer_url = "mock://7?logprobs=hash",
                                  const std::string& embed_url = "mock://3?embed=bow&dim=64") {
  auto ep = [](const std::string& url, const std::string& id) {
    return nlohmann::json{{"base_url", url}, {"model_id", id}, {"requests_per_minute", 6000000}};
  };
  return {{"corpora",
           {{{"path", (data_dir() / "arc_fixture_en.jsonl").string()}, {"language", "en"}},
            {{"path", (data_dir() / "arc_fixture_fa.jsonl").string()}, {"language", "fa"}}}},
          {"generators", {ep("mock://11", "mock-gen-a"), ep("mock://12", "mock-gen-b")}},
          {"scorer", ep(scorer_url, "mock-scorer")},
          {"embedder", ep(embed_url, "mock-embed")},
          {"templates", {{"dir", templates_dir().string()}, {"id", "v1"}}},
          {"store", store.string()},
          {"seed", 2024},
          {"concurrency", 4}};
}

}  // namespace suffbench::testing
