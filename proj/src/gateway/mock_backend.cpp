#include "suffbench/gateway/mock_backend.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>

#include "suffbench/error.hpp"
#include "suffbench/hash.hpp"
#include "suffbench/text.hpp"

namespace suffbench::gateway {

using json = nlohmann::json;

namespace {

constexpr std::string_view kScheme = "mock://";

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::array<std::string_view, 48> kVocabulary{
    "energy",    "plants",    "light",     "water",    "heat",       "because",   "the",      "sun",
    "cells",     "oxygen",    "carbon",    "dioxide",  "process",    "mass",      "force",    "motion",
    "gravity",   "pulls",     "objects",   "toward",   "earth",      "surface",   "layers",   "rock",
    "erosion",   "changes",   "over",      "time",     "animals",    "adapt",     "habitat",  "food",
    "chain",     "producers", "consumers", "reaction", "temperature","increases", "matter",   "states",
    "solid",     "liquid",    "gas",       "evidence", "shows",      "that",      "this",     "result"};

HttpResponse error_response(int status, const std::string& message) {
  json body = {{"error", {{"message", message}, {"type", "invalid_request_error"}}}};
  return {status, body.dump()};
}

class MockTransport final : public Transport {
 public:
  explicit MockTransport(MockOptions options) : options_(options) {}

  HttpResponse post_json(std::string_view path, const std::string& body, const Headers&,
                         std::chrono::milliseconds) override {
    json req;
    try {
      req = json::parse(body);
    } catch (const json::parse_error&) {
      return error_response(400, "malformed JSON body");
    }
    if (!req.contains("model") || !req["model"].is_string()) return error_response(400, "missing model");
    if (path == "/chat/completions") return chat(req);
    if (path == "/completions") return completions(req);
    if (path == "/embeddings") return embeddings(req);
    return error_response(404, "unknown route " + std::string(path));
  }

 private:
  HttpResponse chat(const json& req) const {
    if (!req.contains("messages") || !req["messages"].is_array()) return error_response(400, "missing messages");
    std::string prompt;
    for (const auto& m : req["messages"]) prompt += m.value("content", "") + "\n";
    const std::string model = req["model"].get<std::string>();

    std::uint64_t state = sha256_u64(std::to_string(options_.seed) + '\x1f' + model + '\x1f' + prompt);
    const char label = static_cast<char>('A' + splitmix64(state) % 4);
    const std::size_t n_words = 6 + splitmix64(state) % 45;
    const bool leak = splitmix64(state) % 2 == 0;

    std::string expl;
    std::size_t words = 0;
    if (leak) {
      expl = std::string("Option ") + label + " is correct because";
      words = 5;
    }
    for (; words < n_words; ++words) {
      std::string_view w = kVocabulary[splitmix64(state) % kVocabulary.size()];
      if (!expl.empty()) expl.push_back(' ');
      if (expl.empty()) {
        expl.push_back(static_cast<char>(w[0] - 'a' + 'A'));
        expl.append(w.substr(1));
      } else {
        expl.append(w);
      }
    }
    expl.push_back('.');

    json resp = {{"id", "mock-" + std::to_string(state % 1000000)},
                 {"object", "chat.completion"},
                 {"model", model},
                 {"choices",
                  {{{"index", 0},
                    {"message", {{"role", "assistant"}, {"content", std::string("Answer: ") + label + "\nExplanation: " + expl}}},
                    {"finish_reason", "stop"}}}}};
    return {200, resp.dump()};
  }

  HttpResponse completions(const json& req) const {
    if (!req.value("echo", false) || !req.contains("logprobs") || req["logprobs"].is_null()) {
      return error_response(400, "mock completions require echo=true and logprobs");
    }
    if (!req.contains("prompt") || !req["prompt"].is_string()) return error_response(400, "missing prompt");
    const std::string prompt = req["prompt"].get<std::string>();
    const std::string model = req["model"].get<std::string>();

    auto tokens = mock_tokenize(prompt);
    json token_logprobs = json::array();
    json offsets = json::array();
    std::uint64_t prefix_hash = fnv1a(model, fnv1a(std::to_string(options_.seed)));
    std::size_t offset = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i == 0) {
        token_logprobs.push_back(nullptr);
      } else if (options_.logprobs == MockOptions::Logprobs::uniform) {
        token_logprobs.push_back(-1.0);
      } else {
        std::uint64_t state = prefix_hash ^ (fnv1a(tokens[i]) * 0x9E3779B97F4A7C15ULL);
        token_logprobs.push_back(-(0.05 + 4.95 * unit_double(splitmix64(state))));
      }
      offsets.push_back(offset);
      offset += tokens[i].size();
      prefix_hash = fnv1a(tokens[i], prefix_hash);
    }
    json resp = {{"id", "mock-cmpl"},
                 {"object", "text_completion"},
                 {"model", model},
                 {"choices",
                  {{{"index", 0},
                    {"text", prompt},
                    {"logprobs",
                     {{"tokens", tokens},
                      {"token_logprobs", token_logprobs},
                      {"text_offset", offsets},
                      {"top_logprobs", nullptr}}},
                    {"finish_reason", "length"}}}}};
    return {200, resp.dump()};
  }

  HttpResponse embeddings(const json& req) const {
    std::string input;
    if (req.contains("input") && req["input"].is_string()) {
      input = req["input"].get<std::string>();
    } else if (req.contains("input") && req["input"].is_array() && req["input"].size() == 1 &&
               req["input"][0].is_string()) {
      input = req["input"][0].get<std::string>();
    } else {
      return error_response(400, "missing input");
    }

    std::vector<double> vec(options_.dim, 0.0);
    bool any = false;
    if (options_.embed == MockOptions::Embed::bow) {
      std::string folded = text::fold_case(input);
      for (auto [b, e] : text::word_spans(folded)) {
        std::uint64_t state = fnv1a(std::string_view(folded).substr(b, e - b)) ^ options_.seed;
        for (auto& x : vec) x += 2.0 * unit_double(splitmix64(state)) - 1.0;
        any = true;
      }
    }
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    if (!any || norm == 0.0) {
      std::fill(vec.begin(), vec.end(), 0.0);
      vec[0] = 1.0;
    } else {
      norm = std::sqrt(norm);
      for (auto& x : vec) x /= norm;
    }
    json resp = {{"object", "list"},
                 {"model", req["model"]},
                 {"data", {{{"object", "embedding"}, {"index", 0}, {"embedding", vec}}}}};
    return {200, resp.dump()};
  }

  MockOptions options_;
};

}  // namespace

bool is_mock_url(std::string_view url) { return url.starts_with(kScheme); }

MockOptions MockOptions::parse(std::string_view url) {
  if (!is_mock_url(url)) throw ConfigError("not a mock URL: " + std::string(url));
  std::string_view rest = url.substr(kScheme.size());
  std::string_view seed_part = rest.substr(0, rest.find('?'));
  std::string_view query = rest.size() > seed_part.size() ? rest.substr(seed_part.size() + 1) : std::string_view{};

  MockOptions opts;
  auto [ptr, ec] = std::from_chars(seed_part.data(), seed_part.data() + seed_part.size(), opts.seed);
  if (seed_part.empty() || ec != std::errc() || ptr != seed_part.data() + seed_part.size()) {
    throw ConfigError("mock URL needs an integer seed: " + std::string(url));
  }
  while (!query.empty()) {
    std::string_view pair = query.substr(0, query.find('&'));
    query = pair.size() < query.size() ? query.substr(pair.size() + 1) : std::string_view{};
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw ConfigError("bad mock URL parameter: " + std::string(pair));
    std::string_view key = pair.substr(0, eq);
    std::string_view value = pair.substr(eq + 1);
    if (key == "logprobs" && value == "uniform") {
      opts.logprobs = Logprobs::uniform;
    } else if (key == "logprobs" && value == "hash") {
      opts.logprobs = Logprobs::hash;
    } else if (key == "embed" && value == "bow") {
      opts.embed = Embed::bow;
    } else if (key == "embed" && value == "constant") {
      opts.embed = Embed::constant;
    } else if (key == "dim") {
      std::size_t dim = 0;
      auto [p, e] = std::from_chars(value.data(), value.data() + value.size(), dim);
      if (e != std::errc() || p != value.data() + value.size() || dim == 0) {
        throw ConfigError("bad mock dim: " + std::string(value));
      }
      opts.dim = dim;
    } else {
      throw ConfigError("unknown mock URL parameter: " + std::string(pair));
    }
  }
  return opts;
}

std::vector<std::string> mock_tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t start = i;
    if (is_ascii_space(s[i])) {
      ++i;
      if (i >= s.size() || is_ascii_space(s[i])) {
        tokens.emplace_back(s.substr(start, 1));
        continue;
      }
    }
    while (i < s.size() && !is_ascii_space(s[i])) ++i;
    tokens.emplace_back(s.substr(start, i - start));
  }
  return tokens;
}

std::unique_ptr<Transport> make_mock_transport(const MockOptions& options) {
  return std::make_unique<MockTransport>(options);
}

}  // namespace suffbench::gateway
