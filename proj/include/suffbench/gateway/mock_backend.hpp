#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "suffbench/gateway/transport.hpp"

namespace suffbench::gateway {

/// Deterministic offline stand-in for an OpenAI-compatible server, selected
/// by base URLs of the form
///
///   mock://<seed>[?logprobs=uniform|hash][&embed=bow|constant][&dim=N]
///
/// It answers the same three routes as a live server with the same JSON
/// shapes, so the gateway's request, cache and parsing paths are identical.
///
///  - /chat/completions: "Answer: <L>\nExplanation: <words>" where the label,
///    length (6..50 words) and words are a function of (seed, model, prompt).
///    About half the explanations name their label ("Option B is correct ...").
///  - /completions (echo + logprobs): mock tokens are one optional leading
///    space plus a run of non-space bytes; any further space is a token of
///    its own, so " A" is one token. `uniform` gives every token -1.0;
///    `hash` draws from (-5, -0.05] keyed by the whole preceding text.
///  - /embeddings: `bow` sums a pseudo-random vector per case-folded word and
///    normalizes (unit norm, overlapping texts score high); `constant`
///    returns the same unit vector for every text.
struct MockOptions {
  std::uint64_t seed = 0;
  enum class Logprobs { uniform, hash } logprobs = Logprobs::uniform;
  enum class Embed { bow, constant } embed = Embed::bow;
  std::size_t dim = 64;

  /// Parses a mock:// URL. Throws ConfigError on anything else.
  static MockOptions parse(std::string_view url);
};

bool is_mock_url(std::string_view url);

/// The mock tokenizer, exposed for tests.
std::vector<std::string> mock_tokenize(std::string_view text);

std::unique_ptr<Transport> make_mock_transport(const MockOptions& options);

}  // namespace suffbench::gateway
