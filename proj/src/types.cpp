#include "suffbench/types.hpp"

#include <charconv>

namespace suffbench {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::en:
      return "en";
    case Language::fa:
      return "fa";
  }
  return "?";
}

std::optional<Language> parse_language(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "fa") return Language::fa;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view s) {
  if (s.size() != 1 || s[0] < 'A' || s[0] > 'D') return std::nullopt;
  return static_cast<Label>(s[0] - 'A');
}

std::string Level::to_string() const {
  return is_noexp() ? std::string("noexp") : std::to_string(percent_);
}

std::optional<Level> Level::parse(std::string_view s) {
  if (s == "noexp") return Level::noexp();
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  Level level(v);
  if (!level.is_sweep_level()) return std::nullopt;
  return level;
}

std::string_view to_string(Masking m) { return m == Masking::raw ? "raw" : "masked"; }

std::string_view to_string(LengthStatus s) {
  switch (s) {
    case LengthStatus::within_budget:
      return "within_budget";
    case LengthStatus::truncated:
      return "truncated";
    case LengthStatus::over_budget_accepted:
      return "over_budget_accepted";
  }
  return "?";
}

std::string_view to_string(ParseStatus s) { return s == ParseStatus::ok ? "ok" : "unparseable"; }

std::optional<Masking> parse_masking(std::string_view s) {
  if (s == "raw") return Masking::raw;
  if (s == "masked") return Masking::masked;
  return std::nullopt;
}

std::optional<LengthStatus> parse_length_status(std::string_view s) {
  if (s == "within_budget") return LengthStatus::within_budget;
  if (s == "truncated") return LengthStatus::truncated;
  if (s == "over_budget_accepted") return LengthStatus::over_budget_accepted;
  return std::nullopt;
}

std::optional<ParseStatus> parse_parse_status(std::string_view s) {
  if (s == "ok") return ParseStatus::ok;
  if (s == "unparseable") return ParseStatus::unparseable;
  return std::nullopt;
}

}  // namespace suffbench
