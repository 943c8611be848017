#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace suffbench {

enum class Language { en, fa };

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view s);

/// Answer option label. The harness only deals with four-option items.
enum class Label : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<Label, 4> kLabels{Label::A, Label::B, Label::C, Label::D};

inline char to_char(Label l) { return static_cast<char>('A' + static_cast<int>(l)); }
inline std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
std::optional<Label> parse_label(std::string_view s);

/// Constraint level: a percentage reduction in {0,10,...,90}, or the
/// no-explanation baseline condition.
class Level {
 public:
  constexpr Level() = default;
  constexpr explicit Level(int percent) : percent_(percent) {}
  static constexpr Level noexp() { return Level(kNoExp); }

  constexpr bool is_noexp() const { return percent_ == kNoExp; }
  constexpr int percent() const { return percent_; }

  /// True for 0,10,...,90 (not noexp).
  constexpr bool is_sweep_level() const {
    return percent_ >= 0 && percent_ <= 90 && percent_ % 10 == 0;
  }

  std::string to_string() const;
  static std::optional<Level> parse(std::string_view s);

  // noexp sorts before every numeric level.
  friend constexpr auto operator<=>(Level, Level) = default;

 private:
  static constexpr int kNoExp = -1;
  int percent_ = 0;
};

enum class Masking { raw, masked };
enum class LengthStatus { within_budget, truncated, over_budget_accepted };
enum class ParseStatus { ok, unparseable };

std::string_view to_string(Masking m);
std::string_view to_string(LengthStatus s);
std::string_view to_string(ParseStatus s);
std::optional<Masking> parse_masking(std::string_view s);
std::optional<LengthStatus> parse_length_status(std::string_view s);
std::optional<ParseStatus> parse_parse_status(std::string_view s);

/// One explanation text for an (item, generator model, level).
struct Explanation {
  std::string run_id;  // stamped when persisted
  std::string item_id;
  Language language = Language::en;
  std::string generator_model;
  Level level{0};
  std::string text;
  std::size_t word_count = 0;
  Masking masking = Masking::raw;
  LengthStatus length_status = LengthStatus::within_budget;
  ParseStatus parse_status = ParseStatus::ok;
  // Generator's own predicted label (level 0 only). Audit field; never
  // used for sufficiency or accuracy.
  std::optional<Label> generator_label;
  int attempts = 1;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

}  // namespace suffbench
