#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suffbench/manifest.hpp"
#include "suffbench/masker.hpp"
#include "suffbench/metrics.hpp"
#include "suffbench/scorer.hpp"
#include "suffbench/types.hpp"

namespace suffbench {

enum class Stage { generate, constrain, mask, score, similarity, aggregate };

inline constexpr std::array<Stage, 6> kStages{Stage::generate, Stage::constrain, Stage::mask,
                                              Stage::score,    Stage::similarity, Stage::aggregate};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

/// Identity of one unit of stage work.
struct WorkKey {
  Language language = Language::en;
  std::string item_id;
  std::string generator_model;
  Level level{0};

  friend auto operator<=>(const WorkKey&, const WorkKey&) = default;
  friend bool operator==(const WorkKey&, const WorkKey&) = default;
};

std::string to_string(const WorkKey& k);

WorkKey key_of(const Explanation& r);
WorkKey key_of(const MaskReport& r);
WorkKey key_of(const ScoreResult& r);
WorkKey key_of(const SimilarityRecord& r);
WorkKey key_of(const AggregateCell& r);

// Record <-> CSV. T is one of Explanation, MaskReport, ScoreResult,
// SimilarityRecord, AggregateCell.

template <typename T>
const std::vector<std::string>& csv_header();

/// Header plus one row per record, in the given order.
template <typename T>
std::string format_records(std::span<const T> records);

struct LoadStats {
  std::size_t records = 0;
  std::size_t duplicates = 0;  // later rows with an already-seen key
  std::size_t salvaged = 0;    // partial trailing record skipped
};

/// Parses a stage CSV. The first record per key wins; a partial trailing
/// record is skipped and counted. Throws StoreError on a wrong header or a
/// malformed row.
template <typename T>
std::vector<T> parse_records(std::string_view data, const std::string& source, LoadStats* stats = nullptr);

template <typename T>
std::vector<T> load_records(const std::filesystem::path& file, LoadStats* stats = nullptr);

/// One directory per run: manifest.json plus one CSV per stage.
class RunStore {
 public:
  /// Creates the store, or resumes one whose manifest has the same identity
  /// hash (ManifestMismatch otherwise). Partial trailing records left by an
  /// interrupted append are cut off and counted in salvaged().
  static RunStore open(const std::filesystem::path& dir, const RunManifest& manifest);

  /// Opens an existing store with its own manifest, read-mostly.
  static RunStore open_existing(const std::filesystem::path& dir);

  static std::optional<RunManifest> read_manifest(const std::filesystem::path& dir);

  RunStore(RunStore&& other) noexcept;

  const RunManifest& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::size_t salvaged() const { return salvaged_; }

  static std::string_view file_name(Stage stage);
  std::filesystem::path file(Stage stage) const { return dir_ / std::string(file_name(stage)); }

  /// Line-atomic append. Throws StoreError if the record's run_id differs
  /// from the manifest's.
  void append(const Explanation& r);
  void append(const MaskReport& r);
  void append(const ScoreResult& r);
  void append(const SimilarityRecord& r);

  /// Replaces aggregates.csv.
  void write_aggregates(std::span<const AggregateCell> cells);

  std::vector<Explanation> explanations() const;
  std::vector<MaskReport> masks() const;
  std::vector<ScoreResult> scores() const;
  std::vector<SimilarityRecord> similarities() const;
  std::vector<AggregateCell> aggregates() const;

  /// Keys in `expected` with no persisted record for `stage`, in sorted order.
  /// generate and constrain both live in explanations.csv (level 0 vs >0).
  std::vector<WorkKey> pending_work(Stage stage, std::span<const WorkKey> expected) const;

  /// Rewrites every stage file sorted by key with duplicates dropped, so the
  /// bytes do not depend on completion order.
  void canonicalize();

 private:
  RunStore(std::filesystem::path dir, RunManifest manifest);

  template <typename T>
  void append_record(Stage stage, const T& r);
  void repair();

  std::filesystem::path dir_;
  RunManifest manifest_;
  std::size_t salvaged_ = 0;
  std::unique_ptr<std::mutex> mu_;
};

/// Writes `data` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

std::string read_file(const std::filesystem::path& path);

}  // namespace suffbench
