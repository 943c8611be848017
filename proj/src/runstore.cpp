#include "suffbench/runstore.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "suffbench/csv.hpp"
#include "suffbench/error.hpp"

namespace suffbench {

namespace fs = std::filesystem;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::generate: return "generate";
    case Stage::constrain: return "constrain";
    case Stage::mask: return "mask";
    case Stage::score: return "score";
    case Stage::similarity: return "similarity";
    case Stage::aggregate: return "aggregate";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : kStages) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

std::string to_string(const WorkKey& k) {
  return fmt::format("{}/{}/{}/{}", to_string(k.language), k.item_id, k.generator_model, k.level.to_string());
}

WorkKey key_of(const Explanation& r) { return {r.language, r.item_id, r.generator_model, r.level}; }
WorkKey key_of(const MaskReport& r) { return {r.language, r.item_id, r.generator_model, r.level}; }
WorkKey key_of(const ScoreResult& r) { return {r.language, r.item_id, r.generator_model, r.level}; }
WorkKey key_of(const SimilarityRecord& r) { return {r.language, r.item_id, r.generator_model, r.level}; }
WorkKey key_of(const AggregateCell& r) { return {r.language, "", r.generator_model, r.level}; }

namespace {

// Field decoding helpers; errors name the offending column.
struct RowReader {
  const csv::Row& row;
  const std::vector<std::string>& header;
  std::size_t i = 0;

  const std::string& next() { return row[i++]; }
  [[noreturn]] void fail(std::string_view what) const {
    throw StoreError(fmt::format("bad {} in column '{}': '{}'", what, header[i - 1], row[i - 1]));
  }
  std::string str() { return next(); }
  Language language() {
    auto v = parse_language(next());
    if (!v) fail("language");
    return *v;
  }
  Level level() {
    auto v = Level::parse(next());
    if (!v) fail("level");
    return *v;
  }
  Label label() {
    auto v = parse_label(next());
    if (!v) fail("label");
    return *v;
  }
  std::optional<Label> opt_label() {
    if (row[i].empty()) {
      ++i;
      return std::nullopt;
    }
    return label();
  }
  std::size_t count() {
    long long v = 0;
    try {
      v = csv::parse_int(next());
    } catch (const std::runtime_error&) {
      fail("integer");
    }
    if (v < 0) fail("count");
    return static_cast<std::size_t>(v);
  }
  double real() {
    try {
      return csv::parse_double(next());
    } catch (const std::runtime_error&) {
      fail("number");
    }
  }
  std::optional<double> opt_real() {
    if (row[i].empty()) {
      ++i;
      return std::nullopt;
    }
    return real();
  }
  bool boolean() {
    try {
      return csv::parse_bool(next());
    } catch (const std::runtime_error&) {
      fail("boolean");
    }
  }
  template <typename E>
  E enumeration(std::optional<E> (*parse)(std::string_view)) {
    auto v = parse(next());
    if (!v) fail("value");
    return *v;
  }
};

std::string str(Language l) { return std::string(to_string(l)); }
std::string num(std::size_t n) { return std::to_string(n); }

template <typename T>
struct Codec;

template <>
struct Codec<Explanation> {
  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"run_id",        "item_id",       "language",     "generator_model",
                                            "level",         "word_count",    "length_status", "masking",
                                            "parse_status",  "generator_label", "attempts",   "text"};
    return h;
  }
  static csv::Row to_row(const Explanation& r) {
    return {r.run_id,
            r.item_id,
            str(r.language),
            r.generator_model,
            r.level.to_string(),
            num(r.word_count),
            std::string(to_string(r.length_status)),
            std::string(to_string(r.masking)),
            std::string(to_string(r.parse_status)),
            r.generator_label ? std::string(1, to_char(*r.generator_label)) : std::string(),
            std::to_string(r.attempts),
            r.text};
  }
  static Explanation from_row(RowReader& in) {
    Explanation r;
    r.run_id = in.str();
    r.item_id = in.str();
    r.language = in.language();
    r.generator_model = in.str();
    r.level = in.level();
    r.word_count = in.count();
    r.length_status = in.enumeration(parse_length_status);
    r.masking = in.enumeration(parse_masking);
    r.parse_status = in.enumeration(parse_parse_status);
    r.generator_label = in.opt_label();
    r.attempts = static_cast<int>(in.count());
    r.text = in.str();
    return r;
  }
};

template <>
struct Codec<MaskReport> {
  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"run_id", "item_id",    "language",  "generator_model",
                                            "level",  "label_hits", "text_hits", "masked_text"};
    return h;
  }
  static csv::Row to_row(const MaskReport& r) {
    return {r.run_id,           r.item_id,          str(r.language), r.generator_model, r.level.to_string(),
            num(r.label_hits), num(r.text_hits), r.masked_text};
  }
  static MaskReport from_row(RowReader& in) {
    MaskReport r;
    r.run_id = in.str();
    r.item_id = in.str();
    r.language = in.language();
    r.generator_model = in.str();
    r.level = in.level();
    r.label_hits = in.count();
    r.text_hits = in.count();
    r.masked_text = in.str();
    return r;
  }
};

template <>
struct Codec<ScoreResult> {
  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{
        "run_id",        "item_id",       "language",      "generator_model", "level",
        "option_prob_A", "option_prob_B", "option_prob_C", "option_prob_D",   "sufficiency",
        "predicted",     "correct",       "scorer_model",  "prompt_fingerprint"};
    return h;
  }
  static csv::Row to_row(const ScoreResult& r) {
    csv::Row row{r.run_id, r.item_id, str(r.language), r.generator_model, r.level.to_string()};
    for (double p : r.option_probs) row.push_back(csv::format_double(p));
    row.push_back(csv::format_double(r.sufficiency));
    row.emplace_back(1, to_char(r.predicted));
    row.emplace_back(r.correct ? "true" : "false");
    row.push_back(r.scorer_model);
    row.push_back(r.prompt_fingerprint);
    return row;
  }
  static ScoreResult from_row(RowReader& in) {
    ScoreResult r;
    r.run_id = in.str();
    r.item_id = in.str();
    r.language = in.language();
    r.generator_model = in.str();
    r.level = in.level();
    for (double& p : r.option_probs) p = in.real();
    r.sufficiency = in.real();
    r.predicted = in.label();
    r.correct = in.boolean();
    r.scorer_model = in.str();
    r.prompt_fingerprint = in.str();
    return r;
  }
};

template <>
struct Codec<SimilarityRecord> {
  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"run_id", "item_id", "language",           "generator_model",
                                            "level",  "cosine",  "enforced_reduction", "realized_reduction"};
    return h;
  }
  static csv::Row to_row(const SimilarityRecord& r) {
    return {r.run_id,
            r.item_id,
            str(r.language),
            r.generator_model,
            r.level.to_string(),
            csv::format_double(r.cosine),
            csv::format_double(r.enforced_reduction),
            csv::format_double(r.realized_reduction)};
  }
  static SimilarityRecord from_row(RowReader& in) {
    SimilarityRecord r;
    r.run_id = in.str();
    r.item_id = in.str();
    r.language = in.language();
    r.generator_model = in.str();
    r.level = in.level();
    r.cosine = in.real();
    r.enforced_reduction = in.real();
    r.realized_reduction = in.real();
    return r;
  }
};

template <>
struct Codec<AggregateCell> {
  static const std::vector<std::string>& header() {
    static const std::vector<std::string> h{"run_id",          "generator_model", "language", "level",     "accuracy",
                                            "mean_sufficiency", "mean_similarity", "n_items",  "n_excluded"};
    return h;
  }
  static csv::Row to_row(const AggregateCell& r) {
    return {r.run_id,
            r.generator_model,
            str(r.language),
            r.level.to_string(),
            csv::format_double(r.accuracy),
            csv::format_double(r.mean_sufficiency),
            r.mean_similarity ? csv::format_double(*r.mean_similarity) : std::string(),
            num(r.n_items),
            num(r.n_excluded)};
  }
  static AggregateCell from_row(RowReader& in) {
    AggregateCell r;
    r.run_id = in.str();
    r.generator_model = in.str();
    r.language = in.language();
    r.level = in.level();
    r.accuracy = in.real();
    r.mean_sufficiency = in.real();
    r.mean_similarity = in.opt_real();
    r.n_items = in.count();
    r.n_excluded = in.count();
    return r;
  }
};

void write_all(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError(fmt::format("write {}: {}", path.string(), std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

class Fd {
 public:
  Fd(const fs::path& path, int flags) : fd_(::open(path.c_str(), flags | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw StoreError(fmt::format("open {}: {}", path.string(), std::strerror(errno)));
  }
  ~Fd() { ::close(fd_); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

}  // namespace

template <typename T>
const std::vector<std::string>& csv_header() {
  return Codec<T>::header();
}

template <typename T>
std::string format_records(std::span<const T> records) {
  std::string out = csv::format_row(Codec<T>::header());
  for (const auto& r : records) out += csv::format_row(Codec<T>::to_row(r));
  return out;
}

template <typename T>
std::vector<T> parse_records(std::string_view data, const std::string& source, LoadStats* stats) {
  LoadStats local;
  csv::ParseResult parsed;
  try {
    parsed = csv::parse(data);
  } catch (const std::runtime_error& e) {
    throw StoreError(source + ": " + e.what());
  }
  local.salvaged = parsed.partial_tail ? 1 : 0;
  std::vector<T> out;
  if (!parsed.rows.empty()) {
    const auto& header = Codec<T>::header();
    if (parsed.rows.front() != header) throw StoreError(source + ": unexpected CSV header");
    std::set<WorkKey> seen;
    for (std::size_t i = 1; i < parsed.rows.size(); ++i) {
      const auto& row = parsed.rows[i];
      if (row.size() != header.size()) {
        throw StoreError(fmt::format("{}: record {} has {} fields, expected {}", source, i, row.size(),
                                     header.size()));
      }
      RowReader reader{row, header};
      T record;
      try {
        record = Codec<T>::from_row(reader);
      } catch (const StoreError& e) {
        throw StoreError(fmt::format("{}: record {}: {}", source, i, e.what()));
      }
      if (!seen.insert(key_of(record)).second) {
        ++local.duplicates;
        continue;
      }
      out.push_back(std::move(record));
    }
  }
  local.records = out.size();
  if (stats) *stats = local;
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  fs::path tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
    write_all(fd.get(), data, tmp);
    ::fsync(fd.get());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("rename " + tmp.string() + ": " + ec.message());
}

template <typename T>
std::vector<T> load_records(const fs::path& file, LoadStats* stats) {
  if (!fs::exists(file)) {
    if (stats) *stats = {};
    return {};
  }
  return parse_records<T>(read_file(file), file.string(), stats);
}

#define SUFFBENCH_INSTANTIATE(T)                                                                      \
  template const std::vector<std::string>& csv_header<T>();                                         \
  template std::string format_records<T>(std::span<const T>);                                       \
  template std::vector<T> parse_records<T>(std::string_view, const std::string&, LoadStats*);       \
  template std::vector<T> load_records<T>(const fs::path&, LoadStats*);

SUFFBENCH_INSTANTIATE(Explanation)
SUFFBENCH_INSTANTIATE(MaskReport)
SUFFBENCH_INSTANTIATE(ScoreResult)
SUFFBENCH_INSTANTIATE(SimilarityRecord)
SUFFBENCH_INSTANTIATE(AggregateCell)

#undef SUFFBENCH_INSTANTIATE

RunStore::RunStore(fs::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)), mu_(std::make_unique<std::mutex>()) {}

RunStore::RunStore(RunStore&& other) noexcept = default;

std::string_view RunStore::file_name(Stage stage) {
  switch (stage) {
    case Stage::generate:
    case Stage::constrain: return "explanations.csv";
    case Stage::mask: return "masks.csv";
    case Stage::score: return "scores.csv";
    case Stage::similarity: return "similarity.csv";
    case Stage::aggregate: return "aggregates.csv";
  }
  return "";
}

std::optional<RunManifest> RunStore::read_manifest(const fs::path& dir) {
  fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
  return RunManifest::from_json(j);
}

RunStore RunStore::open(const fs::path& dir, const RunManifest& manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StoreError("cannot create " + dir.string() + ": " + ec.message());

  if (auto existing = read_manifest(dir)) {
    if (existing->identity_hash() != manifest.identity_hash()) {
      throw ManifestMismatch("store " + dir.string() + " was created with a different configuration (identity " +
                             existing->identity_hash().substr(0, 12) + ", requested " +
                             manifest.identity_hash().substr(0, 12) + ")");
    }
    if (existing->run_id != manifest.run_id) {
      throw ManifestMismatch("store " + dir.string() + " belongs to run '" + existing->run_id + "', not '" +
                             manifest.run_id + "'");
    }
    RunStore store(dir, *existing);
    store.repair();
    return store;
  }
  RunManifest fresh = manifest;
  if (fresh.created_at.empty()) fresh.created_at = utc_now();
  write_file_atomic(dir / "manifest.json", fresh.to_json().dump(2) + "\n");
  RunStore store(dir, std::move(fresh));
  store.repair();
  return store;
}

RunStore RunStore::open_existing(const fs::path& dir) {
  auto m = read_manifest(dir);
  if (!m) throw StoreError("no manifest.json in " + dir.string());
  return RunStore(dir, std::move(*m));
}

void RunStore::repair() {
  for (Stage stage : {Stage::generate, Stage::mask, Stage::score, Stage::similarity}) {
    fs::path path = file(stage);
    if (!fs::exists(path)) continue;
    std::string data = read_file(path);
    csv::ParseResult parsed;
    try {
      parsed = csv::parse(data);
    } catch (const std::runtime_error& e) {
      throw StoreError(path.string() + ": " + e.what());
    }
    if (parsed.partial_tail) {
      fs::resize_file(path, parsed.valid_bytes);
      ++salvaged_;
    }
  }
}

template <typename T>
void RunStore::append_record(Stage stage, const T& r) {
  if (r.run_id != manifest_.run_id) {
    throw StoreError("record run_id '" + r.run_id + "' does not match store run '" + manifest_.run_id + "'");
  }
  std::string line = csv::format_row(Codec<T>::to_row(r));
  fs::path path = file(stage);
  std::lock_guard lock(*mu_);
  Fd fd(path, O_WRONLY | O_CREAT | O_APPEND);
  if (::flock(fd.get(), LOCK_EX) != 0) throw StoreError("flock " + path.string() + ": " + std::strerror(errno));
  struct stat st {};
  if (::fstat(fd.get(), &st) != 0) throw StoreError("stat " + path.string() + ": " + std::strerror(errno));
  // Header and record go out in one write so a reader never sees a torn line.
  if (st.st_size == 0) line = csv::format_row(Codec<T>::header()) + line;
  write_all(fd.get(), line, path);
  ::fdatasync(fd.get());
}

void RunStore::append(const Explanation& r) { append_record(r.level == Level(0) ? Stage::generate : Stage::constrain, r); }
void RunStore::append(const MaskReport& r) { append_record(Stage::mask, r); }
void RunStore::append(const ScoreResult& r) { append_record(Stage::score, r); }
void RunStore::append(const SimilarityRecord& r) { append_record(Stage::similarity, r); }

void RunStore::write_aggregates(std::span<const AggregateCell> cells) {
  std::vector<AggregateCell> sorted(cells.begin(), cells.end());
  for (const auto& c : sorted) {
    if (c.run_id != manifest_.run_id) throw StoreError("aggregate cell from run '" + c.run_id + "'");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const AggregateCell& a, const AggregateCell& b) { return key_of(a) < key_of(b); });
  std::lock_guard lock(*mu_);
  write_file_atomic(file(Stage::aggregate), format_records<AggregateCell>(sorted));
}

std::vector<Explanation> RunStore::explanations() const { return load_records<Explanation>(file(Stage::generate)); }
std::vector<MaskReport> RunStore::masks() const { return load_records<MaskReport>(file(Stage::mask)); }
std::vector<ScoreResult> RunStore::scores() const { return load_records<ScoreResult>(file(Stage::score)); }
std::vector<SimilarityRecord> RunStore::similarities() const {
  return load_records<SimilarityRecord>(file(Stage::similarity));
}
std::vector<AggregateCell> RunStore::aggregates() const { return load_records<AggregateCell>(file(Stage::aggregate)); }

namespace {

template <typename T>
std::set<WorkKey> keys_of(const std::vector<T>& records) {
  std::set<WorkKey> keys;
  for (const auto& r : records) keys.insert(key_of(r));
  return keys;
}

}  // namespace

std::vector<WorkKey> RunStore::pending_work(Stage stage, std::span<const WorkKey> expected) const {
  std::set<WorkKey> done;
  switch (stage) {
    case Stage::generate:
    case Stage::constrain: done = keys_of(explanations()); break;
    case Stage::mask: done = keys_of(masks()); break;
    case Stage::score: done = keys_of(scores()); break;
    case Stage::similarity: done = keys_of(similarities()); break;
    case Stage::aggregate: done = keys_of(aggregates()); break;
  }
  std::set<WorkKey> pending;
  for (const auto& k : expected) {
    if (!done.contains(k)) pending.insert(k);
  }
  return {pending.begin(), pending.end()};
}

namespace {

template <typename T>
void canonicalize_file(const fs::path& path) {
  if (!fs::exists(path)) return;
  auto records = load_records<T>(path);
  std::stable_sort(records.begin(), records.end(),
                   [](const T& a, const T& b) { return key_of(a) < key_of(b); });
  write_file_atomic(path, format_records<T>(records));
}

}  // namespace

void RunStore::canonicalize() {
  std::lock_guard lock(*mu_);
  canonicalize_file<Explanation>(file(Stage::generate));
  canonicalize_file<MaskReport>(file(Stage::mask));
  canonicalize_file<ScoreResult>(file(Stage::score));
  canonicalize_file<SimilarityRecord>(file(Stage::similarity));
  canonicalize_file<AggregateCell>(file(Stage::aggregate));
}

}  // namespace suffbench
