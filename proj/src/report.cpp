#include "suffbench/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "suffbench/csv.hpp"
#include "suffbench/error.hpp"
#include "suffbench/scorer.hpp"

namespace suffbench {

namespace fs = std::filesystem;

std::optional<ReportKind> parse_report_kind(std::string_view s) {
  if (s == "tables") return ReportKind::tables;
  if (s == "heatmap") return ReportKind::heatmap;
  if (s == "curves") return ReportKind::curves;
  return std::nullopt;
}

std::string format_percent(double p) { return fmt::format("{:.2f}", p * 100.0); }

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string file_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
              c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

fs::path put(const fs::path& dir, const std::string& name, const std::string& data) {
  fs::path p = dir / name;
  write_file_atomic(p, data);
  return p;
}

using CellMap = std::map<std::tuple<std::string, Language, Level>, const AggregateCell*>;

CellMap index_cells(const std::vector<AggregateCell>& cells) {
  CellMap m;
  for (const auto& c : cells) m[{c.generator_model, c.language, c.level}] = &c;
  return m;
}

std::vector<fs::path> write_tables(const std::vector<AggregateCell>& cells, const fs::path& dir) {
  std::set<Language> languages;
  std::set<std::string> models;
  for (const auto& c : cells) {
    languages.insert(c.language);
    if (c.generator_model != kBaselineModel) models.insert(c.generator_model);
  }
  CellMap idx = index_cells(cells);
  auto find = [&](const std::string& model, Language lang, Level level) -> const AggregateCell* {
    auto it = idx.find({model, lang, level});
    return it == idx.end() ? nullptr : it->second;
  };
  auto pct = [](const AggregateCell* c, bool accuracy) {
    if (!c) return std::string("-");
    return format_percent(accuracy ? c->accuracy : c->mean_sufficiency);
  };

  std::vector<fs::path> written;

  // Baseline accuracy and sufficiency per language.
  std::string t1 = fmt::format("{:<10}{:>12}{:>14}{:>10}\n", "language", "accuracy", "sufficiency", "n_items");
  csv::Row h1{"language", "accuracy_pct", "sufficiency_pct", "n_items"};
  std::string c1 = csv::format_row(h1);
  for (Language lang : languages) {
    const AggregateCell* c = find(std::string(kBaselineModel), lang, Level::noexp());
    std::string n = c ? std::to_string(c->n_items) : "0";
    t1 += fmt::format("{:<10}{:>12}{:>14}{:>10}\n", to_string(lang), pct(c, true), pct(c, false), n);
    c1 += csv::format_row({std::string(to_string(lang)), pct(c, true), pct(c, false), n});
  }
  written.push_back(put(dir, "table1_baseline.txt", t1));
  written.push_back(put(dir, "table1_baseline.csv", c1));

  // Full-explanation (level 0) accuracy and sufficiency per model.
  std::size_t width = 16;
  for (const auto& m : models) width = std::max(width, m.size() + 2);
  std::string t2 = fmt::format("{:<{}}", "model", width);
  csv::Row h2{"generator_model"};
  for (Language lang : languages) {
    auto l = std::string(to_string(lang));
    t2 += fmt::format("{:>14}{:>16}", l + "_accuracy", l + "_sufficiency");
    h2.push_back(l + "_accuracy_pct");
    h2.push_back(l + "_sufficiency_pct");
  }
  t2 += "\n";
  std::string c2 = csv::format_row(h2);
  for (const auto& model : models) {
    t2 += fmt::format("{:<{}}", model, width);
    csv::Row row{model};
    for (Language lang : languages) {
      const AggregateCell* c = find(model, lang, Level(0));
      t2 += fmt::format("{:>14}{:>16}", pct(c, true), pct(c, false));
      row.push_back(pct(c, true));
      row.push_back(pct(c, false));
    }
    t2 += "\n";
    c2 += csv::format_row(row);
  }
  written.push_back(put(dir, "table2_full_explanation.txt", t2));
  written.push_back(put(dir, "table2_full_explanation.csv", c2));
  return written;
}

std::vector<fs::path> write_curves(const std::vector<AggregateCell>& cells, const fs::path& dir) {
  std::set<Language> languages;
  std::set<std::string> models;
  for (const auto& c : cells) {
    languages.insert(c.language);
    if (c.generator_model != kBaselineModel) models.insert(c.generator_model);
  }
  CellMap idx = index_cells(cells);
  std::vector<fs::path> written;
  for (const auto& model : models) {
    std::string out = csv::format_row({"language", "level", "accuracy", "sufficiency"});
    for (Language lang : languages) {
      auto row = [&](const AggregateCell& c) {
        out += csv::format_row({std::string(to_string(lang)), c.level.to_string(), csv::format_double(c.accuracy),
                                csv::format_double(c.mean_sufficiency)});
      };
      if (auto it = idx.find({std::string(kBaselineModel), lang, Level::noexp()}); it != idx.end()) row(*it->second);
      for (int v = 0; v <= 90; v += 10) {
        if (auto it = idx.find({model, lang, Level(v)}); it != idx.end()) row(*it->second);
      }
    }
    written.push_back(put(dir, "curves_" + file_safe(model) + ".csv", out));
  }
  return written;
}

std::vector<fs::path> write_heatmaps(const std::vector<SimilarityRecord>& records, const fs::path& dir) {
  std::map<Language, std::vector<SimilarityRecord>> by_lang;
  for (const auto& r : records) by_lang[r.language].push_back(r);
  std::vector<fs::path> written;
  for (const auto& [lang, recs] : by_lang) {
    HeatmapMatrix m = heatmap_matrix(recs);
    auto l = std::string(to_string(lang));
    written.push_back(put(dir, "heatmap_" + l + ".csv", heatmap_csv(m)));
    written.push_back(
        put(dir, "heatmap_" + l + ".svg", render_heatmap_svg(m, "Mean cosine similarity to the level-0 explanation (" + l + ")")));
  }
  return written;
}

}  // namespace

std::string heatmap_csv(const HeatmapMatrix& m) {
  csv::Row header{"generator_model"};
  for (int v : m.levels) header.push_back(std::to_string(v));
  std::string out = csv::format_row(header);
  for (std::size_t i = 0; i < m.models.size(); ++i) {
    csv::Row row{m.models[i]};
    for (const auto& cell : m.values[i]) row.push_back(cell ? csv::format_double(*cell) : std::string());
    out += csv::format_row(row);
  }
  return out;
}

std::string render_heatmap_svg(const HeatmapMatrix& m, std::string_view title) {
  constexpr int cell_w = 56, cell_h = 28, top = 48, bottom = 24;
  std::size_t label_chars = 8;
  for (const auto& model : m.models) label_chars = std::max(label_chars, model.size());
  const int left = static_cast<int>(label_chars) * 7 + 16;
  const int width = left + cell_w * static_cast<int>(m.levels.size()) + 16;
  const int height = top + cell_h * static_cast<int>(m.models.size()) + bottom;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      width, height);
  svg += fmt::format("  <text x=\"{}\" y=\"16\" font-size=\"13\">{}</text>\n", left, xml_escape(title));
  for (std::size_t j = 0; j < m.levels.size(); ++j) {
    svg += fmt::format("  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}%</text>\n",
                       left + cell_w * static_cast<int>(j) + cell_w / 2, top - 8, m.levels[j]);
  }
  for (std::size_t i = 0; i < m.models.size(); ++i) {
    const int y = top + cell_h * static_cast<int>(i);
    svg += fmt::format("  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6, y + cell_h / 2 + 4,
                       xml_escape(m.models[i]));
    for (std::size_t j = 0; j < m.levels.size(); ++j) {
      const int x = left + cell_w * static_cast<int>(j);
      const auto& cell = m.values[i][j];
      if (!cell) {
        svg += fmt::format(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\" "
            "data-model=\"{}\" data-level=\"{}\" data-missing=\"true\"/>\n",
            x, y, cell_w, cell_h, xml_escape(m.models[i]), m.levels[j]);
        continue;
      }
      // Negative similarities render as white.
      const double shade = std::clamp(*cell, 0.0, 1.0);
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - shade)));
      svg += fmt::format(
          "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\" data-model=\"{}\" "
          "data-level=\"{}\" data-value=\"{}\"/>\n",
          x, y, cell_w, cell_h, g, g, g, xml_escape(m.models[i]), m.levels[j], csv::format_double(*cell));
      svg += fmt::format("  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">{:.2f}</text>\n",
                         x + cell_w / 2, y + cell_h / 2 + 4, g < 128 ? "#fff" : "#000", *cell);
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<fs::path> write_report(const RunStore& store, ReportKind kind) {
  if (!fs::exists(store.file(Stage::aggregate))) {
    throw StoreError("no aggregates in " + store.dir().string() + "; run the aggregate stage first");
  }
  fs::path dir = store.dir() / "reports";
  fs::create_directories(dir);
  switch (kind) {
    case ReportKind::tables: return write_tables(store.aggregates(), dir);
    case ReportKind::curves: return write_curves(store.aggregates(), dir);
    case ReportKind::heatmap: return write_heatmaps(store.similarities(), dir);
  }
  return {};
}

}  // namespace suffbench
